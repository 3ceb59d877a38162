#pragma once

// Semiclassical dynamics of the order parameter alpha = <a>/sqrt(eta) = x + i y
// in renormalized time t = omega0 * time.

#include <array>
#include <cmath>
#include <limits>
#include <optional>
#include <vector>

#include "qrabi/types.hpp"

namespace qrabi::meanfield {

struct MeanFieldParams {
    double g = 0.0;
    double h = 0.0;
    std::optional<double> eta; // absent = infinite frequency ratio

    // Throws InvalidParams for g < 0, h < 0 or eta <= 0.
    void validate() const;
};

template <typename Real>
struct PhasePointT {
    Real x{};
    Real y{};

    Real abs() const {
        using std::sqrt;
        return sqrt(x * x + y * y);
    }
};
using PhasePoint = PhasePointT<double>;

// <sigma_+> and <sigma_z>; <sigma_x> = 2 Re sp, <sigma_y> = 2 Im sp.
struct SpinState {
    Complex sp{0.0, 0.0};
    double sz = -1.0;

    double norm_squared() const { return 4.0 * std::norm(sp) + sz * sz; }

    static SpinState down() { return {}; }
    // Lower eigenstate of the instantaneous spin Hamiltonian at field x.
    static SpinState dressed_down(double g, double x);
};

// Vector field of the two-variable system obtained after eliminating the spin:
//   dx = y - 2h r^2 x,  dy = -x + g^2 x / sqrt(1 + 4 g^2 x^2) - 2h r^2 y.
template <typename Real>
PhasePointT<Real> reduced_field(const PhasePointT<Real>& p, Real g, Real h) {
    using std::sqrt;
    const Real r2 = p.x * p.x + p.y * p.y;
    const Real g2 = g * g;
    return {p.y - 2 * h * r2 * p.x,
            -p.x + g2 * p.x / sqrt(1 + 4 * g2 * p.x * p.x) - 2 * h * r2 * p.y};
}

// Configuration error if params.eta is set.
PhasePoint reduced_rhs(const PhasePoint& p, const MeanFieldParams& params);

struct FullDerivative {
    double dx = 0.0;
    double dy = 0.0;
    Complex dsp{0.0, 0.0};
    double dsz = 0.0;
};

// Three-variable system (order parameter plus spin) at finite eta.
// Configuration error if params.eta is absent.
FullDerivative full_rhs(const PhasePoint& p, const SpinState& s, const MeanFieldParams& params);

Eigen::Matrix2d jacobian(const PhasePoint& p, const MeanFieldParams& params);

enum class Stability { Stable, Unstable, MarginalLinearization, StableByLyapunov };

const char* to_string(Stability s);

struct FixedPointReport {
    PhasePoint location;
    std::array<Complex, 2> jacobian_eigenvalues;
    Stability stability = Stability::Unstable;
    double residual = 0.0;
};

struct FixedPointSearch {
    double bound = 3.0;
    int grid = 41;
    double residual_tol = 1e-12;
    double dedup_distance = 1e-6;
    int max_newton_iterations = 100;
};

// Newton roots of the reduced field seeded on a uniform grid; the origin comes
// first, nontrivial roots follow in (+, -) pairs ordered by |alpha|.
std::vector<FixedPointReport> find_fixed_points(const MeanFieldParams& params,
                                                const FixedPointSearch& search = {});

Stability classify(const std::array<Complex, 2>& eigenvalues, const PhasePoint& at,
                   const MeanFieldParams& params);

double lyapunov_value(double x, double y, double g);
double lyapunov_rate(double x, double y, double g, double h);

struct LyapunovCertificate {
    double min_value = 0.0;
    double max_value = 0.0;
    double max_rate = 0.0;
    long samples = 0;
    bool passes = false;
};

// Samples V and dV/dt on a grid_steps x grid_steps grid over [-R, R]^2 with the
// origin removed. OutOfDomain unless g < 1.
LyapunovCertificate lyapunov_certificate(const MeanFieldParams& params, double grid_radius,
                                         int grid_steps);

enum class RhsChoice { Reduced, Full };

struct InitialCondition {
    PhasePoint alpha;
    SpinState spin = SpinState::down();
};

struct IntegrateOptions {
    double rtol = 1e-9;
    double atol = 1e-11;
    int samples = 1001; // dense-output points including both ends
    double max_step = std::numeric_limits<double>::infinity();
};

struct Trajectory {
    std::vector<double> times;
    std::vector<PhasePoint> points;
    std::vector<SpinState> spins; // empty for the reduced system
    long steps = 0;
    double max_spin_norm_drift = 0.0; // over every accepted step
    double final_abs_alpha = 0.0;
};

Trajectory integrate(const InitialCondition& initial, const MeanFieldParams& params,
                     double t_max, RhsChoice rhs, const IntegrateOptions& options = {});

struct SweepRow {
    double g = 0.0;
    double h = 0.0;
    PhasePoint location;
    double abs_alpha = 0.0;
    Stability stability = Stability::Stable;
    std::array<Complex, 2> eigenvalues;
    double residual = 0.0;
};

// The stable fixed point with largest |alpha| (the x >= 0 member of a pair);
// falls back to the origin when nothing is stable.
SweepRow select_order_parameter(const MeanFieldParams& params,
                                const FixedPointSearch& search = {});

// Row-major over (g, h) with g varying slowest.
std::vector<SweepRow> order_parameter_sweep(const std::vector<double>& g_values,
                                            const std::vector<double>& h_values,
                                            const FixedPointSearch& search = {});

std::vector<double> linspace(double lo, double hi, int count);

} // namespace qrabi::meanfield
