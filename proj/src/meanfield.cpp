#include "qrabi/meanfield.hpp"

#include <algorithm>
#include <string>

#include "qrabi/error.hpp"
#include "qrabi/ode.hpp"

namespace qrabi::meanfield {

namespace {

constexpr double kMarginalBand = 1e-9;

std::array<Complex, 2> eigenvalues_2x2(const Eigen::Matrix2d& j) {
    const double half_tr = 0.5 * j.trace();
    const Complex disc = std::sqrt(Complex(half_tr * half_tr - j.determinant(), 0.0));
    return {half_tr + disc, half_tr - disc};
}

bool is_origin(const PhasePoint& p) { return p.x == 0.0 && p.y == 0.0; }

double residual_norm(const PhasePoint& f) { return std::max(std::abs(f.x), std::abs(f.y)); }

} // namespace

void MeanFieldParams::validate() const {
    if (!(g >= 0.0) || !std::isfinite(g))
        fail(ErrorKind::InvalidParams, "g must be finite and non-negative");
    if (!(h >= 0.0) || !std::isfinite(h))
        fail(ErrorKind::InvalidParams, "h must be finite and non-negative");
    if (eta && !(*eta > 0.0 && std::isfinite(*eta)))
        fail(ErrorKind::InvalidParams, "eta must be finite and positive when given");
}

SpinState SpinState::dressed_down(double g, double x) {
    const double s = std::sqrt(1.0 + 4.0 * g * g * x * x);
    return {Complex(-g * x / s, 0.0), -1.0 / s};
}

PhasePoint reduced_rhs(const PhasePoint& p, const MeanFieldParams& params) {
    params.validate();
    if (params.eta)
        fail(ErrorKind::Configuration,
             "reduced_rhs is the infinite-eta system; use full_rhs when eta is finite");
    return reduced_field(p, params.g, params.h);
}

FullDerivative full_rhs(const PhasePoint& p, const SpinState& s, const MeanFieldParams& params) {
    params.validate();
    if (!params.eta)
        fail(ErrorKind::Configuration, "full_rhs needs a finite eta; use reduced_rhs instead");
    const double eta = *params.eta;
    const double g = params.g, h = params.h;
    const double r2 = p.x * p.x + p.y * p.y;
    FullDerivative d;
    d.dx = p.y - 2.0 * h * r2 * p.x;
    d.dy = -p.x - g * s.sp.real() - 2.0 * h * r2 * p.y;
    d.dsp = eta * (kI * s.sp - kI * (g * p.x * s.sz));
    d.dsz = eta * 4.0 * g * p.x * s.sp.imag();
    return d;
}

Eigen::Matrix2d jacobian(const PhasePoint& p, const MeanFieldParams& params) {
    params.validate();
    const double g2 = params.g * params.g, h = params.h;
    const double x = p.x, y = p.y;
    const double s2 = 1.0 + 4.0 * g2 * x * x;
    Eigen::Matrix2d j;
    j << -2.0 * h * (3.0 * x * x + y * y), 1.0 - 4.0 * h * x * y,
        -1.0 + g2 / (s2 * std::sqrt(s2)) - 4.0 * h * x * y, -2.0 * h * (x * x + 3.0 * y * y);
    return j;
}

const char* to_string(Stability s) {
    switch (s) {
    case Stability::Stable: return "stable";
    case Stability::Unstable: return "unstable";
    case Stability::MarginalLinearization: return "marginal-linearization";
    case Stability::StableByLyapunov: return "stable-by-lyapunov";
    }
    return "unknown";
}

double lyapunov_value(double x, double y, double g) {
    return 0.5 * (x * x + y * y) - 0.25 * (std::sqrt(1.0 + 4.0 * g * g * x * x) - 1.0);
}

double lyapunov_rate(double x, double y, double g, double h) {
    const double r2 = x * x + y * y;
    const double s = std::sqrt(1.0 + 4.0 * g * g * x * x);
    return -2.0 * h * r2 * y * y + 2.0 * h * r2 * (g * g / s - 1.0) * x * x;
}

LyapunovCertificate lyapunov_certificate(const MeanFieldParams& params, double grid_radius,
                                         int grid_steps) {
    params.validate();
    if (!(params.g < 1.0))
        fail(ErrorKind::OutOfDomain, "the Lyapunov certificate only applies for g < 1");
    if (!(grid_radius > 0.0) || grid_steps < 2)
        fail(ErrorKind::Domain, "certificate grid needs a positive radius and >= 2 steps");

    LyapunovCertificate cert;
    cert.min_value = std::numeric_limits<double>::infinity();
    cert.max_value = -std::numeric_limits<double>::infinity();
    cert.max_rate = -std::numeric_limits<double>::infinity();
    const double step = 2.0 * grid_radius / (grid_steps - 1);
    for (int i = 0; i < grid_steps; ++i) {
        for (int k = 0; k < grid_steps; ++k) {
            // Symmetric index arithmetic keeps the centre sample exactly at zero.
            const double x = (2 * i - (grid_steps - 1)) * 0.5 * step;
            const double y = (2 * k - (grid_steps - 1)) * 0.5 * step;
            if (x == 0.0 && y == 0.0)
                continue;
            const double v = lyapunov_value(x, y, params.g);
            const double vdot = lyapunov_rate(x, y, params.g, params.h);
            cert.min_value = std::min(cert.min_value, v);
            cert.max_value = std::max(cert.max_value, v);
            cert.max_rate = std::max(cert.max_rate, vdot);
            ++cert.samples;
        }
    }
    cert.passes = cert.samples > 0 && cert.min_value > 0.0 && cert.max_rate < 0.0;
    return cert;
}

Stability classify(const std::array<Complex, 2>& eigenvalues, const PhasePoint& at,
                   const MeanFieldParams& params) {
    const double max_re = std::max(eigenvalues[0].real(), eigenvalues[1].real());
    if (max_re > kMarginalBand)
        return Stability::Unstable;
    if (max_re < -kMarginalBand)
        return Stability::Stable;
    if (is_origin(at) && params.g < 1.0 &&
        lyapunov_certificate(params, 2.0, 101).passes)
        return Stability::StableByLyapunov;
    return Stability::MarginalLinearization;
}

std::vector<FixedPointReport> find_fixed_points(const MeanFieldParams& params,
                                                const FixedPointSearch& search) {
    params.validate();
    if (params.eta)
        fail(ErrorKind::Configuration, "fixed points are searched in the infinite-eta system");
    if (search.grid < 2 || !(search.bound > 0.0))
        fail(ErrorKind::Domain, "seed grid needs >= 2 points per axis and a positive bound");

    const auto polish = [&](PhasePoint p) -> std::optional<PhasePoint> {
        for (int it = 0; it < search.max_newton_iterations; ++it) {
            const PhasePoint f = reduced_field(p, params.g, params.h);
            const Eigen::Matrix2d j = jacobian(p, params);
            if (!(std::abs(j.determinant()) > 1e-300))
                return std::nullopt;
            const Eigen::Vector2d dp = j.fullPivLu().solve(Eigen::Vector2d(f.x, f.y));
            // A small residual alone is not enough: near the degenerate origin
            // at g = 1 the field is cubic and Newton only creeps toward it.
            if (residual_norm(f) < search.residual_tol && dp.norm() <= 1e-8 * p.abs()) {
                // one more step usually lands on the floating-point root
                const PhasePoint q{p.x - dp(0), p.y - dp(1)};
                if (residual_norm(reduced_field(q, params.g, params.h)) <= residual_norm(f))
                    p = q;
                return p;
            }
            p.x -= dp(0);
            p.y -= dp(1);
            if (!std::isfinite(p.x) || !std::isfinite(p.y) || p.abs() > 1e3)
                return std::nullopt;
        }
        return std::nullopt;
    };

    std::vector<PhasePoint> roots{{0.0, 0.0}};
    const auto known = [&](const PhasePoint& p) {
        return std::any_of(roots.begin(), roots.end(), [&](const PhasePoint& q) {
            return std::hypot(p.x - q.x, p.y - q.y) < search.dedup_distance;
        });
    };
    const double step = 2.0 * search.bound / (search.grid - 1);
    for (int i = 0; i < search.grid; ++i) {
        for (int k = 0; k < search.grid; ++k) {
            const PhasePoint seed{-search.bound + i * step, -search.bound + k * step};
            const auto root = polish(seed);
            if (!root || known(*root))
                continue;
            roots.push_back(*root);
            // The field is odd, so the mirrored point is a root as well.
            const PhasePoint mirror{-root->x, -root->y};
            if (!known(mirror))
                roots.push_back(mirror);
        }
    }

    std::vector<FixedPointReport> reports;
    reports.reserve(roots.size());
    for (const PhasePoint& p : roots) {
        FixedPointReport r;
        r.location = p;
        r.residual = residual_norm(reduced_field(p, params.g, params.h));
        r.jacobian_eigenvalues = eigenvalues_2x2(jacobian(p, params));
        r.stability = classify(r.jacobian_eigenvalues, p, params);
        reports.push_back(r);
    }
    // Origin first, then pairs by |alpha| with the x >= 0 member leading.
    std::stable_sort(reports.begin() + 1, reports.end(),
                     [](const FixedPointReport& a, const FixedPointReport& b) {
                         const double ra = a.location.abs(), rb = b.location.abs();
                         if (std::abs(ra - rb) > 1e-9)
                             return ra < rb;
                         return a.location.x > b.location.x;
                     });
    return reports;
}

namespace {

bool leads_pair(const PhasePoint& p) { return p.x > 0.0 || (p.x == 0.0 && p.y >= 0.0); }

SweepRow to_row(const MeanFieldParams& params, const FixedPointReport& r) {
    SweepRow row;
    row.g = params.g;
    row.h = params.h;
    row.location = r.location;
    row.abs_alpha = r.location.abs();
    row.stability = r.stability;
    row.eigenvalues = r.jacobian_eigenvalues;
    row.residual = r.residual;
    return row;
}

} // namespace

SweepRow select_order_parameter(const MeanFieldParams& params, const FixedPointSearch& search) {
    const auto reports = find_fixed_points(params, search);
    const FixedPointReport* best = nullptr;
    for (const auto& r : reports) {
        const bool stable =
            r.stability == Stability::Stable || r.stability == Stability::StableByLyapunov;
        if (!stable)
            continue;
        if (!best || r.location.abs() > best->location.abs() + 1e-12 ||
            (std::abs(r.location.abs() - best->location.abs()) <= 1e-12 &&
             leads_pair(r.location) && !leads_pair(best->location)))
            best = &r;
    }
    return to_row(params, best ? *best : reports.front());
}

std::vector<SweepRow> order_parameter_sweep(const std::vector<double>& g_values,
                                            const std::vector<double>& h_values,
                                            const FixedPointSearch& search) {
    std::vector<SweepRow> rows;
    rows.reserve(g_values.size() * h_values.size());
    for (double g : g_values)
        for (double h : h_values)
            rows.push_back(select_order_parameter({g, h, std::nullopt}, search));
    return rows;
}

std::vector<double> linspace(double lo, double hi, int count) {
    if (count < 1)
        fail(ErrorKind::Domain, "linspace needs at least one point");
    std::vector<double> v(static_cast<std::size_t>(count));
    if (count == 1) {
        v[0] = lo;
        return v;
    }
    for (int i = 0; i < count; ++i)
        v[static_cast<std::size_t>(i)] = lo + (hi - lo) * i / (count - 1);
    v.back() = hi;
    return v;
}

namespace {

template <int N, typename Rhs, typename Unpack>
Trajectory run_integration(Rhs&& rhs, Unpack&& unpack, const Eigen::Matrix<double, N, 1>& y0,
                           double t_max, const IntegrateOptions& opt, bool track_spin) {
    using State = Eigen::Matrix<double, N, 1>;
    Trajectory traj;
    const int samples = std::max(opt.samples, 2);
    traj.times.reserve(static_cast<std::size_t>(samples));
    traj.points.reserve(static_cast<std::size_t>(samples));

    const auto record = [&](double t, const State& y) {
        traj.times.push_back(t);
        const auto [p, s] = unpack(y);
        traj.points.push_back(p);
        if (track_spin)
            traj.spins.push_back(s);
    };
    record(0.0, y0);
    const double norm0 = track_spin ? unpack(y0).second.norm_squared() : 0.0;

    int next = 1;
    const auto sample_time = [&](int k) {
        return k == samples - 1 ? t_max : t_max * static_cast<double>(k) / (samples - 1);
    };
    ode::Tolerances tol;
    tol.rtol = opt.rtol;
    tol.atol = opt.atol;
    tol.max_step = opt.max_step;
    ode::integrate_dop853<State>(
        rhs, 0.0, y0, t_max, tol, [&](const ode::DenseStep<State>& step, const State& y_end) {
            ++traj.steps;
            if (track_spin)
                traj.max_spin_norm_drift = std::max(
                    traj.max_spin_norm_drift, std::abs(unpack(y_end).second.norm_squared() - norm0));
            const double t_end = step.t0 + step.h;
            while (next < samples && sample_time(next) <= t_end) {
                const double ts = sample_time(next);
                record(ts, ts == t_end ? y_end : step(ts));
                ++next;
            }
            return true;
        });
    traj.final_abs_alpha = traj.points.back().abs();
    return traj;
}

} // namespace

Trajectory integrate(const InitialCondition& initial, const MeanFieldParams& params,
                     double t_max, RhsChoice choice, const IntegrateOptions& options) {
    params.validate();
    if (!(t_max > 0.0))
        fail(ErrorKind::Domain, "t_max must be positive");

    if (choice == RhsChoice::Reduced) {
        if (params.eta)
            fail(ErrorKind::Configuration, "reduced integration requires eta to be absent");
        using State = Eigen::Matrix<double, 2, 1>;
        const double g = params.g, h = params.h;
        const auto rhs = [g, h](double, const State& y) {
            const PhasePoint d = reduced_field(PhasePoint{y(0), y(1)}, g, h);
            return State(d.x, d.y);
        };
        const auto unpack = [](const State& y) {
            return std::pair{PhasePoint{y(0), y(1)}, SpinState{}};
        };
        return run_integration<2>(rhs, unpack, State(initial.alpha.x, initial.alpha.y), t_max,
                                  options, false);
    }

    if (!params.eta)
        fail(ErrorKind::Configuration, "full integration requires a finite eta");
    using State = Eigen::Matrix<double, 5, 1>;
    const auto unpack = [](const State& y) {
        return std::pair{PhasePoint{y(0), y(1)}, SpinState{Complex(y(2), y(3)), y(4)}};
    };
    const auto rhs = [&params, &unpack](double, const State& y) {
        const auto [p, s] = unpack(y);
        const FullDerivative d = full_rhs(p, s, params);
        State out;
        out << d.dx, d.dy, d.dsp.real(), d.dsp.imag(), d.dsz;
        return out;
    };
    State y0;
    y0 << initial.alpha.x, initial.alpha.y, initial.spin.sp.real(), initial.spin.sp.imag(),
        initial.spin.sz;
    return run_integration<5>(rhs, unpack, y0, t_max, options, true);
}

} // namespace qrabi::meanfield
