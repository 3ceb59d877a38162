#pragma once

// Passive error correction of a cat qubit stored in the degenerate steady
// states of the effective model at g = sqrt(2).

#include <cmath>
#include <numbers>
#include <vector>

#include "qrabi/hilbert.hpp"
#include "qrabi/liouvillian.hpp"

namespace qrabi::catqec {

inline const double kTargetCoupling = std::numbers::sqrt2;

// Amplitude of the stationary coherent states |+-beta> of the effective model.
// |beta| = sqrt(zeta g^2)/2; the phase pi/4 comes from rewriting
// -i[H, .] + kappa D[a^2] as kappa D[a^2 - i zeta/2] at g = sqrt(2).
Complex stationary_amplitude(double g, double zeta);

struct CodeCoefficients {
    Complex c_e{std::numbers::sqrt2 / 2.0, 0.0};
    Complex c_o{std::numbers::sqrt2 / 2.0, 0.0};

    // InvalidState unless |c_e|^2 + |c_o|^2 = 1 to 1e-10.
    void validate() const;
};

struct CatQubitCode {
    Complex beta;
    CodeCoefficients coefficients;

    static CatQubitCode make(double g, double zeta, const CodeCoefficients& c);

    // c_e |beta>_e + c_o |beta>_o on the given space.
    StateVector state(const FockSpace& space) const;
};

struct ProtocolConfig {
    double g_target = kTargetCoupling;
    double g_err = 0.5;
    double tau = 1.0;
    double t_corr = 1.0;
    double zeta = 30.0;
    Index fock_dim = 0; // 0 = protocol_fock_dim(max(g_target, g_err), zeta)

    // InvalidParams naming the offending field.
    void validate() const;
    Index resolved_fock_dim() const;
};

// ceil(|beta|^2 + 10 |beta| + 10) with |beta|^2 = zeta g^2 / 4. The generic
// rule (6 |beta|) leaves a tail that the N^2-weighted two-photon loss turns
// into a stationarity defect of order 1e-5; four more widths bring it below 1e-8.
Index protocol_fock_dim(double g_max, double zeta);

liouvillian::Superoperator target_liouvillian(const ProtocolConfig& config);

// rho_target = |psi><psi|; Configuration error unless g_target = sqrt(2) to
// 1e-12, TruncationInsufficient if ||L_target[rho_target]||_F >= 1e-6.
DensityMatrix stabilize_target(const ProtocolConfig& config, const CodeCoefficients& code,
                               double* stationarity = nullptr);

// exp(tau L(g_err)) rho_target.
DensityMatrix inject_error(const DensityMatrix& rho_target, const ProtocolConfig& config,
                           liouvillian::EvolveReport* report = nullptr);

// exp(t_corr L_target) rho_err.
DensityMatrix correct(const DensityMatrix& rho_err, const ProtocolConfig& config,
                      liouvillian::EvolveReport* report = nullptr);

struct ProtocolResult {
    DensityMatrix rho_target;
    DensityMatrix rho_err;
    DensityMatrix rho_corr;
    double fidelity_err = 0.0;
    double fidelity_corr = 0.0;
    double stationarity = 0.0;
    double t_corr = 0.0;
    Index fock_dim = 0;
    liouvillian::EvolveReport err_report;
    liouvillian::EvolveReport corr_report;
};

ProtocolResult run_protocol(const ProtocolConfig& config, const CodeCoefficients& code);

struct AsymptoticOptions {
    double tolerance = 1e-6; // fidelity change per doubling of t_corr
    double t_max = 1e5;
};

// Doubles t_corr, starting from config.t_corr (at least 1), until the corrected
// fidelity moves by less than the tolerance. Solver error if t_max is reached.
ProtocolResult run_protocol_asymptotic(const ProtocolConfig& config, const CodeCoefficients& code,
                                       const AsymptoticOptions& options = {});

// Tr[Pi rho] with Pi the projector onto span{|beta>_e, |beta>_o}.
double code_space_overlap(const DensityMatrix& rho, const CatQubitCode& code);

struct SweepRow {
    ProtocolConfig config;
    CodeCoefficients code;
    double fidelity_err = 0.0;
    double fidelity_corr = 0.0;
};

// One protocol run per (zeta, g_err), zeta-major. A zero base.fock_dim is
// resolved once per zeta from the largest coupling in the sweep.
std::vector<SweepRow> cat_sweep(const std::vector<double>& g_err_values,
                                const std::vector<double>& zeta_values,
                                const ProtocolConfig& base, const CodeCoefficients& code);

} // namespace qrabi::catqec
