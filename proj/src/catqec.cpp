#include "qrabi/catqec.hpp"

#include <algorithm>
#include <sstream>

namespace qrabi::catqec {

using liouvillian::EffectiveParams;
using liouvillian::EvolveReport;

Complex stationary_amplitude(double g, double zeta) {
    return std::polar(std::sqrt(zeta * g * g) / 2.0, std::numbers::pi / 4.0);
}

void CodeCoefficients::validate() const {
    const double n = std::norm(c_e) + std::norm(c_o);
    if (!(std::abs(n - 1.0) <= 1e-10))
        fail(ErrorKind::InvalidState,
             "code coefficients must satisfy |c_e|^2 + |c_o|^2 = 1, got " + std::to_string(n));
}

CatQubitCode CatQubitCode::make(double g, double zeta, const CodeCoefficients& c) {
    c.validate();
    return {stationary_amplitude(g, zeta), c};
}

StateVector CatQubitCode::state(const FockSpace& space) const {
    const CVector e = cat_state(beta, Parity::Even, space).amplitudes();
    const CVector o = cat_state(beta, Parity::Odd, space).amplitudes();
    // e and o have disjoint support, so the combination is already unit norm
    return StateVector::normalized(coefficients.c_e * e + coefficients.c_o * o);
}

void ProtocolConfig::validate() const {
    auto check = [](bool ok, const char* key, const char* what) {
        if (!ok)
            fail(ErrorKind::InvalidParams, std::string(key) + " " + what);
    };
    check(std::isfinite(g_target) && g_target > 0.0, "g_target", "must be finite and positive");
    check(std::isfinite(g_err) && g_err >= 0.0, "g_err", "must be finite and non-negative");
    check(std::isfinite(tau) && tau >= 0.0, "tau", "must be finite and non-negative");
    check(std::isfinite(t_corr) && t_corr >= 0.0, "t_corr", "must be finite and non-negative");
    check(std::isfinite(zeta) && zeta > 0.0, "zeta", "must be finite and positive");
    check(fock_dim == 0 || fock_dim >= 2, "fock_dim", "must be 0 (automatic) or at least 2");
}

Index protocol_fock_dim(double g_max, double zeta) {
    const double b = std::sqrt(zeta * g_max * g_max) / 2.0;
    return static_cast<Index>(std::ceil(b * b + 10.0 * b + 10.0));
}

Index ProtocolConfig::resolved_fock_dim() const {
    if (fock_dim > 0)
        return fock_dim;
    return protocol_fock_dim(std::max(g_target, g_err), zeta);
}

liouvillian::Superoperator target_liouvillian(const ProtocolConfig& config) {
    return liouvillian::build_effective({config.g_target, config.zeta, config.resolved_fock_dim()});
}

DensityMatrix stabilize_target(const ProtocolConfig& config, const CodeCoefficients& code,
                               double* stationarity) {
    config.validate();
    if (!(std::abs(config.g_target - kTargetCoupling) <= 1e-12))
        fail(ErrorKind::Configuration,
             "the cat code is stationary only at g_target = sqrt(2), got " +
                 std::to_string(config.g_target));
    const Index n = config.resolved_fock_dim();
    const CatQubitCode cat = CatQubitCode::make(config.g_target, config.zeta, code);
    const DensityMatrix rho = DensityMatrix::pure(cat.state(FockSpace(n)));
    const double defect = liouvillian::apply(target_liouvillian(config), rho.matrix()).norm();
    if (stationarity)
        *stationarity = defect;
    if (!(defect < 1e-6)) {
        std::ostringstream msg;
        msg << "target state is not stationary: ||L[rho]|| = " << defect << " at N = " << n;
        fail(ErrorKind::TruncationInsufficient, msg.str());
    }
    return rho;
}

DensityMatrix inject_error(const DensityMatrix& rho_target, const ProtocolConfig& config,
                           EvolveReport* report) {
    config.validate();
    const auto l = liouvillian::build_effective({config.g_err, config.zeta, rho_target.dim()});
    return liouvillian::evolve(rho_target, l, config.tau, report);
}

DensityMatrix correct(const DensityMatrix& rho_err, const ProtocolConfig& config,
                      EvolveReport* report) {
    config.validate();
    const auto l = liouvillian::build_effective({config.g_target, config.zeta, rho_err.dim()});
    return liouvillian::evolve(rho_err, l, config.t_corr, report);
}

ProtocolResult run_protocol(const ProtocolConfig& config, const CodeCoefficients& code) {
    double stationarity = 0.0;
    DensityMatrix target = stabilize_target(config, code, &stationarity);
    EvolveReport err_report;
    EvolveReport corr_report;
    DensityMatrix err = inject_error(target, config, &err_report);
    DensityMatrix corr = correct(err, config, &corr_report);
    const double f_err = fidelity(target, err);
    const double f_corr = fidelity(target, corr);
    const Index n = target.dim();
    return {std::move(target), std::move(err), std::move(corr), f_err, f_corr, stationarity,
            config.t_corr, n, err_report, corr_report};
}

ProtocolResult run_protocol_asymptotic(const ProtocolConfig& config, const CodeCoefficients& code,
                                       const AsymptoticOptions& options) {
    ProtocolConfig cfg = config;
    cfg.t_corr = std::max(1.0, config.t_corr);
    ProtocolResult result = run_protocol(cfg, code);
    const auto l = target_liouvillian(cfg);
    double previous = result.fidelity_corr;
    while (true) {
        if (2.0 * result.t_corr > options.t_max) {
            std::ostringstream msg;
            msg << "corrected fidelity did not settle before t_corr = " << options.t_max
                << " (last change " << std::abs(result.fidelity_corr - previous) << ")";
            fail(ErrorKind::Solver, msg.str());
        }
        // exp(2t L) = exp(t L) exp(t L): continue from the current state
        EvolveReport step;
        DensityMatrix next = liouvillian::evolve(result.rho_corr, l, result.t_corr, &step);
        previous = result.fidelity_corr;
        result.corr_report = step;
        result.t_corr *= 2.0;
        result.rho_corr = std::move(next);
        result.fidelity_corr = fidelity(result.rho_target, result.rho_corr);
        if (std::abs(result.fidelity_corr - previous) < options.tolerance)
            return result;
    }
}

double code_space_overlap(const DensityMatrix& rho, const CatQubitCode& code) {
    const FockSpace space(rho.dim());
    const CVector e = cat_state(code.beta, Parity::Even, space).amplitudes();
    const CVector o = cat_state(code.beta, Parity::Odd, space).amplitudes();
    const Complex pe = e.dot(rho.matrix() * e);
    const Complex po = o.dot(rho.matrix() * o);
    return (pe + po).real();
}

std::vector<SweepRow> cat_sweep(const std::vector<double>& g_err_values,
                                const std::vector<double>& zeta_values,
                                const ProtocolConfig& base, const CodeCoefficients& code) {
    double g_max = base.g_target;
    for (double g : g_err_values)
        g_max = std::max(g_max, g);
    std::vector<SweepRow> rows;
    for (double zeta : zeta_values) {
        ProtocolConfig cfg = base;
        cfg.zeta = zeta;
        if (cfg.fock_dim == 0)
            cfg.fock_dim = protocol_fock_dim(g_max, zeta);
        for (double g : g_err_values) {
            cfg.g_err = g;
            const ProtocolResult r = run_protocol(cfg, code);
            rows.push_back({cfg, code, r.fidelity_err, r.fidelity_corr});
        }
    }
    return rows;
}

} // namespace qrabi::catqec
