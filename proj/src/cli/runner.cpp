#include "qrabi/cli/runner.hpp"

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <cmath>
#include <exception>
#include <fstream>
#include <numbers>
#include <thread>

#include "qrabi/catqec.hpp"
#include "qrabi/error.hpp"
#include "qrabi/liouvillian.hpp"
#include "qrabi/meanfield.hpp"

#ifndef QRABI_VERSION
#define QRABI_VERSION "dev"
#endif

namespace qrabi::cli {

namespace mf = qrabi::meanfield;
namespace lv = qrabi::liouvillian;
namespace cq = qrabi::catqec;

void parallel_for(std::size_t count, int workers, const std::function<void(std::size_t)>& body) {
    std::vector<std::exception_ptr> errors(count);
    const std::size_t n_threads =
        std::min<std::size_t>(count, static_cast<std::size_t>(std::max(1, workers)));
    if (n_threads <= 1) {
        for (std::size_t i = 0; i < count; ++i)
            body(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < count; i = next++) {
            try {
                body(i);
            } catch (...) {
                errors[i] = std::current_exception();
            }
        }
    };
    std::vector<std::jthread> pool;
    for (std::size_t t = 0; t < n_threads; ++t)
        pool.emplace_back(worker);
    pool.clear();
    for (const auto& e : errors)
        if (e)
            std::rethrow_exception(e);
}

std::vector<double> coupling_grid(const RunConfig& config) {
    return mf::linspace(config.g_min, config.g_max, config.g_steps);
}

namespace {

std::string short_num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%g", v);
    return buf;
}

std::string label(const char* name, double v) {
    return std::string(name) + " = " + short_num(v);
}

Artifacts meanfield_sweep(const RunConfig& cfg) {
    const auto gs = coupling_grid(cfg);
    const auto& hs = cfg.h_values;
    std::vector<mf::SweepRow> rows(gs.size() * hs.size());
    parallel_for(rows.size(), cfg.parallel, [&](std::size_t k) {
        rows[k] = mf::select_order_parameter({gs[k / hs.size()], hs[k % hs.size()], std::nullopt});
    });

    CsvTable table({{"g", "coupling strength"},
                    {"h", "nonlinearity (two-photon loss) strength"},
                    {"x", "Re alpha of the selected fixed point"},
                    {"y", "Im alpha of the selected fixed point"},
                    {"abs_alpha", "order parameter |alpha|"},
                    {"stability", "stable / unstable / marginal / lyapunov-stable"},
                    {"jacobian_re1", "Re of the first Jacobian eigenvalue"},
                    {"jacobian_im1", "Im of the first Jacobian eigenvalue"},
                    {"jacobian_re2", "Re of the second Jacobian eigenvalue"},
                    {"jacobian_im2", "Im of the second Jacobian eigenvalue"}},
                   {"meanfield-sweep: stable fixed point with the largest |alpha| per (g, h)",
                    "rows ordered by g, then h"});
    Plot plot{"Mean-field order parameter", "coupling g", "|alpha|", false, false, {}};
    for (std::size_t j = 0; j < hs.size(); ++j)
        plot.series.push_back({label("h", hs[j]), {}, {}, false});
    for (std::size_t k = 0; k < rows.size(); ++k) {
        const auto& r = rows[k];
        table.add_row({r.g, r.h, r.location.x, r.location.y, r.abs_alpha,
                       std::string(mf::to_string(r.stability)), r.eigenvalues[0].real(),
                       r.eigenvalues[0].imag(), r.eigenvalues[1].real(), r.eigenvalues[1].imag()});
        auto& s = plot.series[k % hs.size()];
        s.x.push_back(r.g);
        s.y.push_back(r.abs_alpha);
    }
    return {std::move(table), std::move(plot)};
}

Artifacts portrait(const RunConfig& cfg) {
    const double h = cfg.h_values.front();
    const bool full = cfg.eta > 0.0;
    mf::MeanFieldParams params{cfg.g, h, full ? std::optional<double>(cfg.eta) : std::nullopt};
    params.validate();
    mf::IntegrateOptions opts;
    opts.samples = cfg.samples;
    std::vector<mf::Trajectory> trajs(static_cast<std::size_t>(cfg.trajectories));
    parallel_for(trajs.size(), cfg.parallel, [&](std::size_t k) {
        const double phi = 2.0 * std::numbers::pi * static_cast<double>(k) / cfg.trajectories;
        mf::InitialCondition ic;
        ic.alpha = {cfg.radius * std::cos(phi), cfg.radius * std::sin(phi)};
        if (full)
            ic.spin = mf::SpinState::dressed_down(cfg.g, ic.alpha.x);
        trajs[k] = mf::integrate(ic, params, cfg.t_max, full ? mf::RhsChoice::Full : mf::RhsChoice::Reduced,
                                 opts);
    });

    std::vector<Column> cols{{"trajectory", "trajectory index (start angle 2 pi k / trajectories)"},
                             {"t", "time in units of 1/omega0"},
                             {"x", "Re alpha"},
                             {"y", "Im alpha"},
                             {"abs_alpha", "|alpha|"}};
    if (full) {
        cols.push_back({"sp_re", "Re <sigma_+>"});
        cols.push_back({"sp_im", "Im <sigma_+>"});
        cols.push_back({"sz", "<sigma_z>"});
    }
    CsvTable table(std::move(cols),
                   {"portrait: trajectories started on a circle of radius " + short_num(cfg.radius),
                    full ? "order parameter and spin at finite eta" : "spin eliminated (eta -> infinity)"});
    Plot plot{"Phase portrait, " + label("g", cfg.g) + ", " + label("h", h) +
                  (full ? ", " + label("eta", cfg.eta) : std::string()), "Re alpha",
              "Im alpha", false, true, {}};
    for (std::size_t k = 0; k < trajs.size(); ++k) {
        const auto& tr = trajs[k];
        Series s{"", {}, {}, false};
        for (std::size_t i = 0; i < tr.times.size(); ++i) {
            const auto& p = tr.points[i];
            std::vector<Cell> row{static_cast<long long>(k), tr.times[i], p.x, p.y, p.abs()};
            if (full) {
                const auto& sp = tr.spins[i];
                row.insert(row.end(), {sp.sp.real(), sp.sp.imag(), sp.sz});
            }
            table.add_row(std::move(row));
            s.x.push_back(p.x);
            s.y.push_back(p.y);
        }
        plot.series.push_back(std::move(s));
    }
    Series fixed{"fixed points", {}, {}, true};
    for (const auto& fp : mf::find_fixed_points({cfg.g, h, std::nullopt})) {
        fixed.x.push_back(fp.location.x);
        fixed.y.push_back(fp.location.y);
    }
    plot.series.push_back(std::move(fixed));
    return {std::move(table), std::move(plot)};
}

Index resolved_dim(const RunConfig& cfg, const std::vector<double>& gs, double zeta) {
    if (cfg.fock_dim > 0)
        return cfg.fock_dim;
    return lv::truncation_for(*std::max_element(gs.begin(), gs.end()), zeta);
}

std::string dump_name(std::size_t row) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "point_%05zu.bin", row);
    return buf;
}

Artifacts gap_sweep(const RunConfig& cfg) {
    const auto gs = coupling_grid(cfg);
    const auto& zs = cfg.zeta_values;
    lv::SpectrumOptions opts;
    opts.n_eigenvalues = cfg.n_eigenvalues;
    opts.degeneracy_threshold = cfg.degeneracy_threshold;
    std::vector<lv::GapRow> rows(gs.size() * zs.size());
    const auto dump_dir = cfg.output_dir / "steady_states";
    if (cfg.dump_steady_states)
        std::filesystem::create_directories(dump_dir);
    parallel_for(rows.size(), cfg.parallel, [&](std::size_t k) {
        const std::size_t iz = k / gs.size(), ig = k % gs.size();
        const double g = gs[ig], zeta = zs[iz];
        const Index n = resolved_dim(cfg, gs, zeta);
        const auto sr = lv::spectrum(lv::parity_blocks(lv::build_effective({g, zeta, n})), opts);
        lv::GapRow row{g, zeta, n, sr.gap, sr.degeneracy, 0.0};
        for (const auto& st : sr.steady_states)
            if (st.sector == lv::Sector::EE)
                row.photon_ratio = lv::photon_number(st.matrix) / zeta;
        rows[k] = row;
        if (cfg.dump_steady_states)
            lv::write_steady_states(dump_dir / dump_name(k), sr.steady_states);
    });

    std::vector<std::string> preamble{
        "gap-sweep: Liouvillian gap of the effective oscillator model",
        "gap excludes one stationary eigenvalue each from the ee and oo sectors",
        "rows ordered by zeta, then g"};
    if (cfg.dump_steady_states)
        preamble.push_back("steady states of data row k (from 0) are in steady_states/point_<k, five digits>.bin");
    CsvTable table({{"g", "coupling strength"},
                    {"zeta", "frequency ratio over two-photon loss, kappa = 1/zeta"},
                    {"fock_dim", "oscillator truncation"},
                    {"gap", "smallest |Re lambda| among non-stationary eigenvalues"},
                    {"degeneracy", "eigenvalues with |Re lambda| at or below the threshold"},
                    {"photon_ratio", "<a^dag a>/zeta in the even steady state"}},
                   std::move(preamble));
    Plot plot{"Liouvillian gap", "coupling g", "gap", true, false, {}};
    for (double z : zs)
        plot.series.push_back({label("zeta", z), {}, {}, false});
    for (std::size_t k = 0; k < rows.size(); ++k) {
        const auto& r = rows[k];
        table.add_row({r.g, r.zeta, static_cast<long long>(r.fock_dim), r.gap,
                       static_cast<long long>(r.degeneracy), r.photon_ratio});
        auto& s = plot.series[k / gs.size()];
        s.x.push_back(r.g);
        s.y.push_back(r.gap);
    }
    return {std::move(table), std::move(plot)};
}

Artifacts photon_sweep(const RunConfig& cfg) {
    const auto gs = coupling_grid(cfg);
    const auto& zs = cfg.zeta_values;
    std::vector<lv::PhotonRow> rows(gs.size() * zs.size());
    parallel_for(rows.size(), cfg.parallel, [&](std::size_t k) {
        const double g = gs[k % gs.size()], zeta = zs[k / gs.size()];
        const Index n = resolved_dim(cfg, gs, zeta);
        rows[k] = {g, zeta, n, lv::photon_ratio({g, zeta, n})};
    });
    CsvTable table({{"g", "coupling strength"},
                    {"zeta", "frequency ratio over two-photon loss, kappa = 1/zeta"},
                    {"fock_dim", "oscillator truncation"},
                    {"photon_ratio", "<a^dag a>/zeta in the even steady state"}},
                   {"photon-sweep: rescaled photon number of the even-parity steady state",
                    "rows ordered by zeta, then g"});
    Plot plot{"Steady-state photon number", "coupling g", "<a^dag a> / zeta", false, false, {}};
    for (double z : zs)
        plot.series.push_back({label("zeta", z), {}, {}, false});
    for (std::size_t k = 0; k < rows.size(); ++k) {
        const auto& r = rows[k];
        table.add_row({r.g, r.zeta, static_cast<long long>(r.fock_dim), r.photon_ratio});
        auto& s = plot.series[k / gs.size()];
        s.x.push_back(r.g);
        s.y.push_back(r.photon_ratio);
    }
    return {std::move(table), std::move(plot)};
}

std::vector<Column> cat_columns() {
    return {{"g_target", "coupling that stabilizes the cat code"},
            {"g_err", "coupling during the error interval"},
            {"tau", "duration of the error interval"},
            {"t_corr", "duration of the correction interval"},
            {"zeta", "frequency ratio over two-photon loss"},
            {"fock_dim", "oscillator truncation"},
            {"c_e_re", "Re c_e (even cat coefficient)"},
            {"c_e_im", "Im c_e"},
            {"c_o_re", "Re c_o (odd cat coefficient)"},
            {"c_o_im", "Im c_o"},
            {"fidelity_err", "fidelity with the target after the error interval"},
            {"fidelity_corr", "fidelity with the target after correction"}};
}

std::vector<Cell> cat_row(const cq::ProtocolConfig& p, const cq::CodeCoefficients& c, double t_corr,
                          Index n, double f_err, double f_corr) {
    return {p.g_target,          p.g_err,           p.tau,
            t_corr,              p.zeta,            static_cast<long long>(n),
            c.c_e.real(),        c.c_e.imag(),      c.c_o.real(),
            c.c_o.imag(),        f_err,             f_corr};
}

cq::ProtocolConfig protocol_base(const RunConfig& cfg) {
    cq::ProtocolConfig p;
    p.g_target = cfg.g_target;
    p.g_err = cfg.g_err;
    p.tau = cfg.tau;
    p.t_corr = cfg.t_corr;
    p.zeta = cfg.zeta_values.front();
    p.fock_dim = cfg.fock_dim;
    return p;
}

Artifacts cat_protocol(const RunConfig& cfg) {
    const cq::ProtocolConfig p = protocol_base(cfg);
    const cq::CodeCoefficients code{cfg.ce, cfg.co};
    code.validate();
    p.validate();
    const cq::ProtocolResult r =
        cfg.asymptotic ? cq::run_protocol_asymptotic(p, code) : cq::run_protocol(p, code);
    CsvTable table(cat_columns(),
                   {"cat-protocol: stabilize at g_target, evolve at g_err for tau, then at g_target for t_corr",
                    cfg.asymptotic ? "t_corr doubled until the corrected fidelity settled"
                                   : "fixed correction time"});
    table.add_row(cat_row(p, code, r.t_corr, r.fock_dim, r.fidelity_err, r.fidelity_corr));
    Plot plot{"Cat-qubit protection, " + label("g_err", p.g_err), "stage (0 target, 1 error, 2 corrected)",
              "fidelity with target", false, false, {}};
    plot.series.push_back({"fidelity", {0.0, 1.0, 2.0}, {1.0, r.fidelity_err, r.fidelity_corr}, false});
    plot.series.push_back({"", {0.0, 1.0, 2.0}, {1.0, r.fidelity_err, r.fidelity_corr}, true});
    return {std::move(table), std::move(plot)};
}

Artifacts cat_sweep(const RunConfig& cfg) {
    const auto gs = coupling_grid(cfg);
    const auto& zs = cfg.zeta_values;
    const cq::CodeCoefficients code{cfg.ce, cfg.co};
    code.validate();
    const double g_max = std::max(cfg.g_target, *std::max_element(gs.begin(), gs.end()));
    struct Out {
        cq::ProtocolConfig p;
        double f_err = 0.0, f_corr = 0.0;
    };
    std::vector<Out> rows(gs.size() * zs.size());
    parallel_for(rows.size(), cfg.parallel, [&](std::size_t k) {
        cq::ProtocolConfig p = protocol_base(cfg);
        p.zeta = zs[k / gs.size()];
        p.g_err = gs[k % gs.size()];
        if (p.fock_dim == 0)
            p.fock_dim = cq::protocol_fock_dim(g_max, p.zeta);
        p.validate();
        const auto r = cq::run_protocol(p, code);
        rows[k] = {p, r.fidelity_err, r.fidelity_corr};
    });
    CsvTable table(cat_columns(), {"cat-sweep: protocol fidelities over the error coupling",
                                   "rows ordered by zeta, then g_err"});
    Plot plot{"Cat-qubit protection", "error coupling g_err", "fidelity with target", false, false, {}};
    for (double z : zs) {
        plot.series.push_back({"after error, " + label("zeta", z), {}, {}, false});
        plot.series.push_back({"corrected, " + label("zeta", z), {}, {}, false});
    }
    for (std::size_t k = 0; k < rows.size(); ++k) {
        const auto& r = rows[k];
        table.add_row(cat_row(r.p, code, r.p.t_corr, r.p.fock_dim, r.f_err, r.f_corr));
        const std::size_t iz = k / gs.size();
        plot.series[2 * iz].x.push_back(r.p.g_err);
        plot.series[2 * iz].y.push_back(r.f_err);
        plot.series[2 * iz + 1].x.push_back(r.p.g_err);
        plot.series[2 * iz + 1].y.push_back(r.f_corr);
    }
    return {std::move(table), std::move(plot)};
}

} // namespace

Artifacts compute(const RunConfig& config) {
    switch (config.command) {
    case Command::MeanfieldSweep: return meanfield_sweep(config);
    case Command::Portrait: return portrait(config);
    case Command::GapSweep: return gap_sweep(config);
    case Command::PhotonSweep: return photon_sweep(config);
    case Command::CatProtocol: return cat_protocol(config);
    case Command::CatSweep: return cat_sweep(config);
    }
    fail(ErrorKind::Configuration, "unknown command");
}

RunManifest run(const RunConfig& config) {
    RunManifest m;
    m.command = to_string(config.command);
    m.version = QRABI_VERSION;
    m.config = config.echo;
    m.started_at = iso8601_utc(std::chrono::system_clock::now());

    const auto& dir = config.output_dir;
    std::filesystem::create_directories(dir);
    {
        // fail early, before any expensive numerics, if nothing can be written
        const auto probe = dir / ".write-probe";
        std::ofstream out(probe);
        if (!out)
            throw std::ios_base::failure("output directory " + dir.string() + " is not writable");
        out.close();
        std::filesystem::remove(probe);
    }

    const Artifacts art = compute(config);
    art.table.save(dir / "data.csv");
    art.plot.save(dir / "plot.svg");
    m.files.push_back(record_file(dir, "data.csv"));
    m.files.push_back(record_file(dir, "plot.svg"));
    if (config.command == Command::GapSweep && config.dump_steady_states) {
        const std::size_t n = coupling_grid(config).size() * config.zeta_values.size();
        for (std::size_t k = 0; k < n; ++k)
            m.files.push_back(record_file(dir, "steady_states/" + dump_name(k)));
    }
    m.finished_at = iso8601_utc(std::chrono::system_clock::now());
    m.save(dir / "manifest.json");
    return m;
}

} // namespace qrabi::cli
