#include <doctest.h>

#include <numbers>

#include "oracles.hpp"
#include "qrabi/catqec.hpp"

using namespace qrabi;
using namespace qrabi::catqec;

namespace {

ProtocolConfig config(double g_err, double zeta = 30.0) {
    ProtocolConfig c;
    c.g_err = g_err;
    c.zeta = zeta;
    return c;
}

const CodeCoefficients kDefault{};
const CodeCoefficients kEven{1.0, 0.0};
const CodeCoefficients kOdd{0.0, 1.0};

} // namespace

TEST_CASE("stationary amplitude and code coefficients") {
    const Complex b = stationary_amplitude(std::numbers::sqrt2, 30.0);
    CHECK(std::abs(b) == doctest::Approx(std::sqrt(60.0) / 2.0).epsilon(1e-14));
    CHECK(std::arg(b) == doctest::Approx(std::numbers::pi / 4.0).epsilon(1e-14));
    CHECK_NOTHROW(kDefault.validate());
    CHECK_NOTHROW((CodeCoefficients{0.6, Complex(0.0, 0.8)}).validate());
    try {
        CodeCoefficients{1.0, 1.0}.validate();
        FAIL("no error");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::InvalidState);
    }
    const auto code = CatQubitCode::make(std::numbers::sqrt2, 30.0, kDefault);
    CHECK(code.beta == b);
}

TEST_CASE("protocol configuration") {
    CHECK(protocol_fock_dim(std::numbers::sqrt2, 30.0) == 64);
    CHECK(config(0.5).resolved_fock_dim() == 64);
    CHECK(config(2.0).resolved_fock_dim() == protocol_fock_dim(2.0, 30.0));
    auto bad = config(0.5);
    bad.tau = -1.0;
    try {
        bad.validate();
        FAIL("no error");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::InvalidParams);
        CHECK(std::string(e.what()).find("tau") != std::string::npos);
    }
    auto off = config(0.5);
    off.g_target = 1.3;
    try {
        stabilize_target(off, kDefault);
        FAIL("no error");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::Configuration);
    }
    auto small = config(0.5);
    small.fock_dim = 30;
    try {
        stabilize_target(small, kDefault);
        FAIL("no error");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::TruncationInsufficient);
    }
}

TEST_CASE("target states") {
    const auto c = config(0.5);
    const int n = static_cast<int>(c.resolved_fock_dim());
    const Complex beta = stationary_amplitude(c.g_target, c.zeta);

    double stationarity = 1.0;
    const DensityMatrix even = stabilize_target(c, kEven, &stationarity);
    CHECK(stationarity < 1e-6);
    const double b2 = std::norm(beta);
    CHECK(oracle::photon_number(oracle::Mat(even.matrix())) == doctest::Approx(b2 * std::tanh(b2)).epsilon(1e-8));
    CHECK(oracle::pure_fidelity(oracle::cat(beta, true, n), even.matrix()) == doctest::Approx(1.0).epsilon(1e-12));

    const DensityMatrix odd = stabilize_target(c, kOdd);
    CHECK(oracle::pure_fidelity(oracle::cat(beta, false, n), odd.matrix()) == doctest::Approx(1.0).epsilon(1e-12));

    const DensityMatrix plus = stabilize_target(c, kDefault);
    CHECK(oracle::pure_fidelity(oracle::coherent(beta, n), plus.matrix()) > 1.0 - 1e-6);

    const auto l = target_liouvillian(c);
    CHECK(fidelity(plus, liouvillian::evolve(plus, l, 5.0)) > 1.0 - 1e-6);
}

TEST_CASE("error injection and correction edge cases") {
    const auto c = config(0.5);
    const DensityMatrix target = stabilize_target(c, kDefault);

    auto same = c;
    same.g_err = same.g_target;
    CHECK(fidelity(target, inject_error(target, same)) == doctest::Approx(1.0).epsilon(1e-8));

    auto instant = c;
    instant.tau = 0.0;
    CHECK(inject_error(target, instant).matrix() == target.matrix());

    const DensityMatrix err = inject_error(target, c);
    CHECK(fidelity(target, err) < 0.99);
    auto none = c;
    none.t_corr = 0.0;
    CHECK(correct(err, none).matrix() == err.matrix());

    const auto r = run_protocol(same, kDefault);
    CHECK(r.fidelity_corr == doctest::Approx(1.0).epsilon(1e-8));
    CHECK(r.fidelity_err == doctest::Approx(1.0).epsilon(1e-8));
    CHECK(r.fidelity_corr <= 1.0 + 1e-9);
}

TEST_CASE("correction in the broken phase restores the code") {
    auto c = config(1.2);
    c.t_corr = 50.0;
    const auto r = run_protocol(c, kDefault);
    CHECK(r.fidelity_corr > 0.99);
    CHECK(r.fidelity_corr >= r.fidelity_err);
    const auto code = CatQubitCode::make(c.g_target, c.zeta, kDefault);
    CHECK(code_space_overlap(r.rho_corr, code) >= r.fidelity_corr - 1e-6);
    CHECK(code_space_overlap(r.rho_target, code) == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("normal-phase drift is not corrected, and worse at larger zeta") {
    double prev = 2.0;
    for (double z : {10.0, 20.0, 30.0, 40.0}) {
        const auto r = run_protocol(config(0.5, z), kDefault);
        CHECK(r.fidelity_corr < 0.9);
        CHECK(r.fidelity_corr < prev);
        prev = r.fidelity_corr;
    }
}

TEST_CASE("fidelity rises across the transition for every code word") {
    for (const auto& code : {kDefault, kEven, kOdd}) {
        const double low = run_protocol(config(0.5), code).fidelity_corr;
        const double high = run_protocol(config(1.5), code).fidelity_corr;
        CHECK(high - low >= 0.1);
    }
    const auto sweep = cat_sweep({0.3, 0.8, 1.5, 2.0}, {30.0}, config(0.0), kDefault);
    REQUIRE(sweep.size() == 4);
    CHECK(sweep[0].fidelity_corr < 0.5);
    CHECK(sweep[2].fidelity_corr > 0.99);
    for (const auto& row : sweep)
        CHECK(row.config.fock_dim == protocol_fock_dim(2.0, 30.0));
}

TEST_CASE("even cat keeps its parity under any effective generator") {
    const auto c = config(0.8, 20.0);
    for (double g : {0.3, 0.8, 1.9}) {
        auto d = c;
        d.g_err = g;
        d.fock_dim = protocol_fock_dim(2.0, 20.0);
        const DensityMatrix t = stabilize_target(d, kEven);
        const CMatrix r = inject_error(t, d).matrix();
        double leak = 0.0;
        for (Index i = 0; i < r.rows(); ++i)
            for (Index j = 0; j < r.cols(); ++j)
                if (i % 2 || j % 2)
                    leak = std::max(leak, std::abs(r(i, j)));
        CHECK(leak < 1e-10);
    }
}

TEST_CASE("correction never hurts in the broken phase") {
    for (double g : {1.1, 1.3, 1.5, 1.7, 1.9})
        for (double tau : {0.2, 0.4, 0.6, 0.8, 1.0}) {
            auto c = config(g, 20.0);
            c.fock_dim = protocol_fock_dim(1.9, 20.0);
            c.tau = tau;
            c.t_corr = tau;
            const auto r = run_protocol(c, kDefault);
            CHECK(r.fidelity_corr >= r.fidelity_err - 1e-12);
        }
}

TEST_CASE("asymptotic correction and determinism") {
    const auto a = run_protocol_asymptotic(config(1.5), kDefault);
    CHECK(a.fidelity_corr > 0.99);
    CHECK(a.t_corr >= 1.0);
    const auto r1 = run_protocol(config(0.7), kDefault);
    const auto r2 = run_protocol(config(0.7), kDefault);
    CHECK(r1.fidelity_corr == r2.fidelity_corr);
    CHECK(r1.rho_corr.matrix() == r2.rho_corr.matrix());
}
