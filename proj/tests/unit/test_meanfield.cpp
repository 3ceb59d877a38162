#include <doctest.h>

#include <random>

#include "oracles.hpp"
#include "qrabi/error.hpp"
#include "qrabi/meanfield.hpp"

using namespace qrabi;
using namespace qrabi::meanfield;

namespace {

MeanFieldParams reduced(double g, double h) { return {g, h, std::nullopt}; }

std::vector<FixedPointReport> nontrivial(const std::vector<FixedPointReport>& all) {
    return {all.begin() + 1, all.end()};
}

} // namespace

TEST_CASE("reduced vector field") {
    for (double g : {0.0, 0.7, 2.0}) {
        const auto f = reduced_rhs({0.0, 0.0}, reduced(g, 1.3));
        CHECK(f.x == 0.0);
        CHECK(f.y == 0.0);
    }
    const auto rot = reduced_rhs({1.0, 0.0}, reduced(0.0, 0.0));
    CHECK(rot.x == 0.0);
    CHECK(rot.y == -1.0);

    const auto f = reduced_rhs({0.3, 0.1}, reduced(1.5, 1.0));
    const auto ref = oracle::reduced_field(0.3L, 0.1L, 1.5L, 1.0L);
    CHECK(std::abs(f.x - double(ref.dx)) < 1e-15);
    CHECK(std::abs(f.y - double(ref.dy)) < 1e-15);

    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u(-2.0, 2.0);
    for (int k = 0; k < 200; ++k) {
        const double x = u(rng), y = u(rng), g = std::abs(u(rng)), h = std::abs(u(rng));
        const auto v = reduced_rhs({x, y}, reduced(g, h));
        const auto r = oracle::reduced_field(x, y, g, h);
        CHECK(std::abs(v.x - double(r.dx)) < 1e-13);
        CHECK(std::abs(v.y - double(r.dy)) < 1e-13);
    }
    CHECK_THROWS_AS(reduced_rhs({0.0, 0.0}, {1.0, 1.0, 10.0}), Error);
}

TEST_CASE("parameter validation") {
    CHECK_THROWS_AS(reduced(-0.1, 1.0).validate(), Error);
    CHECK_THROWS_AS(reduced(0.1, -1.0).validate(), Error);
    CHECK_THROWS_AS((MeanFieldParams{0.1, 1.0, 0.0}).validate(), Error);
    CHECK_NOTHROW((MeanFieldParams{0.1, 1.0, 3.0}).validate());
}

TEST_CASE("three-variable system") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (int k = 0; k < 50; ++k) {
        const MeanFieldParams p{std::abs(2 * u(rng)), std::abs(u(rng)), 1.0 + 100 * std::abs(u(rng))};
        SpinState s{Complex(u(rng), u(rng)) * 0.5, u(rng)};
        const auto d = full_rhs({u(rng), u(rng)}, s, p);
        const double dnorm = 8.0 * (std::conj(s.sp) * d.dsp).real() + 2.0 * s.sz * d.dsz;
        CHECK(std::abs(dnorm) < 1e-12);
    }
    const auto d0 = full_rhs({0.4, -0.3}, {Complex(0.2, 0.1), -0.6}, {0.0, 0.5, 20.0});
    CHECK(d0.dsz == 0.0);
    CHECK_THROWS_AS(full_rhs({0, 0}, {}, reduced(1.0, 1.0)), Error);
}

TEST_CASE("spin norm is conserved along trajectories") {
    const MeanFieldParams p{0.6, 0.25, 100.0};
    const InitialCondition ic{{0.8, 0.0}, SpinState::dressed_down(0.6, 0.8)};
    const auto tr = integrate(ic, p, 100.0, RhsChoice::Full);
    CHECK(tr.max_spin_norm_drift < 1e-8);
    CHECK(tr.spins.size() == tr.points.size());
}

TEST_CASE("finite-eta trajectory relaxes toward the origin") {
    const MeanFieldParams p{0.6, 0.25, 100.0};
    IntegrateOptions opts;
    opts.samples = 201;
    const auto tr = integrate({{0.8, 0.0}, SpinState::down()}, p, 2000.0, RhsChoice::Full, opts);
    CHECK(tr.final_abs_alpha < 0.1);
    // windowed maxima of |alpha| fall off
    double prev = 1e9;
    for (std::size_t w = 0; w + 40 <= tr.points.size(); w += 40) {
        double m = 0.0;
        for (std::size_t i = w; i < w + 40; ++i)
            m = std::max(m, tr.points[i].abs());
        CHECK(m < prev);
        prev = m;
    }
}

TEST_CASE("reduced trajectories") {
    const auto zero = integrate({{0.0, 0.0}}, reduced(0.6, 0.25), 50.0, RhsChoice::Reduced);
    for (const auto& p : zero.points)
        CHECK(p.abs() == 0.0);

    const auto free = integrate({{0.7, -0.4}}, reduced(0.0, 0.5), 50.0, RhsChoice::Reduced);
    for (std::size_t i = 1; i < free.points.size(); ++i)
        CHECK(free.points[i].abs() <= free.points[i - 1].abs() + 1e-12);
    // d r^2/dt = -4 h r^4  =>  r^2(t) = r0^2 / (1 + 4 h r0^2 t)
    const double r02 = 0.65;
    const double expected = std::sqrt(r02 / (1.0 + 4.0 * 0.5 * r02 * 50.0));
    CHECK(free.final_abs_alpha == doctest::Approx(expected).epsilon(1e-7));

    const auto tr = integrate({{1.0, 0.0}}, reduced(0.6, 0.25), 2000.0, RhsChoice::Reduced);
    CHECK(tr.final_abs_alpha < tr.points.front().abs());
    CHECK(tr.times.front() == 0.0);
    CHECK(tr.times.back() == doctest::Approx(2000.0));
    for (std::size_t i = 1; i < tr.times.size(); ++i)
        CHECK(tr.times[i] > tr.times[i - 1]);
    CHECK_THROWS_AS(integrate({{1.0, 0.0}}, reduced(0.6, 0.25), 0.0, RhsChoice::Reduced), Error);
}

TEST_CASE("fixed points") {
    const auto a = find_fixed_points(reduced(0.6, 0.25));
    REQUIRE(a.size() == 1);
    CHECK(a[0].location.abs() == 0.0);
    CHECK(a[0].stability == Stability::StableByLyapunov);

    for (double h : {0.25, 1.0, 4.0}) {
        const auto c = find_fixed_points(reduced(1.0, h));
        REQUIRE(c.size() == 1);
        CHECK(c[0].location.abs() == 0.0);
        CHECK(c[0].stability == Stability::MarginalLinearization);
    }

    const auto b = find_fixed_points(reduced(1.5, 1.0));
    REQUIRE(b.size() == 3);
    CHECK(b[0].stability == Stability::Unstable);
    const double radial = oracle::radial_fixed_point(1.5, 1.0);
    for (const auto& r : nontrivial(b)) {
        CHECK(r.location.abs() == doctest::Approx(radial).epsilon(1e-10));
        CHECK(r.residual < 1e-12);
        CHECK(r.stability == Stability::Stable);
    }
    CHECK(b[1].location.x == doctest::Approx(-b[2].location.x).epsilon(1e-10));
    CHECK(b[1].location.y == doctest::Approx(-b[2].location.y).epsilon(1e-10));
}

TEST_CASE("fixed points come in +- pairs with tiny residuals") {
    for (double g : {1.05, 1.3, 2.0, 2.8})
        for (double h : {0.1, 0.5, 2.0}) {
            const auto fps = find_fixed_points(reduced(g, h));
            REQUIRE(fps.size() % 2 == 1);
            for (const auto& r : fps)
                CHECK(r.residual < 1e-12);
            for (std::size_t i = 1; i + 1 < fps.size(); i += 2) {
                CHECK(std::abs(fps[i].location.abs() - fps[i + 1].location.abs()) < 1e-10);
                CHECK(std::abs(fps[i].location.x + fps[i + 1].location.x) < 1e-10);
            }
            CHECK(fps[1].location.abs() == doctest::Approx(oracle::radial_fixed_point(g, h)).epsilon(1e-9));
        }
}

TEST_CASE("Jacobian") {
    auto eig = [](double g) {
        const auto ev = Eigen::EigenSolver<Eigen::Matrix2d>(jacobian({0, 0}, reduced(g, 0.7))).eigenvalues();
        return std::array<Complex, 2>{ev(0), ev(1)};
    };
    for (double g : {0.2, 0.6, 0.99, 1.01, 1.5, 2.0}) {
        const auto ev = eig(g);
        const Complex root = std::sqrt(Complex(g * g - 1.0, 0.0));
        const double d = std::min(std::abs(ev[0] - root) + std::abs(ev[1] + root),
                                  std::abs(ev[0] + root) + std::abs(ev[1] - root));
        CHECK(d < 1e-10);
    }
    const auto e1 = eig(1.0);
    CHECK(std::abs(e1[0]) < 1e-12);
    CHECK(std::abs(e1[1]) < 1e-12);
    const auto e06 = eig(0.6);
    CHECK(std::abs(std::abs(e06[0].imag()) - 0.8) < 1e-12);
    const auto e15 = eig(1.5);
    CHECK(std::max(e15[0].real(), e15[1].real()) == doctest::Approx(std::sqrt(1.25)).epsilon(1e-12));

    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(-1.5, 1.5);
    for (int k = 0; k < 100; ++k) {
        const double x = u(rng), y = u(rng), g = std::abs(u(rng)) + 0.1, h = std::abs(u(rng));
        const auto J = jacobian({x, y}, reduced(g, h));
        const auto fd = oracle::jacobian_fd(x, y, g, h);
        for (int i = 0; i < 4; ++i) {
            const double jv = J(i / 2, i % 2);
            CHECK(std::abs(jv - fd[i]) <= 1e-6 * std::max(1.0, std::abs(fd[i])));
        }
    }
}

TEST_CASE("Lyapunov certificate") {
    CHECK(lyapunov_value(0.0, 0.0, 0.6) == 0.0);
    const auto cert = lyapunov_certificate(reduced(0.6, 0.25), 2.0, 101);
    CHECK(cert.passes);
    CHECK(cert.samples == 101 * 101 - 1);
    for (double y : {-1.5, -0.2, 0.3, 1.9})
        CHECK(lyapunov_rate(0.0, y, 0.6, 0.25) == doctest::Approx(-2.0 * 0.25 * std::pow(y, 4)).epsilon(1e-14));

    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(-2.0, 2.0);
    for (int k = 0; k < 200; ++k) {
        const double x = u(rng), y = u(rng), g = 0.95 * std::abs(u(rng)) / 2.0, h = std::abs(u(rng));
        CHECK(std::abs(lyapunov_rate(x, y, g, h) - oracle::lyapunov_chain_rule(x, y, g, h)) < 1e-10);
    }
    try {
        lyapunov_certificate(reduced(1.0, 0.25), 2.0, 11);
        FAIL("no error");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::OutOfDomain);
    }
}

TEST_CASE("order-parameter sweeps") {
    const auto low = order_parameter_sweep(linspace(0.0, 1.0, 51), {1.0});
    for (const auto& r : low)
        CHECK(r.abs_alpha == 0.0);

    const auto hs = linspace(0.1, 5.0, 25);
    const auto rows = order_parameter_sweep({1.5}, hs);
    for (std::size_t i = 1; i < rows.size(); ++i)
        CHECK(rows[i].abs_alpha < rows[i - 1].abs_alpha);
    const auto big = select_order_parameter(reduced(1.5, 100.0));
    CHECK(big.abs_alpha < 0.1);
    CHECK(big.abs_alpha > 0.0);
    CHECK(big.abs_alpha < select_order_parameter(reduced(1.5, 50.0)).abs_alpha);
    CHECK(big.location.x >= 0.0);

    for (double h : {0.25, 1.0, 4.0}) {
        double onset = -1.0;
        for (double g : linspace(0.99, 1.01, 41)) {
            if (select_order_parameter(reduced(g, h)).abs_alpha > 0.0) {
                onset = g;
                break;
            }
        }
        CHECK(std::abs(onset - 1.0) <= 1e-3);
    }
    CHECK(linspace(0.0, 2.0, 201).size() == 201);
    CHECK(linspace(0.0, 2.0, 201)[100] == doctest::Approx(1.0));
}
