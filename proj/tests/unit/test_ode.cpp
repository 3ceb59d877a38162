#include <doctest.h>

#include <cmath>

#include "qrabi/ode.hpp"

using qrabi::ode::integrate_dop853;
using qrabi::ode::Tolerances;
using V1 = Eigen::Matrix<double, 1, 1>;
using V2 = Eigen::Vector2d;

TEST_CASE("exponential decay to tolerance") {
    V1 y0;
    y0 << 1.0;
    V1 last = y0;
    long steps = 0;
    const double t_end = integrate_dop853(
        [](double, const V1& y) { return V1(-y); }, 0.0, y0, 5.0, Tolerances{},
        [&](const auto&, const V1& y) {
            last = y;
            ++steps;
            return true;
        });
    CHECK(t_end == 5.0);
    CHECK(std::abs(last(0) - std::exp(-5.0)) < 1e-10);
    CHECK(steps > 3);
}

TEST_CASE("harmonic oscillator with dense output") {
    V2 y0(1.0, 0.0);
    double worst = 0.0, worst_energy = 0.0;
    integrate_dop853(
        [](double, const V2& y) { return V2(y(1), -y(0)); }, 0.0, y0, 20.0, Tolerances{1e-11, 1e-13},
        [&](const auto& step, const V2& y) {
            for (int k = 0; k <= 8; ++k) {
                const double t = step.t0 + step.h * k / 8.0;
                const V2 p = step(t);
                worst = std::max(worst, std::abs(p(0) - std::cos(t)) + std::abs(p(1) + std::sin(t)));
            }
            worst_energy = std::max(worst_energy, std::abs(y.squaredNorm() - 1.0));
            return true;
        });
    CHECK(worst < 1e-8);
    CHECK(worst_energy < 1e-9);
}

TEST_CASE("observer can stop early, and the interval must be positive") {
    V1 y0;
    y0 << 0.0;
    int calls = 0;
    const double t = integrate_dop853([](double, const V1&) { return V1::Ones(); }, 0.0, y0, 100.0,
                                      Tolerances{},
                                      [&](const auto&, const V1&) { return ++calls < 2; });
    CHECK(calls == 2);
    CHECK(t < 100.0);
    CHECK_THROWS_AS(integrate_dop853([](double, const V1& y) { return y; }, 1.0, y0, 1.0, Tolerances{},
                                     [](const auto&, const V1&) { return true; }),
                    qrabi::Error);
}

TEST_CASE("max_step is honoured") {
    V1 y0;
    y0 << 1.0;
    double largest = 0.0;
    Tolerances tol;
    tol.max_step = 0.05;
    integrate_dop853([](double, const V1& y) { return V1(-y); }, 0.0, y0, 2.0, tol,
                     [&](const auto& step, const V1&) {
                         largest = std::max(largest, step.h);
                         return true;
                     });
    CHECK(largest <= 0.05 + 1e-15);
}

TEST_CASE("step budget raises a stiffness error") {
    V1 y0;
    y0 << 1.0;
    Tolerances tol;
    tol.max_steps = 5;
    tol.max_step = 1e-3;
    try {
        integrate_dop853([](double, const V1& y) { return V1(-y); }, 0.0, y0, 1.0, tol,
                         [](const auto&, const V1&) { return true; });
        FAIL("no error");
    } catch (const qrabi::Error& e) {
        CHECK(e.kind() == qrabi::ErrorKind::Stiffness);
    }
}
