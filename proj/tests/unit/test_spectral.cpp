#include <doctest.h>

#include <algorithm>
#include <random>

#include <unsupported/Eigen/MatrixFunctions>

#include "oracles.hpp"
#include "qrabi/error.hpp"
#include "qrabi/spectral.hpp"

using namespace qrabi;
using namespace qrabi::spectral;

namespace {

// A dissipative random sparse matrix: random couplings plus a negative diagonal.
SparseCMatrix test_matrix(int n, unsigned seed, double damping) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> nd;
    std::uniform_int_distribution<int> pick(0, n - 1);
    std::vector<Eigen::Triplet<Complex>> t;
    for (int i = 0; i < n; ++i) {
        t.emplace_back(i, i, Complex(-damping * (1.0 + i % 7), nd(rng)));
        for (int k = 0; k < 4; ++k)
            t.emplace_back(i, pick(rng), 0.3 * Complex(nd(rng), nd(rng)));
    }
    SparseCMatrix m(n, n);
    m.setFromTriplets(t.begin(), t.end());
    return m;
}

CVector unit_vector(int n, unsigned seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> nd;
    CVector v(n);
    for (auto& x : v)
        x = Complex(nd(rng), nd(rng));
    return v.normalized();
}

} // namespace

TEST_CASE("Krylov exponential matches the dense exponential") {
    for (int n : {5, 40, 150}) {
        const SparseCMatrix a = test_matrix(n, n, 0.5);
        const CVector v = unit_vector(n, n + 1);
        for (double t : {0.1, 1.0, 7.5}) {
            ExpvStats stats;
            const CVector k = expv(a, t, v, {}, &stats);
            const CMatrix dense = (t * CMatrix(a)).exp();
            const CVector ref = dense * v;
            CHECK((k - ref).norm() <= 1e-9 * std::max(1.0, ref.norm()));
            CHECK(stats.substeps >= 1);
        }
    }
}

TEST_CASE("Krylov exponential edge cases") {
    const SparseCMatrix a = test_matrix(20, 3, 1.0);
    const CVector v = unit_vector(20, 4);
    CHECK((expv(a, 0.0, v) - v).norm() == 0.0);
    CHECK((expv(a, 1.0, CVector::Zero(20))).norm() == 0.0);
    try {
        expv(a, -1.0, v);
        FAIL("no error");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::Domain);
    }
    // a Krylov space smaller than the requested dimension (happy breakdown)
    SparseCMatrix d(6, 6);
    for (int i = 0; i < 6; ++i)
        d.insert(i, i) = Complex(-i, 0.0);
    CVector e0 = CVector::Zero(6);
    e0(2) = 1.0;
    const CVector r = expv(d, 2.0, e0);
    CHECK(std::abs(r(2) - std::exp(-4.0)) < 1e-13);
}

TEST_CASE("Arnoldi finds the dominant eigenvalues of a diagonal operator") {
    const int n = 300;
    CVector diag(n);
    for (int i = 0; i < n; ++i)
        diag(i) = Complex(1.0 / (1.0 + i), 0.05 * std::sin(double(i)));
    const LinearMap op = [&](const CVector& in, CVector& out) { out = diag.cwiseProduct(in); };
    ArnoldiOptions opts;
    opts.nev = 5;
    const auto r = arnoldi(op, n, opts, unit_vector(n, 9));
    REQUIRE(r.values.size() == 5);
    std::vector<double> mags;
    for (int i = 0; i < n; ++i)
        mags.push_back(std::abs(diag(i)));
    std::sort(mags.rbegin(), mags.rend());
    for (int k = 0; k < 5; ++k) {
        CHECK(std::abs(r.values(k)) == doctest::Approx(mags[k]).epsilon(1e-10));
        CHECK(r.residuals[k] < 1e-10);
        CHECK(std::abs(r.vectors.col(k).norm() - 1.0) < 1e-12);
    }
}

TEST_CASE("shift-invert agrees with the dense spectrum") {
    const int n = 400;
    const SparseCMatrix a = test_matrix(n, 77, 0.2);
    EigenOptions opts;
    opts.nev = 6;
    opts.shift = 0.5;
    const auto si = shift_invert_eigenpairs(a, opts);
    Eigen::ComplexEigenSolver<CMatrix> es(CMatrix(a), false);
    std::vector<Complex> all(es.eigenvalues().begin(), es.eigenvalues().end());
    std::sort(all.begin(), all.end(), [&](Complex x, Complex y) {
        return std::abs(x - opts.shift) < std::abs(y - opts.shift);
    });
    REQUIRE(si.values.size() == 6);
    for (int k = 0; k < 6; ++k) {
        double best = 1e300;
        for (int j = 0; j < 6; ++j)
            best = std::min(best, std::abs(si.values(k) - all[j]));
        CHECK(best < 1e-9);
        CHECK(si.residuals[k] < 1e-8);
        CHECK(((CMatrix(a) * si.vectors.col(k)) - si.values(k) * si.vectors.col(k)).norm() < 1e-8);
    }
    for (int k = 1; k < 6; ++k)
        CHECK(si.values(k - 1).real() >= si.values(k).real());
}

TEST_CASE("dense eigenpairs are sorted and consistent") {
    const CMatrix m = oracle::random_matrix(12, 5);
    const auto r = dense_eigenpairs(m);
    for (int k = 0; k < 12; ++k) {
        CHECK(((m * r.vectors.col(k)) - r.values(k) * r.vectors.col(k)).norm() < 1e-10);
        if (k)
            CHECK(r.values(k - 1).real() >= r.values(k).real());
    }
    const auto v = dense_eigenpairs(m, false);
    CHECK(v.vectors.size() == 0);
    CHECK((v.values - r.values).norm() < 1e-10);
}
