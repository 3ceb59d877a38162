#include <doctest.h>

#include <random>

#include "oracles.hpp"
#include "qrabi/hilbert.hpp"

using namespace qrabi;

namespace {

double max_abs(const CMatrix& m) { return m.cwiseAbs().maxCoeff(); }

template <typename F>
ErrorKind kind_of(F&& f) {
    try {
        f();
    } catch (const Error& e) {
        return e.kind();
    }
    FAIL("expected a qrabi::Error");
    return ErrorKind::Domain;
}

} // namespace

TEST_CASE("ladder operator") {
    const auto a = annihilation_op(FockSpace(2));
    CHECK(a.matrix()(0, 1) == Complex(1.0, 0.0));
    CHECK(a.matrix()(0, 0) == Complex(0.0));
    CHECK(a.matrix()(1, 0) == Complex(0.0));
    CHECK(a.matrix()(1, 1) == Complex(0.0));

    const auto n = number_op(FockSpace(4));
    Eigen::SelfAdjointEigenSolver<CMatrix> es(n.matrix());
    for (int k = 0; k < 4; ++k)
        CHECK(es.eigenvalues()(k) == doctest::Approx(k).epsilon(1e-14));

    CHECK(kind_of([] { FockSpace(1); }) == ErrorKind::InvalidDimension);
    CHECK(max_abs(a.matrix() - oracle::ladder(2)) == 0.0);
}

TEST_CASE("truncated commutator [a, a^dag]") {
    const int N = 50;
    const auto a = annihilation_op(FockSpace(N));
    const CMatrix c = commutator(a, a.adjoint()).matrix();
    CMatrix expected = CMatrix::Identity(N, N);
    expected(N - 1, N - 1) = 1.0 - N;
    CHECK(max_abs(c - expected) < 1e-12);
}

TEST_CASE("qubit-oscillator tensor products") {
    const FockSpace s(3);
    const auto id = tensor_qubit_oscillator(Eigen::Matrix2cd::Identity(), identity_op(SpaceTag::oscillator(3)));
    CHECK(max_abs(id.matrix() - CMatrix::Identity(6, 6)) == 0.0);
    CHECK(id.tag() == SpaceTag::qubit_oscillator(3));

    // the smallest oscillator allowed here is N = 2
    const auto z = tensor_qubit_oscillator(pauli_z(), identity_op(SpaceTag::oscillator(2)));
    CMatrix expected = CMatrix::Zero(4, 4);
    expected.diagonal() << 1, 1, -1, -1;
    CHECK(max_abs(z.matrix() - expected) == 0.0);

    const auto xa = tensor_qubit_oscillator(pauli_x(), annihilation_op(s));
    CHECK(std::abs(xa.matrix().trace()) == 0.0);

    CHECK(kind_of([&] { tensor_qubit_oscillator(pauli_x(), xa); }) == ErrorKind::Composition);
}

TEST_CASE("coherent states") {
    const auto vac = coherent_state(0.0, FockSpace(12));
    CHECK(std::abs(vac.amplitudes()(0) - 1.0) < 1e-15);
    CHECK(vac.amplitudes().tail(11).norm() == 0.0);

    const FockSpace s(40);
    const auto psi = coherent_state(2.0, s);
    CHECK(oracle::photon_number(psi.amplitudes()) == doctest::Approx(4.0).epsilon(1e-6));
    CHECK((psi.amplitudes() - oracle::coherent(2.0, 40)).norm() < 1e-12);
    const CVector apsi = annihilation_op(s).matrix() * psi.amplitudes();
    CHECK((apsi - 2.0 * psi.amplitudes()).head(30).cwiseAbs().maxCoeff() < 1e-6);

    const auto r = DensityMatrix::pure(coherent_state(1.5, FockSpace(40)));
    CHECK(expectation(number_op(FockSpace(40)), r).real() == doctest::Approx(2.25).epsilon(1e-6));

    const Complex phased = std::polar(2.0, 0.7);
    CHECK((coherent_state(phased, s).amplitudes() - oracle::coherent(phased, 40)).norm() < 1e-12);

    CHECK(kind_of([] { coherent_state(4.0, FockSpace(20)); }) == ErrorKind::TruncationInsufficient);
    try {
        coherent_state(4.0, FockSpace(20));
    } catch (const Error& e) {
        CHECK(std::string(e.what()).find(std::to_string(required_fock_dim(4.0))) != std::string::npos);
    }
}

TEST_CASE("cat states") {
    const FockSpace s(40);
    const auto even0 = cat_state(0.0, Parity::Even, s);
    CHECK(std::abs(even0.amplitudes()(0) - 1.0) < 1e-15);
    CHECK(kind_of([&] { cat_state(0.0, Parity::Odd, s); }) == ErrorKind::ZeroNorm);

    const auto e = cat_state(2.0, Parity::Even, s).amplitudes();
    const auto o = cat_state(2.0, Parity::Odd, s).amplitudes();
    for (int k = 1; k < 40; k += 2)
        CHECK(e(k) == Complex(0.0));
    for (int k = 0; k < 40; k += 2)
        CHECK(o(k) == Complex(0.0));
    CHECK(oracle::photon_number(e) == doctest::Approx(4.0 * std::tanh(4.0)).epsilon(1e-6));
    CHECK(oracle::photon_number(o) == doctest::Approx(4.0 / std::tanh(4.0)).epsilon(1e-6));
    CHECK((e - oracle::cat(2.0, true, 40)).norm() < 1e-12);
    CHECK(std::abs(e.dot(o)) < 1e-15);

    // c_e |beta>_e + c_o |beta>_o with the analytic weights is |beta>
    for (Complex beta : {Complex(2.0, 0.0), std::polar(1.3, 0.4), Complex(0.0, 2.5)}) {
        const double b2 = std::norm(beta);
        const double ce = std::sqrt((1.0 + std::exp(-2.0 * b2)) / 2.0);
        const double co = std::sqrt((1.0 - std::exp(-2.0 * b2)) / 2.0);
        const CVector rebuilt = ce * cat_state(beta, Parity::Even, s).amplitudes() +
                                co * cat_state(beta, Parity::Odd, s).amplitudes();
        CHECK((rebuilt - coherent_state(beta, s).amplitudes()).norm() < 1e-8);
    }
}

TEST_CASE("parity operators") {
    const auto p2 = parity_operator(SpaceTag::oscillator(2));
    CHECK(p2.matrix()(0, 0) == Complex(1.0));
    CHECK(p2.matrix()(1, 1) == Complex(-1.0));
    for (SpaceTag t : {SpaceTag::oscillator(7), SpaceTag::qubit_oscillator(5)}) {
        const CMatrix p = parity_operator(t).matrix();
        CHECK(max_abs(p * p - CMatrix::Identity(t.dim(), t.dim())) == 0.0);
    }
    // joint parity (-1)^(n + q) with q = 1 for the excited qubit, which sits at index block 0
    const auto pj = parity_operator(SpaceTag::qubit_oscillator(3)).matrix();
    CHECK(pj(0, 0) == Complex(-1.0));
    CHECK(pj(3, 3) == Complex(1.0));
    CHECK(pj(4, 4) == Complex(-1.0));
}

TEST_CASE("strong parity symmetry of the Rabi model for random parameters") {
    std::mt19937_64 rng(20240611);
    std::uniform_real_distribution<double> u(0.05, 3.0);
    const FockSpace s(20);
    const auto P = parity_operator(SpaceTag::qubit_oscillator(20));
    const auto a2 = tensor_qubit_oscillator(Eigen::Matrix2cd::Identity(),
                                            annihilation_op(s) * annihilation_op(s));
    CHECK(max_abs(commutator(a2, P).matrix()) < 1e-12);
    double worst = 0.0;
    for (int k = 0; k < 100; ++k) {
        const SystemParams p(u(rng), u(rng), u(rng), u(rng));
        const auto H = rabi_hamiltonian(p, s);
        worst = std::max(worst, max_abs(commutator(H, P).matrix()));
    }
    CHECK(worst < 1e-12);

    const SystemParams p(1.0, 2.0, 0.7, 0.1);
    CHECK(max_abs(rabi_hamiltonian(p, FockSpace(6)).matrix() -
                  oracle::rabi_hamiltonian(6, 1.0, 2.0, 0.7)) < 1e-14);
}

TEST_CASE("system parameters") {
    const SystemParams p(1.3, 40.0, 2.1, 0.05);
    CHECK(p.g() == doctest::Approx(2 * 2.1 / std::sqrt(1.3 * 40.0)).epsilon(1e-12));
    CHECK(p.eta() == doctest::Approx(40.0 / 1.3).epsilon(1e-12));
    CHECK(p.zeta() == doctest::Approx(1.3 / 0.05).epsilon(1e-12));
    CHECK(p.h() == doctest::Approx(p.eta() / p.zeta()).epsilon(1e-12));
    const auto q = SystemParams::from_dimensionless(0.8, 50.0, 30.0);
    CHECK(q.g() == doctest::Approx(0.8).epsilon(1e-12));
    CHECK(q.eta() == doctest::Approx(50.0).epsilon(1e-12));
    CHECK(q.zeta() == doctest::Approx(30.0).epsilon(1e-12));
    CHECK(kind_of([] { SystemParams(1.0, 0.0, 1.0, 1.0); }) == ErrorKind::InvalidParams);
    CHECK(kind_of([] { SystemParams(1.0, 1.0, 1.0, -1.0); }) == ErrorKind::InvalidParams);
}

TEST_CASE("vectorization") {
    const CMatrix rho = oracle::random_density(5, 3);
    CHECK(devectorize(vectorize(rho)) == rho);
    const CVector vi = vectorize(CMatrix(CMatrix::Identity(4, 4) / 4.0));
    int nonzero = 0;
    for (Index k = 0; k < vi.size(); ++k)
        if (vi(k) != Complex(0.0)) {
            ++nonzero;
            CHECK(vi(k) == Complex(0.25));
        }
    CHECK(nonzero == 4);
    CHECK(vectorize(rho)(2 * 5 + 1) == rho(1, 2));
    CHECK(kind_of([] { devectorize(CVector::Zero(5)); }) == ErrorKind::Shape);

    for (int d : {2, 4, 6, 8}) {
        const CMatrix A = oracle::random_matrix(d, 10 + d), B = oracle::random_matrix(d, 20 + d),
                      R = oracle::random_matrix(d, 30 + d);
        const CMatrix K = oracle::kron(B.transpose(), A);
        const double scale = A.norm() * B.norm() * R.norm();
        CHECK((vectorize(A * R * B) - K * vectorize(R)).norm() / scale < 1e-12);
    }
}

TEST_CASE("expectation values") {
    const FockSpace s(6);
    const DensityMatrix rho(oracle::random_density(6, 9));
    CHECK(std::abs(expectation(identity_op(SpaceTag::oscillator(6)), rho) - 1.0) < 1e-12);
    CHECK(std::abs(expectation(number_op(s), rho).imag()) < 1e-10);
    const FockSpace wide(10);
    const auto vac = DensityMatrix::pure(coherent_state(0.0, wide));
    CHECK(std::abs(expectation(number_op(wide), vac)) == 0.0);
    CHECK(kind_of([&] { expectation(number_op(FockSpace(5)), rho); }) == ErrorKind::DimensionMismatch);
}

TEST_CASE("fidelity") {
    const FockSpace s(40);
    for (unsigned seed : {1u, 2u, 3u}) {
        const DensityMatrix r(oracle::random_density(7, seed));
        CHECK(fidelity(r, r) == doctest::Approx(1.0).epsilon(1e-8));
        const DensityMatrix q(oracle::random_density(7, seed + 100, 2));
        CHECK(std::abs(fidelity(r, q) - fidelity(q, r)) < 1e-8);
        CHECK(fidelity(r, q) >= 0.0);
        CHECK(fidelity(r, q) <= 1.0 + 1e-12);
    }
    const auto n0 = DensityMatrix::pure(coherent_state(0.0, FockSpace(10)));
    CMatrix one = CMatrix::Zero(10, 10);
    one(1, 1) = 1.0;
    CHECK(fidelity(n0, DensityMatrix(one)) < 1e-12);

    const auto e = cat_state(2.0, Parity::Even, s), o = cat_state(2.0, Parity::Odd, s);
    CHECK(fidelity(DensityMatrix::pure(e), DensityMatrix::pure(o)) < 1e-8);

    const auto c1 = coherent_state(1.0, s), c2 = coherent_state(Complex(0.5, 0.8), s);
    const double overlap = std::norm(c1.amplitudes().dot(c2.amplitudes()));
    CHECK(fidelity(DensityMatrix::pure(c1), DensityMatrix::pure(c2)) ==
          doctest::Approx(overlap).epsilon(1e-8));
    CHECK(oracle::pure_fidelity(c1.amplitudes(), DensityMatrix::pure(c2).matrix()) ==
          doctest::Approx(overlap).epsilon(1e-12));

    CMatrix bad = oracle::random_density(3, 4);
    bad(0, 1) += 0.1;
    CHECK(kind_of([&] { DensityMatrix{bad}; }) == ErrorKind::InvalidState);
}
