#include "qrabi/hilbert.hpp"

#include <cmath>
#include <numbers>
#include <string>

namespace qrabi {

namespace {

void require_same_tag(const OperatorMatrix& a, const OperatorMatrix& b, const char* what) {
    if (!(a.tag() == b.tag()))
        fail(ErrorKind::Composition, std::string(what) + ": operands act on different spaces");
}

} // namespace

FockSpace::FockSpace(Index dim) : dim_(dim) {
    if (dim < 2)
        fail(ErrorKind::InvalidDimension,
             "Fock dimension must be at least 2, got " + std::to_string(dim));
}

OperatorMatrix::OperatorMatrix(SpaceTag tag, CMatrix entries)
    : tag_(tag), entries_(std::move(entries)) {
    if (entries_.rows() != entries_.cols())
        fail(ErrorKind::Shape, "operator matrix must be square");
    if (entries_.rows() != tag_.dim())
        fail(ErrorKind::Shape, "operator shape " + std::to_string(entries_.rows()) +
                                   " does not match space dimension " +
                                   std::to_string(tag_.dim()));
}

OperatorMatrix operator*(const OperatorMatrix& a, const OperatorMatrix& b) {
    require_same_tag(a, b, "product");
    return {a.tag_, a.entries_ * b.entries_};
}

OperatorMatrix operator+(const OperatorMatrix& a, const OperatorMatrix& b) {
    require_same_tag(a, b, "sum");
    return {a.tag_, a.entries_ + b.entries_};
}

OperatorMatrix operator-(const OperatorMatrix& a, const OperatorMatrix& b) {
    require_same_tag(a, b, "difference");
    return {a.tag_, a.entries_ - b.entries_};
}

OperatorMatrix commutator(const OperatorMatrix& a, const OperatorMatrix& b) {
    return a * b - b * a;
}

StateVector::StateVector(CVector amplitudes) : amplitudes_(std::move(amplitudes)) {
    const double n = amplitudes_.norm();
    if (!(std::abs(n - 1.0) <= 1e-10))
        fail(ErrorKind::InvalidState, "state vector norm " + std::to_string(n) + " is not 1");
}

StateVector StateVector::normalized(CVector amplitudes) {
    const double n = amplitudes.norm();
    if (!(n > 0.0) || !std::isfinite(n))
        fail(ErrorKind::ZeroNorm, "cannot normalize a vector of zero norm");
    amplitudes /= n;
    return StateVector(std::move(amplitudes));
}

double max_hermiticity_defect(const CMatrix& m) {
    if (m.size() == 0)
        return 0.0;
    return (m - m.adjoint()).cwiseAbs().maxCoeff();
}

DensityMatrix::DensityMatrix(CMatrix entries, const DensityTolerances& tol)
    : entries_(std::move(entries)) {
    if (entries_.rows() != entries_.cols() || entries_.rows() == 0)
        fail(ErrorKind::Shape, "density matrix must be square and non-empty");
    const double herm = max_hermiticity_defect(entries_);
    if (!(herm <= tol.hermiticity))
        fail(ErrorKind::InvalidState,
             "density matrix is not Hermitian (defect " + std::to_string(herm) + ")");
    const Complex tr = entries_.trace();
    if (!(std::abs(tr - 1.0) <= tol.trace))
        fail(ErrorKind::InvalidState,
             "density matrix trace " + std::to_string(tr.real()) + " is not 1");
    const CMatrix herm_part = 0.5 * (entries_ + entries_.adjoint());
    Eigen::SelfAdjointEigenSolver<CMatrix> es(herm_part, Eigen::EigenvaluesOnly);
    const double lo = es.eigenvalues().minCoeff();
    if (!(lo >= tol.min_eigenvalue))
        fail(ErrorKind::InvalidState,
             "density matrix has negative eigenvalue " + std::to_string(lo));
}

DensityMatrix DensityMatrix::pure(const StateVector& psi) {
    const CVector& v = psi.amplitudes();
    return DensityMatrix(v * v.adjoint());
}

SystemParams::SystemParams(double omega0, double Omega, double lambda, double kappa)
    : omega0_(omega0), Omega_(Omega), lambda_(lambda), kappa_(kappa) {
    if (!(omega0 > 0.0 && Omega > 0.0 && lambda > 0.0 && kappa > 0.0) ||
        !std::isfinite(omega0 * Omega * lambda * kappa))
        fail(ErrorKind::InvalidParams,
             "omega0, Omega, lambda and kappa must all be finite and strictly positive");
}

SystemParams SystemParams::from_dimensionless(double g, double eta, double zeta) {
    if (!(eta > 0.0) || !(zeta > 0.0))
        fail(ErrorKind::InvalidParams, "eta and zeta must be strictly positive");
    return SystemParams(1.0, eta, 0.5 * g * std::sqrt(eta), 1.0 / zeta);
}

Index required_fock_dim(double abs_beta) {
    const double b = std::abs(abs_beta);
    return static_cast<Index>(std::ceil(b * b + 6.0 * b + 10.0));
}

OperatorMatrix annihilation_op(const FockSpace& space) {
    const Index n = space.dim();
    CMatrix a = CMatrix::Zero(n, n);
    for (Index k = 1; k < n; ++k)
        a(k - 1, k) = std::sqrt(static_cast<double>(k));
    return {SpaceTag::oscillator(n), std::move(a)};
}

OperatorMatrix number_op(const FockSpace& space) {
    const Index n = space.dim();
    CMatrix m = CMatrix::Zero(n, n);
    for (Index k = 0; k < n; ++k)
        m(k, k) = static_cast<double>(k);
    return {SpaceTag::oscillator(n), std::move(m)};
}

OperatorMatrix identity_op(SpaceTag tag) {
    return {tag, CMatrix::Identity(tag.dim(), tag.dim())};
}

Eigen::Matrix2cd pauli_x() {
    Eigen::Matrix2cd m;
    m << 0.0, 1.0, 1.0, 0.0;
    return m;
}

Eigen::Matrix2cd pauli_y() {
    Eigen::Matrix2cd m;
    m << 0.0, -kI, kI, 0.0;
    return m;
}

Eigen::Matrix2cd pauli_z() {
    Eigen::Matrix2cd m;
    m << 1.0, 0.0, 0.0, -1.0;
    return m;
}

Eigen::Matrix2cd sigma_plus() {
    Eigen::Matrix2cd m;
    m << 0.0, 1.0, 0.0, 0.0;
    return m;
}

Eigen::Matrix2cd sigma_minus() { return sigma_plus().transpose(); }

OperatorMatrix tensor_qubit_oscillator(const Eigen::Matrix2cd& qubit_op,
                                       const OperatorMatrix& osc_op) {
    if (osc_op.tag().kind != SpaceKind::Oscillator)
        fail(ErrorKind::Composition, "tensor_qubit_oscillator expects an oscillator-only operator");
    const Index n = osc_op.dim();
    CMatrix out(2 * n, 2 * n);
    for (Index r = 0; r < 2; ++r)
        for (Index c = 0; c < 2; ++c)
            out.block(r * n, c * n, n, n) = qubit_op(r, c) * osc_op.matrix();
    return {SpaceTag::qubit_oscillator(n), std::move(out)};
}

OperatorMatrix rabi_hamiltonian(const SystemParams& p, const FockSpace& space) {
    const OperatorMatrix a = annihilation_op(space);
    const OperatorMatrix id = identity_op(SpaceTag::oscillator(space.dim()));
    const Eigen::Matrix2cd id2 = Eigen::Matrix2cd::Identity();
    return tensor_qubit_oscillator(p.omega0() * id2, a.adjoint() * a) +
           tensor_qubit_oscillator(0.5 * p.Omega() * pauli_z(), id) -
           tensor_qubit_oscillator(p.lambda() * pauli_x(), a + a.adjoint());
}

StateVector coherent_state(Complex beta, const FockSpace& space) {
    const double r = std::abs(beta);
    const Index need = required_fock_dim(r);
    if (space.dim() < need)
        fail(ErrorKind::TruncationInsufficient,
             "coherent state with |beta| = " + std::to_string(r) + " needs N >= " +
                 std::to_string(need) + ", got N = " + std::to_string(space.dim()));
    CVector c = CVector::Zero(space.dim());
    if (r == 0.0) {
        c(0) = 1.0;
        return StateVector(std::move(c));
    }
    const double phase = std::arg(beta);
    const double log_r = std::log(r);
    for (Index n = 0; n < space.dim(); ++n) {
        const double dn = static_cast<double>(n);
        const double log_mag = -0.5 * r * r + dn * log_r - 0.5 * std::lgamma(dn + 1.0);
        c(n) = std::polar(std::exp(log_mag), dn * phase);
    }
    return StateVector::normalized(std::move(c));
}

StateVector cat_state(Complex beta, Parity parity, const FockSpace& space) {
    if (parity == Parity::Odd && beta == Complex{0.0, 0.0})
        fail(ErrorKind::ZeroNorm, "the odd cat state is undefined at beta = 0");
    // |-beta> has amplitudes (-1)^n c_n, so |beta> +- |-beta> keeps only the
    // even (odd) Fock levels of |beta>.
    CVector c = coherent_state(beta, space).amplitudes();
    const Index drop = parity == Parity::Even ? 1 : 0;
    for (Index n = drop; n < c.size(); n += 2)
        c(n) = 0.0;
    return StateVector::normalized(std::move(c));
}

int basis_parity(SpaceTag tag, Index index) {
    if (tag.kind == SpaceKind::Oscillator)
        return static_cast<int>(index % 2);
    const Index n = index % tag.fock_dim;
    const Index excitation = index < tag.fock_dim ? 1 : 0;
    return static_cast<int>((n + excitation) % 2);
}

OperatorMatrix parity_operator(SpaceTag tag) {
    CMatrix p = CMatrix::Zero(tag.dim(), tag.dim());
    for (Index k = 0; k < tag.dim(); ++k)
        p(k, k) = basis_parity(tag, k) == 0 ? 1.0 : -1.0;
    return {tag, std::move(p)};
}

CMatrix devectorize(const CVector& v) {
    const auto d = static_cast<Index>(std::llround(std::sqrt(static_cast<double>(v.size()))));
    if (d * d != v.size() || d == 0)
        fail(ErrorKind::Shape,
             "vector length " + std::to_string(v.size()) + " is not a perfect square");
    return Eigen::Map<const CMatrix>(v.data(), d, d);
}

Complex expectation(const OperatorMatrix& op, const DensityMatrix& rho) {
    if (op.dim() != rho.dim())
        fail(ErrorKind::DimensionMismatch, "operator and state dimensions differ");
    return (op.matrix() * rho.matrix()).trace();
}

Complex expectation(const OperatorMatrix& op, const StateVector& psi) {
    if (op.dim() != psi.dim())
        fail(ErrorKind::DimensionMismatch, "operator and state dimensions differ");
    return psi.amplitudes().dot(op.matrix() * psi.amplitudes());
}

double fidelity(const DensityMatrix& rho1, const DensityMatrix& rho2) {
    constexpr double clip = 1e-12;
    if (rho1.dim() != rho2.dim())
        fail(ErrorKind::DimensionMismatch, "fidelity of states on different spaces");

    const CMatrix h1 = 0.5 * (rho1.matrix() + rho1.matrix().adjoint());
    Eigen::SelfAdjointEigenSolver<CMatrix> es1(h1);
    Eigen::VectorXd w = es1.eigenvalues();
    for (Index k = 0; k < w.size(); ++k)
        w(k) = w(k) < clip ? 0.0 : std::sqrt(w(k));
    const CMatrix& u = es1.eigenvectors();
    const CMatrix sqrt1 = u * w.asDiagonal() * u.adjoint();

    CMatrix m = sqrt1 * rho2.matrix() * sqrt1;
    m = 0.5 * (m + m.adjoint()).eval();
    Eigen::SelfAdjointEigenSolver<CMatrix> es2(m, Eigen::EigenvaluesOnly);
    double s = 0.0;
    for (Index k = 0; k < es2.eigenvalues().size(); ++k) {
        const double lam = es2.eigenvalues()(k);
        if (lam >= clip)
            s += std::sqrt(lam);
    }
    return s * s;
}

} // namespace qrabi
