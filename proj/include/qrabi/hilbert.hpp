#pragma once

// Truncated Fock-space operator algebra for a qubit coupled to one oscillator.
//
// Conventions used throughout the library:
//   * the oscillator keeps Fock levels |0>..|N-1>;
//   * composite operators are ordered qubit-first, so the joint basis index is
//     q_index * N + n with q_index = 0 for the excited qubit state (sigma_z = +1)
//     and q_index = 1 for the ground state;
//   * density matrices are vectorized by column stacking: element (i, j) lands
//     at j * d + i, hence vec(A rho B) = (B^T kron A) vec(rho).

#include <cstdint>

#include "qrabi/error.hpp"
#include "qrabi/types.hpp"

namespace qrabi {

class FockSpace {
public:
    explicit FockSpace(Index dim);

    Index dim() const noexcept { return dim_; }

private:
    Index dim_;
};

enum class SpaceKind : std::uint8_t { Oscillator, QubitOscillator };

struct SpaceTag {
    SpaceKind kind = SpaceKind::Oscillator;
    Index fock_dim = 2;

    static SpaceTag oscillator(Index n) { return {SpaceKind::Oscillator, n}; }
    static SpaceTag qubit_oscillator(Index n) { return {SpaceKind::QubitOscillator, n}; }

    Index dim() const noexcept {
        return kind == SpaceKind::Oscillator ? fock_dim : 2 * fock_dim;
    }

    friend bool operator==(const SpaceTag&, const SpaceTag&) = default;
};

// A square matrix that knows which space it acts on.
class OperatorMatrix {
public:
    OperatorMatrix(SpaceTag tag, CMatrix entries);

    const SpaceTag& tag() const noexcept { return tag_; }
    const CMatrix& matrix() const noexcept { return entries_; }
    Index dim() const noexcept { return entries_.rows(); }

    OperatorMatrix adjoint() const { return {tag_, entries_.adjoint()}; }

    friend OperatorMatrix operator*(const OperatorMatrix& a, const OperatorMatrix& b);
    friend OperatorMatrix operator+(const OperatorMatrix& a, const OperatorMatrix& b);
    friend OperatorMatrix operator-(const OperatorMatrix& a, const OperatorMatrix& b);
    friend OperatorMatrix operator*(Complex s, const OperatorMatrix& a) {
        return {a.tag_, s * a.entries_};
    }

private:
    SpaceTag tag_;
    CMatrix entries_;
};

OperatorMatrix commutator(const OperatorMatrix& a, const OperatorMatrix& b);

enum class Parity : std::uint8_t { Even, Odd };

class StateVector {
public:
    // Throws InvalidState unless the vector has unit norm to 1e-10.
    explicit StateVector(CVector amplitudes);

    const CVector& amplitudes() const noexcept { return amplitudes_; }
    Index dim() const noexcept { return amplitudes_.size(); }

    // Rescales to unit norm; ZeroNorm if the vector vanishes.
    static StateVector normalized(CVector amplitudes);

private:
    CVector amplitudes_;
};

struct DensityTolerances {
    double hermiticity = 1e-10;
    double trace = 1e-8;
    double min_eigenvalue = -1e-8;
};

// Hermitian, unit-trace, positive semidefinite; checked on construction.
class DensityMatrix {
public:
    explicit DensityMatrix(CMatrix entries, const DensityTolerances& tol = {});

    static DensityMatrix pure(const StateVector& psi);

    const CMatrix& matrix() const noexcept { return entries_; }
    Index dim() const noexcept { return entries_.rows(); }

private:
    CMatrix entries_;
};

// Physical frequencies of the open Rabi model with the dimensionless controls
// g = 2 lambda / sqrt(omega0 Omega), eta = Omega / omega0, zeta = omega0 / kappa
// and h = eta / zeta derived from them.
class SystemParams {
public:
    SystemParams(double omega0, double Omega, double lambda, double kappa);

    // omega0 = 1 units: Omega = eta, lambda = g sqrt(eta) / 2, kappa = 1 / zeta.
    static SystemParams from_dimensionless(double g, double eta, double zeta);

    double omega0() const noexcept { return omega0_; }
    double Omega() const noexcept { return Omega_; }
    double lambda() const noexcept { return lambda_; }
    double kappa() const noexcept { return kappa_; }

    double g() const noexcept { return 2.0 * lambda_ / std::sqrt(omega0_ * Omega_); }
    double eta() const noexcept { return Omega_ / omega0_; }
    double zeta() const noexcept { return omega0_ / kappa_; }
    double h() const noexcept { return eta() / zeta(); }

private:
    double omega0_, Omega_, lambda_, kappa_;
};

// ceil(|beta|^2 + 6 |beta| + 10): the smallest Fock dimension that holds a
// coherent state of amplitude |beta| with a negligible Poisson tail.
Index required_fock_dim(double abs_beta);

OperatorMatrix annihilation_op(const FockSpace& space);
OperatorMatrix number_op(const FockSpace& space);
OperatorMatrix identity_op(SpaceTag tag);

Eigen::Matrix2cd pauli_x();
Eigen::Matrix2cd pauli_y();
Eigen::Matrix2cd pauli_z();
Eigen::Matrix2cd sigma_plus();
Eigen::Matrix2cd sigma_minus();

// qubit_op kron osc_op on the 2N-dimensional joint space.
OperatorMatrix tensor_qubit_oscillator(const Eigen::Matrix2cd& qubit_op,
                                       const OperatorMatrix& osc_op);

// omega0 a^dag a + Omega/2 sigma_z - lambda (a + a^dag) sigma_x.
OperatorMatrix rabi_hamiltonian(const SystemParams& params, const FockSpace& space);

StateVector coherent_state(Complex beta, const FockSpace& space);
StateVector cat_state(Complex beta, Parity parity, const FockSpace& space);

// exp(i pi n) on the oscillator; exp(i pi (n + (sigma_z + 1)/2)) on the joint space.
OperatorMatrix parity_operator(SpaceTag tag);

// Parity (0 even, 1 odd) of basis state `index` under parity_operator(tag).
int basis_parity(SpaceTag tag, Index index);

template <typename Derived>
CVector vectorize(const Eigen::MatrixBase<Derived>& m) {
    const CMatrix dense = m;
    return Eigen::Map<const CVector>(dense.data(), dense.size());
}

inline CVector vectorize(const DensityMatrix& rho) { return vectorize(rho.matrix()); }

// Inverse of vectorize; Shape error unless the length is a perfect square.
CMatrix devectorize(const CVector& v);

Complex expectation(const OperatorMatrix& op, const DensityMatrix& rho);
Complex expectation(const OperatorMatrix& op, const StateVector& psi);

// Uhlmann fidelity Tr[sqrt(sqrt(rho1) rho2 sqrt(rho1))]^2.
double fidelity(const DensityMatrix& rho1, const DensityMatrix& rho2);

double max_hermiticity_defect(const CMatrix& m);

} // namespace qrabi
