#pragma once

// Sparse Krylov kernels: the action of a matrix exponential on a vector and a
// restarted Arnoldi eigensolver for spectral transformations.

#include <functional>
#include <vector>

#include "qrabi/types.hpp"

namespace qrabi::spectral {

struct ExpvOptions {
    double tol = 1e-10;
    int krylov_dim = 30;
    int max_substeps = 200000;
};

struct ExpvStats {
    int substeps = 0;
    int rejections = 0;
    double error_estimate = 0.0;
    double hump = 0.0; // max norm of the propagated vector
};

// exp(t A) v by the adaptive Krylov scheme of Expokit (Sidje 1998). Domain
// error for t < 0.
CVector expv(const SparseCMatrix& a, double t, const CVector& v, const ExpvOptions& options = {},
             ExpvStats* stats = nullptr);

// Applies a linear operator: out = op(in).
using LinearMap = std::function<void(const CVector& in, CVector& out)>;

struct ArnoldiOptions {
    int nev = 6;
    int ncv = 0; // 0 selects max(2 nev + 1, 20)
    double tol = 1e-12;
    int max_restarts = 300;
};

struct ArnoldiResult {
    CVector values;  // Ritz values of the operator, largest magnitude first
    CMatrix vectors; // unit-norm Ritz vectors
    std::vector<double> residuals;
    int restarts = 0;
    int matvecs = 0;
};

// Largest-magnitude eigenpairs of op by thick-restart Arnoldi. Solver error
// with diagnostics when the wanted pairs fail to converge.
ArnoldiResult arnoldi(const LinearMap& op, Index n, const ArnoldiOptions& options,
                      const CVector& start);

struct EigenOptions {
    int nev = 6;
    double shift = 1e-2; // real, just right of the spectrum
    double tol = 1e-12;
    int max_restarts = 300;
};

struct EigenResult {
    CVector values;  // sorted by descending real part
    CMatrix vectors; // columns match values
    std::vector<double> residuals; // ||A x - lambda x|| for unit x
};

// The nev eigenvalues of a sparse matrix nearest to `shift`, found with
// shift-invert Arnoldi on (A - shift)^{-1}; for a Liouvillian with a small
// positive shift these are the slow modes.
EigenResult shift_invert_eigenpairs(const SparseCMatrix& a, const EigenOptions& options);

// All eigenpairs by dense decomposition, sorted by descending real part.
// Without vectors only values (and empty residuals) are returned.
EigenResult dense_eigenpairs(const CMatrix& a, bool compute_vectors = true);

} // namespace qrabi::spectral
