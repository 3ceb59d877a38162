#include "qrabi/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <sstream>
#include <string>

#include <Eigen/SparseLU>
#include <unsupported/Eigen/MatrixFunctions>

#include "qrabi/error.hpp"

namespace qrabi::spectral {

namespace {

double inf_norm(const SparseCMatrix& a) {
    Eigen::VectorXd row_sums = Eigen::VectorXd::Zero(a.rows());
    for (Index k = 0; k < a.outerSize(); ++k)
        for (SparseCMatrix::InnerIterator it(a, k); it; ++it)
            row_sums(it.row()) += std::abs(it.value());
    return a.rows() == 0 ? 0.0 : row_sums.maxCoeff();
}

// Rounds a step size to two significant digits, as Expokit does, so that the
// sequence of substeps is insensitive to the last bits of the estimates.
double round_step(double t) {
    const double s = std::pow(10.0, std::floor(std::log10(t)) - 1.0);
    return std::ceil(t / s) * s;
}

} // namespace

CVector expv(const SparseCMatrix& a, double t, const CVector& v, const ExpvOptions& options,
             ExpvStats* stats) {
    if (!(t >= 0.0) || !std::isfinite(t))
        fail(ErrorKind::Domain, "evolution time must be finite and non-negative");
    if (a.rows() != a.cols() || a.cols() != v.size())
        fail(ErrorKind::DimensionMismatch, "expv: matrix and vector sizes differ");

    ExpvStats local;
    ExpvStats& st = stats ? *stats : local;
    st = {};

    const Index n = v.size();
    const double beta0 = v.norm();
    if (t == 0.0 || beta0 == 0.0 || n == 0)
        return v;

    const double tol = options.tol;
    const int m = static_cast<int>(std::min<Index>(options.krylov_dim, n));
    const double anorm = inf_norm(a);
    if (anorm == 0.0)
        return v;
    constexpr double btol = 1e-7;
    constexpr double gamma = 0.9;
    constexpr double delta = 1.2;
    constexpr int max_reject = 10;
    const double rndoff = anorm * std::numeric_limits<double>::epsilon();

    int k1 = 2;
    double xm = 1.0 / m;
    double beta = beta0;
    const double mp1 = m + 1.0;
    const double fact = std::pow(mp1 / std::exp(1.0), mp1) * std::sqrt(2.0 * std::numbers::pi * mp1);
    double t_new = (1.0 / anorm) * std::pow((fact * tol) / (4.0 * beta * anorm), xm);
    t_new = round_step(t_new);

    CVector w = v;
    double t_now = 0.0;
    st.hump = beta;

    CMatrix basis(n, m + 1);
    CVector p(n);
    while (t_now < t) {
        if (++st.substeps > options.max_substeps)
            fail(ErrorKind::Solver, "expv: exceeded " + std::to_string(options.max_substeps) +
                                        " substeps at t = " + std::to_string(t_now));
        double t_step = std::min(t - t_now, t_new);
        CMatrix hess = CMatrix::Zero(m + 2, m + 2);
        basis.col(0) = w / beta;
        int mb = m;
        for (int j = 0; j < m; ++j) {
            p.noalias() = a * basis.col(j);
            for (int i = 0; i <= j; ++i) {
                hess(i, j) = basis.col(i).dot(p);
                p -= hess(i, j) * basis.col(i);
            }
            const double s = p.norm();
            if (s < btol) {
                // happy breakdown: the Krylov space is invariant
                k1 = 0;
                mb = j + 1;
                t_step = t - t_now;
                break;
            }
            hess(j + 1, j) = s;
            basis.col(j + 1) = p / s;
        }
        double avnorm = 0.0;
        if (k1 != 0) {
            hess(m + 1, m) = 1.0;
            avnorm = (a * basis.col(m)).norm();
        }

        CMatrix f;
        double err_loc = 0.0;
        for (int reject = 0;; ++reject) {
            const int mx = mb + k1;
            f = (t_step * hess.topLeftCorner(mx, mx)).exp();
            if (k1 == 0) {
                err_loc = btol;
                break;
            }
            const double phi1 = std::abs(beta * f(m, 0));
            const double phi2 = std::abs(beta * f(m + 1, 0) * avnorm);
            if (phi1 > 10.0 * phi2) {
                err_loc = phi2;
                xm = 1.0 / m;
            } else if (phi1 > phi2) {
                err_loc = (phi1 * phi2) / (phi1 - phi2);
                xm = 1.0 / m;
            } else {
                err_loc = phi1;
                xm = 1.0 / (m - 1);
            }
            if (err_loc <= delta * t_step * tol)
                break;
            if (reject == max_reject)
                fail(ErrorKind::Solver, "expv: requested tolerance is too high at t = " +
                                            std::to_string(t_now));
            ++st.rejections;
            t_step = round_step(gamma * t_step * std::pow(t_step * tol / err_loc, xm));
        }

        const int mx = mb + std::max(0, k1 - 1);
        w = basis.leftCols(mx) * (beta * f.col(0).head(mx));
        beta = w.norm();
        st.hump = std::max(st.hump, beta);
        t_now += t_step;
        t_new = round_step(gamma * t_step * std::pow(t_step * tol / err_loc, xm));
        st.error_estimate += std::max(err_loc, rndoff);
        if (beta == 0.0)
            break;
    }
    return w;
}

namespace {

// Moves diagonal entry k of the complex upper-triangular t up to position
// `target` by adjacent Givens swaps, updating the Schur vectors u.
void schur_move(CMatrix& t, CMatrix& u, Index k, Index target) {
    const Index n = t.rows();
    for (Index i = k; i > target; --i) {
        const Index lo = i - 1;
        const Complex a = t(lo, lo);
        const Complex b = t(i, i);
        const Complex c = t(lo, i);
        // (c, b - a) is the eigenvector of the 2x2 block for eigenvalue b
        Complex x1 = c;
        Complex x2 = b - a;
        const double r = std::hypot(std::abs(x1), std::abs(x2));
        if (r == 0.0)
            continue;
        x1 /= r;
        x2 /= r;
        Eigen::Matrix2cd g;
        g << x1, -std::conj(x2), x2, std::conj(x1);
        t.block(0, lo, n, 2) = t.block(0, lo, n, 2) * g;
        t.block(lo, 0, 2, n) = g.adjoint() * t.block(lo, 0, 2, n);
        t(i, lo) = 0.0;
        u.block(0, lo, u.rows(), 2) = u.block(0, lo, u.rows(), 2) * g;
    }
}

CVector default_start(Index n) {
    // deterministic, generic start vector
    CVector v(n);
    for (Index i = 0; i < n; ++i)
        v(i) = Complex(1.0 + 0.5 * std::sin(0.7 * static_cast<double>(i) + 0.3),
                       0.25 * std::cos(1.3 * static_cast<double>(i)));
    return v;
}

} // namespace

ArnoldiResult arnoldi(const LinearMap& op, Index n, const ArnoldiOptions& options,
                      const CVector& start) {
    if (n <= 0)
        fail(ErrorKind::Shape, "arnoldi: empty operator");
    const Index nev = std::min<Index>(options.nev, n);
    Index m = options.ncv > 0 ? options.ncv : std::max<Index>(2 * nev + 1, 20);
    m = std::min(m, n);
    const Index keep = std::min(m - 1, std::max(nev, nev + (m - nev) / 2));

    CMatrix basis = CMatrix::Zero(n, m + 1);
    CMatrix hess = CMatrix::Zero(m + 1, m);
    CVector v0 = start.size() == n && start.norm() > 0.0 ? start : default_start(n);
    basis.col(0) = v0 / v0.norm();

    ArnoldiResult result;
    CVector w(n);
    Index k = 0;
    for (int restart = 0;; ++restart) {
        for (Index j = k; j < m; ++j) {
            op(basis.col(j), w);
            ++result.matvecs;
            const double wnorm = w.norm();
            CVector h = basis.leftCols(j + 1).adjoint() * w;
            w.noalias() -= basis.leftCols(j + 1) * h;
            const CVector h2 = basis.leftCols(j + 1).adjoint() * w;
            w.noalias() -= basis.leftCols(j + 1) * h2;
            h += h2;
            hess.col(j).head(j + 1) += h;
            double s = w.norm();
            if (s <= 1e-14 * std::max(wnorm, 1.0)) {
                // invariant subspace: continue with a fresh orthogonal direction
                hess(j + 1, j) = 0.0;
                CVector r = default_start(n).cwiseProduct(CVector::LinSpaced(n, 1.0, 2.0));
                for (int pass = 0; pass < 2; ++pass)
                    r -= basis.leftCols(j + 1) * (basis.leftCols(j + 1).adjoint() * r);
                basis.col(j + 1) = r / r.norm();
            } else {
                hess(j + 1, j) = s;
                basis.col(j + 1) = w / s;
            }
        }

        Eigen::ComplexSchur<CMatrix> schur(hess.topRows(m));
        CMatrix t = schur.matrixT();
        CMatrix u = schur.matrixU();
        // selection sort of the Schur form by decreasing magnitude
        for (Index i = 0; i < m; ++i) {
            Index best = i;
            for (Index j = i + 1; j < m; ++j)
                if (std::abs(t(j, j)) > std::abs(t(best, best)))
                    best = j;
            if (best != i)
                schur_move(t, u, best, i);
        }

        const double beta = std::abs(hess(m, m - 1));
        // residuals of Ritz pairs from eigenvectors of the leading block
        Eigen::ComplexEigenSolver<CMatrix> ces(t.topLeftCorner(nev, nev));
        const CMatrix y = u.leftCols(nev) * ces.eigenvectors();
        bool converged = true;
        std::vector<double> res(static_cast<std::size_t>(nev));
        for (Index i = 0; i < nev; ++i) {
            const double yn = y.col(i).norm();
            res[static_cast<std::size_t>(i)] = beta * std::abs(y(m - 1, i)) / yn;
            const double scale = std::max(std::abs(ces.eigenvalues()(i)), 1e-300);
            if (res[static_cast<std::size_t>(i)] > options.tol * scale)
                converged = false;
        }
        // a stalled space (happy breakdown) is exact
        if (m == n)
            converged = true;

        if (converged) {
            result.restarts = restart;
            std::vector<Index> order(static_cast<std::size_t>(nev));
            std::iota(order.begin(), order.end(), Index{0});
            std::sort(order.begin(), order.end(), [&](Index p, Index q) {
                return std::abs(ces.eigenvalues()(p)) > std::abs(ces.eigenvalues()(q));
            });
            result.values.resize(nev);
            result.vectors.resize(n, nev);
            result.residuals.clear();
            for (Index i = 0; i < nev; ++i) {
                const Index src = order[static_cast<std::size_t>(i)];
                result.values(i) = ces.eigenvalues()(src);
                CVector x = basis.leftCols(m) * y.col(src);
                result.vectors.col(i) = x / x.norm();
                result.residuals.push_back(res[static_cast<std::size_t>(src)]);
            }
            return result;
        }
        if (restart >= options.max_restarts) {
            std::ostringstream msg;
            msg << "arnoldi: no convergence after " << restart << " restarts (" << result.matvecs
                << " operator applications, n = " << n << ", ncv = " << m << "); residuals";
            for (Index i = 0; i < nev; ++i)
                msg << ' ' << res[static_cast<std::size_t>(i)];
            fail(ErrorKind::Solver, msg.str());
        }

        // Krylov-Schur restart on the leading `keep` Schur vectors
        const CVector tail = beta * u.row(m - 1).head(keep).transpose();
        const Complex hlast = hess(m, m - 1);
        const CMatrix kept = basis.leftCols(m) * u.leftCols(keep);
        const CVector next = basis.col(m);
        basis.leftCols(keep) = kept;
        basis.col(keep) = next;
        hess.setZero();
        hess.topLeftCorner(keep, keep) = t.topLeftCorner(keep, keep);
        const Complex phase = hlast / beta;
        hess.row(keep).head(keep) = (phase * tail).transpose();
        k = keep;
    }
}

EigenResult dense_eigenpairs(const CMatrix& a, bool compute_vectors) {
    Eigen::ComplexEigenSolver<CMatrix> ces(a, compute_vectors);
    if (ces.info() != Eigen::Success)
        fail(ErrorKind::Solver, "dense eigensolver failed");
    const Index n = a.rows();
    std::vector<Index> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), Index{0});
    std::stable_sort(order.begin(), order.end(), [&](Index p, Index q) {
        return ces.eigenvalues()(p).real() > ces.eigenvalues()(q).real();
    });
    EigenResult r;
    r.values.resize(n);
    for (Index i = 0; i < n; ++i)
        r.values(i) = ces.eigenvalues()(order[static_cast<std::size_t>(i)]);
    if (!compute_vectors)
        return r;
    r.vectors.resize(n, n);
    for (Index i = 0; i < n; ++i) {
        const Index src = order[static_cast<std::size_t>(i)];
        CVector x = ces.eigenvectors().col(src);
        r.vectors.col(i) = x / x.norm();
        r.residuals.push_back((a * r.vectors.col(i) - r.values(i) * r.vectors.col(i)).norm());
    }
    return r;
}

EigenResult shift_invert_eigenpairs(const SparseCMatrix& a, const EigenOptions& options) {
    const Index n = a.rows();
    if (a.cols() != n)
        fail(ErrorKind::Shape, "shift_invert_eigenpairs: matrix must be square");
    const double s = options.shift;

    SparseCMatrix shifted = a;
    SparseCMatrix id(n, n);
    id.setIdentity();
    shifted -= s * id;
    shifted.makeCompressed();
    Eigen::SparseLU<SparseCMatrix> lu;
    lu.compute(shifted);
    if (lu.info() != Eigen::Success)
        fail(ErrorKind::Solver, "shift_invert_eigenpairs: LU factorization failed: " +
                                    lu.lastErrorMessage());

    LinearMap inverse = [&](const CVector& in, CVector& out) { out = lu.solve(in); };
    ArnoldiOptions ao;
    ao.nev = options.nev;
    ao.tol = options.tol;
    ao.max_restarts = options.max_restarts;
    const ArnoldiResult ar = arnoldi(inverse, n, ao, CVector());

    const Index k = ar.values.size();
    std::vector<Index> order(static_cast<std::size_t>(k));
    std::iota(order.begin(), order.end(), Index{0});
    CVector lambda(k);
    for (Index i = 0; i < k; ++i) {
        const Complex mu = ar.values(i);
        lambda(i) = s + 1.0 / mu;
    }
    std::stable_sort(order.begin(), order.end(),
                     [&](Index p, Index q) { return lambda(p).real() > lambda(q).real(); });
    EigenResult r;
    r.values.resize(k);
    r.vectors.resize(n, k);
    for (Index i = 0; i < k; ++i) {
        const Index src = order[static_cast<std::size_t>(i)];
        r.values(i) = lambda(src);
        r.vectors.col(i) = ar.vectors.col(src);
        r.residuals.push_back((a * r.vectors.col(i) - r.values(i) * r.vectors.col(i)).norm());
    }
    return r;
}

} // namespace qrabi::spectral
