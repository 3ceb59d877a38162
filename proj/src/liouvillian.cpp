#include "qrabi/liouvillian.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <limits>
#include <sstream>

#include <Eigen/SparseLU>
#include <unsupported/Eigen/KroneckerProduct>

namespace qrabi::liouvillian {

namespace {

SparseCMatrix to_sparse(const CMatrix& m) {
    SparseCMatrix s = m.sparseView();
    s.makeCompressed();
    return s;
}

SparseCMatrix sparse_identity(Index n) {
    SparseCMatrix id(n, n);
    id.setIdentity();
    return id;
}

SparseCMatrix kron(const SparseCMatrix& a, const SparseCMatrix& b) {
    SparseCMatrix k = Eigen::kroneckerProduct(a, b);
    return k;
}

Sector sector_of_index(const SpaceTag& space, Index vec_index) {
    const Index d = space.dim();
    return sector_of(basis_parity(space, vec_index % d), basis_parity(space, vec_index / d));
}

const BlockInfo& require_blocks(const Superoperator& s) {
    if (!s.blocks)
        fail(ErrorKind::Configuration, "superoperator has no parity-block decomposition");
    return *s.blocks;
}

CMatrix scatter(const SpaceTag& space, const std::vector<Index>& indices, const CVector& v) {
    const Index d = space.dim();
    CMatrix rho = CMatrix::Zero(d, d);
    for (std::size_t k = 0; k < indices.size(); ++k)
        rho(indices[k] % d, indices[k] / d) = v(static_cast<Index>(k));
    return rho;
}

} // namespace

void EffectiveParams::validate() const {
    if (!(g >= 0.0) || !std::isfinite(g))
        fail(ErrorKind::InvalidParams, "g must be finite and non-negative");
    if (!(zeta > 0.0) || !std::isfinite(zeta))
        fail(ErrorKind::InvalidParams, "zeta must be finite and positive");
    if (!(single_photon_rate >= 0.0) || !std::isfinite(single_photon_rate))
        fail(ErrorKind::InvalidParams, "single-photon rate must be finite and non-negative");
    if (fock_dim < 2)
        fail(ErrorKind::InvalidDimension,
             "Fock dimension must be at least 2, got " + std::to_string(fock_dim));
}

Index truncation_for(double g_max, double zeta) {
    return required_fock_dim(std::sqrt(zeta * g_max * g_max / 4.0));
}

const char* to_string(Sector s) {
    switch (s) {
    case Sector::EE: return "ee";
    case Sector::OO: return "oo";
    case Sector::EO: return "eo";
    case Sector::OE: return "oe";
    }
    return "??";
}

Sector sector_of(int row_parity, int col_parity) {
    if (row_parity == col_parity)
        return row_parity == 0 ? Sector::EE : Sector::OO;
    return row_parity == 0 ? Sector::EO : Sector::OE;
}

Superoperator lindblad(const OperatorMatrix& hamiltonian, const std::vector<Jump>& jumps) {
    const SpaceTag space = hamiltonian.tag();
    const Index d = space.dim();
    const SparseCMatrix id = sparse_identity(d);
    const SparseCMatrix h = to_sparse(hamiltonian.matrix());
    const SparseCMatrix ht = to_sparse(hamiltonian.matrix().transpose());

    SparseCMatrix l = Complex(0.0, -1.0) * (kron(id, h) - kron(ht, id));
    for (const Jump& j : jumps) {
        if (!(j.op.tag() == space))
            fail(ErrorKind::Composition, "jump operator acts on a different space");
        if (!(j.rate >= 0.0) || !std::isfinite(j.rate))
            fail(ErrorKind::InvalidParams, "jump rates must be finite and non-negative");
        if (j.rate == 0.0)
            continue;
        const CMatrix& a = j.op.matrix();
        const CMatrix ada = a.adjoint() * a;
        const SparseCMatrix term = 2.0 * kron(to_sparse(a.conjugate()), to_sparse(a)) -
                                   kron(id, to_sparse(ada)) -
                                   kron(to_sparse(ada.transpose()), id);
        l += j.rate * term;
    }
    l.prune(Complex(0.0, 0.0));
    l.makeCompressed();

    Superoperator s;
    s.matrix = std::move(l);
    s.space = space;
    return s;
}

Superoperator build_full_rabi(const SystemParams& params, Index fock_dim) {
    const FockSpace space(fock_dim);
    const OperatorMatrix a = annihilation_op(space);
    const OperatorMatrix a2 = tensor_qubit_oscillator(Eigen::Matrix2cd::Identity(), a * a);
    Superoperator s = lindblad(rabi_hamiltonian(params, space), {{params.kappa(), a2}});
    s.model = ModelTag::FullRabi;
    s.params = params;
    return s;
}

OperatorMatrix effective_hamiltonian(double g, const FockSpace& space) {
    const OperatorMatrix a = annihilation_op(space);
    const OperatorMatrix ad = a.adjoint();
    const double g2 = g * g;
    return Complex(1.0 - g2 / 2.0) * (ad * a) - Complex(g2 / 4.0) * (a * a + ad * ad);
}

Superoperator build_effective(const EffectiveParams& params) {
    params.validate();
    const Index need = truncation_for(params.g, params.zeta);
    if (params.fock_dim < need)
        fail(ErrorKind::TruncationInsufficient,
             "effective model at g = " + std::to_string(params.g) + ", zeta = " +
                 std::to_string(params.zeta) + " needs N >= " + std::to_string(need) +
                 ", got N = " + std::to_string(params.fock_dim));
    const FockSpace space(params.fock_dim);
    const OperatorMatrix a = annihilation_op(space);
    std::vector<Jump> jumps{{params.kappa(), a * a}};
    if (params.single_photon_rate > 0.0)
        jumps.push_back({params.single_photon_rate, a});
    Superoperator s = lindblad(effective_hamiltonian(params.g, space), jumps);
    s.model = ModelTag::EffectiveOscillator;
    s.params = params;
    return s;
}

CMatrix apply(const Superoperator& superop, const CMatrix& rho) {
    if (rho.rows() != superop.hilbert_dim() || rho.cols() != superop.hilbert_dim())
        fail(ErrorKind::DimensionMismatch, "density matrix does not match the superoperator");
    const CVector out = superop.matrix * vectorize(rho);
    return devectorize(out);
}

double trace_preservation_defect(const Superoperator& superop) {
    const Index d = superop.hilbert_dim();
    CVector left = CVector::Zero(superop.matrix.cols());
    for (Index k = 0; k < superop.matrix.outerSize(); ++k)
        for (SparseCMatrix::InnerIterator it(superop.matrix, k); it; ++it)
            if (it.row() % d == it.row() / d)
                left(it.col()) += it.value();
    return left.size() == 0 ? 0.0 : left.cwiseAbs().maxCoeff();
}

std::array<std::array<double, 4>, 4> sector_coupling(const Superoperator& superop) {
    std::array<std::array<double, 4>, 4> out{};
    for (Index k = 0; k < superop.matrix.outerSize(); ++k)
        for (SparseCMatrix::InnerIterator it(superop.matrix, k); it; ++it) {
            const auto r = slot(sector_of_index(superop.space, it.row()));
            const auto c = slot(sector_of_index(superop.space, it.col()));
            out[r][c] = std::max(out[r][c], std::abs(it.value()));
        }
    return out;
}

Superoperator parity_blocks(Superoperator superop, double tolerance) {
    const Index n = superop.matrix.rows();
    BlockInfo info;
    std::vector<Index> position(static_cast<std::size_t>(n));
    std::vector<Sector> sector(static_cast<std::size_t>(n));
    for (Index k = 0; k < n; ++k) {
        const Sector s = sector_of_index(superop.space, k);
        auto& list = info.indices[slot(s)];
        position[static_cast<std::size_t>(k)] = static_cast<Index>(list.size());
        sector[static_cast<std::size_t>(k)] = s;
        list.push_back(k);
    }

    std::array<std::vector<Eigen::Triplet<Complex>>, 4> triplets;
    for (Index k = 0; k < superop.matrix.outerSize(); ++k)
        for (SparseCMatrix::InnerIterator it(superop.matrix, k); it; ++it) {
            const Sector rs = sector[static_cast<std::size_t>(it.row())];
            const Sector cs = sector[static_cast<std::size_t>(it.col())];
            if (rs != cs) {
                info.max_cross_coupling = std::max(info.max_cross_coupling, std::abs(it.value()));
                continue;
            }
            triplets[slot(rs)].emplace_back(position[static_cast<std::size_t>(it.row())],
                                            position[static_cast<std::size_t>(it.col())],
                                            it.value());
        }
    if (info.max_cross_coupling > tolerance) {
        std::ostringstream msg;
        msg << "parity sectors are coupled with strength " << info.max_cross_coupling
            << " (tolerance " << tolerance << ")";
        fail(ErrorKind::SymmetryViolation, msg.str());
    }
    for (Sector s : kSectors) {
        const auto size = static_cast<Index>(info.indices[slot(s)].size());
        SparseCMatrix b(size, size);
        b.setFromTriplets(triplets[slot(s)].begin(), triplets[slot(s)].end());
        b.makeCompressed();
        info.blocks[slot(s)] = std::move(b);
    }
    superop.blocks = std::move(info);
    return superop;
}

CMatrix sector_steady_state(const Superoperator& blocked, Sector sector) {
    if (sector == Sector::EO || sector == Sector::OE)
        fail(ErrorKind::Domain, "coherence sectors have no trace constraint");
    const BlockInfo& info = require_blocks(blocked);
    const auto& indices = info.indices[slot(sector)];
    const SparseCMatrix& b = info.blocks[slot(sector)];
    const Index d = blocked.hilbert_dim();
    const Index n = b.rows();

    std::vector<bool> diagonal(static_cast<std::size_t>(n));
    Index pivot = -1;
    for (Index k = 0; k < n; ++k) {
        const Index v = indices[static_cast<std::size_t>(k)];
        diagonal[static_cast<std::size_t>(k)] = v % d == v / d;
        if (pivot < 0 && diagonal[static_cast<std::size_t>(k)])
            pivot = k;
    }
    if (pivot < 0)
        fail(ErrorKind::Shape, "sector has no diagonal elements");

    // The diagonal rows of a trace-preserving L are linearly dependent, so one
    // of them is replaced by the normalization Tr rho = 1.
    std::vector<Eigen::Triplet<Complex>> trip;
    trip.reserve(static_cast<std::size_t>(b.nonZeros() + n));
    for (Index k = 0; k < b.outerSize(); ++k)
        for (SparseCMatrix::InnerIterator it(b, k); it; ++it)
            if (it.row() != pivot)
                trip.emplace_back(it.row(), it.col(), it.value());
    for (Index k = 0; k < n; ++k)
        if (diagonal[static_cast<std::size_t>(k)])
            trip.emplace_back(pivot, k, 1.0);
    SparseCMatrix m(n, n);
    m.setFromTriplets(trip.begin(), trip.end());
    m.makeCompressed();

    Eigen::SparseLU<SparseCMatrix> lu;
    lu.compute(m);
    if (lu.info() != Eigen::Success)
        fail(ErrorKind::Solver, std::string("steady state of sector ") + to_string(sector) +
                                    " is not unique: " + lu.lastErrorMessage());
    CVector rhs = CVector::Zero(n);
    rhs(pivot) = 1.0;
    const CVector v = lu.solve(rhs);
    if (lu.info() != Eigen::Success || !v.allFinite())
        fail(ErrorKind::Solver, std::string("steady-state solve failed in sector ") +
                                    to_string(sector));
    CMatrix rho = scatter(blocked.space, indices, v);
    rho = 0.5 * (rho + rho.adjoint()).eval();
    return rho / rho.trace().real();
}

double photon_number(const CMatrix& rho) {
    double n = 0.0;
    for (Index k = 0; k < rho.rows(); ++k)
        n += static_cast<double>(k) * rho(k, k).real();
    return n;
}

double photon_ratio(const EffectiveParams& params) {
    const Superoperator l = parity_blocks(build_effective(params));
    return photon_number(sector_steady_state(l, Sector::EE)) / params.zeta;
}

SpectrumResult spectrum(const Superoperator& input, const SpectrumOptions& options) {
    if (options.n_eigenvalues < 5)
        fail(ErrorKind::InvalidParams, "at least 5 eigenvalues per sector are required");
    const Superoperator blocked_storage = input.blocks ? Superoperator{} : parity_blocks(input);
    const Superoperator& l = input.blocks ? input : blocked_storage;
    const BlockInfo& info = *l.blocks;
    const bool dense = l.matrix.rows() <= options.dense_limit;

    SpectrumResult result;
    for (Sector s : kSectors) {
        const SparseCMatrix& b = info.blocks[slot(s)];
        SectorSpectrum& sec = result.sectors[slot(s)];
        sec.sector = s;
        if (b.rows() == 0)
            continue;
        spectral::EigenResult er;
        if (dense || b.rows() <= options.n_eigenvalues + 2) {
            er = spectral::dense_eigenpairs(CMatrix(b), false);
        } else {
            spectral::EigenOptions eo;
            eo.nev = options.n_eigenvalues;
            eo.shift = options.shift;
            er = spectral::shift_invert_eigenpairs(b, eo);
        }
        sec.eigenvalues = er.values;
        sec.eigenvectors = er.vectors;
        sec.residuals = er.residuals;
        for (Index i = 0; i < er.values.size(); ++i)
            result.eigenvalues.push_back(er.values(i));
    }
    std::stable_sort(result.eigenvalues.begin(), result.eigenvalues.end(),
                     [](Complex a, Complex b) { return a.real() > b.real(); });
    if (!result.eigenvalues.empty() && result.eigenvalues.front().real() > 1e-9) {
        std::ostringstream msg;
        msg << "Liouvillian has a growing mode " << result.eigenvalues.front();
        fail(ErrorKind::Solver, msg.str());
    }

    const double thr = options.degeneracy_threshold;
    for (Complex z : result.eigenvalues)
        if (std::abs(z.real()) <= thr)
            ++result.degeneracy;

    // slow modes: everything except the conserved-parity fixed points
    struct Mode {
        Complex value;
        Sector sector;
    };
    std::vector<Mode> modes;
    for (Sector s : kSectors) {
        const CVector& ev = result.sectors[slot(s)].eigenvalues;
        Index skip = -1;
        if ((s == Sector::EE || s == Sector::OO) && ev.size() > 0) {
            skip = 0;
            for (Index i = 1; i < ev.size(); ++i)
                if (std::abs(ev(i)) < std::abs(ev(skip)))
                    skip = i;
        }
        for (Index i = 0; i < ev.size(); ++i)
            if (i != skip)
                modes.push_back({ev(i), s});
    }
    std::stable_sort(modes.begin(), modes.end(), [](const Mode& a, const Mode& b) {
        return std::abs(a.value.real()) < std::abs(b.value.real());
    });
    if (!modes.empty()) {
        result.gap = std::abs(modes[0].value.real());
        result.gap_eigenvalues[0] = modes[0].value;
        result.gap_sectors[0] = modes[0].sector;
        const Mode& second = modes.size() > 1 ? modes[1] : modes[0];
        result.gap_eigenvalues[1] = second.value;
        result.gap_sectors[1] = second.sector;
    }

    for (Sector s : kSectors) {
        if (s == Sector::EE || s == Sector::OO) {
            result.steady_states.push_back({s, sector_steady_state(l, s)});
            continue;
        }
        const SectorSpectrum& sec = result.sectors[slot(s)];
        Index best = -1;
        for (Index i = 0; i < sec.eigenvalues.size(); ++i)
            if (std::abs(sec.eigenvalues(i).real()) <= thr &&
                (best < 0 || std::abs(sec.eigenvalues(i)) < std::abs(sec.eigenvalues(best))))
                best = i;
        if (best < 0)
            continue;
        CVector v;
        if (sec.eigenvectors.cols() > best) {
            v = sec.eigenvectors.col(best);
        } else {
            // dense values only: recover the vector by shift-invert at the eigenvalue
            spectral::EigenOptions eo;
            eo.nev = 1;
            eo.shift = sec.eigenvalues(best).real() + options.shift;
            v = spectral::shift_invert_eigenpairs(info.blocks[slot(s)], eo).vectors.col(0);
        }
        CMatrix rho = scatter(l.space, info.indices[slot(s)], v);
        Index r = 0, c = 0;
        rho.cwiseAbs().maxCoeff(&r, &c);
        rho *= std::conj(rho(r, c)) / std::abs(rho(r, c));
        rho /= rho.norm();
        result.steady_states.push_back({s, std::move(rho)});
    }
    return result;
}

DensityMatrix evolve(const DensityMatrix& rho0, const Superoperator& superop, double t,
                     EvolveReport* report) {
    if (!(t >= 0.0) || !std::isfinite(t))
        fail(ErrorKind::Domain, "evolution time must be finite and non-negative, got " +
                                    std::to_string(t));
    if (rho0.dim() != superop.hilbert_dim())
        fail(ErrorKind::DimensionMismatch, "state and superoperator dimensions differ");
    EvolveReport local;
    EvolveReport& rep = report ? *report : local;
    rep = {};
    if (t == 0.0)
        return rho0;

    spectral::ExpvOptions opts;
    opts.tol = 1e-10;
    const CVector w = spectral::expv(superop.matrix, t, vectorize(rho0), opts, &rep.expv);
    CMatrix rho = devectorize(w);
    rep.hermiticity_defect = max_hermiticity_defect(rho);
    rho = 0.5 * (rho + rho.adjoint()).eval();
    const double tr = rho.trace().real();
    rep.trace_correction = std::abs(tr - 1.0);
    if (!(tr > 0.0) || !std::isfinite(tr))
        fail(ErrorKind::Solver, "evolved state has non-positive trace");
    rho /= tr;
    return DensityMatrix(std::move(rho));
}

GapRow gap_point(double g, double zeta, Index fock_dim, const SpectrumOptions& options) {
    EffectiveParams p{g, zeta, fock_dim};
    const SpectrumResult sr = spectrum(parity_blocks(build_effective(p)), options);
    GapRow row{g, zeta, fock_dim, sr.gap, sr.degeneracy, 0.0};
    for (const SteadyState& st : sr.steady_states)
        if (st.sector == Sector::EE)
            row.photon_ratio = photon_number(st.matrix) / zeta;
    return row;
}

namespace {

Index sweep_dim(const std::vector<double>& g_values, double zeta, Index fock_dim) {
    if (fock_dim > 0)
        return fock_dim;
    double g_max = 0.0;
    for (double g : g_values)
        g_max = std::max(g_max, g);
    return truncation_for(g_max, zeta);
}

} // namespace

std::vector<GapRow> gap_sweep(const std::vector<double>& g_values,
                              const std::vector<double>& zeta_values, Index fock_dim,
                              const SpectrumOptions& options) {
    std::vector<GapRow> rows;
    for (double zeta : zeta_values) {
        const Index n = sweep_dim(g_values, zeta, fock_dim);
        for (double g : g_values)
            rows.push_back(gap_point(g, zeta, n, options));
    }
    return rows;
}

std::vector<PhotonRow> photon_sweep(const std::vector<double>& g_values,
                                    const std::vector<double>& zeta_values, Index fock_dim) {
    std::vector<PhotonRow> rows;
    for (double zeta : zeta_values) {
        const Index n = sweep_dim(g_values, zeta, fock_dim);
        for (double g : g_values)
            rows.push_back({g, zeta, n, photon_ratio({g, zeta, n})});
    }
    return rows;
}

std::optional<double> closing_coupling(const std::vector<double>& g_values, double zeta,
                                       Index fock_dim, double threshold,
                                       const SpectrumOptions& options) {
    std::vector<double> sorted = g_values;
    std::sort(sorted.begin(), sorted.end());
    const Index n = sweep_dim(sorted, zeta, fock_dim);
    for (double g : sorted)
        if (gap_point(g, zeta, n, options).gap < threshold)
            return g;
    return std::nullopt;
}

namespace {

void put_u64(std::ostream& out, std::uint64_t v) {
    char bytes[8];
    for (int i = 0; i < 8; ++i)
        bytes[i] = static_cast<char>((v >> (8 * i)) & 0xffu);
    out.write(bytes, 8);
}

std::uint64_t get_u64(std::istream& in) {
    unsigned char bytes[8];
    in.read(reinterpret_cast<char*>(bytes), 8);
    std::uint64_t v = 0;
    for (int i = 7; i >= 0; --i)
        v = (v << 8) | bytes[i];
    return v;
}

void put_f64(std::ostream& out, double x) { put_u64(out, std::bit_cast<std::uint64_t>(x)); }
double get_f64(std::istream& in) { return std::bit_cast<double>(get_u64(in)); }

} // namespace

void write_steady_states(const std::filesystem::path& path, const std::vector<SteadyState>& states) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out)
        fail(ErrorKind::Io, "cannot open " + path.string() + " for writing");
    for (const SteadyState& s : states) {
        put_u64(out, static_cast<std::uint64_t>(s.matrix.rows()));
        put_u64(out, static_cast<std::uint64_t>(s.matrix.cols()));
        out.write(to_string(s.sector), 2);
        for (Index r = 0; r < s.matrix.rows(); ++r)
            for (Index c = 0; c < s.matrix.cols(); ++c) {
                put_f64(out, s.matrix(r, c).real());
                put_f64(out, s.matrix(r, c).imag());
            }
    }
    if (!out)
        fail(ErrorKind::Io, "write to " + path.string() + " failed");
}

std::vector<SteadyState> read_steady_states(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        fail(ErrorKind::Io, "cannot open " + path.string());
    std::vector<SteadyState> states;
    while (in.peek() != std::char_traits<char>::eof()) {
        const std::uint64_t rows = get_u64(in);
        const std::uint64_t cols = get_u64(in);
        char label[3] = {0, 0, 0};
        in.read(label, 2);
        if (!in || rows > (1u << 20) || cols > (1u << 20))
            fail(ErrorKind::Io, "corrupt steady-state record in " + path.string());
        SteadyState s;
        bool known = false;
        for (Sector sec : kSectors)
            if (std::strcmp(label, to_string(sec)) == 0) {
                s.sector = sec;
                known = true;
            }
        if (!known)
            fail(ErrorKind::Io, std::string("unknown sector label '") + label + "'");
        s.matrix.resize(static_cast<Index>(rows), static_cast<Index>(cols));
        for (Index r = 0; r < s.matrix.rows(); ++r)
            for (Index c = 0; c < s.matrix.cols(); ++c) {
                const double re = get_f64(in);
                const double im = get_f64(in);
                s.matrix(r, c) = Complex(re, im);
            }
        if (!in)
            fail(ErrorKind::Io, "truncated steady-state record in " + path.string());
        states.push_back(std::move(s));
    }
    return states;
}

} // namespace qrabi::liouvillian
