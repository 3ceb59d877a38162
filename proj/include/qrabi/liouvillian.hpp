#pragma once

// Lindblad superoperators on column-stacked density matrices:
//   L = -i (I kron H - H^T kron I)
//       + sum_k rate_k (2 conj(A_k) kron A_k - I kron A_k^dag A_k - (A_k^dag A_k)^T kron I),
// i.e. each jump contributes rate (2 A rho A^dag - A^dag A rho - rho A^dag A).

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "qrabi/hilbert.hpp"
#include "qrabi/spectral.hpp"

namespace qrabi::liouvillian {

enum class ModelTag : std::uint8_t { Generic, FullRabi, EffectiveOscillator };

// Oscillator-only model after eliminating the qubit (omega0 = 1):
//   H = (1 - g^2/2) a^dag a - (g^2/4)(a^2 + a^dag^2),  jump a^2 at rate 1/zeta.
// single_photon_rate > 0 adds a jump a, which keeps only the weak parity symmetry.
struct EffectiveParams {
    double g = 0.0;
    double zeta = 30.0;
    Index fock_dim = 2;
    double single_photon_rate = 0.0;

    double kappa() const { return 1.0 / zeta; }
    // Throws InvalidParams / InvalidDimension.
    void validate() const;
};

// Fock dimension needed to hold the coherent amplitude |beta|^2 = zeta g^2 / 4.
Index truncation_for(double g_max, double zeta);

enum class Sector : std::uint8_t { EE, OO, EO, OE };
inline constexpr std::array<Sector, 4> kSectors{Sector::EE, Sector::OO, Sector::EO, Sector::OE};

const char* to_string(Sector s);
// Sector of element (row, col) given basis parities (0 even, 1 odd).
Sector sector_of(int row_parity, int col_parity);
inline std::size_t slot(Sector s) { return static_cast<std::size_t>(s); }

struct BlockInfo {
    std::array<std::vector<Index>, 4> indices; // vectorized indices, ascending
    std::array<SparseCMatrix, 4> blocks;
    double max_cross_coupling = 0.0;
};

struct Superoperator {
    SparseCMatrix matrix;
    ModelTag model = ModelTag::Generic;
    std::variant<std::monostate, SystemParams, EffectiveParams> params;
    SpaceTag space;
    std::optional<BlockInfo> blocks;

    Index hilbert_dim() const { return space.dim(); }
};

struct Jump {
    double rate = 0.0;
    OperatorMatrix op;
};

Superoperator lindblad(const OperatorMatrix& hamiltonian, const std::vector<Jump>& jumps);

// Rabi Hamiltonian with two-photon loss kappa D[a^2] on the qubit-oscillator space.
Superoperator build_full_rabi(const SystemParams& params, Index fock_dim);

// TruncationInsufficient when fock_dim < truncation_for(g, zeta).
Superoperator build_effective(const EffectiveParams& params);

OperatorMatrix effective_hamiltonian(double g, const FockSpace& space);

// L[rho] computed densely from the vectorized superoperator.
CMatrix apply(const Superoperator& superop, const CMatrix& rho);

// max |vec(I)^dag L|: zero for a trace-preserving generator.
double trace_preservation_defect(const Superoperator& superop);

// Largest |entry| of L coupling each pair of sectors (row sector, column sector).
std::array<std::array<double, 4>, 4> sector_coupling(const Superoperator& superop);

// Splits L into the four parity sectors; SymmetryViolation if entries coupling
// distinct sectors exceed tolerance.
Superoperator parity_blocks(Superoperator superop, double tolerance = 1e-12);

struct SectorSpectrum {
    Sector sector = Sector::EE;
    CVector eigenvalues; // descending real part
    CMatrix eigenvectors;
    std::vector<double> residuals;
};

struct SteadyState {
    Sector sector = Sector::EE;
    // ee/oo: unit trace; eo/oe: unit Frobenius norm with the largest entry
    // made real and positive.
    CMatrix matrix;
};

struct SpectrumOptions {
    int n_eigenvalues = 8; // per sector
    double degeneracy_threshold = 1e-8;
    Index dense_limit = 1024; // dense solve when the superoperator size is at most this
    double shift = 1e-2;
};

struct SpectrumResult {
    std::vector<Complex> eigenvalues; // all sectors, descending real part
    std::array<SectorSpectrum, 4> sectors;
    std::vector<SteadyState> steady_states;
    double gap = 0.0;
    int degeneracy = 0;
    // The two slowest non-stationary modes; they set the gap.
    std::array<Complex, 2> gap_eigenvalues{};
    std::array<Sector, 2> gap_sectors{};
};

// The gap excludes one stationary eigenvalue from each of ee and oo (the
// conserved parities) and is the smallest |Re| among the rest, so coherences
// between the parity sectors whose decay rate closes exponentially still count
// as (slow) modes. degeneracy counts every eigenvalue with |Re| at or below
// the threshold.
SpectrumResult spectrum(const Superoperator& superop, const SpectrumOptions& options = {});

// Unique stationary state of an ee or oo sector by a trace-constrained sparse
// solve. Domain error for eo/oe.
CMatrix sector_steady_state(const Superoperator& blocked, Sector sector);

// <a^dag a>/zeta in the ee steady state of the effective model.
double photon_ratio(const EffectiveParams& params);
double photon_number(const CMatrix& rho);

struct EvolveReport {
    double hermiticity_defect = 0.0; // before re-Hermitization
    double trace_correction = 0.0;   // |Tr - 1| before renormalization
    spectral::ExpvStats expv;
};

// exp(t L) rho0 via Krylov projection (tolerance 1e-10), re-Hermitized and
// trace-renormalized. Domain error for t < 0.
DensityMatrix evolve(const DensityMatrix& rho0, const Superoperator& superop, double t,
                     EvolveReport* report = nullptr);

struct GapRow {
    double g = 0.0;
    double zeta = 0.0;
    Index fock_dim = 0;
    double gap = 0.0;
    int degeneracy = 0;
    double photon_ratio = 0.0;
};

// fock_dim = 0 applies truncation_for(max g, zeta) separately for each zeta.
// Rows are ordered zeta-major, then g.
std::vector<GapRow> gap_sweep(const std::vector<double>& g_values,
                              const std::vector<double>& zeta_values, Index fock_dim = 0,
                              const SpectrumOptions& options = {});

struct PhotonRow {
    double g = 0.0;
    double zeta = 0.0;
    Index fock_dim = 0;
    double photon_ratio = 0.0;
};

std::vector<PhotonRow> photon_sweep(const std::vector<double>& g_values,
                                    const std::vector<double>& zeta_values, Index fock_dim = 0);

GapRow gap_point(double g, double zeta, Index fock_dim, const SpectrumOptions& options = {});

// Smallest g on the grid whose gap is below threshold; nullopt if none.
std::optional<double> closing_coupling(const std::vector<double>& g_values, double zeta,
                                       Index fock_dim, double threshold = 1e-6,
                                       const SpectrumOptions& options = {});

// Little-endian records: uint64 rows, uint64 cols, two ASCII bytes for the
// sector label, then rows*cols (float64 re, float64 im) pairs in row-major order.
void write_steady_states(const std::filesystem::path& path, const std::vector<SteadyState>& states);
std::vector<SteadyState> read_steady_states(const std::filesystem::path& path);

} // namespace qrabi::liouvillian
