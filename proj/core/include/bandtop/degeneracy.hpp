#pragma once

#include <optional>
#include <string>
#include <vector>

#include "bandtop/models.hpp"

namespace bandtop {

/// Minimal eigenvalue spacing min_i (lambda_{i+1} - lambda_i) at a momentum.
/// Infinite for one-band families.
double spectral_gap(const HamiltonianFamily& family, const MomentumPoint& kpt);

/// A connected low-gap cluster found by the grid scan.
struct DegeneracyCandidate {
    MomentumPoint location;            ///< cluster centroid (torus-aware)
    double min_gap = 0.0;              ///< smallest gap seen in the cluster
    std::vector<MomentumPoint> cells;  ///< all grid cells of the cluster
};

struct ScanOptions {
    int grid_n = 48;
    double threshold = 0.05;
};

/// Grid scan of the whole torus for low-gap regions; grid points below the
/// threshold are merged into clusters by (torus-periodic) cell adjacency.
std::vector<DegeneracyCandidate> scan_gaps(const HamiltonianFamily& family,
                                           const ScanOptions& options = {});

/// Same scan restricted to the axis-aligned cube around `center`
/// (non-periodic clustering).
std::vector<DegeneracyCandidate> scan_box(const HamiltonianFamily& family,
                                          const MomentumPoint& center, double half_width,
                                          const ScanOptions& options);

enum class LocusDim {
    Zero,       ///< isolated point
    AtLeastOne, ///< the degenerate component continues through the probe cube
};

/// A refined point of the degenerate locus.
struct DegeneratePoint {
    MomentumPoint location;
    std::vector<int> pattern;    ///< group sizes (g_1, ..., g_l), ascending eigenvalue order
    double residual_gap = 0.0;   ///< gap at the refined location
    LocusDim locus_dim = LocusDim::Zero;
    bool converged = false;      ///< residual_gap <= tol; otherwise a near-degeneracy

    bool is_isolated() const { return converged && locus_dim == LocusDim::Zero; }
    /// Offset of the first band of block j and the block size.
    std::pair<int, int> block_range(int block) const;
    int blocks() const { return static_cast<int>(pattern.size()); }
};

struct RefineOptions {
    double gap_tol = 1e-8;       ///< converged iff the refined gap is below this
    double group_tol = 1e-6;     ///< multiplicity grouping (see classify_multiplicity)
    double split_tol = 1e-4;
    double initial_step = 0.05;  ///< Nelder-Mead starting simplex edge
    int max_iterations = 4000;
    double probe_radius = 0.05;  ///< locus_dimension_probe cube half-width
    bool probe_locus = true;
};

/// Derivative-free local minimization of the gap from the candidate's
/// centroid (Nelder-Mead; the gap is continuous but not smooth at the
/// minimum). Non-converged results are returned with converged = false and
/// must be excluded from exact analyses.
DegeneratePoint refine(const HamiltonianFamily& family, const DegeneracyCandidate& candidate,
                       const RefineOptions& options = {});

/// Greedy multiplicity grouping of an ascending spectrum: consecutive values
/// within group_tol merge, distinct groups must be separated by at least
/// split_tol. Throws AmbiguityError for spacings between the two tolerances.
std::vector<int> classify_multiplicity(const std::vector<double>& values, double group_tol = 1e-6,
                                       double split_tol = 1e-4);

/// Distinguishes isolated degeneracies from curve-like loci: minimizes the
/// gap over each face of the cube of half-width r_probe around the point.
/// Isolated iff every face minimum clears max(10 * residual_gap, 1e-6).
LocusDim locus_dimension_probe(const HamiltonianFamily& family, const MomentumPoint& point,
                               double r_probe = 0.05, double residual_gap = 0.0);

/// For curve-like loci: refines up to n_samples distinct cluster cells onto
/// the locus and returns the deduplicated converged locations.
std::vector<MomentumPoint> sample_locus(const HamiltonianFamily& family,
                                        const DegeneracyCandidate& candidate, int n_samples,
                                        const RefineOptions& options = {});

/// Scan + refine of the whole torus with the default options; convenience
/// used by the analysis pipeline and the CLI. Converged points only,
/// deterministically ordered by location.
std::vector<DegeneratePoint> find_degeneracies(const HamiltonianFamily& family,
                                               const ScanOptions& scan = {},
                                               const RefineOptions& refine_opts = {});

struct LocateOptions {
    ScanOptions coarse{24, 0.05};
    double fine_step = 7.5e-4;   ///< target fine-grid resolution
    double fine_half_width = 0.03;
    int fine_max_n = 96;
    RefineOptions refine;
    double dedupe_tol = 1e-4;
};

/// Locates every degeneracy point inside a box, resolving clusters of
/// nearby points (for example the Weyl points a deformation splits off a
/// former triple crossing). Two-level scan, then one Nelder-Mead polish per
/// local minimum cell of the fine grid, then deduplication.
std::vector<DegeneratePoint> locate_in_box(const HamiltonianFamily& family,
                                           const MomentumPoint& center, double half_width,
                                           const LocateOptions& options = {});

/// The unique degenerate-point direction estimate for curve-like loci: the
/// unit direction d minimizing the gap at point + rho * d, canonicalized so
/// its first nonzero component is positive.
std::array<double, 3> estimate_locus_tangent(const HamiltonianFamily& family,
                                             const MomentumPoint& point, double rho = 1e-2);

} // namespace bandtop
