#pragma once

#include <optional>
#include <string>
#include <vector>

#include "bandtop/models.hpp"

namespace bandtop {

/// Closed polyline loop in momentum space for one band.
struct LoopPath {
    std::vector<MomentumPoint> points; ///< >= 8; last connects to first
    int band = 0;
};

/// Circle of radius r around center in the plane spanned by two coordinate
/// axes, traversed counterclockwise.
LoopPath circle_loop(const MomentumPoint& center, double radius, int band, int n_points = 64,
                     int axis_u = 0, int axis_v = 1);

/// Test hook: multiplies every computed eigenvector by a random unit phase.
/// Every topology output must be invariant under this.
struct GaugeNoise {
    bool enabled = false;
    std::uint64_t seed = 1;
};

struct BerryOptions {
    double agree_tol = 1e-6;   ///< stop refining when successive values agree
    double min_gap = 1e-6;     ///< band isolation required at every node
    int max_points = 1 << 17;  ///< refinement cap
    GaugeNoise noise;
};

struct BerryPhaseResult {
    double phase = 0.0;   ///< principal value in (-pi, pi]; gauge-invariant
    double unwound = 0.0; ///< sum of per-segment phases in the deterministic
                          ///< eigenvector gauge; diagnostic only
    int band = 0;
    int points_used = 0;
    std::string note;
};

/// Wilson-loop Berry phase gamma = -Im log prod_j <u_j, u_{j+1}>, refined by
/// doubling the polyline until two successive resolutions agree.
BerryPhaseResult berry_phase(const HamiltonianFamily& family, const LoopPath& loop,
                             const BerryOptions& options = {});

struct ChernOptions {
    int max_grid = 256;                 ///< adaptive doubling cap
    double refine_phase = M_PI / 2.0;   ///< double the grid above this plaquette phase
    double gap_floor = 1e-6;            ///< surface/slice must clear this gap
    GaugeNoise noise;
};

struct ChernResult {
    int value = 0;
    double raw = 0.0;                 ///< plaquette sum / 2pi before rounding
    double max_plaquette_phase = 0.0; ///< < pi certifies the integer
    int grid = 0;                     ///< final N after adaptive doubling
    bool reliable = true;
};

/// First Chern number of `band` over the 2-torus slice at parameter t along
/// `axis`, by the lattice field-strength (link variable) method. The slice
/// is oriented so its normal points along +axis: (u, v) = cyclic pair.
ChernResult chern_on_slice(const HamiltonianFamily& family, int axis, double t, int band,
                           int grid_n = 32, const ChernOptions& options = {});

/// All bands over one shared eigenvector grid.
std::vector<ChernResult> chern_on_slice_all(const HamiltonianFamily& family, int axis, double t,
                                            int grid_n = 32, const ChernOptions& options = {});

/// Local charge: Chern number of `band` over the boundary of the coordinate
/// cube of half-width r around `center` (6 faces, N x N plaquettes each).
/// orientation +1 = outward normal (the usual orientation), -1 = inward.
ChernResult chern_on_sphere(const HamiltonianFamily& family, const MomentumPoint& center, double r,
                            int band, int grid_n = 32, int orientation = +1,
                            const ChernOptions& options = {});

std::vector<ChernResult> chern_on_sphere_all(const HamiltonianFamily& family,
                                             const MomentumPoint& center, double r, int grid_n = 32,
                                             int orientation = +1, const ChernOptions& options = {});

} // namespace bandtop
