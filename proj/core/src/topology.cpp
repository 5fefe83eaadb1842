#include "bandtop/topology.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "bandtop/parallel.hpp"

namespace bandtop {

namespace {

double wrap_to_pi(double x) {
    x = std::remainder(x, kTwoPi);
    if (x <= -M_PI) x += kTwoPi;
    return x;
}

/// Eigenvectors for every node of a grid of momenta, plus the worst band
/// isolation seen. Deterministic: nodes are indexed, gauge noise phases are
/// drawn in index order before any parallel work.
struct EigGrid {
    int nodes = 0;
    int k = 0;
    std::vector<cplx> vecs;      // [(node*k + band)*k + i]
    std::vector<double> values;  // [node*k + band]

    std::span<const cplx> vec(int node, int band) const {
        return {vecs.data() + (static_cast<std::size_t>(node) * k + band) * k,
                static_cast<std::size_t>(k)};
    }
};

EigGrid eig_grid(const HamiltonianFamily& family, const std::vector<MomentumPoint>& pts,
                 const GaugeNoise& noise) {
    EigGrid g;
    g.nodes = static_cast<int>(pts.size());
    g.k = family.bands();
    g.vecs.resize(static_cast<std::size_t>(g.nodes) * g.k * g.k);
    g.values.resize(static_cast<std::size_t>(g.nodes) * g.k);

    std::vector<cplx> phases;
    if (noise.enabled) {
        Rng rng(noise.seed);
        phases.resize(static_cast<std::size_t>(g.nodes) * g.k);
        for (auto& p : phases) p = rng.unit_phase();
    }

    parallel_for(pts.size(), [&](std::size_t node) {
        const EigenDecomposition eig = eigh(family(pts[node]));
        for (int b = 0; b < g.k; ++b) {
            g.values[node * g.k + b] = eig.values[b];
            const cplx ph = noise.enabled ? phases[node * g.k + b] : cplx(1.0, 0.0);
            for (int i = 0; i < g.k; ++i)
                g.vecs[(node * g.k + b) * g.k + i] = ph * eig.vectors(i, b);
        }
    });
    return g;
}

double band_gap_at(const EigGrid& g, int node, int band) {
    double gap = std::numeric_limits<double>::infinity();
    if (band > 0) gap = std::min(gap, g.values[node * g.k + band] - g.values[node * g.k + band - 1]);
    if (band + 1 < g.k)
        gap = std::min(gap, g.values[node * g.k + band + 1] - g.values[node * g.k + band]);
    return gap;
}

void require_band_isolation(const EigGrid& g, const std::vector<MomentumPoint>& pts, int band,
                            double floor, const char* what) {
    double worst = std::numeric_limits<double>::infinity();
    int worst_node = 0;
    for (int n = 0; n < g.nodes; ++n) {
        const double gap = band_gap_at(g, n, band);
        if (gap < worst) {
            worst = gap;
            worst_node = n;
        }
    }
    if (worst <= floor) {
        std::ostringstream os;
        os << what << ": band " << band << " closes its gap (min gap " << worst
           << ") near momentum (";
        for (int i = 0; i < pts[worst_node].dim(); ++i)
            os << (i ? ", " : "") << pts[worst_node][i];
        os << ")";
        throw AnalysisError(os.str());
    }
}

cplx link(const EigGrid& g, int a, int b, int band) {
    return overlap(g.vec(a, band), g.vec(b, band));
}

/// Sum of plaquette phases over a quadrilateral mesh given by a node-index
/// lookup. nu x nv plaquettes; corner(i, j) must return the node index.
template <typename Corner>
std::pair<double, double> plaquette_sum(const EigGrid& g, int band, int nu, int nv,
                                        Corner&& corner) {
    double total = 0.0;
    double max_phase = 0.0;
    for (int i = 0; i < nu; ++i) {
        for (int j = 0; j < nv; ++j) {
            const int n00 = corner(i, j);
            const int n10 = corner(i + 1, j);
            const int n11 = corner(i + 1, j + 1);
            const int n01 = corner(i, j + 1);
            const cplx prod =
                link(g, n00, n10, band) * link(g, n10, n11, band) * link(g, n11, n01, band) *
                link(g, n01, n00, band);
            const double ph = (std::abs(prod) < 1e-300) ? M_PI : std::arg(prod);
            total += ph;
            max_phase = std::max(max_phase, std::abs(ph));
        }
    }
    return {total, max_phase};
}

ChernResult result_from_sum(double total, double max_phase, int grid) {
    ChernResult r;
    r.raw = total / kTwoPi;
    r.value = static_cast<int>(std::llround(r.raw));
    r.max_plaquette_phase = max_phase;
    r.grid = grid;
    r.reliable = (max_phase < 0.999 * M_PI) && (std::abs(r.raw - r.value) <= 1e-6);
    return r;
}

std::vector<MomentumPoint> slice_nodes(const HamiltonianFamily& family, int axis, double t,
                                       int n) {
    const int a = (axis + 1) % 3;
    const int b = (axis + 2) % 3;
    std::vector<MomentumPoint> pts;
    pts.reserve(static_cast<std::size_t>(n) * n);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            std::vector<double> c(3, 0.0);
            c[axis] = t;
            c[a] = kTwoPi * i / n;
            c[b] = kTwoPi * j / n;
            pts.emplace_back(std::move(c));
        }
    }
    (void)family;
    return pts;
}

struct Face {
    int axis;
    int sign;
};

/// Right-handed in-face axis pair so that u x v points along the outward
/// normal of each cube face.
std::pair<int, int> face_axes(const Face& f) {
    const int a1 = (f.axis + 1) % 3;
    const int a2 = (f.axis + 2) % 3;
    return f.sign > 0 ? std::make_pair(a1, a2) : std::make_pair(a2, a1);
}

std::vector<MomentumPoint> face_nodes(const MomentumPoint& center, double r, const Face& f,
                                      int n) {
    const auto [ua, va] = face_axes(f);
    std::vector<MomentumPoint> pts;
    pts.reserve(static_cast<std::size_t>(n + 1) * (n + 1));
    for (int i = 0; i <= n; ++i) {
        for (int j = 0; j <= n; ++j) {
            std::vector<double> delta(3, 0.0);
            delta[f.axis] = f.sign * r;
            delta[ua] = -r + 2.0 * r * i / n;
            delta[va] = -r + 2.0 * r * j / n;
            pts.push_back(center.shifted(delta));
        }
    }
    return pts;
}

} // namespace

LoopPath circle_loop(const MomentumPoint& center, double radius, int band, int n_points,
                     int axis_u, int axis_v) {
    if (n_points < 8) throw ModelError("circle_loop: need at least 8 points");
    LoopPath loop;
    loop.band = band;
    for (int j = 0; j < n_points; ++j) {
        const double th = kTwoPi * j / n_points;
        std::vector<double> delta(center.dim(), 0.0);
        delta[axis_u] = radius * std::cos(th);
        delta[axis_v] = radius * std::sin(th);
        loop.points.push_back(center.shifted(delta));
    }
    return loop;
}

namespace {

struct BerryEval {
    double unwound;
    bool overlap_ok;
};

BerryEval berry_once(const HamiltonianFamily& family, const std::vector<MomentumPoint>& pts,
                     int band, const BerryOptions& options) {
    const EigGrid g = eig_grid(family, pts, options.noise);
    require_band_isolation(g, pts, band, options.min_gap, "berry_phase");
    double unwound = 0.0;
    for (int j = 0; j < g.nodes; ++j) {
        const cplx ov = link(g, j, (j + 1) % g.nodes, band);
        if (std::abs(ov) < 1e-12) return {0.0, false};
        unwound += -std::arg(ov);
    }
    return {unwound, true};
}

std::vector<MomentumPoint> double_loop(const std::vector<MomentumPoint>& pts) {
    std::vector<MomentumPoint> out;
    out.reserve(pts.size() * 2);
    for (std::size_t j = 0; j < pts.size(); ++j) {
        const MomentumPoint& a = pts[j];
        const MomentumPoint& b = pts[(j + 1) % pts.size()];
        out.push_back(a);
        auto half = minimal_image(b, a);
        for (auto& x : half) x *= 0.5;
        out.push_back(a.shifted(half));
    }
    return out;
}

} // namespace

BerryPhaseResult berry_phase(const HamiltonianFamily& family, const LoopPath& loop,
                             const BerryOptions& options) {
    if (loop.points.size() < 8) throw ModelError("berry_phase: loop needs at least 8 points");
    if (loop.band < 0 || loop.band >= family.bands())
        throw ModelError("berry_phase: band index out of range");

    std::vector<MomentumPoint> pts = loop.points;
    std::optional<double> prev;
    while (true) {
        const BerryEval eval = berry_once(family, pts, loop.band, options);
        if (eval.overlap_ok) {
            const double phase = wrap_to_pi(eval.unwound);
            if (prev && std::abs(wrap_to_pi(phase - *prev)) < options.agree_tol) {
                BerryPhaseResult r;
                r.phase = phase;
                r.unwound = eval.unwound;
                r.band = loop.band;
                r.points_used = static_cast<int>(pts.size());
                std::ostringstream note;
                note << "unwound segment sum " << eval.unwound
                     << " rad in the deterministic eigenvector gauge";
                r.note = note.str();
                return r;
            }
            prev = phase;
        } else {
            prev.reset(); // too coarse for a meaningful value
        }
        if (static_cast<int>(pts.size()) * 2 > options.max_points) {
            throw NumericalError(
                "berry_phase: refinement cap reached without convergence "
                "(vanishing overlaps or loop too close to a degeneracy)");
        }
        pts = double_loop(pts);
    }
}

std::vector<ChernResult> chern_on_slice_all(const HamiltonianFamily& family, int axis, double t,
                                            int grid_n, const ChernOptions& options) {
    if (family.dim() != 3) throw ModelError("chern_on_slice: family must be 3d");
    if (axis < 0 || axis > 2) throw ModelError("chern_on_slice: axis out of range");
    if (grid_n < 4) throw ModelError("chern_on_slice: grid too coarse");

    int n = grid_n;
    while (true) {
        const auto pts = slice_nodes(family, axis, t, n);
        const EigGrid g = eig_grid(family, pts, options.noise);
        for (int b = 0; b < family.bands(); ++b)
            require_band_isolation(g, pts, b, options.gap_floor, "chern_on_slice");

        std::vector<ChernResult> out;
        double worst_phase = 0.0;
        for (int b = 0; b < family.bands(); ++b) {
            const auto [total, maxph] =
                plaquette_sum(g, b, n, n, [n](int i, int j) { return (i % n) * n + (j % n); });
            out.push_back(result_from_sum(total, maxph, n));
            worst_phase = std::max(worst_phase, maxph);
        }
        if (worst_phase < options.refine_phase || n >= options.max_grid) return out;
        n = std::min(2 * n, options.max_grid);
    }
}

ChernResult chern_on_slice(const HamiltonianFamily& family, int axis, double t, int band,
                           int grid_n, const ChernOptions& options) {
    if (band < 0 || band >= family.bands()) throw ModelError("chern_on_slice: band out of range");
    return chern_on_slice_all(family, axis, t, grid_n, options)[band];
}

std::vector<ChernResult> chern_on_sphere_all(const HamiltonianFamily& family,
                                             const MomentumPoint& center, double r, int grid_n,
                                             int orientation, const ChernOptions& options) {
    if (family.dim() != 3) throw ModelError("chern_on_sphere: family must be 3d");
    if (!(r > 0.0)) throw ModelError("chern_on_sphere: radius must be positive");
    if (orientation != 1 && orientation != -1)
        throw ModelError("chern_on_sphere: orientation must be +1 or -1");
    if (grid_n < 4) throw ModelError("chern_on_sphere: grid too coarse");

    static const Face faces[6] = {{0, +1}, {0, -1}, {1, +1}, {1, -1}, {2, +1}, {2, -1}};

    int n = grid_n;
    while (true) {
        std::vector<double> totals(family.bands(), 0.0);
        std::vector<double> maxph(family.bands(), 0.0);
        for (const Face& f : faces) {
            const auto pts = face_nodes(center, r, f, n);
            const EigGrid g = eig_grid(family, pts, options.noise);
            for (int b = 0; b < family.bands(); ++b)
                require_band_isolation(g, pts, b, options.gap_floor, "chern_on_sphere");
            for (int b = 0; b < family.bands(); ++b) {
                const auto [total, mp] = plaquette_sum(
                    g, b, n, n, [n](int i, int j) { return i * (n + 1) + j; });
                totals[b] += orientation * total;
                maxph[b] = std::max(maxph[b], mp);
            }
        }
        std::vector<ChernResult> out;
        double worst = 0.0;
        for (int b = 0; b < family.bands(); ++b) {
            out.push_back(result_from_sum(totals[b], maxph[b], n));
            worst = std::max(worst, maxph[b]);
        }
        if (worst < options.refine_phase || n >= options.max_grid) return out;
        n = std::min(2 * n, options.max_grid);
    }
}

ChernResult chern_on_sphere(const HamiltonianFamily& family, const MomentumPoint& center, double r,
                            int band, int grid_n, int orientation, const ChernOptions& options) {
    if (band < 0 || band >= family.bands()) throw ModelError("chern_on_sphere: band out of range");
    return chern_on_sphere_all(family, center, r, grid_n, orientation, options)[band];
}

} // namespace bandtop
