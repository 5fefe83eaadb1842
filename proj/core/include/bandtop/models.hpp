#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "bandtop/linalg.hpp"
#include "bandtop/rng.hpp"

namespace bandtop {

constexpr double kTwoPi = 6.283185307179586476925286766559;

/// Quasi-momentum on the torus T^d. Coordinates are canonicalized into
/// [0, 2pi) at construction and interpreted periodically. Chart-domain
/// families (the spin family, transverse disks) map them back into
/// (-pi, pi] internally, so loops and cubes around the origin work the
/// same way on both kinds of domain.
class MomentumPoint {
public:
    explicit MomentumPoint(std::vector<double> coords);

    int dim() const { return static_cast<int>(c_.size()); }
    double operator[](int i) const { return c_[i]; }
    const std::vector<double>& coords() const { return c_; }

    /// Coordinates mapped into (-pi, pi] (chart representative).
    std::vector<double> chart_coords() const;

    /// This point displaced by delta, re-canonicalized.
    MomentumPoint shifted(std::span<const double> delta) const;

private:
    std::vector<double> c_;
};

/// Componentwise minimal image of (p - ref), each in (-pi, pi].
std::vector<double> minimal_image(const MomentumPoint& p, const MomentumPoint& ref);

/// Euclidean length of the minimal image displacement.
double torus_distance(const MomentumPoint& p, const MomentumPoint& q);

/// Circle distance of two slice parameters, in [0, pi].
double circle_distance(double s, double t);

/// Symmetry contract a family claims to satisfy. Declarations are
/// verified by sampling at registration, not proven.
struct SymmetryDeclaration {
    enum class Kind {
        TimeReversal,    ///< H(-k) = conj(H(k))
        ShiftedNegation, ///< H(k + shift) = U^dagger (-H(k)) U
    };

    Kind kind;
    std::vector<double> shift; ///< ShiftedNegation only
    CMatrix unitary;           ///< ShiftedNegation only

    static SymmetryDeclaration time_reversal();
    static SymmetryDeclaration shifted_negation(std::vector<double> shift, CMatrix u);

    std::string describe() const;
};

struct SymmetryCheckResult {
    bool pass = false;
    double max_violation = 0.0;
};

class HamiltonianFamily;

/// Samples the declared identity at random momenta; pass iff the largest
/// entry-wise violation stays within tol.
SymmetryCheckResult check_symmetry(const HamiltonianFamily& family, const SymmetryDeclaration& decl,
                                   int samples = 100, double tol = 1e-10,
                                   std::uint64_t seed = kDefaultSeed);

/// A family of Hermitian matrices over T^d (or a chart of R^d).
/// Immutable after construction; the evaluator must be pure, so values are
/// safe to share across threads.
class HamiltonianFamily {
public:
    using Evaluator = std::function<HermitianMatrix(const MomentumPoint&)>;
    using DerivativeFn = std::function<HermitianMatrix(const MomentumPoint&, int)>;

    HamiltonianFamily(std::string name, int d, int k, Evaluator evaluator,
                      DerivativeFn exact_derivative = nullptr);

    const std::string& name() const { return name_; }
    int dim() const { return d_; }
    int bands() const { return k_; }

    HermitianMatrix operator()(const MomentumPoint& kpt) const;
    HermitianMatrix at(std::vector<double> coords) const;

    bool has_exact_derivative() const { return static_cast<bool>(exact_derivative_); }
    HermitianMatrix exact_derivative(const MomentumPoint& kpt, int axis) const;

    const std::vector<SymmetryDeclaration>& symmetries() const { return symmetries_; }
    bool has_symmetry(SymmetryDeclaration::Kind kind) const;

    /// Verifies the declaration by sampling and stores it.
    /// Throws ModelError if the family violates it.
    void declare_symmetry(SymmetryDeclaration decl, int samples = 100, double tol = 1e-10,
                          std::uint64_t seed = kDefaultSeed);

private:
    std::string name_;
    int d_;
    int k_;
    Evaluator evaluator_;
    DerivativeFn exact_derivative_;
    std::vector<SymmetryDeclaration> symmetries_;
};

/// Central difference (H(k+h e_a) - H(k-h e_a)) / 2h, re-Hermitized.
/// Uses the family's exact derivative when it has one.
HermitianMatrix derivative(const HamiltonianFamily& family, const MomentumPoint& kpt, int axis,
                           double h = 1e-5);

/// su(2) spin matrices of spin s (dimension 2s+1): S_z = diag(s, ..., -s),
/// S_x real, S_y purely imaginary, [S_x, S_y] = i S_z. For s = 1/2 these
/// are exactly the Pauli halves sigma/2.
std::array<HermitianMatrix, 3> spin_matrices(double s);

/// H(x) = (A x) . S on a chart of R^3. A defaults to the identity; a general
/// invertible A gives the linear-image family whose chirality is sign(det A).
HamiltonianFamily make_spin_family(double s, const std::array<std::array<double, 3>, 3>& a = {
                                                 {{1, 0, 0}, {0, 1, 0}, {0, 0, 1}}});

/// 2d equatorial chart family u S_x + v S_y for spin s.
HamiltonianFamily make_equatorial_spin_family(double s);

/// Restriction of a d=3 family to the 2d disk through `base` spanned by n1, n2.
HamiltonianFamily make_transverse_family(const HamiltonianFamily& family, const MomentumPoint& base,
                                         const std::array<double, 3>& n1,
                                         const std::array<double, 3>& n2);

// --- graph model zoo -------------------------------------------------------

/// P_n: scalar family sum_l (e^{i k_l} + e^{-i k_l}) on T^n.
HamiltonianFamily make_petal(int n);

/// D_n: 2x2 family with off-diagonal 1 + sum_l e^{i k_l} on T^n.
/// D_2 is the honeycomb, D_3 the diamond.
HamiltonianFamily make_digraph(int n);

HamiltonianFamily make_honeycomb();
HamiltonianFamily make_diamond();

/// G: the 4-band Gyroid family on T^3, with TRS and the shifted-negation
/// symmetry H(k + (pi,pi,pi)) = U^dagger (-H(k)) U, U = diag(-1,1,1,1).
HamiltonianFamily make_gyroid();

/// H(k) + lambda * H1(k). Symmetry declarations of the base are re-verified
/// on the sum and kept only when still valid.
HamiltonianFamily deform(const HamiltonianFamily& base, const HamiltonianFamily& perturbation,
                         double lambda);

// --- file-ingested Bloch models --------------------------------------------

/// One matrix-entry contribution c * e^{i n.k} at (row, col).
struct BlochTerm {
    int row = 0;
    int col = 0;
    cplx coeff;
    std::vector<int> phase; ///< n, one integer per torus axis
};

/// Finite Fourier (tight-binding) family: H_ij(k) = sum over terms at (i,j)
/// of c e^{i n.k}. Term sets are canonicalized; for every term the
/// conjugate partner (j, i, conj c, -n) is auto-completed when absent and
/// validated when present, so the evaluated matrix is Hermitian for all k.
class BlochTermModel {
public:
    static BlochTermModel from_terms(std::string name, int d, int k, std::vector<BlochTerm> terms,
                                     double tol = 1e-12);

    const std::string& name() const { return name_; }
    int dim() const { return d_; }
    int bands() const { return k_; }
    const std::vector<BlochTerm>& terms() const { return terms_; }

    HermitianMatrix evaluate(const MomentumPoint& kpt) const;
    /// Exact term-wise derivative: each term picks up a factor i n_axis.
    HermitianMatrix derivative(const MomentumPoint& kpt, int axis) const;

    /// Family backed by this model (exact derivatives included).
    HamiltonianFamily to_family() const;

    std::string to_json_string(int indent = 2) const;
    static BlochTermModel parse_json(const std::string& text);

    /// Symmetry declarations carried by the source document (already
    /// verified when the family is built via parse_json_family).
    const std::vector<SymmetryDeclaration>& declared_symmetries() const { return declared_; }
    void add_declared_symmetry(SymmetryDeclaration decl) { declared_.push_back(std::move(decl)); }

private:
    BlochTermModel() = default;
    std::string name_;
    int d_ = 0;
    int k_ = 0;
    std::vector<BlochTerm> terms_;
    std::vector<SymmetryDeclaration> declared_;
};

/// Parses a model document and returns the verified family.
HamiltonianFamily parse_model_file(const std::string& path);
HamiltonianFamily parse_model_json(const std::string& text);

} // namespace bandtop
