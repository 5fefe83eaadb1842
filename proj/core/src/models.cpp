#include "bandtop/models.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

#include <json.hpp>

namespace bandtop {

namespace {

double wrap_2pi(double x) {
    x = std::fmod(x, kTwoPi);
    if (x < 0.0) x += kTwoPi;
    if (x >= kTwoPi) x -= kTwoPi; // fmod rounding at the seam
    return x;
}

double wrap_pi(double x) {
    x = wrap_2pi(x);
    return (x > M_PI) ? x - kTwoPi : x;
}

} // namespace

MomentumPoint::MomentumPoint(std::vector<double> coords) : c_(std::move(coords)) {
    if (c_.empty()) throw ModelError("MomentumPoint: dimension must be >= 1");
    for (auto& x : c_) {
        if (!std::isfinite(x)) throw ModelError("MomentumPoint: non-finite coordinate");
        x = wrap_2pi(x);
    }
}

std::vector<double> MomentumPoint::chart_coords() const {
    std::vector<double> out(c_.size());
    for (std::size_t i = 0; i < c_.size(); ++i) out[i] = wrap_pi(c_[i]);
    return out;
}

MomentumPoint MomentumPoint::shifted(std::span<const double> delta) const {
    std::vector<double> out = c_;
    for (std::size_t i = 0; i < out.size() && i < delta.size(); ++i) out[i] += delta[i];
    return MomentumPoint(std::move(out));
}

std::vector<double> minimal_image(const MomentumPoint& p, const MomentumPoint& ref) {
    std::vector<double> out(p.dim());
    for (int i = 0; i < p.dim(); ++i) out[i] = wrap_pi(p[i] - ref[i]);
    return out;
}

double torus_distance(const MomentumPoint& p, const MomentumPoint& q) {
    double s = 0.0;
    for (double d : minimal_image(p, q)) s += d * d;
    return std::sqrt(s);
}

double circle_distance(double s, double t) { return std::abs(wrap_pi(s - t)); }

SymmetryDeclaration SymmetryDeclaration::time_reversal() {
    SymmetryDeclaration d;
    d.kind = Kind::TimeReversal;
    return d;
}

SymmetryDeclaration SymmetryDeclaration::shifted_negation(std::vector<double> shift, CMatrix u) {
    SymmetryDeclaration d;
    d.kind = Kind::ShiftedNegation;
    d.shift = std::move(shift);
    d.unitary = std::move(u);
    return d;
}

std::string SymmetryDeclaration::describe() const {
    if (kind == Kind::TimeReversal) return "TRS";
    std::ostringstream os;
    os << "shifted-negation(shift=[";
    for (std::size_t i = 0; i < shift.size(); ++i) os << (i ? "," : "") << shift[i];
    os << "])";
    return os.str();
}

SymmetryCheckResult check_symmetry(const HamiltonianFamily& family, const SymmetryDeclaration& decl,
                                   int samples, double tol, std::uint64_t seed) {
    if (decl.kind == SymmetryDeclaration::Kind::ShiftedNegation) {
        if (static_cast<int>(decl.shift.size()) != family.dim())
            throw ModelError("check_symmetry: shift dimension does not match family");
        if (decl.unitary.rows() != family.bands() || decl.unitary.cols() != family.bands())
            throw ModelError("check_symmetry: unitary dimension does not match family");
    }
    Rng rng(seed);
    double worst = 0.0;
    for (int t = 0; t < samples; ++t) {
        std::vector<double> raw(family.dim());
        for (auto& x : raw) x = rng.uniform(0.0, kTwoPi);
        const MomentumPoint k(raw);
        const HermitianMatrix hk = family(k);
        CMatrix lhs, rhs;
        if (decl.kind == SymmetryDeclaration::Kind::TimeReversal) {
            std::vector<double> neg(raw);
            for (auto& x : neg) x = -x;
            lhs = family(MomentumPoint(neg)).matrix();
            rhs = hk.conjugate().matrix();
        } else {
            lhs = family(k.shifted(decl.shift)).matrix();
            rhs = hk.scaled(-1.0).conjugated_by(decl.unitary).matrix();
        }
        worst = std::max(worst, (lhs - rhs).max_abs());
    }
    return {worst <= tol, worst};
}

HamiltonianFamily::HamiltonianFamily(std::string name, int d, int k, Evaluator evaluator,
                                     DerivativeFn exact_derivative)
    : name_(std::move(name)),
      d_(d),
      k_(k),
      evaluator_(std::move(evaluator)),
      exact_derivative_(std::move(exact_derivative)) {
    if (d_ < 1) throw ModelError("HamiltonianFamily: torus dimension must be >= 1");
    if (k_ < 1) throw ModelError("HamiltonianFamily: band count must be >= 1");
    if (!evaluator_) throw ModelError("HamiltonianFamily: evaluator is required");
}

HermitianMatrix HamiltonianFamily::operator()(const MomentumPoint& kpt) const {
    if (kpt.dim() != d_) throw ModelError("HamiltonianFamily: momentum dimension mismatch");
    HermitianMatrix h = evaluator_(kpt);
    if (h.dim() != k_) throw ModelError("HamiltonianFamily: evaluator returned wrong dimension");
    return h;
}

HermitianMatrix HamiltonianFamily::at(std::vector<double> coords) const {
    return (*this)(MomentumPoint(std::move(coords)));
}

HermitianMatrix HamiltonianFamily::exact_derivative(const MomentumPoint& kpt, int axis) const {
    if (!exact_derivative_) throw ModelError("HamiltonianFamily: no exact derivative available");
    return exact_derivative_(kpt, axis);
}

bool HamiltonianFamily::has_symmetry(SymmetryDeclaration::Kind kind) const {
    for (const auto& s : symmetries_)
        if (s.kind == kind) return true;
    return false;
}

void HamiltonianFamily::declare_symmetry(SymmetryDeclaration decl, int samples, double tol,
                                         std::uint64_t seed) {
    const auto check = check_symmetry(*this, decl, samples, tol, seed);
    if (!check.pass) {
        std::ostringstream os;
        os << "declare_symmetry: family '" << name_ << "' violates " << decl.describe()
           << " (max violation " << check.max_violation << " > " << tol << ")";
        throw ModelError(os.str());
    }
    symmetries_.push_back(std::move(decl));
}

HermitianMatrix derivative(const HamiltonianFamily& family, const MomentumPoint& kpt, int axis,
                           double h) {
    if (axis < 0 || axis >= family.dim()) throw ModelError("derivative: axis out of range");
    if (!(h > 0.0) || h > 1e-3) throw ModelError("derivative: step must be in (0, 1e-3]");
    if (family.has_exact_derivative()) return family.exact_derivative(kpt, axis);
    std::vector<double> dp(family.dim(), 0.0), dm(family.dim(), 0.0);
    dp[axis] = h;
    dm[axis] = -h;
    const CMatrix diff = family(kpt.shifted(dp)).matrix() - family(kpt.shifted(dm)).matrix();
    return HermitianMatrix::symmetrized(diff.scaled(1.0 / (2.0 * h)));
}

std::array<HermitianMatrix, 3> spin_matrices(double s) {
    if (s < 0.0 || std::abs(2.0 * s - std::round(2.0 * s)) > 1e-9)
        throw ModelError("spin_matrices: spin must be a nonnegative half-integer");
    const int n = static_cast<int>(std::round(2.0 * s)) + 1;
    // basis |s, m> with m = s, s-1, ..., -s: the Pauli-half convention
    CMatrix sp(n, n); // raising
    CMatrix sz(n, n);
    for (int i = 0; i < n; ++i) {
        const double m = s - i;
        sz(i, i) = m;
        if (i + 1 < n) {
            const double mlow = s - (i + 1);
            sp(i, i + 1) = std::sqrt(s * (s + 1) - mlow * (mlow + 1));
        }
    }
    const CMatrix sm = sp.adjoint();
    const CMatrix sx = (sp + sm).scaled(0.5);
    const CMatrix sy = (sp - sm).scaled(cplx(0.0, -0.5));
    return {HermitianMatrix::symmetrized(sx), HermitianMatrix::symmetrized(sy),
            HermitianMatrix::symmetrized(sz)};
}

HamiltonianFamily make_spin_family(double s, const std::array<std::array<double, 3>, 3>& a) {
    const auto spin = spin_matrices(s);
    const int n = spin[0].dim();
    auto eval = [spin, a, n](const MomentumPoint& kpt) {
        if (kpt.dim() != 3) throw ModelError("spin family: expects 3 coordinates");
        const auto x = kpt.chart_coords();
        CMatrix m(n, n);
        for (int beta = 0; beta < 3; ++beta) {
            const double w = a[beta][0] * x[0] + a[beta][1] * x[1] + a[beta][2] * x[2];
            m = m + spin[beta].matrix().scaled(w);
        }
        return HermitianMatrix::symmetrized(m);
    };
    auto deriv = [spin, a, n](const MomentumPoint&, int axis) {
        CMatrix m(n, n);
        for (int beta = 0; beta < 3; ++beta) m = m + spin[beta].matrix().scaled(a[beta][axis]);
        return HermitianMatrix::symmetrized(m);
    };
    std::ostringstream nm;
    nm << "spin-" << s;
    return HamiltonianFamily(nm.str(), 3, n, std::move(eval), std::move(deriv));
}

HamiltonianFamily make_equatorial_spin_family(double s) {
    const auto spin = spin_matrices(s);
    const int n = spin[0].dim();
    auto eval = [spin, n](const MomentumPoint& kpt) {
        if (kpt.dim() != 2) throw ModelError("equatorial spin family: expects 2 coordinates");
        const auto x = kpt.chart_coords();
        return HermitianMatrix::symmetrized(spin[0].matrix().scaled(x[0]) +
                                            spin[1].matrix().scaled(x[1]));
    };
    auto deriv = [spin](const MomentumPoint&, int axis) { return spin[axis]; };
    std::ostringstream nm;
    nm << "spin-" << s << "-equatorial";
    return HamiltonianFamily(nm.str(), 2, n, std::move(eval), std::move(deriv));
}

HamiltonianFamily make_transverse_family(const HamiltonianFamily& family, const MomentumPoint& base,
                                         const std::array<double, 3>& n1,
                                         const std::array<double, 3>& n2) {
    if (family.dim() != 3) throw ModelError("make_transverse_family: base family must be 3d");
    auto offset = [base, n1, n2](const MomentumPoint& uv) {
        const auto c = uv.chart_coords();
        std::vector<double> delta(3);
        for (int i = 0; i < 3; ++i) delta[i] = c[0] * n1[i] + c[1] * n2[i];
        return base.shifted(delta);
    };
    auto eval = [family, offset](const MomentumPoint& uv) { return family(offset(uv)); };
    HamiltonianFamily::DerivativeFn deriv = nullptr;
    if (family.has_exact_derivative()) {
        deriv = [family, offset, n1, n2](const MomentumPoint& uv, int axis) {
            const MomentumPoint p = offset(uv);
            const auto& n = (axis == 0) ? n1 : n2;
            CMatrix m(family.bands(), family.bands());
            for (int a = 0; a < 3; ++a)
                if (n[a] != 0.0) m = m + family.exact_derivative(p, a).matrix().scaled(n[a]);
            return HermitianMatrix::symmetrized(m);
        };
    }
    return HamiltonianFamily(family.name() + "-disk", 2, family.bands(), std::move(eval),
                             std::move(deriv));
}

namespace {

std::vector<int> unit_phase_vec(int d, int axis, int sign) {
    std::vector<int> n(d, 0);
    n[axis] = sign;
    return n;
}

} // namespace

HamiltonianFamily make_petal(int n) {
    if (n < 1) throw ModelError("make_petal: n must be >= 1");
    std::vector<BlochTerm> terms;
    for (int l = 0; l < n; ++l) terms.push_back({0, 0, 1.0, unit_phase_vec(n, l, +1)});
    std::ostringstream nm;
    nm << "P" << n;
    auto model = BlochTermModel::from_terms(nm.str(), n, 1, std::move(terms));
    auto fam = model.to_family();
    fam.declare_symmetry(SymmetryDeclaration::time_reversal());
    return fam;
}

HamiltonianFamily make_digraph(int n) {
    if (n < 1) throw ModelError("make_digraph: n must be >= 1");
    std::vector<BlochTerm> terms;
    terms.push_back({0, 1, 1.0, std::vector<int>(n, 0)});
    for (int l = 0; l < n; ++l) terms.push_back({0, 1, 1.0, unit_phase_vec(n, l, +1)});
    std::ostringstream nm;
    nm << "D" << n;
    auto model = BlochTermModel::from_terms(nm.str(), n, 2, std::move(terms));
    auto fam = model.to_family();
    fam.declare_symmetry(SymmetryDeclaration::time_reversal());
    return fam;
}

HamiltonianFamily make_honeycomb() { return make_digraph(2); }
HamiltonianFamily make_diamond() { return make_digraph(3); }

HamiltonianFamily make_gyroid() {
    std::vector<BlochTerm> terms = {
        {0, 1, 1.0, {0, 0, 0}},  {0, 2, 1.0, {0, 0, 0}}, {0, 3, 1.0, {0, 0, 0}},
        {1, 2, 1.0, {1, 0, 0}},  // e^{i k1}
        {1, 3, 1.0, {0, -1, 0}}, // e^{-i k2}
        {2, 3, 1.0, {0, 0, 1}},  // e^{i k3}
    };
    auto model = BlochTermModel::from_terms("G", 3, 4, std::move(terms));
    auto fam = model.to_family();
    fam.declare_symmetry(SymmetryDeclaration::time_reversal());
    CMatrix u(4, 4);
    u(0, 0) = -1.0;
    u(1, 1) = 1.0;
    u(2, 2) = 1.0;
    u(3, 3) = 1.0;
    fam.declare_symmetry(SymmetryDeclaration::shifted_negation({M_PI, M_PI, M_PI}, std::move(u)));
    return fam;
}

HamiltonianFamily deform(const HamiltonianFamily& base, const HamiltonianFamily& perturbation,
                         double lambda) {
    if (base.dim() != perturbation.dim() || base.bands() != perturbation.bands())
        throw ModelError("deform: base and perturbation dimensions do not match");
    auto eval = [base, perturbation, lambda](const MomentumPoint& k) {
        return base(k) + perturbation(k).scaled(lambda);
    };
    HamiltonianFamily::DerivativeFn deriv = nullptr;
    if (base.has_exact_derivative() && perturbation.has_exact_derivative()) {
        deriv = [base, perturbation, lambda](const MomentumPoint& k, int axis) {
            return base.exact_derivative(k, axis) +
                   perturbation.exact_derivative(k, axis).scaled(lambda);
        };
    }
    std::ostringstream nm;
    nm << base.name() << "+" << lambda << "*" << perturbation.name();
    HamiltonianFamily out(nm.str(), base.dim(), base.bands(), std::move(eval), std::move(deriv));
    for (const auto& decl : base.symmetries()) {
        if (check_symmetry(out, decl).pass) out.declare_symmetry(decl);
    }
    return out;
}

// --- BlochTermModel ---------------------------------------------------------

namespace {

struct TermKey {
    int row, col;
    std::vector<int> phase;
    bool operator<(const TermKey& o) const {
        if (row != o.row) return row < o.row;
        if (col != o.col) return col < o.col;
        return phase < o.phase;
    }
};

std::string term_to_string(int row, int col, const cplx& c, const std::vector<int>& n) {
    std::ostringstream os;
    os << "(i=" << row << ", j=" << col << ", c=" << c.real();
    if (c.imag() >= 0)
        os << "+" << c.imag() << "i";
    else
        os << c.imag() << "i";
    os << ", n=[";
    for (std::size_t a = 0; a < n.size(); ++a) os << (a ? "," : "") << n[a];
    os << "])";
    return os.str();
}

} // namespace

BlochTermModel BlochTermModel::from_terms(std::string name, int d, int k,
                                          std::vector<BlochTerm> terms, double tol) {
    if (d < 1) throw ModelError("BlochTermModel: d must be >= 1");
    if (k < 1) throw ModelError("BlochTermModel: k must be >= 1");
    std::map<TermKey, cplx> merged;
    for (const auto& t : terms) {
        if (t.row < 0 || t.row >= k || t.col < 0 || t.col >= k)
            throw ModelError("BlochTermModel: term index out of range in " +
                             term_to_string(t.row, t.col, t.coeff, t.phase));
        if (static_cast<int>(t.phase.size()) != d)
            throw ModelError("BlochTermModel: phase vector has wrong length in " +
                             term_to_string(t.row, t.col, t.coeff, t.phase));
        merged[TermKey{t.row, t.col, t.phase}] += t.coeff;
    }
    // Hermiticity: complete or validate the conjugate partner of every term.
    std::map<TermKey, cplx> full = merged;
    for (const auto& [key, c] : merged) {
        std::vector<int> neg(key.phase.size());
        for (std::size_t a = 0; a < neg.size(); ++a) neg[a] = -key.phase[a];
        const TermKey partner{key.col, key.row, neg};
        auto it = merged.find(partner);
        if (it == merged.end()) {
            full[partner] += std::conj(c);
        } else if (std::abs(it->second - std::conj(c)) > tol) {
            throw ModelError("BlochTermModel: non-Hermitian term set: " +
                             term_to_string(key.row, key.col, c, key.phase) +
                             " conflicts with partner " +
                             term_to_string(partner.row, partner.col, it->second, partner.phase));
        }
    }
    BlochTermModel model;
    model.name_ = std::move(name);
    model.d_ = d;
    model.k_ = k;
    for (const auto& [key, c] : full) {
        if (std::abs(c) == 0.0) continue;
        model.terms_.push_back({key.row, key.col, c, key.phase});
    }
    return model;
}

HermitianMatrix BlochTermModel::evaluate(const MomentumPoint& kpt) const {
    if (kpt.dim() != d_) throw ModelError("BlochTermModel: momentum dimension mismatch");
    CMatrix m(k_, k_);
    for (const auto& t : terms_) {
        double arg = 0.0;
        for (int a = 0; a < d_; ++a) arg += t.phase[a] * kpt[a];
        m(t.row, t.col) += t.coeff * cplx(std::cos(arg), std::sin(arg));
    }
    return HermitianMatrix::symmetrized(m);
}

HermitianMatrix BlochTermModel::derivative(const MomentumPoint& kpt, int axis) const {
    if (axis < 0 || axis >= d_) throw ModelError("BlochTermModel: axis out of range");
    CMatrix m(k_, k_);
    for (const auto& t : terms_) {
        if (t.phase[axis] == 0) continue;
        double arg = 0.0;
        for (int a = 0; a < d_; ++a) arg += t.phase[a] * kpt[a];
        m(t.row, t.col) += t.coeff * cplx(0.0, static_cast<double>(t.phase[axis])) *
                           cplx(std::cos(arg), std::sin(arg));
    }
    return HermitianMatrix::symmetrized(m);
}

HamiltonianFamily BlochTermModel::to_family() const {
    BlochTermModel copy = *this;
    auto eval = [copy](const MomentumPoint& k) { return copy.evaluate(k); };
    auto deriv = [copy](const MomentumPoint& k, int axis) { return copy.derivative(k, axis); };
    return HamiltonianFamily(name_, d_, k_, std::move(eval), std::move(deriv));
}

// --- JSON ingestion ----------------------------------------------------------

using nlohmann::json;

namespace {

json unitary_to_json(const CMatrix& u) {
    json rows = json::array();
    for (int i = 0; i < u.rows(); ++i) {
        json row = json::array();
        for (int j = 0; j < u.cols(); ++j) row.push_back({u(i, j).real(), u(i, j).imag()});
        rows.push_back(row);
    }
    return rows;
}

CMatrix unitary_from_json(const json& j) {
    if (!j.is_array() || j.empty()) throw ModelError("model file: 'u' must be a matrix");
    const int n = static_cast<int>(j.size());
    CMatrix u(n, n);
    for (int i = 0; i < n; ++i) {
        if (!j[i].is_array() || static_cast<int>(j[i].size()) != n)
            throw ModelError("model file: 'u' must be square");
        for (int c = 0; c < n; ++c) {
            const auto& e = j[i][c];
            if (!e.is_array() || e.size() != 2)
                throw ModelError("model file: 'u' entries must be [re, im] pairs");
            u(i, c) = cplx(e[0].get<double>(), e[1].get<double>());
        }
    }
    return u;
}

} // namespace

std::string BlochTermModel::to_json_string(int indent) const {
    json doc;
    doc["name"] = name_;
    doc["d"] = d_;
    doc["k"] = k_;
    json jt = json::array();
    for (const auto& t : terms_) {
        json e;
        e["i"] = t.row;
        e["j"] = t.col;
        e["re"] = t.coeff.real();
        e["im"] = t.coeff.imag();
        e["n"] = t.phase;
        jt.push_back(e);
    }
    doc["terms"] = jt;
    json js = json::array();
    for (const auto& s : declared_) {
        if (s.kind == SymmetryDeclaration::Kind::TimeReversal) {
            js.push_back({{"kind", "TRS"}});
        } else {
            json e;
            e["kind"] = "shifted-negation";
            e["shift"] = s.shift;
            e["u"] = unitary_to_json(s.unitary);
            js.push_back(e);
        }
    }
    doc["symmetries"] = js;
    return doc.dump(indent);
}

BlochTermModel BlochTermModel::parse_json(const std::string& text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::exception& e) {
        throw ModelError(std::string("model file: invalid JSON: ") + e.what());
    }
    if (!doc.contains("d") || !doc.contains("k") || !doc.contains("terms"))
        throw ModelError("model file: required fields are 'd', 'k', 'terms'");
    const int d = doc["d"].get<int>();
    const int k = doc["k"].get<int>();
    std::vector<BlochTerm> terms;
    for (const auto& e : doc["terms"]) {
        BlochTerm t;
        if (!e.contains("i") || !e.contains("j") || !e.contains("n"))
            throw ModelError("model file: each term needs 'i', 'j', 'n'");
        t.row = e["i"].get<int>();
        t.col = e["j"].get<int>();
        t.coeff = cplx(e.value("re", 0.0), e.value("im", 0.0));
        t.phase = e["n"].get<std::vector<int>>();
        terms.push_back(std::move(t));
    }
    auto model = from_terms(doc.value("name", std::string("model")), d, k, std::move(terms));
    if (doc.contains("symmetries")) {
        for (const auto& e : doc["symmetries"]) {
            const std::string kind = e.value("kind", "");
            if (kind == "TRS" || kind == "trs" || kind == "time-reversal") {
                model.add_declared_symmetry(SymmetryDeclaration::time_reversal());
            } else if (kind == "shifted-negation" || kind == "shifted_negation") {
                if (!e.contains("shift"))
                    throw ModelError("model file: shifted-negation needs 'shift'");
                auto shift = e["shift"].get<std::vector<double>>();
                CMatrix u;
                if (e.contains("u_diag")) {
                    const auto diag = e["u_diag"].get<std::vector<double>>();
                    u = CMatrix(static_cast<int>(diag.size()), static_cast<int>(diag.size()));
                    for (std::size_t i = 0; i < diag.size(); ++i)
                        u(static_cast<int>(i), static_cast<int>(i)) = diag[i];
                } else if (e.contains("u")) {
                    u = unitary_from_json(e["u"]);
                } else {
                    throw ModelError("model file: shifted-negation needs 'u' or 'u_diag'");
                }
                model.add_declared_symmetry(
                    SymmetryDeclaration::shifted_negation(std::move(shift), std::move(u)));
            } else {
                throw ModelError("model file: unknown symmetry kind '" + kind + "'");
            }
        }
    }
    return model;
}

HamiltonianFamily parse_model_json(const std::string& text) {
    const auto model = BlochTermModel::parse_json(text);
    auto fam = model.to_family();
    for (const auto& decl : model.declared_symmetries()) fam.declare_symmetry(decl);
    return fam;
}

HamiltonianFamily parse_model_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ModelError("model file: cannot open '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_model_json(buf.str());
}

} // namespace bandtop
