#include "bandtop/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

namespace bandtop {

CMatrix CMatrix::identity(int n) {
    CMatrix m(n, n);
    for (int i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
}

CMatrix CMatrix::adjoint() const {
    CMatrix r(cols_, rows_);
    for (int i = 0; i < rows_; ++i)
        for (int j = 0; j < cols_; ++j) r(j, i) = std::conj((*this)(i, j));
    return r;
}

CMatrix CMatrix::operator*(const CMatrix& rhs) const {
    CMatrix r(rows_, rhs.cols_);
    for (int i = 0; i < rows_; ++i) {
        for (int l = 0; l < cols_; ++l) {
            const cplx ail = (*this)(i, l);
            if (ail == 0.0) continue;
            for (int j = 0; j < rhs.cols_; ++j) r(i, j) += ail * rhs(l, j);
        }
    }
    return r;
}

CMatrix CMatrix::operator+(const CMatrix& rhs) const {
    CMatrix r = *this;
    for (std::size_t i = 0; i < a_.size(); ++i) r.a_[i] += rhs.a_[i];
    return r;
}

CMatrix CMatrix::operator-(const CMatrix& rhs) const {
    CMatrix r = *this;
    for (std::size_t i = 0; i < a_.size(); ++i) r.a_[i] -= rhs.a_[i];
    return r;
}

CMatrix CMatrix::scaled(cplx factor) const {
    CMatrix r = *this;
    for (auto& x : r.a_) x *= factor;
    return r;
}

std::vector<cplx> CMatrix::column(int j) const {
    std::vector<cplx> v(rows_);
    for (int i = 0; i < rows_; ++i) v[i] = (*this)(i, j);
    return v;
}

void CMatrix::set_column(int j, std::span<const cplx> v) {
    for (int i = 0; i < rows_; ++i) (*this)(i, j) = v[i];
}

double CMatrix::norm_fro() const {
    double s = 0.0;
    for (const auto& x : a_) s += std::norm(x);
    return std::sqrt(s);
}

double CMatrix::max_abs() const {
    double s = 0.0;
    for (const auto& x : a_) s = std::max(s, std::abs(x));
    return s;
}

cplx CMatrix::trace() const {
    cplx s = 0.0;
    for (int i = 0; i < std::min(rows_, cols_); ++i) s += (*this)(i, i);
    return s;
}

HermitianMatrix::HermitianMatrix(int dim) : m_(dim, dim) {
    if (dim < 1) throw ModelError("HermitianMatrix: dimension must be >= 1");
}

HermitianMatrix HermitianMatrix::from_entries(int dim, std::vector<cplx> entries, double tol) {
    if (dim < 1) throw ModelError("HermitianMatrix: dimension must be >= 1");
    if (entries.size() != static_cast<std::size_t>(dim) * dim)
        throw ModelError("HermitianMatrix: entry count does not match dimension");
    CMatrix m(dim, dim);
    m.data() = std::move(entries);
    for (int i = 0; i < dim; ++i) {
        for (int j = i; j < dim; ++j) {
            if (std::abs(m(j, i) - std::conj(m(i, j))) > tol) {
                std::ostringstream os;
                os << "HermitianMatrix: entry (" << j << "," << i << ") is not the conjugate of ("
                   << i << "," << j << ") within " << tol;
                throw ModelError(os.str());
            }
        }
    }
    // symmetrize exactly so downstream code can rely on it to machine precision
    for (int i = 0; i < dim; ++i) {
        m(i, i) = cplx(m(i, i).real(), 0.0);
        for (int j = i + 1; j < dim; ++j) {
            const cplx v = 0.5 * (m(i, j) + std::conj(m(j, i)));
            m(i, j) = v;
            m(j, i) = std::conj(v);
        }
    }
    return HermitianMatrix(std::move(m));
}

HermitianMatrix HermitianMatrix::symmetrized(const CMatrix& a) {
    if (a.rows() != a.cols()) throw ModelError("HermitianMatrix: matrix is not square");
    CMatrix m(a.rows(), a.rows());
    for (int i = 0; i < a.rows(); ++i) {
        m(i, i) = cplx(a(i, i).real(), 0.0);
        for (int j = i + 1; j < a.cols(); ++j) {
            const cplx v = 0.5 * (a(i, j) + std::conj(a(j, i)));
            m(i, j) = v;
            m(j, i) = std::conj(v);
        }
    }
    return HermitianMatrix(std::move(m));
}

double HermitianMatrix::trace() const { return m_.trace().real(); }

HermitianMatrix HermitianMatrix::operator+(const HermitianMatrix& rhs) const {
    return HermitianMatrix(m_ + rhs.m_);
}

HermitianMatrix HermitianMatrix::operator-(const HermitianMatrix& rhs) const {
    return HermitianMatrix(m_ - rhs.m_);
}

HermitianMatrix HermitianMatrix::scaled(double factor) const {
    return HermitianMatrix(m_.scaled(factor));
}

HermitianMatrix HermitianMatrix::conjugated_by(const CMatrix& u) const {
    return symmetrized(u.adjoint() * m_ * u);
}

HermitianMatrix HermitianMatrix::conjugate() const {
    CMatrix m(dim(), dim());
    for (int i = 0; i < dim(); ++i)
        for (int j = 0; j < dim(); ++j) m(i, j) = std::conj(m_(i, j));
    return HermitianMatrix(std::move(m));
}

namespace {

double offdiag_norm(const CMatrix& a) {
    double s = 0.0;
    for (int i = 0; i < a.rows(); ++i)
        for (int j = 0; j < a.cols(); ++j)
            if (i != j) s += std::norm(a(i, j));
    return std::sqrt(s);
}

/// Applies the deterministic phase convention in place: first component
/// with |v_i| > 1e-9 * max|v| is made real positive.
void fix_phase(CMatrix& v, int col) {
    double mx = 0.0;
    for (int i = 0; i < v.rows(); ++i) mx = std::max(mx, std::abs(v(i, col)));
    if (mx == 0.0) return;
    for (int i = 0; i < v.rows(); ++i) {
        const double ab = std::abs(v(i, col));
        if (ab > 1e-9 * mx) {
            const cplx ph = std::conj(v(i, col)) / ab;
            for (int r = 0; r < v.rows(); ++r) v(r, col) *= ph;
            return;
        }
    }
}

} // namespace

EigenDecomposition eigh(const HermitianMatrix& h, const EighOptions& options) {
    const int n = h.dim();
    CMatrix a = h.matrix();
    CMatrix v = CMatrix::identity(n);

    const double scale = std::max(a.norm_fro(), 1e-300);
    const double stop = options.tol * scale;

    int sweep = 0;
    double off = offdiag_norm(a);
    while (off > stop) {
        if (++sweep > options.max_sweeps) {
            std::ostringstream os;
            os << "eigh: no convergence after " << options.max_sweeps
               << " sweeps; off-diagonal residual " << off / scale;
            throw NumericalError(os.str());
        }
        for (int p = 0; p < n - 1; ++p) {
            for (int q = p + 1; q < n; ++q) {
                const cplx hpq = a(p, q);
                const double r = std::abs(hpq);
                if (r <= 1e-300 * scale) {
                    a(p, q) = 0.0;
                    a(q, p) = 0.0;
                    continue;
                }
                const cplx phase = hpq / r;
                const double delta = a(p, p).real() - a(q, q).real();
                const double tau = delta / (2.0 * r);
                // smaller root of t^2 - 2 tau t - 1 = 0: keeps |rotation| <= pi/4
                const double t = (tau >= 0.0) ? -1.0 / (tau + std::sqrt(tau * tau + 1.0))
                                              : 1.0 / (-tau + std::sqrt(tau * tau + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const cplx s = (t * c) * phase;
                const cplx sc = std::conj(s);
                // A <- J^dagger A J with J = [[c, s], [-conj(s), c]] on (p, q)
                for (int i = 0; i < n; ++i) {
                    const cplx aip = a(i, p);
                    const cplx aiq = a(i, q);
                    a(i, p) = c * aip - sc * aiq;
                    a(i, q) = s * aip + c * aiq;
                }
                for (int j = 0; j < n; ++j) {
                    const cplx apj = a(p, j);
                    const cplx aqj = a(q, j);
                    a(p, j) = c * apj - s * aqj;
                    a(q, j) = sc * apj + c * aqj;
                }
                a(p, q) = 0.0;
                a(q, p) = 0.0;
                a(p, p) = cplx(a(p, p).real(), 0.0);
                a(q, q) = cplx(a(q, q).real(), 0.0);
                for (int i = 0; i < n; ++i) {
                    const cplx vip = v(i, p);
                    const cplx viq = v(i, q);
                    v(i, p) = c * vip - sc * viq;
                    v(i, q) = s * vip + c * viq;
                }
            }
        }
        off = offdiag_norm(a);
    }

    std::vector<int> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&a](int i, int j) { return a(i, i).real() < a(j, j).real(); });

    EigenDecomposition out;
    out.values.resize(n);
    out.vectors = CMatrix(n, n);
    for (int j = 0; j < n; ++j) {
        out.values[j] = a(order[j], order[j]).real();
        for (int i = 0; i < n; ++i) out.vectors(i, j) = v(i, order[j]);
        fix_phase(out.vectors, j);
    }
    return out;
}

cplx overlap(std::span<const cplx> u, std::span<const cplx> v) {
    if (u.size() != v.size()) throw ModelError("overlap: vector lengths differ");
    cplx s = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) s += std::conj(u[i]) * v[i];
    return s;
}

HermitianMatrix projector(const std::vector<std::vector<cplx>>& vectors, double ortho_tol) {
    if (vectors.empty()) throw ModelError("projector: no vectors given");
    const int k = static_cast<int>(vectors.front().size());
    for (std::size_t i = 0; i < vectors.size(); ++i) {
        if (static_cast<int>(vectors[i].size()) != k)
            throw ModelError("projector: vector lengths differ");
        for (std::size_t j = i; j < vectors.size(); ++j) {
            const cplx ov = overlap(vectors[i], vectors[j]);
            const cplx expect = (i == j) ? 1.0 : 0.0;
            if (std::abs(ov - expect) > ortho_tol) {
                std::ostringstream os;
                os << "projector: vectors " << i << " and " << j
                   << " are not orthonormal (|<v_i,v_j> - delta|=" << std::abs(ov - expect) << ")";
                throw ModelError(os.str());
            }
        }
    }
    CMatrix p(k, k);
    for (const auto& vec : vectors)
        for (int i = 0; i < k; ++i)
            for (int j = 0; j < k; ++j) p(i, j) += vec[i] * std::conj(vec[j]);
    return HermitianMatrix::symmetrized(p);
}

} // namespace bandtop
