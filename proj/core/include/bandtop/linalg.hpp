#pragma once

#include <complex>
#include <span>
#include <vector>

#include "bandtop/errors.hpp"

namespace bandtop {

using cplx = std::complex<double>;

/// Dense complex matrix, row-major. Small sizes only (k <= 16 by design).
class CMatrix {
public:
    CMatrix() = default;
    CMatrix(int rows, int cols) : rows_(rows), cols_(cols), a_(static_cast<std::size_t>(rows) * cols) {}

    static CMatrix identity(int n);

    int rows() const { return rows_; }
    int cols() const { return cols_; }

    cplx& operator()(int i, int j) { return a_[static_cast<std::size_t>(i) * cols_ + j]; }
    const cplx& operator()(int i, int j) const { return a_[static_cast<std::size_t>(i) * cols_ + j]; }

    std::vector<cplx>& data() { return a_; }
    const std::vector<cplx>& data() const { return a_; }

    CMatrix adjoint() const;
    CMatrix operator*(const CMatrix& rhs) const;
    CMatrix operator+(const CMatrix& rhs) const;
    CMatrix operator-(const CMatrix& rhs) const;
    CMatrix scaled(cplx factor) const;

    std::vector<cplx> column(int j) const;
    void set_column(int j, std::span<const cplx> v);

    double norm_fro() const;
    double max_abs() const;
    cplx trace() const;

private:
    int rows_ = 0;
    int cols_ = 0;
    std::vector<cplx> a_;
};

/// k x k Hermitian matrix. Hermiticity is checked at construction.
class HermitianMatrix {
public:
    /// Zero matrix of the given dimension.
    explicit HermitianMatrix(int dim);

    /// Validates entries[j*dim+i] == conj(entries[i*dim+j]) within tol.
    static HermitianMatrix from_entries(int dim, std::vector<cplx> entries, double tol = 1e-12);

    /// (A + A^dagger)/2 of an arbitrary square matrix; no validation.
    static HermitianMatrix symmetrized(const CMatrix& a);

    int dim() const { return m_.rows(); }
    const cplx& operator()(int i, int j) const { return m_(i, j); }
    const CMatrix& matrix() const { return m_; }

    double trace() const;
    double norm_fro() const { return m_.norm_fro(); }
    double max_abs() const { return m_.max_abs(); }

    HermitianMatrix operator+(const HermitianMatrix& rhs) const;
    HermitianMatrix operator-(const HermitianMatrix& rhs) const;
    HermitianMatrix scaled(double factor) const;

    /// U^dagger H U for unitary U (result re-symmetrized).
    HermitianMatrix conjugated_by(const CMatrix& u) const;

    /// Entrywise complex conjugate (equals the transpose for Hermitian input).
    HermitianMatrix conjugate() const;

private:
    explicit HermitianMatrix(CMatrix m) : m_(std::move(m)) {}
    CMatrix m_;
};

/// Sorted eigensystem of a Hermitian matrix.
///
/// values are ascending; column i of vectors pairs with values[i]. The
/// basis is made deterministic by the phase convention: the first
/// component of each eigenvector above 1e-9 of the column max is real
/// and positive.
struct EigenDecomposition {
    std::vector<double> values;
    CMatrix vectors;

    std::vector<cplx> vector(int band) const { return vectors.column(band); }
};

struct EighOptions {
    double tol = 1e-14;  ///< off-diagonal Frobenius norm, relative to ||H||
    int max_sweeps = 64;
};

/// Cyclic Jacobi eigensolver for complex Hermitian matrices.
/// Deterministic given identical input bits. Throws NumericalError with the
/// residual if the sweep cap is reached.
EigenDecomposition eigh(const HermitianMatrix& h, const EighOptions& options = {});

/// <u, v> with conjugation on the first argument.
cplx overlap(std::span<const cplx> u, std::span<const cplx> v);

/// Orthogonal projector sum_i v_i v_i^dagger onto the span of an
/// orthonormal set. Throws ModelError if the input is not orthonormal
/// within ortho_tol.
HermitianMatrix projector(const std::vector<std::vector<cplx>>& vectors, double ortho_tol = 1e-10);

} // namespace bandtop
