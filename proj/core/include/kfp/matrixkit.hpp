#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace kfp {

/// Dense real matrix, row-major storage. Sized for the small systems this
/// project manipulates (condition matrices up to n(n+1), drift matrices 2n).
class Matrix {
public:
    Matrix() : rows_(0), cols_(0) {}
    Matrix(int rows, int cols, double fill = 0.0)
        : rows_(rows), cols_(cols), a_(static_cast<size_t>(rows) * cols, fill) {
        if (rows < 0 || cols < 0)
            throw std::invalid_argument("Matrix: negative dimension");
    }

    static Matrix identity(int n);

    int rows() const { return rows_; }
    int cols() const { return cols_; }

    double& operator()(int i, int j) { return a_[static_cast<size_t>(i) * cols_ + j]; }
    double operator()(int i, int j) const { return a_[static_cast<size_t>(i) * cols_ + j]; }

    const std::vector<double>& data() const { return a_; }
    std::vector<double>& data() { return a_; }

    bool is_square() const { return rows_ == cols_; }
    bool all_finite() const;

    Matrix transposed() const;
    double frobenius_norm() const;
    double max_abs() const;

    /// Copies block B into this matrix with upper-left corner (i0, j0).
    void set_block(int i0, int j0, const Matrix& B);

    Matrix& operator+=(const Matrix& o);
    Matrix& operator-=(const Matrix& o);
    Matrix& operator*=(double s);

private:
    int rows_, cols_;
    std::vector<double> a_;
};

Matrix operator+(Matrix a, const Matrix& b);
Matrix operator-(Matrix a, const Matrix& b);
Matrix operator*(const Matrix& a, const Matrix& b);
Matrix operator*(double s, Matrix a);

/// Real symmetric matrix; symmetrized on construction so entries(i,j) ==
/// entries(j,i) holds exactly.
class SymMatrix {
public:
    SymMatrix() = default;
    explicit SymMatrix(int dim) : m_(dim, dim) {}
    /// Builds from a general square matrix as (A + A^T)/2.
    explicit SymMatrix(const Matrix& a);

    static SymMatrix identity(int n) { return SymMatrix(Matrix::identity(n)); }

    int dim() const { return m_.rows(); }
    double operator()(int i, int j) const { return m_(i, j); }
    /// Sets entry (i,j) and its mirror (j,i).
    void set(int i, int j, double v) {
        m_(i, j) = v;
        m_(j, i) = v;
    }

    const Matrix& mat() const { return m_; }

private:
    Matrix m_;
};

SymMatrix operator+(const SymMatrix& a, const SymMatrix& b);
SymMatrix operator-(const SymMatrix& a, const SymMatrix& b);
SymMatrix operator*(double s, const SymMatrix& a);

/// Eigendecomposition of a symmetric matrix: ascending eigenvalues and the
/// matching orthonormal eigenvectors as columns.
struct Spectrum {
    std::vector<double> eigenvalues;
    Matrix eigenvectors;
};

/// Full spectrum by cyclic Jacobi rotations. Deterministic (fixed sweep
/// order, stable sort) and robust for clustered eigenvalues.
Spectrum sym_eig(const SymMatrix& A);

struct PsdResult {
    bool flag;
    double min_eig;
};

/// Positive-semi-definiteness test: flag = (min eigenvalue >= -tol).
PsdResult is_psd(const SymMatrix& A, double tol);

/// Scale-aware tolerance used by every certificate in the project:
/// 1e-10 * max(1, ||A||_F).
double psd_tol(const SymMatrix& A);

/// exp(t*A) by Pade approximation with scaling and squaring.
/// Relative accuracy ~1e-13 for ||tA|| up to a few hundred.
Matrix mat_exp(const Matrix& A, double t);

/// Largest singular value (matrix 2-norm).
double op_norm2(const Matrix& A);

/// Kronecker product of symmetric matrices (result is symmetric; PSD if both
/// factors are).
SymMatrix kron(const SymMatrix& A, const SymMatrix& B);

/// For symmetric positive definite A returns S with S*S = A^{-1}.
/// Rejects matrices with min eigenvalue <= 1e-12 * spectral radius.
SymMatrix spd_inv_sqrt(const SymMatrix& A);

/// Symmetric positive definite square root, same domain restriction.
SymMatrix spd_sqrt(const SymMatrix& A);

/// Solves A X = B by Gaussian elimination with partial pivoting.
Matrix solve_linear(Matrix A, Matrix B);

/// Groups ascending eigenvalues into clusters of relative width
/// tol * max(1, spectral radius); returns (representative, multiplicity).
std::vector<std::pair<double, int>>
cluster_eigenvalues(const std::vector<double>& ascending, double tol = 1e-8);

} // namespace kfp
