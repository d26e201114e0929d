#include "kfp/matrixkit.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace kfp {

Matrix Matrix::identity(int n) {
    Matrix I(n, n);
    for (int i = 0; i < n; ++i)
        I(i, i) = 1.0;
    return I;
}

bool Matrix::all_finite() const {
    for (double v : a_)
        if (!std::isfinite(v))
            return false;
    return true;
}

Matrix Matrix::transposed() const {
    Matrix t(cols_, rows_);
    for (int i = 0; i < rows_; ++i)
        for (int j = 0; j < cols_; ++j)
            t(j, i) = (*this)(i, j);
    return t;
}

double Matrix::frobenius_norm() const {
    double s = 0.0;
    for (double v : a_)
        s += v * v;
    return std::sqrt(s);
}

double Matrix::max_abs() const {
    double m = 0.0;
    for (double v : a_)
        m = std::max(m, std::abs(v));
    return m;
}

void Matrix::set_block(int i0, int j0, const Matrix& B) {
    if (i0 + B.rows() > rows_ || j0 + B.cols() > cols_)
        throw std::invalid_argument("Matrix::set_block: block exceeds target");
    for (int i = 0; i < B.rows(); ++i)
        for (int j = 0; j < B.cols(); ++j)
            (*this)(i0 + i, j0 + j) = B(i, j);
}

Matrix& Matrix::operator+=(const Matrix& o) {
    if (rows_ != o.rows_ || cols_ != o.cols_)
        throw std::invalid_argument("Matrix: size mismatch in +=");
    for (size_t k = 0; k < a_.size(); ++k)
        a_[k] += o.a_[k];
    return *this;
}

Matrix& Matrix::operator-=(const Matrix& o) {
    if (rows_ != o.rows_ || cols_ != o.cols_)
        throw std::invalid_argument("Matrix: size mismatch in -=");
    for (size_t k = 0; k < a_.size(); ++k)
        a_[k] -= o.a_[k];
    return *this;
}

Matrix& Matrix::operator*=(double s) {
    for (double& v : a_)
        v *= s;
    return *this;
}

Matrix operator+(Matrix a, const Matrix& b) { return a += b; }
Matrix operator-(Matrix a, const Matrix& b) { return a -= b; }

Matrix operator*(const Matrix& a, const Matrix& b) {
    if (a.cols() != b.rows())
        throw std::invalid_argument("Matrix: size mismatch in *");
    Matrix c(a.rows(), b.cols());
    for (int i = 0; i < a.rows(); ++i)
        for (int k = 0; k < a.cols(); ++k) {
            const double aik = a(i, k);
            if (aik == 0.0)
                continue;
            for (int j = 0; j < b.cols(); ++j)
                c(i, j) += aik * b(k, j);
        }
    return c;
}

Matrix operator*(double s, Matrix a) { return a *= s; }

SymMatrix::SymMatrix(const Matrix& a) {
    if (!a.is_square())
        throw std::invalid_argument("SymMatrix: matrix not square");
    m_ = Matrix(a.rows(), a.cols());
    for (int i = 0; i < a.rows(); ++i)
        for (int j = 0; j < a.cols(); ++j)
            m_(i, j) = 0.5 * (a(i, j) + a(j, i));
}

SymMatrix operator+(const SymMatrix& a, const SymMatrix& b) {
    return SymMatrix(a.mat() + b.mat());
}
SymMatrix operator-(const SymMatrix& a, const SymMatrix& b) {
    return SymMatrix(a.mat() - b.mat());
}
SymMatrix operator*(double s, const SymMatrix& a) { return SymMatrix(s * a.mat()); }

namespace {

// One cyclic Jacobi sweep over the strict upper triangle of A, accumulating
// rotations into V. Returns the off-diagonal Frobenius norm afterwards.
double jacobi_sweep(Matrix& A, Matrix& V) {
    const int n = A.rows();
    for (int p = 0; p < n - 1; ++p) {
        for (int q = p + 1; q < n; ++q) {
            const double apq = A(p, q);
            if (apq == 0.0)
                continue;
            const double app = A(p, p), aqq = A(q, q);
            const double tau = (aqq - app) / (2.0 * apq);
            double t; // tan of the rotation angle, smaller root
            if (std::abs(tau) > 1e150) {
                t = 0.5 / tau;
            } else {
                t = (tau >= 0.0 ? 1.0 : -1.0) /
                    (std::abs(tau) + std::sqrt(1.0 + tau * tau));
            }
            const double c = 1.0 / std::sqrt(1.0 + t * t);
            const double s = t * c;

            for (int k = 0; k < n; ++k) {
                const double akp = A(k, p), akq = A(k, q);
                A(k, p) = c * akp - s * akq;
                A(k, q) = s * akp + c * akq;
            }
            for (int k = 0; k < n; ++k) {
                const double apk = A(p, k), aqk = A(q, k);
                A(p, k) = c * apk - s * aqk;
                A(q, k) = s * apk + c * aqk;
            }
            A(p, q) = 0.0;
            A(q, p) = 0.0;
            for (int k = 0; k < n; ++k) {
                const double vkp = V(k, p), vkq = V(k, q);
                V(k, p) = c * vkp - s * vkq;
                V(k, q) = s * vkp + c * vkq;
            }
        }
    }
    double off = 0.0;
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j)
            off += 2.0 * A(i, j) * A(i, j);
    return std::sqrt(off);
}

} // namespace

Spectrum sym_eig(const SymMatrix& S) {
    if (!S.mat().all_finite())
        throw std::invalid_argument("sym_eig: non-finite entry");
    const int n = S.dim();
    Matrix A = S.mat();
    Matrix V = Matrix::identity(n);

    const double scale = std::max(A.frobenius_norm(), 1e-300);
    for (int sweep = 0; sweep < 64; ++sweep) {
        if (jacobi_sweep(A, V) <= 1e-15 * scale * n)
            break;
    }

    std::vector<int> idx(n);
    std::iota(idx.begin(), idx.end(), 0);
    std::stable_sort(idx.begin(), idx.end(),
                     [&](int a, int b) { return A(a, a) < A(b, b); });

    Spectrum out;
    out.eigenvalues.resize(n);
    out.eigenvectors = Matrix(n, n);
    for (int j = 0; j < n; ++j) {
        out.eigenvalues[j] = A(idx[j], idx[j]);
        // Fix an overall sign so the decomposition is reproducible.
        int imax = 0;
        for (int i = 1; i < n; ++i)
            if (std::abs(V(i, idx[j])) > std::abs(V(imax, idx[j])))
                imax = i;
        const double sgn = V(imax, idx[j]) >= 0.0 ? 1.0 : -1.0;
        for (int i = 0; i < n; ++i)
            out.eigenvectors(i, j) = sgn * V(i, idx[j]);
    }
    return out;
}

PsdResult is_psd(const SymMatrix& A, double tol) {
    if (tol < 0.0)
        throw std::invalid_argument("is_psd: negative tolerance");
    const Spectrum s = sym_eig(A);
    const double mn = s.eigenvalues.empty() ? 0.0 : s.eigenvalues.front();
    return {mn >= -tol, mn};
}

double psd_tol(const SymMatrix& A) {
    return 1e-10 * std::max(1.0, A.mat().frobenius_norm());
}

namespace {

double norm_1(const Matrix& A) {
    double m = 0.0;
    for (int j = 0; j < A.cols(); ++j) {
        double s = 0.0;
        for (int i = 0; i < A.rows(); ++i)
            s += std::abs(A(i, j));
        m = std::max(m, s);
    }
    return m;
}

} // namespace

Matrix mat_exp(const Matrix& A, double t) {
    if (!A.is_square())
        throw std::invalid_argument("mat_exp: matrix not square");
    if (!A.all_finite() || !std::isfinite(t))
        throw std::invalid_argument("mat_exp: non-finite input");

    const int n = A.rows();
    Matrix B = A;
    B *= t;

    const double nb = norm_1(B);
    if (nb > 2e3)
        throw std::range_error("mat_exp: ||t*A|| too large (" + std::to_string(nb) + ")");

    // Pade order 13 with scaling chosen so the scaled norm is below theta_13.
    const double theta13 = 5.371920351148152;
    int squarings = 0;
    if (nb > theta13) {
        squarings = static_cast<int>(std::ceil(std::log2(nb / theta13)));
        B *= std::ldexp(1.0, -squarings);
    }

    static const double b[14] = {64764752532480000.0, 32382376266240000.0,
                                 7771770303897600.0,  1187353796428800.0,
                                 129060195264000.0,   10559470521600.0,
                                 670442572800.0,      33522128640.0,
                                 1323241920.0,        40840800.0,
                                 960960.0,            16380.0,
                                 182.0,               1.0};

    const Matrix I = Matrix::identity(n);
    const Matrix B2 = B * B;
    const Matrix B4 = B2 * B2;
    const Matrix B6 = B4 * B2;

    Matrix U = B * (B6 * (b[13] * B6 + b[11] * B4 + b[9] * B2) + b[7] * B6 +
                    b[5] * B4 + b[3] * B2 + b[1] * I);
    Matrix V = B6 * (b[12] * B6 + b[10] * B4 + b[8] * B2) + b[6] * B6 +
               b[4] * B4 + b[2] * B2 + b[0] * I;

    Matrix E = solve_linear(V - U, U + U);
    E += I; // (V-U)^{-1}(V+U) = I + (V-U)^{-1} 2U

    for (int k = 0; k < squarings; ++k)
        E = E * E;
    if (!E.all_finite())
        throw std::range_error("mat_exp: overflow in result");
    return E;
}

double op_norm2(const Matrix& A) {
    if (!A.all_finite())
        throw std::invalid_argument("op_norm2: non-finite entry");
    if (A.rows() == 0 || A.cols() == 0)
        return 0.0;
    const SymMatrix AtA(A.transposed() * A);
    const Spectrum s = sym_eig(AtA);
    return std::sqrt(std::max(0.0, s.eigenvalues.back()));
}

SymMatrix kron(const SymMatrix& A, const SymMatrix& B) {
    const int na = A.dim(), nb = B.dim();
    Matrix K(na * nb, na * nb);
    for (int i = 0; i < na; ++i)
        for (int j = 0; j < na; ++j) {
            const double aij = A(i, j);
            if (aij == 0.0)
                continue;
            for (int p = 0; p < nb; ++p)
                for (int q = 0; q < nb; ++q)
                    K(i * nb + p, j * nb + q) = aij * B(p, q);
        }
    return SymMatrix(K);
}

namespace {

SymMatrix spd_power(const SymMatrix& A, double expo, const char* who) {
    const Spectrum s = sym_eig(A);
    const int n = A.dim();
    double radius = 0.0;
    for (double ev : s.eigenvalues)
        radius = std::max(radius, std::abs(ev));
    if (s.eigenvalues.front() <= 1e-12 * radius || s.eigenvalues.front() <= 0.0)
        throw std::domain_error(std::string(who) + ": matrix not positive definite");
    Matrix R(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            double acc = 0.0;
            for (int k = 0; k < n; ++k)
                acc += s.eigenvectors(i, k) * std::pow(s.eigenvalues[k], expo) *
                       s.eigenvectors(j, k);
            R(i, j) = acc;
        }
    return SymMatrix(R);
}

} // namespace

SymMatrix spd_inv_sqrt(const SymMatrix& A) { return spd_power(A, -0.5, "spd_inv_sqrt"); }
SymMatrix spd_sqrt(const SymMatrix& A) { return spd_power(A, 0.5, "spd_sqrt"); }

Matrix solve_linear(Matrix A, Matrix B) {
    if (!A.is_square() || A.rows() != B.rows())
        throw std::invalid_argument("solve_linear: size mismatch");
    const int n = A.rows(), m = B.cols();
    for (int col = 0; col < n; ++col) {
        int piv = col;
        for (int i = col + 1; i < n; ++i)
            if (std::abs(A(i, col)) > std::abs(A(piv, col)))
                piv = i;
        if (A(piv, col) == 0.0)
            throw std::domain_error("solve_linear: singular matrix");
        if (piv != col) {
            for (int j = 0; j < n; ++j)
                std::swap(A(col, j), A(piv, j));
            for (int j = 0; j < m; ++j)
                std::swap(B(col, j), B(piv, j));
        }
        const double d = A(col, col);
        for (int i = col + 1; i < n; ++i) {
            const double f = A(i, col) / d;
            if (f == 0.0)
                continue;
            for (int j = col; j < n; ++j)
                A(i, j) -= f * A(col, j);
            for (int j = 0; j < m; ++j)
                B(i, j) -= f * B(col, j);
        }
    }
    for (int col = n - 1; col >= 0; --col) {
        for (int j = 0; j < m; ++j) {
            double acc = B(col, j);
            for (int k = col + 1; k < n; ++k)
                acc -= A(col, k) * B(k, j);
            B(col, j) = acc / A(col, col);
        }
    }
    return B;
}

std::vector<std::pair<double, int>>
cluster_eigenvalues(const std::vector<double>& ascending, double tol) {
    std::vector<std::pair<double, int>> out;
    if (ascending.empty())
        return out;
    double radius = 0.0;
    for (double v : ascending)
        radius = std::max(radius, std::abs(v));
    const double width = tol * std::max(1.0, radius);
    for (double v : ascending) {
        if (!out.empty() && std::abs(v - out.back().first) <= width)
            ++out.back().second;
        else
            out.emplace_back(v, 1);
    }
    return out;
}

} // namespace kfp
