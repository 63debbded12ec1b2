#include "contrex/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <fmt/format.h>

namespace contrex {
namespace {

void require_finite(std::span<const double> values, const char* what) {
    for (double v : values) {
        if (!std::isfinite(v)) {
            throw std::invalid_argument(fmt::format("{} contains a non-finite entry", what));
        }
    }
}

void require_same_dim(const Vector& a, const Vector& b, const char* op) {
    if (a.dim() != b.dim()) {
        throw std::invalid_argument(
            fmt::format("{}: dimension mismatch ({} vs {})", op, a.dim(), b.dim()));
    }
}

}  // namespace

std::string shape_string(std::size_t rows, std::size_t cols) {
    return fmt::format("{}x{}", rows, cols);
}

// ---------------------------------------------------------------------------
// Vector

Vector::Vector(std::size_t dim, double fill) : values_(dim, fill) {
    require_finite(values_, "vector");
}

Vector::Vector(std::vector<double> values) : values_(std::move(values)) {
    require_finite(values_, "vector");
}

Vector::Vector(std::initializer_list<double> values) : values_(values) {
    require_finite(values_, "vector");
}

Vector Vector::unit(std::size_t dim, std::size_t axis) {
    if (axis >= dim) {
        throw std::invalid_argument(fmt::format("unit vector axis {} out of range for dim {}", axis, dim));
    }
    Vector v(dim);
    v[axis] = 1.0;
    return v;
}

double dot(const Vector& a, const Vector& b) {
    require_same_dim(a, b, "dot");
    return std::inner_product(a.begin(), a.end(), b.begin(), 0.0);
}

double norm(const Vector& v) { return std::sqrt(dot(v, v)); }

Vector operator+(const Vector& a, const Vector& b) {
    require_same_dim(a, b, "add");
    std::vector<double> out(a.dim());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = a[i] + b[i];
    return Vector(std::move(out));
}

Vector operator-(const Vector& a, const Vector& b) {
    require_same_dim(a, b, "subtract");
    std::vector<double> out(a.dim());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = a[i] - b[i];
    return Vector(std::move(out));
}

Vector operator*(double s, const Vector& v) {
    std::vector<double> out(v.dim());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = s * v[i];
    return Vector(std::move(out));
}

Vector normalized(const Vector& v) {
    const double n = norm(v);
    if (n == 0.0) throw std::invalid_argument("cannot normalize a zero vector");
    return (1.0 / n) * v;
}

double cosine(const Vector& a, const Vector& b) {
    const double na = norm(a);
    const double nb = norm(b);
    if (na == 0.0 || nb == 0.0) return 0.0;
    return dot(a, b) / (na * nb);
}

Vector mean_of(std::span<const Vector> vs) {
    if (vs.empty()) throw std::invalid_argument("mean of an empty vector set");
    std::vector<double> acc(vs.front().dim(), 0.0);
    for (const auto& v : vs) {
        require_same_dim(v, vs.front(), "mean");
        for (std::size_t i = 0; i < acc.size(); ++i) acc[i] += v[i];
    }
    const double inv = 1.0 / static_cast<double>(vs.size());
    for (double& x : acc) x *= inv;
    return Vector(std::move(acc));
}

// ---------------------------------------------------------------------------
// Matrix

Matrix::Matrix(std::size_t rows, std::size_t cols, double fill)
    : rows_(rows), cols_(cols), data_(rows * cols, fill) {
    require_finite(data_, "matrix");
}

Matrix::Matrix(std::size_t rows, std::size_t cols, std::vector<double> row_major)
    : rows_(rows), cols_(cols), data_(std::move(row_major)) {
    if (data_.size() != rows * cols) {
        throw std::invalid_argument(fmt::format("matrix {} needs {} entries, got {}",
                                                shape_string(rows, cols), rows * cols, data_.size()));
    }
    require_finite(data_, "matrix");
}

Matrix Matrix::identity(std::size_t n) {
    Matrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
}

Matrix Matrix::diagonal(std::span<const double> diag) {
    Matrix m(diag.size(), diag.size());
    for (std::size_t i = 0; i < diag.size(); ++i) m(i, i) = diag[i];
    require_finite(m.data_, "matrix");
    return m;
}

Matrix Matrix::from_rows(std::initializer_list<std::initializer_list<double>> rows) {
    const std::size_t r = rows.size();
    const std::size_t c = r == 0 ? 0 : rows.begin()->size();
    std::vector<double> data;
    data.reserve(r * c);
    for (const auto& row : rows) {
        if (row.size() != c) throw std::invalid_argument("ragged matrix rows");
        data.insert(data.end(), row.begin(), row.end());
    }
    return Matrix(r, c, std::move(data));
}

Matrix Matrix::from_columns(std::span<const Vector> columns) {
    if (columns.empty()) return {};
    const std::size_t r = columns.front().dim();
    Matrix m(r, columns.size());
    for (std::size_t c = 0; c < columns.size(); ++c) {
        if (columns[c].dim() != r) throw std::invalid_argument("columns differ in length");
        for (std::size_t i = 0; i < r; ++i) m(i, c) = columns[c][i];
    }
    return m;
}

Vector Matrix::column(std::size_t c) const {
    std::vector<double> out(rows_);
    for (std::size_t r = 0; r < rows_; ++r) out[r] = (*this)(r, c);
    return Vector(std::move(out));
}

Vector matvec(const Matrix& m, const Vector& v) {
    if (m.cols() != v.dim()) {
        throw std::invalid_argument(fmt::format("matvec: matrix is {} but vector has dim {}",
                                                shape_string(m.rows(), m.cols()), v.dim()));
    }
    std::vector<double> out(m.rows());
    for (std::size_t r = 0; r < m.rows(); ++r) {
        const auto row = m.row(r);
        out[r] = std::inner_product(row.begin(), row.end(), v.begin(), 0.0);
    }
    return Vector(std::move(out));
}

Vector matvec_transposed(const Matrix& m, const Vector& v) {
    if (m.rows() != v.dim()) {
        throw std::invalid_argument(fmt::format("matvec_transposed: matrix is {} but vector has dim {}",
                                                shape_string(m.rows(), m.cols()), v.dim()));
    }
    std::vector<double> out(m.cols(), 0.0);
    for (std::size_t r = 0; r < m.rows(); ++r) {
        const auto row = m.row(r);
        for (std::size_t c = 0; c < m.cols(); ++c) out[c] += row[c] * v[r];
    }
    return Vector(std::move(out));
}

Matrix multiply(const Matrix& a, const Matrix& b) {
    if (a.cols() != b.rows()) {
        throw std::invalid_argument(fmt::format("multiply: {} times {}", shape_string(a.rows(), a.cols()),
                                                shape_string(b.rows(), b.cols())));
    }
    Matrix out(a.rows(), b.cols());
    for (std::size_t i = 0; i < a.rows(); ++i) {
        for (std::size_t k = 0; k < a.cols(); ++k) {
            const double aik = a(i, k);
            for (std::size_t j = 0; j < b.cols(); ++j) out(i, j) += aik * b(k, j);
        }
    }
    return out;
}

Matrix transpose(const Matrix& m) {
    Matrix out(m.cols(), m.rows());
    for (std::size_t r = 0; r < m.rows(); ++r)
        for (std::size_t c = 0; c < m.cols(); ++c) out(c, r) = m(r, c);
    return out;
}

Matrix gram(const Matrix& a) {
    const std::size_t n = a.cols();
    Matrix g(n, n);
    for (std::size_t r = 0; r < a.rows(); ++r) {
        const auto row = a.row(r);
        for (std::size_t i = 0; i < n; ++i) {
            if (row[i] == 0.0) continue;
            for (std::size_t j = i; j < n; ++j) g(i, j) += row[i] * row[j];
        }
    }
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < i; ++j) g(i, j) = g(j, i);
    return g;
}

Matrix scaled(const Matrix& m, double s) {
    std::vector<double> data(m.storage());
    for (double& x : data) x *= s;
    return Matrix(m.rows(), m.cols(), std::move(data));
}

Matrix subtract(const Matrix& a, const Matrix& b) {
    if (a.rows() != b.rows() || a.cols() != b.cols()) {
        throw std::invalid_argument(fmt::format("subtract: {} vs {}", shape_string(a.rows(), a.cols()),
                                                shape_string(b.rows(), b.cols())));
    }
    std::vector<double> data(a.storage());
    for (std::size_t i = 0; i < data.size(); ++i) data[i] -= b.data()[i];
    return Matrix(a.rows(), a.cols(), std::move(data));
}

double frobenius_norm(const Matrix& m) {
    double acc = 0.0;
    for (double x : m.data()) acc += x * x;
    return std::sqrt(acc);
}

bool is_symmetric(const Matrix& m, double tolerance) {
    if (m.rows() != m.cols()) return false;
    for (std::size_t i = 0; i < m.rows(); ++i)
        for (std::size_t j = i + 1; j < m.cols(); ++j)
            if (std::abs(m(i, j) - m(j, i)) > tolerance) return false;
    return true;
}

// ---------------------------------------------------------------------------
// Jacobi eigensolver

void canonicalize_sign(std::span<double> v) {
    for (double x : v) {
        if (std::abs(x) > 1e-12) {
            if (x < 0.0) {
                for (double& y : v) y = -y;
            }
            return;
        }
    }
}

namespace {

double off_diagonal_norm(const std::vector<double>& a, std::size_t n) {
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            if (i != j) acc += a[i * n + j] * a[i * n + j];
    return std::sqrt(acc);
}

// Applies the rotation that annihilates a(p,q), updating a and the
// accumulated eigenvector matrix v (both row-major n×n).
void rotate(std::vector<double>& a, std::vector<double>& v, std::size_t n, std::size_t p, std::size_t q) {
    const double apq = a[p * n + q];
    const double app = a[p * n + p];
    const double aqq = a[q * n + q];
    const double theta = (aqq - app) / (2.0 * apq);
    const double t = (theta >= 0.0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
    const double c = 1.0 / std::sqrt(t * t + 1.0);
    const double s = t * c;

    for (std::size_t k = 0; k < n; ++k) {
        const double akp = a[k * n + p];
        const double akq = a[k * n + q];
        a[k * n + p] = c * akp - s * akq;
        a[k * n + q] = s * akp + c * akq;
    }
    for (std::size_t k = 0; k < n; ++k) {
        const double apk = a[p * n + k];
        const double aqk = a[q * n + k];
        a[p * n + k] = c * apk - s * aqk;
        a[q * n + k] = s * apk + c * aqk;
    }
    a[p * n + q] = 0.0;
    a[q * n + p] = 0.0;

    for (std::size_t k = 0; k < n; ++k) {
        const double vkp = v[k * n + p];
        const double vkq = v[k * n + q];
        v[k * n + p] = c * vkp - s * vkq;
        v[k * n + q] = s * vkp + c * vkq;
    }
}

}  // namespace

EigenDecomposition sym_eigen(const Matrix& m, const JacobiOptions& options) {
    if (m.rows() != m.cols()) {
        throw std::invalid_argument(
            fmt::format("sym_eigen: matrix must be square, got {}", shape_string(m.rows(), m.cols())));
    }
    if (!is_symmetric(m, 1e-9)) {
        throw std::invalid_argument("sym_eigen: matrix is not symmetric within 1e-9");
    }
    const std::size_t n = m.rows();
    std::vector<double> a(m.storage());
    std::vector<double> v(Matrix::identity(n).storage());

    const double threshold = options.tolerance * std::max(1.0, frobenius_norm(m));
    bool converged = off_diagonal_norm(a, n) <= threshold;
    for (std::size_t sweep = 0; sweep < options.max_sweeps && !converged; ++sweep) {
        for (std::size_t p = 0; p + 1 < n; ++p)
            for (std::size_t q = p + 1; q < n; ++q)
                if (a[p * n + q] != 0.0) rotate(a, v, n, p, q);
        converged = off_diagonal_norm(a, n) <= threshold;
    }
    if (!converged) {
        throw ConvergenceError(
            fmt::format("sym_eigen: no convergence within the cap of {} sweeps", options.max_sweeps));
    }

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t i, std::size_t j) { return a[i * n + i] > a[j * n + j]; });

    std::vector<double> values(n);
    Matrix vectors(n, n);
    std::vector<double> column(n);
    for (std::size_t out = 0; out < n; ++out) {
        const std::size_t src = order[out];
        values[out] = a[src * n + src];
        for (std::size_t k = 0; k < n; ++k) column[k] = v[k * n + src];
        canonicalize_sign(column);
        for (std::size_t k = 0; k < n; ++k) vectors(k, out) = column[k];
    }
    return {Vector(std::move(values)), std::move(vectors)};
}

}  // namespace contrex
