#pragma once

#include <cstddef>
#include <initializer_list>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace contrex {

/// Raised when the Jacobi eigensolver hits its sweep cap.
class ConvergenceError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Dense real vector. All entries are finite.
class Vector {
public:
    Vector() = default;
    explicit Vector(std::size_t dim, double fill = 0.0);
    explicit Vector(std::vector<double> values);
    Vector(std::initializer_list<double> values);

    static Vector unit(std::size_t dim, std::size_t axis);

    std::size_t dim() const noexcept { return values_.size(); }
    bool empty() const noexcept { return values_.empty(); }

    double operator[](std::size_t i) const { return values_[i]; }
    double& operator[](std::size_t i) { return values_[i]; }

    std::span<const double> values() const noexcept { return values_; }
    std::span<double> values() noexcept { return values_; }
    const std::vector<double>& storage() const noexcept { return values_; }

    auto begin() const noexcept { return values_.begin(); }
    auto end() const noexcept { return values_.end(); }

    friend bool operator==(const Vector&, const Vector&) = default;

private:
    std::vector<double> values_;
};

double dot(const Vector& a, const Vector& b);
double norm(const Vector& v);
Vector operator+(const Vector& a, const Vector& b);
Vector operator-(const Vector& a, const Vector& b);
Vector operator*(double s, const Vector& v);
Vector normalized(const Vector& v);
/// Cosine similarity; zero vectors yield 0.
double cosine(const Vector& a, const Vector& b);
Vector mean_of(std::span<const Vector> vs);

/// Dense row-major matrix. All entries are finite.
class Matrix {
public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols, double fill = 0.0);
    Matrix(std::size_t rows, std::size_t cols, std::vector<double> row_major);

    static Matrix identity(std::size_t n);
    static Matrix diagonal(std::span<const double> diag);
    static Matrix from_rows(std::initializer_list<std::initializer_list<double>> rows);
    static Matrix from_columns(std::span<const Vector> columns);

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }

    double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }
    double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }

    std::span<const double> row(std::size_t r) const { return {data_.data() + r * cols_, cols_}; }
    Vector column(std::size_t c) const;

    std::span<const double> data() const noexcept { return data_; }
    const std::vector<double>& storage() const noexcept { return data_; }

    friend bool operator==(const Matrix&, const Matrix&) = default;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> data_;
};

Vector matvec(const Matrix& m, const Vector& v);
/// Mᵀ·v without forming the transpose.
Vector matvec_transposed(const Matrix& m, const Vector& v);
Matrix multiply(const Matrix& a, const Matrix& b);
Matrix transpose(const Matrix& m);
/// AᵀA, symmetric by construction.
Matrix gram(const Matrix& a);
Matrix scaled(const Matrix& m, double s);
Matrix subtract(const Matrix& a, const Matrix& b);
double frobenius_norm(const Matrix& m);
bool is_symmetric(const Matrix& m, double tolerance = 1e-9);

struct EigenDecomposition {
    Vector values;   ///< descending
    Matrix vectors;  ///< eigenvector i is column i
};

struct JacobiOptions {
    /// Off-diagonal Frobenius norm, relative to ‖m‖_F, at which sweeping stops.
    double tolerance = 1e-12;
    std::size_t max_sweeps = 100;
};

/// Cyclic Jacobi eigensolver for real symmetric matrices.
///
/// Eigenvalues are sorted descending (ties keep their diagonal order) and each
/// eigenvector is sign-canonicalized so that its first non-negligible
/// component is positive. Throws std::invalid_argument for non-square or
/// asymmetric input and ConvergenceError when `max_sweeps` is exhausted.
EigenDecomposition sym_eigen(const Matrix& m, const JacobiOptions& options = {});

/// Flips `v` so its first component with magnitude above 1e-12 is positive.
void canonicalize_sign(std::span<double> v);

std::string shape_string(std::size_t rows, std::size_t cols);

}  // namespace contrex
