#pragma once

#include <cstddef>
#include <functional>
#include <initializer_list>
#include <span>
#include <vector>

namespace uip {

// Row vectors are plain std::vector<double>; functions take spans.
using RowVec = std::vector<double>;

// Small dense row-major matrix. Dimensions are expected to stay <= 4.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}
  Matrix(std::initializer_list<std::initializer_list<double>> rows);

  static Matrix identity(std::size_t d);
  static Matrix diagonal(std::span<const double> diag);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }
  std::span<const double> data() const noexcept { return data_; }
  std::span<const double> row(std::size_t i) const {
    return std::span<const double>(data_).subspan(i * cols_, cols_);
  }

  // Largest absolute entry.
  double max_abs() const;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

Matrix operator*(const Matrix& a, const Matrix& b);
Matrix operator-(const Matrix& a, const Matrix& b);
Matrix operator+(const Matrix& a, const Matrix& b);
Matrix operator*(double s, const Matrix& a);
Matrix transpose(const Matrix& a);
double max_abs_diff(const Matrix& a, const Matrix& b);

// Symmetric positive definite matrix with its spectral decomposition
// M = Q diag(lambda) Q^T cached at construction. Immutable.
class SpdMatrix {
 public:
  std::size_t dim() const noexcept { return entries_.rows(); }
  const Matrix& entries() const noexcept { return entries_; }
  std::span<const double> eigenvalues() const noexcept { return eig_values_; }
  // Columns are the eigenvectors.
  const Matrix& eigenvectors() const noexcept { return eig_vectors_; }
  double max_eigenvalue() const;
  double min_eigenvalue() const;

  // c * M for c > 0, reusing the eigenvectors.
  SpdMatrix scaled(double c) const;

 private:
  friend SpdMatrix make_spd(const Matrix& entries);
  friend SpdMatrix inverse(const SpdMatrix& m);
  SpdMatrix(Matrix entries, std::vector<double> values, Matrix vectors)
      : entries_(std::move(entries)), eig_values_(std::move(values)),
        eig_vectors_(std::move(vectors)) {}

  Matrix entries_;
  std::vector<double> eig_values_;
  Matrix eig_vectors_;
};

// Throws NotSymmetric (relative asymmetry > 1e-12) or NotPositiveDefinite.
SpdMatrix make_spd(const Matrix& entries);

// Cyclic Jacobi eigen-decomposition of a symmetric matrix. Eigenvalues are
// returned ascending with matching eigenvector columns.
void symmetric_eigen(const Matrix& a, std::vector<double>& values, Matrix& vectors);

// Q diag(fn(lambda_i)) Q^T. Throws NonFiniteResult if any fn(lambda_i) is
// not finite.
Matrix apply_scalar_function(const SpdMatrix& m, const std::function<double(double)>& fn);

// Q diag(values) Q^T with the eigenvectors of m.
Matrix from_spectrum(const SpdMatrix& m, std::span<const double> values);

// x -> kind(scale * x), the factors used by the dual kernels.
struct ScaledFunction {
  enum class Kind { Exp, Cosh, Sinh };
  Kind kind;
  double scale;
};

// Q diag(num(lambda_i) / den(lambda_i)) Q^T, evaluated in log-magnitude form
// so no intermediate overflows. Throws SingularDenominator if den vanishes.
Matrix ratio_function(const SpdMatrix& m, ScaledFunction num, ScaledFunction den);

// Scalar version of the ratio above; exposed for the kernel closed forms.
double stable_ratio(ScaledFunction num, ScaledFunction den, double x);

SpdMatrix inverse(const SpdMatrix& m);

// v M for a row vector v. Throws DimensionMismatch.
RowVec row_vec_mul(std::span<const double> v, const Matrix& m);
// v M v^T. Throws DimensionMismatch.
double quad_form(std::span<const double> v, const Matrix& m);

double dot(std::span<const double> a, std::span<const double> b);
double norm(std::span<const double> v);

}  // namespace uip
