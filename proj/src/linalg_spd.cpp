#include "uip/linalg_spd.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "uip/errors.hpp"

namespace uip {

namespace {

constexpr double kSymmetryTol = 1e-12;
constexpr int kMaxSweeps = 100;

void require_square(const Matrix& m, const char* what) {
  if (m.rows() != m.cols() || m.rows() == 0) {
    throw Error(ErrorCode::DimensionMismatch, std::string(what) + " must be a non-empty square matrix");
  }
}

// log|fn(x)| and sign(fn(x)) for the hyperbolic family.
struct LogMagnitude {
  double log_abs;
  int sign;
};

LogMagnitude log_magnitude(ScaledFunction f, double x) {
  const double y = f.scale * x;
  const double ay = std::abs(y);
  switch (f.kind) {
    case ScaledFunction::Kind::Exp:
      return {y, 1};
    case ScaledFunction::Kind::Cosh:
      return {ay + std::log1p(std::exp(-2.0 * ay)) - std::log(2.0), 1};
    case ScaledFunction::Kind::Sinh:
      if (y == 0.0) return {-std::numeric_limits<double>::infinity(), 0};
      return {ay + std::log(-std::expm1(-2.0 * ay)) - std::log(2.0), y > 0 ? 1 : -1};
  }
  return {0.0, 0};
}

Matrix reassemble(const SpdMatrix& m, std::span<const double> diag) {
  const std::size_t d = m.dim();
  const Matrix& q = m.eigenvectors();
  Matrix out(d, d);
  for (std::size_t i = 0; i < d; ++i) {
    for (std::size_t j = i; j < d; ++j) {
      double s = 0.0;
      for (std::size_t k = 0; k < d; ++k) s += q(i, k) * diag[k] * q(j, k);
      out(i, j) = s;
      out(j, i) = s;
    }
  }
  return out;
}

}  // namespace

Matrix::Matrix(std::initializer_list<std::initializer_list<double>> rows)
    : rows_(rows.size()), cols_(rows.size() ? rows.begin()->size() : 0) {
  data_.reserve(rows_ * cols_);
  for (const auto& r : rows) {
    if (r.size() != cols_) throw Error(ErrorCode::DimensionMismatch, "ragged matrix literal");
    data_.insert(data_.end(), r.begin(), r.end());
  }
}

Matrix Matrix::identity(std::size_t d) {
  Matrix m(d, d);
  for (std::size_t i = 0; i < d; ++i) m(i, i) = 1.0;
  return m;
}

Matrix Matrix::diagonal(std::span<const double> diag) {
  Matrix m(diag.size(), diag.size());
  for (std::size_t i = 0; i < diag.size(); ++i) m(i, i) = diag[i];
  return m;
}

double Matrix::max_abs() const {
  double m = 0.0;
  for (double v : data_) m = std::max(m, std::abs(v));
  return m;
}

Matrix operator*(const Matrix& a, const Matrix& b) {
  if (a.cols() != b.rows()) throw Error(ErrorCode::DimensionMismatch, "matrix product");
  Matrix c(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t k = 0; k < a.cols(); ++k)
      for (std::size_t j = 0; j < b.cols(); ++j) c(i, j) += a(i, k) * b(k, j);
  return c;
}

Matrix operator-(const Matrix& a, const Matrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) throw Error(ErrorCode::DimensionMismatch, "matrix difference");
  Matrix c(a.rows(), a.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) c(i, j) = a(i, j) - b(i, j);
  return c;
}

Matrix operator+(const Matrix& a, const Matrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) throw Error(ErrorCode::DimensionMismatch, "matrix sum");
  Matrix c(a.rows(), a.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) c(i, j) = a(i, j) + b(i, j);
  return c;
}

Matrix operator*(double s, const Matrix& a) {
  Matrix c(a.rows(), a.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) c(i, j) = s * a(i, j);
  return c;
}

Matrix transpose(const Matrix& a) {
  Matrix t(a.cols(), a.rows());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) t(j, i) = a(i, j);
  return t;
}

double max_abs_diff(const Matrix& a, const Matrix& b) { return (a - b).max_abs(); }

Matrix from_spectrum(const SpdMatrix& m, std::span<const double> values) {
  if (values.size() != m.dim()) throw Error(ErrorCode::DimensionMismatch, "spectrum size");
  return reassemble(m, values);
}

double SpdMatrix::max_eigenvalue() const { return eig_values_.back(); }
double SpdMatrix::min_eigenvalue() const { return eig_values_.front(); }

SpdMatrix SpdMatrix::scaled(double c) const {
  if (!(c > 0.0)) throw Error(ErrorCode::InvalidParameter, "SPD scale factor must be positive");
  std::vector<double> values = eig_values_;
  for (double& v : values) v *= c;
  return SpdMatrix(c * entries_, std::move(values), eig_vectors_);
}

void symmetric_eigen(const Matrix& a_in, std::vector<double>& values, Matrix& vectors) {
  require_square(a_in, "eigen input");
  const std::size_t n = a_in.rows();
  Matrix a = a_in;
  Matrix v = Matrix::identity(n);

  for (int sweep = 0; sweep < kMaxSweeps; ++sweep) {
    double off = 0.0;
    for (std::size_t p = 0; p < n; ++p)
      for (std::size_t q = p + 1; q < n; ++q) off += a(p, q) * a(p, q);
    if (off == 0.0 || std::sqrt(off) <= 1e-300) break;
    double diag_scale = 0.0;
    for (std::size_t p = 0; p < n; ++p) diag_scale += a(p, p) * a(p, p);
    if (std::sqrt(off) <= std::numeric_limits<double>::epsilon() * 1e-3 * std::sqrt(diag_scale)) break;

    for (std::size_t p = 0; p < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const double apq = a(p, q);
        if (apq == 0.0) continue;
        const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
        const double t = (theta >= 0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        for (std::size_t k = 0; k < n; ++k) {
          const double akp = a(k, p);
          const double akq = a(k, q);
          a(k, p) = c * akp - s * akq;
          a(k, q) = s * akp + c * akq;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const double apk = a(p, k);
          const double aqk = a(q, k);
          a(p, k) = c * apk - s * aqk;
          a(q, k) = s * apk + c * aqk;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const double vkp = v(k, p);
          const double vkq = v(k, q);
          v(k, p) = c * vkp - s * vkq;
          v(k, q) = s * vkp + c * vkq;
        }
      }
    }
  }

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) { return a(i, i) < a(j, j); });
  values.resize(n);
  vectors = Matrix(n, n);
  for (std::size_t k = 0; k < n; ++k) {
    values[k] = a(order[k], order[k]);
    for (std::size_t i = 0; i < n; ++i) vectors(i, k) = v(i, order[k]);
  }
}

SpdMatrix make_spd(const Matrix& entries) {
  require_square(entries, "SPD input");
  const std::size_t d = entries.rows();
  const double scale = std::max(entries.max_abs(), std::numeric_limits<double>::min());
  Matrix sym(d, d);
  for (std::size_t i = 0; i < d; ++i) {
    for (std::size_t j = 0; j < d; ++j) {
      if (!std::isfinite(entries(i, j))) throw Error(ErrorCode::NonFiniteResult, "matrix entry is not finite");
      if (std::abs(entries(i, j) - entries(j, i)) > kSymmetryTol * scale) {
        throw Error(ErrorCode::NotSymmetric,
                    "entries (" + std::to_string(i) + "," + std::to_string(j) + ") and transpose differ");
      }
      sym(i, j) = 0.5 * (entries(i, j) + entries(j, i));
    }
  }
  std::vector<double> values;
  Matrix vectors;
  symmetric_eigen(sym, values, vectors);
  if (!(values.front() > 0.0)) {
    throw Error(ErrorCode::NotPositiveDefinite, "minimum eigenvalue " + std::to_string(values.front()));
  }
  return SpdMatrix(std::move(sym), std::move(values), std::move(vectors));
}

Matrix apply_scalar_function(const SpdMatrix& m, const std::function<double(double)>& fn) {
  std::vector<double> diag(m.dim());
  for (std::size_t i = 0; i < m.dim(); ++i) {
    diag[i] = fn(m.eigenvalues()[i]);
    if (!std::isfinite(diag[i])) {
      throw Error(ErrorCode::NonFiniteResult,
                  "scalar function overflows at eigenvalue " + std::to_string(m.eigenvalues()[i]));
    }
  }
  return reassemble(m, diag);
}

double stable_ratio(ScaledFunction num, ScaledFunction den, double x) {
  const LogMagnitude n = log_magnitude(num, x);
  const LogMagnitude d = log_magnitude(den, x);
  if (d.sign == 0) throw Error(ErrorCode::SingularDenominator, "denominator vanishes");
  if (n.sign == 0) return 0.0;
  if (n.log_abs == d.log_abs) return static_cast<double>(n.sign * d.sign);
  return static_cast<double>(n.sign * d.sign) * std::exp(n.log_abs - d.log_abs);
}

Matrix ratio_function(const SpdMatrix& m, ScaledFunction num, ScaledFunction den) {
  std::vector<double> diag(m.dim());
  for (std::size_t i = 0; i < m.dim(); ++i) {
    diag[i] = stable_ratio(num, den, m.eigenvalues()[i]);
    if (!std::isfinite(diag[i])) throw Error(ErrorCode::NonFiniteResult, "ratio overflows");
  }
  return reassemble(m, diag);
}

SpdMatrix inverse(const SpdMatrix& m) {
  const std::size_t d = m.dim();
  std::vector<double> inv_values(d);
  for (std::size_t i = 0; i < d; ++i) inv_values[i] = 1.0 / m.eigenvalues()[d - 1 - i];
  Matrix vectors(d, d);
  for (std::size_t k = 0; k < d; ++k)
    for (std::size_t i = 0; i < d; ++i) vectors(i, k) = m.eigenvectors()(i, d - 1 - k);
  std::vector<double> diag(m.eigenvalues().begin(), m.eigenvalues().end());
  for (double& v : diag) v = 1.0 / v;
  Matrix entries = reassemble(m, diag);
  return SpdMatrix(std::move(entries), std::move(inv_values), std::move(vectors));
}

RowVec row_vec_mul(std::span<const double> v, const Matrix& m) {
  if (v.size() != m.rows()) throw Error(ErrorCode::DimensionMismatch, "row vector times matrix");
  RowVec out(m.cols(), 0.0);
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j) out[j] += v[i] * m(i, j);
  return out;
}

double quad_form(std::span<const double> v, const Matrix& m) {
  if (v.size() != m.rows() || m.rows() != m.cols()) throw Error(ErrorCode::DimensionMismatch, "quadratic form");
  double s = 0.0;
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j) s += v[i] * m(i, j) * v[j];
  return s;
}

double dot(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw Error(ErrorCode::DimensionMismatch, "dot product");
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double norm(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

}  // namespace uip
