#include "bianchi/symmatrix.hpp"

#include "bianchi/errors.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace bianchi {

SymMatrix::SymMatrix(int n) : n_(n), v_(packed_size(n), 0.0) {
  if (n < 1) throw DimensionError("SymMatrix: dimension must be >= 1");
}

SymMatrix SymMatrix::identity(int n) {
  SymMatrix m(n);
  for (int i = 0; i < n; ++i) m.set(i, i, 1.0);
  return m;
}

SymMatrix SymMatrix::diagonal(std::span<const double> d) {
  SymMatrix m(static_cast<int>(d.size()));
  for (int i = 0; i < m.n_; ++i) m.set(i, i, d[i]);
  return m;
}

SymMatrix SymMatrix::diagonal(std::initializer_list<double> d) {
  return diagonal(std::span<const double>(d.begin(), d.size()));
}

SymMatrix SymMatrix::from_upper(int n, std::span<const double> packed) {
  SymMatrix m(n);
  if (static_cast<int>(packed.size()) != packed_size(n))
    throw DimensionError("SymMatrix::from_upper: expected " + std::to_string(packed_size(n)) +
                         " entries, got " + std::to_string(packed.size()));
  std::copy(packed.begin(), packed.end(), m.v_.begin());
  return m;
}

SymMatrix SymMatrix::from_dense(const Eigen::MatrixXd& a) {
  if (a.rows() != a.cols()) throw DimensionError("SymMatrix::from_dense: matrix not square");
  SymMatrix m(static_cast<int>(a.rows()));
  for (int i = 0; i < m.n_; ++i)
    for (int j = i; j < m.n_; ++j) m.set(i, j, 0.5 * (a(i, j) + a(j, i)));
  return m;
}

int SymMatrix::dim_from_packed(int len) {
  for (int n = 1; packed_size(n) <= len; ++n)
    if (packed_size(n) == len) return n;
  return -1;
}

int SymMatrix::index(int i, int j) const {
  if (i > j) std::swap(i, j);
  // row i starts after rows 0..i-1, which hold n, n-1, ..., n-i+1 entries
  return i * n_ - i * (i - 1) / 2 + (j - i);
}

Eigen::MatrixXd SymMatrix::dense() const {
  Eigen::MatrixXd a(n_, n_);
  for (int i = 0; i < n_; ++i)
    for (int j = i; j < n_; ++j) a(i, j) = a(j, i) = (*this)(i, j);
  return a;
}

Eigen::VectorXd SymMatrix::packed_vector() const {
  return Eigen::Map<const Eigen::VectorXd>(v_.data(), static_cast<Eigen::Index>(v_.size()));
}

bool SymMatrix::is_diagonal(double tol) const { return max_abs_offdiag() <= tol; }

double SymMatrix::max_abs() const {
  double m = 0.0;
  for (double x : v_) m = std::max(m, std::abs(x));
  return m;
}

double SymMatrix::max_abs_offdiag() const {
  double m = 0.0;
  for (int i = 0; i < n_; ++i)
    for (int j = i + 1; j < n_; ++j) m = std::max(m, std::abs((*this)(i, j)));
  return m;
}

double SymMatrix::trace() const {
  double t = 0.0;
  for (int i = 0; i < n_; ++i) t += (*this)(i, i);
  return t;
}

SymMatrix& SymMatrix::operator+=(const SymMatrix& o) {
  if (o.n_ != n_) throw DimensionError("SymMatrix: dimension mismatch in +");
  for (std::size_t k = 0; k < v_.size(); ++k) v_[k] += o.v_[k];
  return *this;
}

SymMatrix& SymMatrix::operator-=(const SymMatrix& o) {
  if (o.n_ != n_) throw DimensionError("SymMatrix: dimension mismatch in -");
  for (std::size_t k = 0; k < v_.size(); ++k) v_[k] -= o.v_[k];
  return *this;
}

SymMatrix& SymMatrix::operator*=(double s) {
  for (double& x : v_) x *= s;
  return *this;
}

std::vector<std::string> SymMatrix::packed_labels(int n, const std::string& prefix) {
  std::vector<std::string> out;
  out.reserve(packed_size(n));
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j) out.push_back(prefix + std::to_string(i) + std::to_string(j));
  return out;
}

bool is_symmetric(const Eigen::MatrixXd& m, double tol) {
  if (m.rows() != m.cols()) return false;
  return (m - m.transpose()).cwiseAbs().maxCoeff() <= tol;
}

SymMatrix from_packed_vector(int n, const Eigen::VectorXd& v, int offset) {
  const int len = SymMatrix::packed_size(n);
  if (offset < 0 || offset + len > v.size())
    throw DimensionError("from_packed_vector: vector too short");
  return SymMatrix::from_upper(n, std::span<const double>(v.data() + offset, len));
}

SpdEigen spd_eigen(const SymMatrix& q) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(q.dense());
  if (es.info() != Eigen::Success) throw NotPositiveDefinite("eigen-decomposition failed");
  const Eigen::VectorXd& lam = es.eigenvalues();
  const double hi = lam.maxCoeff();
  const double lo = lam.minCoeff();
  if (!std::isfinite(hi) || !std::isfinite(lo) || hi <= 0.0 || lo <= 1e-12 * hi)
    throw NotPositiveDefinite("matrix is not positive definite (eigenvalues in [" +
                              std::to_string(lo) + ", " + std::to_string(hi) + "])");
  return {lam, es.eigenvectors()};
}

void require_positive_definite(const SymMatrix& q, const char* what) {
  try {
    (void)spd_eigen(q);
  } catch (const NotPositiveDefinite& e) {
    throw NotPositiveDefinite(std::string(what) + ": " + e.what());
  }
}

bool is_positive_definite(const SymMatrix& q) {
  try {
    (void)spd_eigen(q);
    return true;
  } catch (const NotPositiveDefinite&) {
    return false;
  }
}

namespace {
template <class F>
Eigen::MatrixXd spd_apply(const SymMatrix& q, F f) {
  const SpdEigen e = spd_eigen(q);
  const Eigen::VectorXd fl = e.values.unaryExpr(f);
  return e.vectors * fl.asDiagonal() * e.vectors.transpose();
}
}  // namespace

Eigen::MatrixXd spd_sqrt(const SymMatrix& q) {
  return spd_apply(q, [](double x) { return std::sqrt(x); });
}

Eigen::MatrixXd spd_inv_sqrt(const SymMatrix& q) {
  return spd_apply(q, [](double x) { return 1.0 / std::sqrt(x); });
}

Eigen::MatrixXd spd_log(const SymMatrix& q) {
  return spd_apply(q, [](double x) { return std::log(x); });
}

Eigen::MatrixXd sym_exp(const Eigen::MatrixXd& a) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (a + a.transpose()));
  const Eigen::VectorXd el = es.eigenvalues().array().exp().matrix();
  return es.eigenvectors() * el.asDiagonal() * es.eigenvectors().transpose();
}

Eigen::MatrixXd orthonormal_frame(const SymMatrix& q) {
  require_positive_definite(q);
  Eigen::LLT<Eigen::MatrixXd> llt(q.dense());
  if (llt.info() != Eigen::Success) throw NotPositiveDefinite("Cholesky factorization failed");
  const Eigen::MatrixXd l = llt.matrixL();
  const Eigen::Index n = l.rows();
  // F = L^{-T}: solve L^T F = I
  return l.transpose().triangularView<Eigen::Upper>().solve(Eigen::MatrixXd::Identity(n, n));
}

}  // namespace bianchi
