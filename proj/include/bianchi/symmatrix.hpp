#pragma once

#include <Eigen/Dense>

#include <initializer_list>
#include <span>
#include <string>
#include <vector>

namespace bianchi {

/// Symmetric n x n real matrix stored as its upper triangle, row-major:
/// (0,0) (0,1) ... (0,n-1) (1,1) ... (n-1,n-1).
///
/// The same type serves as a metric point q (when positive definite) and as
/// a tangent vector / quadratic form p. Off-diagonal entries exist once, so
/// the value is symmetric by construction.
class SymMatrix {
public:
  SymMatrix() = default;
  explicit SymMatrix(int n);

  static SymMatrix zero(int n) { return SymMatrix(n); }
  static SymMatrix identity(int n);
  static SymMatrix diagonal(std::span<const double> d);
  static SymMatrix diagonal(std::initializer_list<double> d);
  static SymMatrix from_upper(int n, std::span<const double> packed);
  /// Averages (i,j) and (j,i); use is_symmetric() first when asymmetry
  /// should be an error.
  static SymMatrix from_dense(const Eigen::MatrixXd& m);

  /// Number of packed entries for dimension n.
  static constexpr int packed_size(int n) { return n * (n + 1) / 2; }
  /// Dimension for a packed length, or -1 if the length is not triangular.
  static int dim_from_packed(int len);

  int dim() const { return n_; }
  double operator()(int i, int j) const { return v_[index(i, j)]; }
  void set(int i, int j, double value) { v_[index(i, j)] = value; }

  std::span<const double> packed() const { return v_; }
  Eigen::MatrixXd dense() const;
  Eigen::VectorXd packed_vector() const;

  bool is_diagonal(double tol = 0.0) const;
  double max_abs() const;
  double max_abs_offdiag() const;
  double trace() const;

  SymMatrix& operator+=(const SymMatrix& o);
  SymMatrix& operator-=(const SymMatrix& o);
  SymMatrix& operator*=(double s);

  friend SymMatrix operator+(SymMatrix a, const SymMatrix& b) { return a += b; }
  friend SymMatrix operator-(SymMatrix a, const SymMatrix& b) { return a -= b; }
  friend SymMatrix operator*(SymMatrix a, double s) { return a *= s; }
  friend SymMatrix operator*(double s, SymMatrix a) { return a *= s; }
  friend SymMatrix operator-(SymMatrix a) { return a *= -1.0; }
  friend bool operator==(const SymMatrix&, const SymMatrix&) = default;

  /// Label of packed slot k, e.g. "q01" for prefix "q".
  static std::vector<std::string> packed_labels(int n, const std::string& prefix);

private:
  int index(int i, int j) const;

  int n_ = 0;
  std::vector<double> v_;
};

bool is_symmetric(const Eigen::MatrixXd& m, double tol);
SymMatrix from_packed_vector(int n, const Eigen::VectorXd& v, int offset = 0);

/// Eigen-decomposition of a positive-definite matrix.
struct SpdEigen {
  Eigen::VectorXd values;   // ascending
  Eigen::MatrixXd vectors;  // orthonormal columns
};

/// Throws NotPositiveDefinite unless min eigenvalue > 1e-12 * max eigenvalue
/// (and the max eigenvalue is positive and finite).
SpdEigen spd_eigen(const SymMatrix& q);
void require_positive_definite(const SymMatrix& q, const char* what = "metric");
bool is_positive_definite(const SymMatrix& q);

/// f(q) = V diag(f(lambda)) V^T for a positive-definite q.
Eigen::MatrixXd spd_sqrt(const SymMatrix& q);
Eigen::MatrixXd spd_inv_sqrt(const SymMatrix& q);
Eigen::MatrixXd spd_log(const SymMatrix& q);
/// Exponential of any symmetric matrix.
Eigen::MatrixXd sym_exp(const Eigen::MatrixXd& a);

/// Basis F whose columns are q-orthonormal: F^T q F = I. Upper triangular
/// inverse of the Cholesky factor (q = L L^T, F = L^{-T}).
Eigen::MatrixXd orthonormal_frame(const SymMatrix& q);

}  // namespace bianchi
