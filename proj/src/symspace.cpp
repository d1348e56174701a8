#include "bianchi/symspace.hpp"

#include "bianchi/errors.hpp"

#include <cmath>
#include <string>

namespace bianchi {

namespace {

void require_same_dim(const SymMatrix& a, const SymMatrix& b, const char* op) {
  if (a.dim() != b.dim())
    throw DimensionError(std::string(op) + ": dimension mismatch (" + std::to_string(a.dim()) +
                         " vs " + std::to_string(b.dim()) + ")");
}

Eigen::MatrixXd inverse_of(const SymMatrix& q) {
  require_positive_definite(q);
  return q.dense().llt().solve(Eigen::MatrixXd::Identity(q.dim(), q.dim()));
}

// Chart of packed entries: coordinate A <-> slot (i,j), i <= j.
struct Chart {
  int n;
  std::vector<Eigen::MatrixXd> basis;

  explicit Chart(int dim) : n(dim) {
    for (int i = 0; i < n; ++i)
      for (int j = i; j < n; ++j) {
        Eigen::MatrixXd e = Eigen::MatrixXd::Zero(n, n);
        e(i, j) = 1.0;
        e(j, i) = 1.0;
        basis.push_back(std::move(e));
      }
  }
  int size() const { return static_cast<int>(basis.size()); }

  Eigen::MatrixXd metric(const Eigen::MatrixXd& qi) const {
    const int m = size();
    Eigen::MatrixXd g(m, m);
    for (int a = 0; a < m; ++a)
      for (int b = a; b < m; ++b)
        g(a, b) = g(b, a) = (qi * basis[a] * qi * basis[b]).trace();
    return g;
  }

  // gamma[d](a, b) = Gamma^d_ab at q
  std::vector<Eigen::MatrixXd> christoffel(const Eigen::MatrixXd& q) const {
    const int m = size();
    const Eigen::MatrixXd qi = q.inverse();
    std::vector<Eigen::MatrixXd> pe(m);  // qi * E_A
    for (int a = 0; a < m; ++a) pe[a] = qi * basis[a];
    // dg[c](a, b) = d_c g_ab = -tr(qi Ec qi Ea qi Eb) - tr(qi Ea qi Ec qi Eb)
    std::vector<Eigen::MatrixXd> dg(m, Eigen::MatrixXd(m, m));
    for (int c = 0; c < m; ++c)
      for (int a = 0; a < m; ++a)
        for (int b = 0; b < m; ++b)
          dg[c](a, b) = -(pe[c] * pe[a] * pe[b]).trace() - (pe[a] * pe[c] * pe[b]).trace();
    const Eigen::MatrixXd ginv = metric(qi).inverse();
    std::vector<Eigen::MatrixXd> gamma(m, Eigen::MatrixXd::Zero(m, m));
    for (int d = 0; d < m; ++d)
      for (int a = 0; a < m; ++a)
        for (int b = 0; b < m; ++b) {
          double s = 0.0;
          for (int e = 0; e < m; ++e)
            s += ginv(d, e) * (dg[a](e, b) + dg[b](e, a) - dg[e](a, b));
          gamma[d](a, b) = 0.5 * s;
        }
    return gamma;
  }
};

}  // namespace

FlatCoords::FlatCoords(std::vector<double> values) : values_(std::move(values)) {
  if (values_.empty()) throw DimensionError("FlatCoords: empty");
  for (double v : values_)
    if (!(v > 0.0) || !std::isfinite(v))
      throw ValidationError("FlatCoords: coordinates must be positive and finite");
}

double inner(const SymMatrix& q, const SymMatrix& p1, const SymMatrix& p2) {
  require_same_dim(q, p1, "inner");
  require_same_dim(q, p2, "inner");
  const Eigen::MatrixXd qi = inverse_of(q);
  return (qi * p1.dense() * qi * p2.dense()).trace();
}

SymMatrix geodesic(const SymMatrix& q0, const SymMatrix& p0, double t) {
  require_same_dim(q0, p0, "geodesic");
  const Eigen::MatrixXd s = spd_sqrt(q0);
  const Eigen::MatrixXd si = spd_inv_sqrt(q0);
  const Eigen::MatrixXd a = si * p0.dense() * si;
  return SymMatrix::from_dense(s * sym_exp(t * a) * s);
}

std::pair<SymMatrix, SymMatrix> geodesic_rhs(const SymMatrix& q, const SymMatrix& p) {
  require_same_dim(q, p, "geodesic_rhs");
  const Eigen::MatrixXd pd = p.dense();
  const Eigen::MatrixXd qip = q.dense().llt().solve(pd);
  return {p, SymMatrix::from_dense(pd * qip)};
}

double distance(const SymMatrix& q0, const SymMatrix& q1) {
  require_same_dim(q0, q1, "distance");
  require_positive_definite(q1, "distance");
  const Eigen::MatrixXd si = spd_inv_sqrt(q0);
  // eigenvalues of q0^-1 q1 = eigenvalues of q0^-1/2 q1 q0^-1/2
  const SymMatrix m = SymMatrix::from_dense(si * q1.dense() * si);
  const SpdEigen e = spd_eigen(m);
  return e.values.array().log().matrix().norm();
}

SymMatrix invert_point(const SymMatrix& q) { return SymMatrix::from_dense(inverse_of(q)); }

SymMatrix invert_tangent(const SymMatrix& q, const SymMatrix& p) {
  require_same_dim(q, p, "invert_tangent");
  const Eigen::MatrixXd qi = inverse_of(q);
  return SymMatrix::from_dense(-(qi * p.dense() * qi));
}

std::pair<double, SymMatrix> split(const SymMatrix& q) {
  const SpdEigen e = spd_eigen(q);
  const double logdet = e.values.array().log().sum();
  const double scale = std::exp(-logdet / q.dim());
  return {logdet, q * scale};
}

SymMatrix flat_embed(const FlatCoords& coords) { return SymMatrix::diagonal(coords.values()); }

FlatCoords flat_log(const SymMatrix& q) {
  if (!q.is_diagonal()) throw ValidationError("flat_log: matrix is not diagonal");
  std::vector<double> d(q.dim());
  for (int i = 0; i < q.dim(); ++i) d[i] = q(i, i);
  return FlatCoords(std::move(d));
}

std::vector<double> flat_chart(const FlatCoords& coords) {
  std::vector<double> t;
  t.reserve(coords.dim());
  for (double x : coords.values()) t.push_back(std::log(x));
  return t;
}

double lagrangian(double alpha, double beta, const SymMatrix& q, const SymMatrix& p) {
  require_same_dim(q, p, "lagrangian");
  const Eigen::MatrixXd a = inverse_of(q) * p.dense();
  const double tr = a.trace();
  return alpha * tr * tr + beta * (a * a).trace();
}

double finsler(double alpha, double beta, const SymMatrix& q, const SymMatrix& p) {
  require_same_dim(q, p, "finsler");
  const Eigen::MatrixXd a = inverse_of(q) * p.dense();
  return alpha * a.trace() + beta * std::sqrt(std::max(0.0, (a * a).trace()));
}

SymMatrix congruence(const Eigen::MatrixXd& g, const SymMatrix& q) {
  if (g.rows() != q.dim() || g.cols() != q.dim())
    throw DimensionError("congruence: matrix size mismatch");
  return SymMatrix::from_dense(g * q.dense() * g.transpose());
}

double symspace_sectional(const SymMatrix& q, const SymMatrix& p1, const SymMatrix& p2) {
  require_same_dim(q, p1, "symspace_sectional");
  require_same_dim(q, p2, "symspace_sectional");
  // move to the identity by the isometry q -> s q s, s = q^-1/2, so the
  // difference step is not at the mercy of the conditioning of q
  const Eigen::MatrixXd s = spd_inv_sqrt(q);
  const int n = q.dim();
  const Chart chart(n);
  const int m = chart.size();
  const Eigen::MatrixXd qd = Eigen::MatrixXd::Identity(n, n);
  const Eigen::MatrixXd g = chart.metric(qd);
  const Eigen::VectorXd x = SymMatrix::from_dense(s * p1.dense() * s).packed_vector();
  const Eigen::VectorXd y = SymMatrix::from_dense(s * p2.dense() * s).packed_vector();

  const double xx = x.dot(g * x), yy = y.dot(g * y), xy = x.dot(g * y);
  const double gram = xx * yy - xy * xy;
  if (!(gram > 1e-12 * xx * yy)) throw ValidationError("symspace_sectional: degenerate plane");

  const double h = 1e-4;
  const auto gamma = chart.christoffel(qd);
  // dgamma[a][d](b, c) = d_a Gamma^d_bc
  std::vector<std::vector<Eigen::MatrixXd>> dgamma(m);
  for (int a = 0; a < m; ++a) {
    // packed coordinate a is entry (i,j) = (j,i); moving it by h is q +- h * E_a
    const Eigen::MatrixXd step = h * chart.basis[a];
    const auto gp = chart.christoffel(qd + step);
    const auto gm = chart.christoffel(qd - step);
    dgamma[a].resize(m);
    for (int d = 0; d < m; ++d) dgamma[a][d] = (gp[d] - gm[d]) / (2.0 * h);
  }
  // R(X,Y)Y = X^a Y^b Y^c R^d_{cab} d_d
  Eigen::VectorXd rxyy = Eigen::VectorXd::Zero(m);
  for (int d = 0; d < m; ++d) {
    double s = 0.0;
    for (int a = 0; a < m; ++a)
      for (int b = 0; b < m; ++b)
        for (int c = 0; c < m; ++c) {
          const double coef = x(a) * y(b) * y(c);
          if (coef == 0.0) continue;
          double r = dgamma[a][d](b, c) - dgamma[b][d](a, c);
          for (int e = 0; e < m; ++e) r += gamma[d](a, e) * gamma[e](b, c) - gamma[d](b, e) * gamma[e](a, c);
          s += coef * r;
        }
    rxyy(d) = s;
  }
  return x.dot(g * rxyy) / gram;
}

}  // namespace bianchi
