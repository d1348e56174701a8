#include "bianchi/curvature.hpp"

#include "bianchi/errors.hpp"

#include <cmath>

namespace bianchi {

namespace {

void require_compatible(const StructureConstants& c, const SymMatrix& q, const char* op) {
  if (c.dim() != q.dim())
    throw DimensionError(std::string(op) + ": algebra and metric dimensions differ");
}

// Brings a form computed in the frame F back to the working basis:
// e_a = sum_i (F^-1)_{ia} f_i, so M_work = F^-T M_frame F^-1.
SymMatrix to_working(const Eigen::MatrixXd& frame, const Eigen::MatrixXd& m) {
  const Eigen::MatrixXd fi = frame.inverse();
  return SymMatrix::from_dense(fi.transpose() * m * fi);
}

// R(f_i, f_j) as a matrix acting on frame coordinates.
Eigen::MatrixXd curvature_operator(const ConnectionTable& t, const std::vector<Eigen::MatrixXd>& nabla,
                                   int i, int j) {
  Eigen::MatrixXd r = nabla[i] * nabla[j] - nabla[j] * nabla[i];
  for (int k = 0; k < t.n; ++k) r -= t.constants(i, j, k) * nabla[k];
  return r;
}

std::vector<Eigen::MatrixXd> covariant_all(const ConnectionTable& t) {
  std::vector<Eigen::MatrixXd> out;
  out.reserve(t.n);
  for (int i = 0; i < t.n; ++i) out.push_back(t.covariant(i));
  return out;
}

void require_positive_flat(double x, double y, double z, const char* op) {
  if (!(x > 0.0 && y > 0.0 && z > 0.0))
    throw ValidationError(std::string(op) + ": flat coordinates must be positive");
}

}  // namespace

Eigen::MatrixXd ConnectionTable::covariant(int i) const {
  Eigen::MatrixXd m(n, n);
  for (int j = 0; j < n; ++j)
    for (int k = 0; k < n; ++k) m(k, j) = (*this)(i, j, k);
  return m;
}

ConnectionTable connection(const StructureConstants& c, const SymMatrix& q) {
  require_compatible(c, q, "connection");
  ConnectionTable t;
  t.n = c.dim();
  t.frame = orthonormal_frame(q);
  t.constants = transport(c, t.frame);
  const int n = t.n;
  t.gamma.assign(static_cast<std::size_t>(n) * n * n, 0.0);
  // In an orthonormal frame ad*_X is the transpose of ad_X.
  std::vector<Eigen::MatrixXd> adj(n);
  for (int i = 0; i < n; ++i) adj[i] = t.constants.ad(i).transpose();
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      Eigen::VectorXd v(n);
      for (int k = 0; k < n; ++k) v(k) = t.constants(i, j, k);
      v -= adj[i].col(j) + adj[j].col(i);
      for (int k = 0; k < n; ++k) t.gamma[(i * n + j) * n + k] = 0.5 * v(k);
    }
  return t;
}

SymMatrix ricci_general(const StructureConstants& c, const SymMatrix& q) {
  require_compatible(c, q, "ricci_general");
  const Eigen::MatrixXd f = orthonormal_frame(q);
  const StructureConstants on = transport(c, f);
  const int n = c.dim();
  const SymMatrix& b = on.killing();
  const Eigen::VectorXd t = on.trace_form();

  Eigen::MatrixXd ric(n, n);
  for (int a = 0; a < n; ++a)
    for (int bb = a; bb < n; ++bb) {
      double brackets = 0.0;  // sum_i <[e_a,e_i],[e_b,e_i]>
      double components = 0.0;  // sum_ij <[e_i,e_j],e_a><[e_i,e_j],e_b>
      for (int i = 0; i < n; ++i)
        for (int k = 0; k < n; ++k) {
          brackets += on(a, i, k) * on(bb, i, k);
          components += on(i, k, a) * on(i, k, bb);
        }
      // unimodularity defect: E_ab = t_s (C_sa^b + C_sb^a) in an orthonormal frame
      double defect = 0.0;
      for (int s = 0; s < n; ++s) defect += t(s) * (on(s, a, bb) + on(s, bb, a));
      ric(a, bb) = ric(bb, a) =
          -0.5 * b(a, bb) - 0.5 * brackets + 0.25 * components - 0.5 * defect;
    }
  return to_working(f, ric);
}

SymMatrix ricci_unimodular(const StructureConstants& c, const SymMatrix& q) {
  require_compatible(c, q, "ricci_unimodular");
  if (!is_unimodular(c)) throw ValidationError("ricci_unimodular: algebra is not unimodular");
  require_positive_definite(q);
  const int n = c.dim();
  const Eigen::MatrixXd x = q.dense();
  const Eigen::MatrixXd xi = x.llt().solve(Eigen::MatrixXd::Identity(n, n));
  const SymMatrix& b = c.killing();

  // low[(i*n+k)*n + a] = C_ik^p x_pa
  std::vector<double> low(static_cast<std::size_t>(n) * n * n, 0.0);
  for (int i = 0; i < n; ++i)
    for (int k = 0; k < n; ++k)
      for (int a = 0; a < n; ++a) {
        double s = 0.0;
        for (int p = 0; p < n; ++p) s += c(i, k, p) * x(p, a);
        low[(i * n + k) * n + a] = s;
      }

  SymMatrix ric(n);
  for (int a = 0; a < n; ++a)
    for (int bb = a; bb < n; ++bb) {
      // - 1/2 C_ai^k C_bj^l x_kl x^ij
      double second = 0.0;
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
          if (xi(i, j) == 0.0) continue;
          double s = 0.0;
          for (int k = 0; k < n; ++k) s += c(a, i, k) * low[(bb * n + j) * n + k];
          second += s * xi(i, j);
        }
      // + 1/4 C_ik^p C_jl^q x_pa x_qb x^ij x^kl
      double third = 0.0;
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
          if (xi(i, j) == 0.0) continue;
          double s = 0.0;
          for (int k = 0; k < n; ++k)
            for (int l = 0; l < n; ++l)
              s += low[(i * n + k) * n + a] * low[(j * n + l) * n + bb] * xi(k, l);
          third += s * xi(i, j);
        }
      ric.set(a, bb, -0.5 * b(a, bb) - 0.5 * second + 0.25 * third);
    }
  return ric;
}

SymMatrix ricci_from_connection(const StructureConstants& c, const SymMatrix& q) {
  const ConnectionTable t = connection(c, q);
  const auto nabla = covariant_all(t);
  const int n = t.n;
  Eigen::MatrixXd ric = Eigen::MatrixXd::Zero(n, n);
  // Ric(f_b, f_c) = sum_i <R(f_i, f_b) f_c, f_i>
  for (int i = 0; i < n; ++i)
    for (int b = 0; b < n; ++b) {
      const Eigen::MatrixXd r = curvature_operator(t, nabla, i, b);
      for (int cc = 0; cc < n; ++cc) ric(b, cc) += r(i, cc);
    }
  return to_working(t.frame, ric);
}

double scalar_curvature(const StructureConstants& c, const SymMatrix& q) {
  const SymMatrix ric = ricci_general(c, q);
  return q.dense().llt().solve(ric.dense()).trace();
}

std::array<double, 3> ricci_flat_closed(const MilnorParams& m, double x, double y, double z) {
  require_positive_flat(x, y, z, "ricci_flat_closed");
  const double a = m.a, b = m.b, c = m.c;
  const double cy_az = c * y - a * z;
  const double az_bx = a * z - b * x;
  const double bx_cy = b * x - c * y;
  return {(b * b * x * x - cy_az * cy_az) / (2.0 * y * z),
          (c * c * y * y - az_bx * az_bx) / (2.0 * x * z),
          (a * a * z * z - bx_cy * bx_cy) / (2.0 * x * y)};
}

double scalar_flat_closed(const MilnorParams& m, double x, double y, double z) {
  require_positive_flat(x, y, z, "scalar_flat_closed");
  const double a = m.a, b = m.b, c = m.c;
  const double num = -b * b * x * x - c * c * y * y - a * a * z * z + 2.0 * a * c * y * z +
                     2.0 * a * b * x * z + 2.0 * b * c * x * y;
  return num / (2.0 * x * y * z);
}

double hilbert_action(const StructureConstants& c, const SymMatrix& q) {
  const SpdEigen e = spd_eigen(q);
  return scalar_curvature(c, q) * std::sqrt(e.values.prod());
}

Eigen::VectorXd divergence(const StructureConstants& c, const SymMatrix& q, const SymMatrix& p) {
  require_compatible(c, q, "divergence");
  if (p.dim() != q.dim()) throw DimensionError("divergence: tensor dimension differs");
  const ConnectionTable t = connection(c, q);
  const int n = t.n;
  const Eigen::MatrixXd pf = t.frame.transpose() * p.dense() * t.frame;
  // div p (f_c) = -sum_i [ p(nabla_{f_i} f_i, f_c) + p(f_i, nabla_{f_i} f_c) ]
  Eigen::VectorXd w = Eigen::VectorXd::Zero(n);
  for (int cc = 0; cc < n; ++cc) {
    double s = 0.0;
    for (int i = 0; i < n; ++i)
      for (int k = 0; k < n; ++k) s += t(i, i, k) * pf(k, cc) + t(i, cc, k) * pf(i, k);
    w(cc) = -s;
  }
  // omega(e_a) = sum_c (F^-1)_{ca} omega(f_c)
  return t.frame.inverse().transpose() * w;
}

double sectional(const StructureConstants& c, const SymMatrix& q, const Eigen::VectorXd& x,
                 const Eigen::VectorXd& y) {
  require_compatible(c, q, "sectional");
  if (x.size() != c.dim() || y.size() != c.dim())
    throw DimensionError("sectional: vector dimension differs");
  const ConnectionTable t = connection(c, q);
  const auto nabla = covariant_all(t);
  const Eigen::MatrixXd fi = t.frame.inverse();
  const Eigen::VectorXd xf = fi * x, yf = fi * y;
  const double xx = xf.squaredNorm(), yy = yf.squaredNorm(), xy = xf.dot(yf);
  const double gram = xx * yy - xy * xy;
  if (!(gram > 1e-12 * xx * yy)) throw ValidationError("sectional: degenerate plane");
  Eigen::MatrixXd r = Eigen::MatrixXd::Zero(t.n, t.n);
  for (int i = 0; i < t.n; ++i)
    for (int j = 0; j < t.n; ++j) {
      const double s = xf(i) * yf(j);
      if (s != 0.0) r += s * curvature_operator(t, nabla, i, j);
    }
  return xf.dot(r * yf) / gram;
}

Eigen::VectorXd unimodularity_vector(const StructureConstants& c, const SymMatrix& q) {
  require_compatible(c, q, "unimodularity_vector");
  require_positive_definite(q);
  return q.dense().llt().solve(c.trace_form());
}

}  // namespace bianchi
