#include "bianchi/liealg.hpp"

#include "bianchi/errors.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <string>

namespace bianchi {

StructureConstants::StructureConstants(int n) : n_(n), c_(static_cast<std::size_t>(n) * n * n, 0.0) {
  if (n < 1) throw DimensionError("StructureConstants: dimension must be >= 1");
  killing_ = SymMatrix(n);
}

StructureConstants StructureConstants::from_tensor(int n, std::span<const double> t, double tol) {
  StructureConstants c(n);
  if (static_cast<int>(t.size()) != n * n * n)
    throw DimensionError("StructureConstants: expected n^3 = " + std::to_string(n * n * n) +
                         " entries, got " + std::to_string(t.size()));
  auto at = [&](int i, int j, int k) { return t[(i * n + j) * n + k]; };
  for (int i = 0; i < n; ++i)
    for (int k = 0; k < n; ++k)
      if (std::abs(at(i, i, k)) > tol)
        throw ValidationError("StructureConstants: C_ii^k must vanish (i=" + std::to_string(i) +
                              ", k=" + std::to_string(k) + ")");
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      for (int k = 0; k < n; ++k) {
        if (std::abs(at(i, j, k) + at(j, i, k)) > tol)
          throw ValidationError("StructureConstants: not antisymmetric at (" + std::to_string(i) +
                                "," + std::to_string(j) + "," + std::to_string(k) + ")");
        const double v = 0.5 * (at(i, j, k) - at(j, i, k));
        c.c_[(i * n + j) * n + k] = v;
        c.c_[(j * n + i) * n + k] = -v;
      }
  c.refresh_killing();
  return c;
}

void StructureConstants::set(int i, int j, int k, double v) {
  if (i < 0 || j < 0 || k < 0 || i >= n_ || j >= n_ || k >= n_)
    throw DimensionError("StructureConstants::set: index out of range");
  if (i == j) {
    if (v != 0.0) throw ValidationError("StructureConstants::set: [e_i, e_i] must vanish");
    return;
  }
  c_[(i * n_ + j) * n_ + k] = v;
  c_[(j * n_ + i) * n_ + k] = -v;
  refresh_killing();
}

void StructureConstants::set_bracket(int i, int j, std::span<const double> v) {
  if (static_cast<int>(v.size()) != n_) throw DimensionError("set_bracket: wrong vector length");
  for (int k = 0; k < n_; ++k) set(i, j, k, v[k]);
}

Eigen::VectorXd StructureConstants::bracket(const Eigen::VectorXd& x, const Eigen::VectorXd& y) const {
  Eigen::VectorXd r = Eigen::VectorXd::Zero(n_);
  for (int i = 0; i < n_; ++i) {
    if (x(i) == 0.0) continue;
    for (int j = 0; j < n_; ++j) {
      const double s = x(i) * y(j);
      if (s == 0.0) continue;
      for (int k = 0; k < n_; ++k) r(k) += s * (*this)(i, j, k);
    }
  }
  return r;
}

Eigen::MatrixXd StructureConstants::ad(int i) const {
  Eigen::MatrixXd m(n_, n_);
  for (int j = 0; j < n_; ++j)
    for (int k = 0; k < n_; ++k) m(k, j) = (*this)(i, j, k);
  return m;
}

Eigen::VectorXd StructureConstants::trace_form() const {
  Eigen::VectorXd t(n_);
  for (int i = 0; i < n_; ++i) {
    double s = 0.0;
    for (int j = 0; j < n_; ++j) s += (*this)(i, j, j);
    t(i) = s;
  }
  return t;
}

double StructureConstants::max_abs() const {
  double m = 0.0;
  for (double x : c_) m = std::max(m, std::abs(x));
  return m;
}

void StructureConstants::refresh_killing() {
  SymMatrix b(n_);
  for (int a = 0; a < n_; ++a)
    for (int bb = a; bb < n_; ++bb) {
      double s = 0.0;
      for (int i = 0; i < n_; ++i)
        for (int j = 0; j < n_; ++j) s += (*this)(a, i, j) * (*this)(bb, j, i);
      b.set(a, bb, s);
    }
  killing_ = std::move(b);
}

StructureConstants transport(const StructureConstants& c, const Eigen::MatrixXd& g) {
  const int n = c.dim();
  if (g.rows() != n || g.cols() != n) throw DimensionError("transport: basis size mismatch");
  Eigen::FullPivLU<Eigen::MatrixXd> lu(g);
  if (!lu.isInvertible()) throw ValidationError("transport: basis is singular");
  const Eigen::MatrixXd gi = lu.inverse();
  std::vector<double> t(static_cast<std::size_t>(n) * n * n, 0.0);
  for (int a = 0; a < n; ++a)
    for (int b = a + 1; b < n; ++b) {
      const Eigen::VectorXd coords = gi * c.bracket(g.col(a), g.col(b));
      for (int k = 0; k < n; ++k) {
        t[(a * n + b) * n + k] = coords(k);
        t[(b * n + a) * n + k] = -coords(k);
      }
    }
  return StructureConstants::from_tensor(n, t);
}

std::string_view to_string(BianchiClass k) {
  switch (k) {
    case BianchiClass::I: return "I";
    case BianchiClass::II: return "II";
    case BianchiClass::VI0: return "VI0";
    case BianchiClass::VII0: return "VII0";
    case BianchiClass::VIII: return "VIII";
    case BianchiClass::IX: return "IX";
  }
  return "?";
}

double jacobi_residual(const StructureConstants& c) {
  const int n = c.dim();
  double worst = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k)
        for (int m = 0; m < n; ++m) {
          double s = 0.0;
          for (int l = 0; l < n; ++l)
            s += c(i, j, l) * c(l, k, m) + c(j, k, l) * c(l, i, m) + c(k, i, l) * c(l, j, m);
          worst = std::max(worst, std::abs(s));
        }
  return worst;
}

bool is_unimodular(const StructureConstants& c) {
  const double tol = 1e-12 * std::max(1.0, c.max_abs());
  return c.trace_form().cwiseAbs().maxCoeff() <= tol;
}

SymMatrix killing_form(const StructureConstants& c) { return c.killing(); }

StructureConstants from_milnor(const MilnorParams& m) {
  StructureConstants c(3);
  c.set(0, 1, 2, m.a);
  c.set(1, 2, 0, m.b);
  c.set(2, 0, 1, m.c);
  return c;
}

namespace {

void require_valid_3d_unimodular(const StructureConstants& c, const char* op) {
  if (c.dim() != 3) throw ValidationError(std::string(op) + ": requires a 3-dimensional algebra");
  const double scale = std::max(1.0, c.max_abs() * c.max_abs());
  if (jacobi_residual(c) > 1e-10 * scale)
    throw ValidationError(std::string(op) + ": Jacobi identity fails");
  if (!is_unimodular(c)) throw ValidationError(std::string(op) + ": algebra is not unimodular");
}

}  // namespace

MilnorFrame milnor_frame(const StructureConstants& c, const SymMatrix& q) {
  require_valid_3d_unimodular(c, "milnor_frame");
  if (q.dim() != 3) throw DimensionError("milnor_frame: metric must be 3x3");
  const Eigen::MatrixXd f = orthonormal_frame(q);
  const StructureConstants on = transport(c, f);

  // [x, y] = L (x cross y) in the orthonormal frame
  Eigen::Matrix3d l;
  for (int k = 0; k < 3; ++k) {
    const int i = (k + 1) % 3, j = (k + 2) % 3;
    for (int r = 0; r < 3; ++r) l(r, k) = on(i, j, r);
  }
  const double asym = (l - l.transpose()).cwiseAbs().maxCoeff();
  if (asym > 1e-10 * std::max(1.0, l.cwiseAbs().maxCoeff()))
    throw ValidationError("milnor_frame: bracket operator is not self-adjoint (non-unimodular?)");
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> es(0.5 * (l + l.transpose()));
  const Eigen::Vector3d lam = es.eigenvalues();  // ascending
  const Eigen::Matrix3d v = es.eigenvectors();

  // u <- middle, v <- smallest, w <- largest, so (a, b, c) = (lam2, lam1, lam0)
  Eigen::Matrix3d r;
  r.col(0) = v.col(1);
  r.col(1) = v.col(0);
  r.col(2) = v.col(2);
  if (r.determinant() < 0.0) r.col(2) = -r.col(2);

  MilnorFrame out;
  out.basis = f * r;
  out.params = {lam(2), lam(1), lam(0)};
  return out;
}

double milnor_defect(const StructureConstants& t, const MilnorParams& m) {
  if (t.dim() != 3) throw ValidationError("milnor_defect: requires n = 3");
  double worst = 0.0;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      for (int k = 0; k < 3; ++k) {
        double expected = 0.0;
        if (i == 0 && j == 1 && k == 2) expected = m.a;
        if (i == 1 && j == 0 && k == 2) expected = -m.a;
        if (i == 1 && j == 2 && k == 0) expected = m.b;
        if (i == 2 && j == 1 && k == 0) expected = -m.b;
        if (i == 2 && j == 0 && k == 1) expected = m.c;
        if (i == 0 && j == 2 && k == 1) expected = -m.c;
        worst = std::max(worst, std::abs(t(i, j, k) - expected));
      }
  return worst;
}

Classification classify(const StructureConstants& c) {
  const MilnorFrame mf = milnor_frame(c, SymMatrix::identity(3));
  std::array<double, 3> lam{mf.params.a, mf.params.b, mf.params.c};
  double biggest = 0.0;
  for (double x : lam) biggest = std::max(biggest, std::abs(x));
  const double eps = biggest < 1e-12 ? 1e-12 : 1e-9 * biggest;

  int pos = 0, neg = 0;
  for (double& x : lam) {
    const double ax = std::abs(x);
    if (ax <= eps) {
      x = 0.0;
    } else if (ax <= 1e3 * eps) {
      throw ValidationError("classify: eigenvalue " + std::to_string(x) +
                            " too close to zero to decide the class");
    } else if (x > 0) {
      ++pos;
    } else {
      ++neg;
    }
  }
  if (neg > pos) {
    for (double& x : lam) x = -x;
    std::swap(pos, neg);
  }
  // zeros first, then negatives, then positives
  std::sort(lam.begin(), lam.end(), [](double x, double y) {
    auto rank = [](double v) { return v == 0.0 ? 0 : (v < 0.0 ? 1 : 2); };
    if (rank(x) != rank(y)) return rank(x) < rank(y);
    return x < y;
  });

  Classification out;
  out.raw = mf.params;
  out.normalized = {lam[0], lam[1], lam[2]};
  out.sign_pattern = "(";
  for (int i = 0; i < 3; ++i) {
    out.sign_pattern += lam[i] == 0.0 ? "0" : (lam[i] < 0.0 ? "-" : "+");
    out.sign_pattern += i < 2 ? "," : ")";
  }
  const int nonzero = pos + neg;
  if (nonzero == 0) out.label = BianchiClass::I;
  else if (nonzero == 1) out.label = BianchiClass::II;
  else if (nonzero == 2) out.label = neg == 0 ? BianchiClass::VII0 : BianchiClass::VI0;
  else out.label = neg == 0 ? BianchiClass::IX : BianchiClass::VIII;
  return out;
}

bool is_bi_invariant(const StructureConstants& c, const SymMatrix& q, double tol) {
  if (q.dim() != c.dim()) throw DimensionError("is_bi_invariant: dimension mismatch");
  require_positive_definite(q);
  const Eigen::MatrixXd qd = q.dense();
  const double scale = std::max(1.0, c.max_abs() * q.max_abs());
  for (int i = 0; i < c.dim(); ++i) {
    const Eigen::MatrixXd a = c.ad(i);
    // <[e_i,x],y> + <x,[e_i,y]> = x^T (a^T q + q a) y
    if ((a.transpose() * qd + qd * a).cwiseAbs().maxCoeff() > tol * scale) return false;
  }
  return true;
}

std::optional<MilnorParams> preset_params(std::string_view name) {
  if (name == "abelian") return MilnorParams{0, 0, 0};
  if (name == "heis") return MilnorParams{0, 0, 1};
  if (name == "euc") return MilnorParams{0, 1, 1};
  if (name == "sol") return MilnorParams{0, -1, 1};
  if (name == "sl2") return MilnorParams{1, 1, -1};
  if (name == "so3") return MilnorParams{1, 1, 1};
  return std::nullopt;
}

std::vector<std::string> preset_names() { return {"abelian", "heis", "euc", "sol", "sl2", "so3"}; }

StructureConstants preset(std::string_view name) {
  const auto p = preset_params(name);
  if (!p) throw ValidationError("unknown algebra preset '" + std::string(name) + "'");
  return from_milnor(*p);
}

}  // namespace bianchi
