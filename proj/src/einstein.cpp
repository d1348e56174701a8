#include "bianchi/einstein.hpp"

#include "bianchi/curvature.hpp"
#include "bianchi/errors.hpp"

#include <algorithm>
#include <cmath>

namespace bianchi {

namespace {

struct Weingarten {
  Eigen::MatrixXd a;  // g^-1 k
  double tr = 0.0;
  double tr_sq = 0.0;  // tr(a^2)
};

Weingarten weingarten(const ADMState& s) {
  if (s.g.dim() != s.k.dim()) throw DimensionError("ADMState: g and k dimensions differ");
  require_positive_definite(s.g, "g");
  Weingarten w;
  w.a = s.g.dense().llt().solve(s.k.dense());
  w.tr = w.a.trace();
  w.tr_sq = (w.a * w.a).trace();
  return w;
}

// k g^-1 k, the quadratic form of a^2
SymMatrix k_a(const ADMState& s, const Weingarten& w) {
  return SymMatrix::from_dense(s.k.dense() * w.a);
}

void require_flat(const FlatADMState& s, const char* op) {
  if (!(s.x > 0.0 && s.y > 0.0 && s.z > 0.0))
    throw ValidationError(std::string(op) + ": flat metric entries must be positive");
}

double hamiltonian_scale(double r, const Weingarten& w, double lambda) {
  return 1.0 + std::abs(r) + w.tr * w.tr + w.tr_sq + 2.0 * std::abs(lambda);
}

void require_equal_params(const MilnorParams& m) {
  if (m.a != m.b || m.b != m.c)
    throw ValidationError("taubnut_deviation: needs a = b = c");
}

}  // namespace

Eigen::VectorXd ADMState::pack() const {
  const int n = g.dim();
  const int p = SymMatrix::packed_size(n);
  Eigen::VectorXd v(2 * p);
  v.head(p) = g.packed_vector();
  v.tail(p) = k.packed_vector();
  return v;
}

ADMState ADMState::unpack(int n, const Eigen::VectorXd& v) {
  const int p = SymMatrix::packed_size(n);
  if (v.size() != 2 * p) throw DimensionError("ADMState::unpack: wrong vector length");
  return {from_packed_vector(n, v, 0), from_packed_vector(n, v, p)};
}

Eigen::VectorXd FlatADMState::pack() const {
  Eigen::VectorXd v(6);
  v << x, y, z, kx, ky, kz;
  return v;
}

FlatADMState FlatADMState::unpack(const Eigen::VectorXd& v) {
  if (v.size() != 6) throw DimensionError("FlatADMState::unpack: wrong vector length");
  return {v(0), v(1), v(2), v(3), v(4), v(5)};
}

ADMState FlatADMState::embed() const {
  return {SymMatrix::diagonal({x, y, z}), SymMatrix::diagonal({kx, ky, kz})};
}

std::pair<SymMatrix, SymMatrix> to_qp(const ADMState& s) { return {s.g, s.k * -2.0}; }

ADMState from_qp(const SymMatrix& q, const SymMatrix& p) { return {q, p * -0.5}; }

ADMState adm_rhs(const StructureConstants& c, const ADMState& s, double lambda) {
  const Weingarten w = weingarten(s);
  const SymMatrix ric = ricci_general(c, s.g);
  return {s.k * -2.0, s.g * -lambda + ric + s.k * w.tr - k_a(s, w) * 2.0};
}

double hamiltonian_residual(const StructureConstants& c, const ADMState& s, double lambda) {
  const Weingarten w = weingarten(s);
  return scalar_curvature(c, s.g) + w.tr * w.tr - w.tr_sq - 2.0 * lambda;
}

Eigen::VectorXd momentum_residual(const StructureConstants& c, const ADMState& s) {
  return divergence(c, s.g, s.k);
}

FlatADMState flat_einstein_rhs(const MilnorParams& m, const FlatADMState& s, double lambda) {
  require_flat(s, "flat_einstein_rhs");
  const auto ric = ricci_flat_closed(m, s.x, s.y, s.z);
  const double ax = s.kx / s.x, ay = s.ky / s.y, az = s.kz / s.z;
  const double tr = ax + ay + az;
  return {-2.0 * s.kx,
          -2.0 * s.ky,
          -2.0 * s.kz,
          -lambda * s.x + ric[0] + tr * s.kx - 2.0 * s.kx * ax,
          -lambda * s.y + ric[1] + tr * s.ky - 2.0 * s.ky * ay,
          -lambda * s.z + ric[2] + tr * s.kz - 2.0 * s.kz * az};
}

double flat_hamiltonian_residual(const MilnorParams& m, const FlatADMState& s, double lambda) {
  require_flat(s, "flat_hamiltonian_residual");
  const double ax = s.kx / s.x, ay = s.ky / s.y, az = s.kz / s.z;
  return scalar_flat_closed(m, s.x, s.y, s.z) + 2.0 * (ax * ay + ax * az + ay * az) - 2.0 * lambda;
}

FlatADMState kasner_exact(const KasnerParams& p, double t) {
  if (!(t > 0.0)) throw ValidationError("kasner_exact: t must be positive");
  const auto g = [t](double e) { return std::pow(t, 2.0 * e); };
  const auto k = [t](double e) { return -e * std::pow(t, 2.0 * e - 1.0); };
  return {g(p.p1), g(p.p2), g(p.p3), k(p.p1), k(p.p2), k(p.p3)};
}

bool kasner_check(const KasnerParams& p) {
  const double s1 = p.p1 + p.p2 + p.p3;
  const double s2 = p.p1 * p.p1 + p.p2 * p.p2 + p.p3 * p.p3;
  return std::abs(s1 - 1.0) <= 1e-12 && std::abs(s2 - 1.0) <= 1e-12;
}

double taubnut_deviation(const Trajectory& traj, const MilnorParams& m) {
  require_equal_params(m);
  double worst = 0.0;
  for (const auto& v : traj.states) {
    if (v.size() != 6) throw DimensionError("taubnut_deviation: expects flat states");
    worst = std::max({worst, std::abs(v(0) - v(1)), std::abs(v(3) - v(4))});
  }
  return worst;
}

ADMState wick_rhs(const StructureConstants& c, const ADMState& s) {
  const Weingarten w = weingarten(s);
  const SymMatrix ric = ricci_general(c, s.g);
  return {s.k * -2.0, -ric + s.k * w.tr - k_a(s, w) * 2.0};
}

double wick_residual(const StructureConstants& c, const ADMState& s) {
  const Weingarten w = weingarten(s);
  return scalar_curvature(c, s.g) + w.tr_sq - w.tr * w.tr;
}

double complete_flat_kz(const MilnorParams& m, double x, double y, double z, double kx, double ky,
                        double lambda) {
  require_flat({x, y, z, kx, ky, 0.0}, "complete_flat_kz");
  const double ax = kx / x, ay = ky / y;
  const double r = scalar_flat_closed(m, x, y, z);
  // r + 2 (ax ay + az (ax + ay)) - 2 lambda = 0
  const double coef = 2.0 * (ax + ay);
  const double rest = r + 2.0 * ax * ay - 2.0 * lambda;
  if (std::abs(coef) <= 1e-14 * (1.0 + std::abs(rest)))
    throw ValidationError("complete_flat_kz: constraint does not involve kz for this data");
  return -rest / coef * z;
}

std::vector<FlatADMState> scale_flat_data(const MilnorParams& m, double x, double y, double z,
                                          const std::array<double, 3>& d, double lambda) {
  require_flat({x, y, z, 0.0, 0.0, 0.0}, "scale_flat_data");
  const double r = scalar_flat_closed(m, x, y, z);
  const double sigma = d[0] * d[1] + d[0] * d[2] + d[1] * d[2];
  if (sigma == 0.0) return {};
  const double s2 = (2.0 * lambda - r) / (2.0 * sigma);
  if (!(s2 >= 0.0)) return {};
  double s = std::sqrt(s2);
  // expanding branch (tr a < 0) first
  if (s * (d[0] + d[1] + d[2]) > 0.0) s = -s;
  std::vector<FlatADMState> out;
  for (double root : {s, -s})
    out.push_back({x, y, z, root * d[0] * x, root * d[1] * y, root * d[2] * z});
  if (s == 0.0) out.pop_back();
  return out;
}

ConstraintReport check_constraints(const StructureConstants& c, const ADMState& s, double lambda,
                                   double tol) {
  const Weingarten w = weingarten(s);
  const double r = scalar_curvature(c, s.g);
  ConstraintReport rep;
  rep.hamiltonian = r + w.tr * w.tr - w.tr_sq - 2.0 * lambda;
  rep.momentum = momentum_residual(c, s);
  rep.scale = hamiltonian_scale(r, w, lambda);
  // divergence is linear in k with coefficients of size |C| in frame units
  const double mom_scale = 1.0 + c.max_abs() * std::sqrt(std::max(0.0, w.tr_sq)) *
                                     std::sqrt(spd_eigen(s.g).values.maxCoeff());
  rep.valid = std::abs(rep.hamiltonian) <= tol * rep.scale &&
              (rep.momentum.size() == 0 || rep.momentum.lpNorm<Eigen::Infinity>() <= tol * mom_scale);
  return rep;
}

Trajectory run_einstein(const StructureConstants& c, const ADMState& s0, IntegrationConfig cfg,
                        const EinsteinOptions& opt) {
  if (c.dim() != s0.g.dim()) throw DimensionError("run_einstein: algebra and metric dimensions differ");
  const ConstraintReport rep = check_constraints(c, s0, opt.lambda, opt.validity_tol);
  if (!rep.valid && !opt.allow_invalid)
    throw ValidationError("run_einstein: initial data violate the constraints (hamiltonian " +
                          std::to_string(rep.hamiltonian) + ", momentum " +
                          std::to_string(rep.momentum.lpNorm<Eigen::Infinity>()) + ")");
  const int n = c.dim();
  const double lambda = opt.lambda;
  Field field = [&c, n, lambda](double, const Eigen::VectorXd& v) {
    return adm_rhs(c, ADMState::unpack(n, v), lambda).pack();
  };
  DiagnosticSpec diag;
  diag.names = {"r", "H", "det", "ham_residual", "mom_residual_max"};
  diag.eval = [&c, n, lambda](double, const Eigen::VectorXd& v) {
    const ADMState s = ADMState::unpack(n, v);
    const double det = spd_eigen(s.g).values.prod();
    const double r = scalar_curvature(c, s.g);
    return std::vector<double>{r, r * std::sqrt(det), det, hamiltonian_residual(c, s, lambda),
                               momentum_residual(c, s).lpNorm<Eigen::Infinity>()};
  };
  if (cfg.det_channel.empty()) cfg.det_channel = "det";
  auto labels = SymMatrix::packed_labels(n, "g");
  for (auto& l : SymMatrix::packed_labels(n, "k")) labels.push_back(l);
  return integrate(field, s0.pack(), cfg, diag, std::move(labels));
}

Trajectory run_einstein_flat(const MilnorParams& m, const FlatADMState& s0, IntegrationConfig cfg,
                             const EinsteinOptions& opt) {
  require_flat(s0, "run_einstein_flat");
  const StructureConstants c = from_milnor(m);
  const ConstraintReport rep = check_constraints(c, s0.embed(), opt.lambda, opt.validity_tol);
  if (!rep.valid && !opt.allow_invalid)
    throw ValidationError("run_einstein_flat: initial data violate the constraints (hamiltonian " +
                          std::to_string(rep.hamiltonian) + ")");
  const double lambda = opt.lambda;
  Field field = [m, lambda](double, const Eigen::VectorXd& v) -> Eigen::VectorXd {
    const FlatADMState s = FlatADMState::unpack(v);
    if (!(s.x > 0.0 && s.y > 0.0 && s.z > 0.0))
      throw NotPositiveDefinite("flat metric left the positive orthant");
    return flat_einstein_rhs(m, s, lambda).pack();
  };
  DiagnosticSpec diag;
  diag.names = {"r", "H", "det", "ham_residual", "mom_residual_max"};
  diag.eval = [m, c, lambda](double, const Eigen::VectorXd& v) {
    const FlatADMState s = FlatADMState::unpack(v);
    if (!(s.x > 0.0 && s.y > 0.0 && s.z > 0.0))
      throw NotPositiveDefinite("flat metric left the positive orthant");
    const double det = s.x * s.y * s.z;
    const double r = scalar_flat_closed(m, s.x, s.y, s.z);
    return std::vector<double>{r, r * std::sqrt(det), det, flat_hamiltonian_residual(m, s, lambda),
                               momentum_residual(c, s.embed()).lpNorm<Eigen::Infinity>()};
  };
  if (cfg.det_channel.empty()) cfg.det_channel = "det";
  return integrate(field, s0.pack(), cfg, diag, {"x", "y", "z", "kx", "ky", "kz"});
}

}  // namespace bianchi
