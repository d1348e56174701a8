#include "bianchi/ricciflow.hpp"

#include "bianchi/curvature.hpp"
#include "bianchi/errors.hpp"
#include "bianchi/symspace.hpp"

#include <cmath>

namespace bianchi {

std::string_view to_string(FlowKind k) {
  switch (k) {
    case FlowKind::RicciField: return "ricci";
    case FlowKind::NormalizedRicciFlow: return "normalized";
    case FlowKind::HilbertGradient: return "hilbert";
    case FlowKind::ProjectiveCubic: return "cubic";
  }
  return "unknown";
}

FlowKind parse_flow_kind(std::string_view s) {
  for (FlowKind k : {FlowKind::RicciField, FlowKind::NormalizedRicciFlow, FlowKind::HilbertGradient,
                     FlowKind::ProjectiveCubic})
    if (to_string(k) == s) return k;
  throw ValidationError("unknown flow kind: " + std::string(s));
}

SymMatrix ricci_field(const StructureConstants& c, const SymMatrix& q) { return ricci_general(c, q); }

SymMatrix bianchi_ricci_rhs(const StructureConstants& c, const SymMatrix& q) {
  const SymMatrix ric = ricci_general(c, q);
  const double r = q.dense().llt().solve(ric.dense()).trace();
  return ric * -2.0 + q * (2.0 * r / q.dim());
}

SymMatrix hilbert_gradient(const StructureConstants& c, const SymMatrix& q) {
  const SymMatrix ric = ricci_general(c, q);
  const double r = q.dense().llt().solve(ric.dense()).trace();
  return ric - q * (0.5 * r);
}

SymMatrix hilbert_metric_gradient(const StructureConstants& c, const SymMatrix& q) {
  const double det = spd_eigen(q).values.prod();
  return hilbert_gradient(c, q) * -std::sqrt(det);
}

std::array<double, 3> normalized_flat_rhs(const MilnorParams& m, double x, double y, double z) {
  if (!(std::abs(x * y * z - 1.0) <= 1e-10))
    throw ValidationError("normalized_flat_rhs: requires xyz = 1");
  const double a = m.a, b = m.b, c = m.c;
  constexpr double t = 2.0 / 3.0, f = 4.0 / 3.0;
  return {x * (t * b * x * (-2 * b * x + c * y + a * z) + t * c * c * y * y + t * a * a * z * z -
               f * a * c * y * z),
          y * (t * c * y * (-2 * c * y + b * x + a * z) + t * b * b * x * x + t * a * a * z * z -
               f * a * b * x * z),
          z * (t * a * z * (-2 * a * z + b * x + c * y) + t * b * b * x * x + t * c * c * y * y -
               f * b * c * x * y)};
}

std::array<double, 3> projective_cubic_rhs(const MilnorParams& m, double x, double y, double z) {
  const double a = m.a, b = m.b, c = m.c;
  const double u = c * y - a * z, v = a * z - b * x, w = b * x - c * y;
  return {x * (b * b * x * x - u * u), y * (c * c * y * y - v * v), z * (a * a * z * z - w * w)};
}

MilnorParams milnor_params_of(const StructureConstants& c) {
  if (c.dim() != 3) throw DimensionError("milnor_params_of: needs n = 3");
  const MilnorParams m{c(0, 1, 2), c(1, 2, 0), c(2, 0, 1)};
  if (milnor_defect(c, m) > 1e-12)
    throw ValidationError("structure constants are not in Milnor form");
  return m;
}

Trajectory run_flow(FlowKind kind, const StructureConstants& c, const SymMatrix& q0,
                    IntegrationConfig cfg) {
  if (c.dim() != q0.dim()) throw DimensionError("run_flow: algebra and metric dimensions differ");
  require_positive_definite(q0, "run_flow");
  const int n = q0.dim();
  MilnorParams m;
  if (kind == FlowKind::ProjectiveCubic) {
    m = milnor_params_of(c);
    if (!q0.is_diagonal()) throw ValidationError("run_flow: cubic flow needs a diagonal q0");
  }

  Field field = [&c, kind, n, m](double, const Eigen::VectorXd& s) -> Eigen::VectorXd {
    const SymMatrix q = from_packed_vector(n, s);
    switch (kind) {
      case FlowKind::RicciField: return ricci_field(c, q).packed_vector();
      case FlowKind::NormalizedRicciFlow: return bianchi_ricci_rhs(c, q).packed_vector();
      case FlowKind::HilbertGradient: return hilbert_gradient(c, q).packed_vector();
      case FlowKind::ProjectiveCubic: {
        const auto d = projective_cubic_rhs(m, q(0, 0), q(1, 1), q(2, 2));
        return SymMatrix::diagonal({d[0], d[1], d[2]}).packed_vector();
      }
    }
    return Eigen::VectorXd::Zero(s.size());
  };

  DiagnosticSpec diag;
  diag.names = {"r", "H", "det", "dist0"};
  diag.eval = [&c, &q0, n](double, const Eigen::VectorXd& s) {
    const SymMatrix q = from_packed_vector(n, s);
    const double det = spd_eigen(q).values.prod();
    const double r = scalar_curvature(c, q);
    return std::vector<double>{r, r * std::sqrt(det), det, distance(q0, q)};
  };
  if (cfg.det_channel.empty()) cfg.det_channel = "det";
  return integrate(field, q0.packed_vector(), cfg, diag, SymMatrix::packed_labels(n, "q"));
}

}  // namespace bianchi
