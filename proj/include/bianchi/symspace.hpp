#pragma once

// Geometry of the space of positive-definite symmetric matrices with its
// GL(n)-invariant metric <p1,p2>_q = tr(q^-1 p1 q^-1 p2).

#include "bianchi/symmatrix.hpp"

#include <span>
#include <utility>
#include <vector>

namespace bianchi {

/// Diagonal entries of a metric in a fixed basis; all strictly positive.
class FlatCoords {
public:
  explicit FlatCoords(std::vector<double> values);
  std::span<const double> values() const { return values_; }
  int dim() const { return static_cast<int>(values_.size()); }

private:
  std::vector<double> values_;
};

double inner(const SymMatrix& q, const SymMatrix& p1, const SymMatrix& p2);

/// Closed-form geodesic q(t) = q0^{1/2} exp(t A) q0^{1/2}, A = q0^{-1/2} p0 q0^{-1/2}.
SymMatrix geodesic(const SymMatrix& q0, const SymMatrix& p0, double t);

/// Right-hand side of the geodesic equation in phase space:
/// (q, p) -> (p, p q^-1 p). Used to validate the closed form numerically.
std::pair<SymMatrix, SymMatrix> geodesic_rhs(const SymMatrix& q, const SymMatrix& p);

/// sqrt(sum_i log^2 lambda_i), lambda_i the eigenvalues of q0^-1 q1.
double distance(const SymMatrix& q0, const SymMatrix& q1);

SymMatrix invert_point(const SymMatrix& q);
/// Pushforward of a tangent vector p at q under q -> q^-1: -q^-1 p q^-1.
SymMatrix invert_tangent(const SymMatrix& q, const SymMatrix& p);

/// (log det q, q / (det q)^{1/n}).
std::pair<double, SymMatrix> split(const SymMatrix& q);

SymMatrix flat_embed(const FlatCoords& coords);
FlatCoords flat_log(const SymMatrix& q);
/// Euclidean chart of a flat: t_i = log x_i.
std::vector<double> flat_chart(const FlatCoords& coords);

/// alpha (tr q^-1 p)^2 + beta tr((q^-1 p)^2).
double lagrangian(double alpha, double beta, const SymMatrix& q, const SymMatrix& p);
/// alpha tr(q^-1 p) + beta sqrt(tr((q^-1 p)^2)).
double finsler(double alpha, double beta, const SymMatrix& q, const SymMatrix& p);

/// Congruence action g . q = g q g^T.
SymMatrix congruence(const Eigen::MatrixXd& g, const SymMatrix& q);

/// Sectional curvature of span(p1, p2) at q for the invariant metric.
///
/// Validation tool, not a precision API: the metric is written in the chart
/// of packed matrix entries, Christoffel symbols come from the analytic
/// derivative of the metric, and their derivatives from central differences
/// with step 1e-4 * (largest eigenvalue of q). Expect ~1e-7 accuracy.
/// Throws ValidationError if the Gram determinant of the plane is degenerate.
double symspace_sectional(const SymMatrix& q, const SymMatrix& p1, const SymMatrix& p2);

}  // namespace bianchi
