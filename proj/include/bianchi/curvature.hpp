#pragma once

// Curvature of left-invariant metrics. A metric is a positive-definite q on
// the Lie algebra written in the basis of the structure constants; every
// quantity is assembled in the q-orthonormal frame of orthonormal_frame(q)
// and returned in the original ("working") basis.

#include "bianchi/liealg.hpp"
#include "bianchi/symmatrix.hpp"

#include <Eigen/Dense>

#include <array>
#include <vector>

namespace bianchi {

/// Levi-Civita connection of a left-invariant metric in a q-orthonormal frame:
/// nabla_{f_i} f_j = gamma(i,j,k) f_k.
struct ConnectionTable {
  int n = 0;
  Eigen::MatrixXd frame;           // columns f_i, q-orthonormal
  StructureConstants constants{1};  // brackets of the frame
  std::vector<double> gamma;

  double operator()(int i, int j, int k) const { return gamma[(i * n + j) * n + k]; }
  /// Matrix of nabla_{f_i}: column j holds nabla_{f_i} f_j.
  Eigen::MatrixXd covariant(int i) const;
};

/// nabla_X Y = 1/2 ([X,Y] - ad*_X Y - ad*_Y X) for left-invariant X, Y.
ConnectionTable connection(const StructureConstants& c, const SymMatrix& q);

/// Ricci form of any Lie algebra (unimodular or not), including the
/// unimodularity-defect term.
SymMatrix ricci_general(const StructureConstants& c, const SymMatrix& q);

/// Index formula for unimodular algebras, evaluated directly in the working
/// basis with x_ab = q and x^ab = q^-1. Throws ValidationError if the algebra
/// is not unimodular.
SymMatrix ricci_unimodular(const StructureConstants& c, const SymMatrix& q);

/// Ricci form obtained by tracing the curvature operator built from the
/// connection table. Independent of the two closed formulas above.
SymMatrix ricci_from_connection(const StructureConstants& c, const SymMatrix& q);

/// r = tr(q^-1 Ric).
double scalar_curvature(const StructureConstants& c, const SymMatrix& q);

/// Diagonal Ricci values (Ric(u,u), Ric(v,v), Ric(w,w)) on a Milnor flat.
std::array<double, 3> ricci_flat_closed(const MilnorParams& m, double x, double y, double z);
double scalar_flat_closed(const MilnorParams& m, double x, double y, double z);

/// H(q) = r(q) sqrt(det q).
double hilbert_action(const StructureConstants& c, const SymMatrix& q);

/// Divergence 1-form of a left-invariant symmetric 2-tensor p, as components
/// omega(e_a) in the working basis.
Eigen::VectorXd divergence(const StructureConstants& c, const SymMatrix& q, const SymMatrix& p);

/// Sectional curvature of span(x, y) (working-basis coordinates).
double sectional(const StructureConstants& c, const SymMatrix& q, const Eigen::VectorXd& x,
                 const Eigen::VectorXd& y);

/// Z with <Z, Y>_q = tr(ad_Y): components q^-1 t.
Eigen::VectorXd unimodularity_vector(const StructureConstants& c, const SymMatrix& q);

}  // namespace bianchi
