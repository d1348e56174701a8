#pragma once

// Expansion-normalized orthonormal-frame variables for vacuum-type class A
// models: a quadratic polynomial system on (Sigma+, Sigma-, N1, N2, N3) with
// the equation-of-state parameter gamma held fixed.

#include "bianchi/odeengine.hpp"

#include <Eigen/Dense>

namespace bianchi {

struct WHState {
  double sigma_plus = 0.0;
  double sigma_minus = 0.0;
  double n1 = 0.0, n2 = 0.0, n3 = 0.0;
  double gamma = 1.0;

  Eigen::VectorXd pack() const;  // 5 components, gamma excluded
  static WHState unpack(const Eigen::VectorXd& v, double gamma);
};

struct WHAux {
  double s_plus = 0.0;
  double s_minus = 0.0;
  double q = 0.0;
  double k = 0.0;
};

/// Throws ValidationError unless 2/3 < gamma < 2.
void require_gamma(double gamma);

WHAux wh_aux(const WHState& s);
Eigen::VectorXd wh_rhs(const WHState& s);

/// Channels q, K, Splus, Sminus.
Trajectory run_wh(const WHState& s0, const IntegrationConfig& cfg);

}  // namespace bianchi
