#include "bianchi/wainwright.hpp"

#include "bianchi/errors.hpp"

#include <cmath>
#include <string>

namespace bianchi {

Eigen::VectorXd WHState::pack() const {
  Eigen::VectorXd v(5);
  v << sigma_plus, sigma_minus, n1, n2, n3;
  return v;
}

WHState WHState::unpack(const Eigen::VectorXd& v, double gamma) {
  if (v.size() != 5) throw DimensionError("WHState::unpack: expects 5 components");
  return {v(0), v(1), v(2), v(3), v(4), gamma};
}

void require_gamma(double gamma) {
  if (!(gamma > 2.0 / 3.0 && gamma < 2.0))
    throw ValidationError("gamma must lie in (2/3, 2), got " + std::to_string(gamma));
}

WHAux wh_aux(const WHState& s) {
  const double n1 = s.n1, n2 = s.n2, n3 = s.n3;
  WHAux a;
  a.s_plus = ((n2 - n3) * (n2 - n3) - n1 * (2.0 * n1 - n2 - n3)) / 6.0;
  a.s_minus = (n3 - n2) * (n1 - n2 - n3) / (2.0 * std::sqrt(3.0));
  a.k = (n1 * n1 + n2 * n2 + n3 * n3 - 2.0 * (n1 * n2 + n2 * n3 + n3 * n1)) / 12.0;
  a.q = 0.5 * (3.0 * s.gamma - 2.0) * (1.0 - a.k) +
        1.5 * (2.0 - s.gamma) * (s.sigma_plus * s.sigma_plus + s.sigma_minus * s.sigma_minus);
  return a;
}

Eigen::VectorXd wh_rhs(const WHState& s) {
  require_gamma(s.gamma);
  const WHAux a = wh_aux(s);
  const double r3 = std::sqrt(3.0);
  Eigen::VectorXd d(5);
  d << -(2.0 - a.q) * s.sigma_plus - a.s_plus,
      -(2.0 - a.q) * s.sigma_minus - a.s_minus,
      (a.q - 4.0 * s.sigma_plus) * s.n1,
      (a.q + 2.0 * s.sigma_plus + 2.0 * r3 * s.sigma_minus) * s.n2,
      (a.q + 2.0 * s.sigma_plus - 2.0 * r3 * s.sigma_minus) * s.n3;
  return d;
}

Trajectory run_wh(const WHState& s0, const IntegrationConfig& cfg) {
  require_gamma(s0.gamma);
  const double gamma = s0.gamma;
  Field field = [gamma](double, const Eigen::VectorXd& v) { return wh_rhs(WHState::unpack(v, gamma)); };
  DiagnosticSpec diag;
  diag.names = {"q", "K", "Splus", "Sminus"};
  diag.eval = [gamma](double, const Eigen::VectorXd& v) {
    const WHAux a = wh_aux(WHState::unpack(v, gamma));
    return std::vector<double>{a.q, a.k, a.s_plus, a.s_minus};
  };
  return integrate(field, s0.pack(), cfg, diag, {"Sigma_plus", "Sigma_minus", "N1", "N2", "N3"});
}

}  // namespace bianchi
