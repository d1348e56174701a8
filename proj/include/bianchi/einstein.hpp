#pragma once

// Vacuum Einstein flow of left-invariant data in Gauss gauge. The state is
// the spatial metric g and the second fundamental form k = -g'/2, both in the
// basis of the structure constants; a = g^-1 k is the Weingarten map.

#include "bianchi/liealg.hpp"
#include "bianchi/odeengine.hpp"
#include "bianchi/symmatrix.hpp"

#include <array>
#include <utility>
#include <vector>

namespace bianchi {

struct ADMState {
  SymMatrix g;
  SymMatrix k;

  /// packed g followed by packed k
  Eigen::VectorXd pack() const;
  static ADMState unpack(int n, const Eigen::VectorXd& v);
};

/// Diagonal (g, k) on a Milnor flat.
struct FlatADMState {
  double x = 1.0, y = 1.0, z = 1.0;
  double kx = 0.0, ky = 0.0, kz = 0.0;

  Eigen::VectorXd pack() const;
  static FlatADMState unpack(const Eigen::VectorXd& v);
  ADMState embed() const;
};

struct KasnerParams {
  double p1 = 0.0, p2 = 0.0, p3 = 0.0;
};

/// (q, p) = (g, -2k) and back.
std::pair<SymMatrix, SymMatrix> to_qp(const ADMState& s);
ADMState from_qp(const SymMatrix& q, const SymMatrix& p);

/// dg = -2k, dk = -lambda g + Ric(g) + tr(a) k - 2 k g^-1 k.
ADMState adm_rhs(const StructureConstants& c, const ADMState& s, double lambda = 0.0);

/// r(g) + (tr a)^2 - tr(a^2) - 2 lambda.
double hamiltonian_residual(const StructureConstants& c, const ADMState& s, double lambda = 0.0);

/// div k in the working basis.
Eigen::VectorXd momentum_residual(const StructureConstants& c, const ADMState& s);

FlatADMState flat_einstein_rhs(const MilnorParams& m, const FlatADMState& s, double lambda = 0.0);
/// r + 2 (kx ky/(xy) + kx kz/(xz) + ky kz/(yz)) - 2 lambda.
double flat_hamiltonian_residual(const MilnorParams& m, const FlatADMState& s, double lambda = 0.0);

/// (t^{2p_i}, -p_i t^{2p_i - 1}). Throws ValidationError for t <= 0.
FlatADMState kasner_exact(const KasnerParams& p, double t);
/// sum p = 1 and sum p^2 = 1 within 1e-12.
bool kasner_check(const KasnerParams& p);

/// max over samples of max(|x - y|, |kx - ky|) for a flat trajectory; the
/// parameters must satisfy a = b = c.
double taubnut_deviation(const Trajectory& traj, const MilnorParams& m);

/// Riemannian-signature variant: dg = -2k, dk = -Ric + tr(a) k - 2 k g^-1 k.
ADMState wick_rhs(const StructureConstants& c, const ADMState& s);
/// r + tr(a^2) - (tr a)^2.
double wick_residual(const StructureConstants& c, const ADMState& s);

/// Initial data on a flat: the Hamiltonian constraint is linear in each
/// Weingarten eigenvalue, so given kx and ky it fixes kz. Throws
/// ValidationError when kx/x + ky/y = 0 makes the equation degenerate.
double complete_flat_kz(const MilnorParams& m, double x, double y, double z, double kx, double ky,
                        double lambda = 0.0);

/// Scales a Weingarten direction (dx, dy, dz) so that a = s d satisfies the
/// Hamiltonian constraint. Returns both roots, the expanding one (tr a < 0)
/// first; empty when no real root exists.
std::vector<FlatADMState> scale_flat_data(const MilnorParams& m, double x, double y, double z,
                                          const std::array<double, 3>& direction,
                                          double lambda = 0.0);

struct EinsteinOptions {
  double lambda = 0.0;
  bool allow_invalid = false;
  /// Initial residuals must be below this times the data scale.
  double validity_tol = 1e-8;
};

/// Full (g, k) run. Channels r, H, det, ham_residual, mom_residual_max.
Trajectory run_einstein(const StructureConstants& c, const ADMState& s0, IntegrationConfig cfg,
                        const EinsteinOptions& opt = {});

/// Run on a Milnor flat with state (x, y, z, kx, ky, kz); same channels.
Trajectory run_einstein_flat(const MilnorParams& m, const FlatADMState& s0, IntegrationConfig cfg,
                             const EinsteinOptions& opt = {});

struct ConstraintReport {
  double hamiltonian = 0.0;
  Eigen::VectorXd momentum;
  double scale = 1.0;
  bool valid = false;
};

ConstraintReport check_constraints(const StructureConstants& c, const ADMState& s, double lambda,
                                   double tol = 1e-8);

}  // namespace bianchi
