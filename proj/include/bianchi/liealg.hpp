#pragma once

#include "bianchi/symmatrix.hpp"

#include <Eigen/Dense>

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace bianchi {

/// Structure constants C_ij^k of a Lie algebra in a fixed basis:
/// [e_i, e_j] = C_ij^k e_k (indices 0-based).
///
/// Antisymmetry in (i,j) is a storage invariant: set(i,j,k,v) also writes
/// C_ji^k = -v, and C_ii^k is always zero. The Killing matrix
/// B_ab = C_ai^j C_bj^i is recomputed on every mutation, so const objects can
/// be shared across threads.
class StructureConstants {
public:
  explicit StructureConstants(int n);

  /// Builds from a full n^3 tensor t[(i*n + j)*n + k]. Throws ValidationError
  /// if |C_ij^k + C_ji^k| exceeds tol or a diagonal C_ii^k is nonzero.
  static StructureConstants from_tensor(int n, std::span<const double> t, double tol = 1e-12);

  int dim() const { return n_; }
  double operator()(int i, int j, int k) const { return c_[(i * n_ + j) * n_ + k]; }
  void set(int i, int j, int k, double v);
  /// Sets [e_i, e_j] = sum_k v[k] e_k.
  void set_bracket(int i, int j, std::span<const double> v);

  /// Coordinates of [x, y].
  Eigen::VectorXd bracket(const Eigen::VectorXd& x, const Eigen::VectorXd& y) const;
  /// Matrix of ad_{e_i}: column j holds [e_i, e_j].
  Eigen::MatrixXd ad(int i) const;
  /// Trace form t_i = tr(ad_{e_i}) = sum_j C_ij^j.
  Eigen::VectorXd trace_form() const;
  double max_abs() const;

  const SymMatrix& killing() const { return killing_; }
  std::span<const double> tensor() const { return c_; }

private:
  void refresh_killing();

  int n_;
  std::vector<double> c_;
  SymMatrix killing_;
};

/// Constants in the basis f_a = sum_i g(i,a) e_i (columns of an invertible g).
StructureConstants transport(const StructureConstants& c, const Eigen::MatrixXd& g);

struct MilnorParams {
  double a = 0.0;
  double b = 0.0;
  double c = 0.0;
  friend bool operator==(const MilnorParams&, const MilnorParams&) = default;
};

enum class BianchiClass { I, II, VI0, VII0, VIII, IX };

std::string_view to_string(BianchiClass k);

double jacobi_residual(const StructureConstants& c);
/// tr(ad_{e_i}) = 0 for all i, within 1e-12 * max(1, max|C|).
bool is_unimodular(const StructureConstants& c);
SymMatrix killing_form(const StructureConstants& c);

/// [u,v] = a w, [v,w] = b u, [w,u] = c v with (u,v,w) = (e0,e1,e2).
StructureConstants from_milnor(const MilnorParams& m);

struct MilnorFrame {
  Eigen::Matrix3d basis;  // columns u, v, w; q-orthonormal, positively oriented
  MilnorParams params;    // a >= b >= c
};

/// Diagonalizes the bracket of a unimodular 3-algebra in a q-orthonormal
/// Milnor basis.
///
/// In a q-orthonormal frame the bracket factors as [x,y] = L(x cross y) with
/// L self-adjoint exactly when the algebra is unimodular. The eigenvectors of
/// L, reordered so the eigenvalues come out a >= b >= c and sign-fixed to keep
/// the orientation of the frame, form the Milnor basis.
MilnorFrame milnor_frame(const StructureConstants& c, const SymMatrix& q);

/// Largest |C_ij^k| over entries that a Milnor basis forces to vanish, plus the
/// mismatch of the three Milnor entries against params.
double milnor_defect(const StructureConstants& transported, const MilnorParams& m);

struct Classification {
  BianchiClass label;
  MilnorParams raw;         // milnor_frame eigenvalues at q = I
  MilnorParams normalized;  // sign-flipped so positives dominate, ascending
  std::string sign_pattern; // e.g. "(0,-,+)"
};

/// Classifies a unimodular 3-algebra. An eigenvalue counts as zero when
/// |lambda| <= eps = 1e-9 * max|lambda| (absolute 1e-12 if all are tiny); a
/// value in (eps, 1e3 * eps] is ambiguous and rejected with ValidationError.
Classification classify(const StructureConstants& c);

bool is_bi_invariant(const StructureConstants& c, const SymMatrix& q, double tol = 1e-10);

/// Registry of named unimodular 3-algebras: abelian, heis, euc, sol, sl2, so3.
std::optional<MilnorParams> preset_params(std::string_view name);
std::vector<std::string> preset_names();
StructureConstants preset(std::string_view name);

}  // namespace bianchi
