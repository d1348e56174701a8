#pragma once

// First-order flows on the space of left-invariant metrics.

#include "bianchi/liealg.hpp"
#include "bianchi/odeengine.hpp"
#include "bianchi/symmatrix.hpp"

#include <array>
#include <string_view>

namespace bianchi {

enum class FlowKind { RicciField, NormalizedRicciFlow, HilbertGradient, ProjectiveCubic };

std::string_view to_string(FlowKind k);
/// Accepts "ricci", "normalized", "hilbert", "cubic". Throws ValidationError.
FlowKind parse_flow_kind(std::string_view s);

/// Ric(q) seen as a tangent vector at q.
SymMatrix ricci_field(const StructureConstants& c, const SymMatrix& q);

/// -2 Ric(q) + (2 r(q) / n) q, with the pointwise scalar curvature.
SymMatrix bianchi_ricci_rhs(const StructureConstants& c, const SymMatrix& q);

/// Einstein field Ric(q) - (r(q)/2) q.
///
/// Note: the metric gradient of H = r sqrt(det q) for tr(q^-1 p q^-1 p) is
/// -sqrt(det q) times this field (see hilbert_metric_gradient), so H decreases
/// along it.
SymMatrix hilbert_gradient(const StructureConstants& c, const SymMatrix& q);

/// The gradient of hilbert_action, -sqrt(det q) (Ric - r q / 2), valid for
/// unimodular algebras.
SymMatrix hilbert_metric_gradient(const StructureConstants& c, const SymMatrix& q);

/// Volume-normalized flow on a Milnor flat restricted to xyz = 1, as cubic
/// polynomials. Throws ValidationError unless |xyz - 1| <= 1e-10.
std::array<double, 3> normalized_flat_rhs(const MilnorParams& m, double x, double y, double z);

/// (x(b^2x^2 - (cy-az)^2), y(c^2y^2 - (az-bx)^2), z(a^2z^2 - (bx-cy)^2)):
/// the Ricci map on a flat up to the positive factor 1/(2xyz).
std::array<double, 3> projective_cubic_rhs(const MilnorParams& m, double x, double y, double z);

/// Milnor parameters of constants that are already in Milnor form
/// (from_milnor output up to 1e-12); throws ValidationError otherwise.
MilnorParams milnor_params_of(const StructureConstants& c);

/// Integrates the chosen flow from q0. State is the packed upper triangle of q;
/// channels r, H, det, dist0. ProjectiveCubic needs constants in Milnor form and
/// a diagonal q0 (it moves only the diagonal).
Trajectory run_flow(FlowKind kind, const StructureConstants& c, const SymMatrix& q0,
                    IntegrationConfig cfg);

}  // namespace bianchi
