#pragma once

// Serialization: trajectories as CSV or JSON, structure constants as JSON.
// Numbers are written in the C locale with 17 significant digits so a
// finite value survives a round trip bit for bit.

#include "bianchi/liealg.hpp"
#include "bianchi/odeengine.hpp"

#include "json.hpp"

#include <iosfwd>
#include <string>

namespace bianchi {

std::string format_number(double v);

/// Header: t, state labels (or s0, s1, ...), then channel names.
void write_csv(std::ostream& out, const Trajectory& traj);

nlohmann::json to_json(const Trajectory& traj);
Trajectory trajectory_from_json(const nlohmann::json& j);

Termination parse_termination(std::string_view s);

/// {"n": n, "C": C[i][j][k]}.
nlohmann::json constants_to_json(const StructureConstants& c);
/// Enforces antisymmetry (ValidationError) and shape (DimensionError).
StructureConstants constants_from_json(const nlohmann::json& j);

}  // namespace bianchi
