#include "bianchi/trajectory_io.hpp"

#include "bianchi/errors.hpp"

#include <charconv>
#include <cmath>
#include <ostream>

namespace bianchi {

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  const auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 17);
  return std::string(buf, res.ptr);
}

void write_csv(std::ostream& out, const Trajectory& traj) {
  const std::size_t dim = traj.states.empty() ? traj.state_labels.size() : traj.states.front().size();
  out << 't';
  for (std::size_t i = 0; i < dim; ++i)
    out << ',' << (i < traj.state_labels.size() ? traj.state_labels[i] : "s" + std::to_string(i));
  for (const auto& name : traj.channel_names) out << ',' << name;
  out << '\n';
  for (std::size_t r = 0; r < traj.size(); ++r) {
    out << format_number(traj.times[r]);
    for (Eigen::Index i = 0; i < traj.states[r].size(); ++i) out << ',' << format_number(traj.states[r](i));
    for (const auto& ch : traj.channels) out << ',' << format_number(ch[r]);
    out << '\n';
  }
}

nlohmann::json to_json(const Trajectory& traj) {
  nlohmann::json j;
  j["status"] = std::string(to_string(traj.status));
  j["message"] = traj.message;
  j["labels"] = traj.state_labels;
  j["times"] = traj.times;
  auto states = nlohmann::json::array();
  for (const auto& s : traj.states) states.push_back(std::vector<double>(s.data(), s.data() + s.size()));
  j["states"] = std::move(states);
  auto channels = nlohmann::json::array();
  for (std::size_t i = 0; i < traj.channel_names.size(); ++i)
    channels.push_back({{"name", traj.channel_names[i]}, {"values", traj.channels[i]}});
  j["channels"] = std::move(channels);
  return j;
}

Termination parse_termination(std::string_view s) {
  for (Termination t : {Termination::Completed, Termination::BlowUp, Termination::Collapse,
                        Termination::StepUnderflow, Termination::NonFinite, Termination::MaxSteps})
    if (to_string(t) == s) return t;
  throw ValidationError("unknown termination status: " + std::string(s));
}

Trajectory trajectory_from_json(const nlohmann::json& j) {
  Trajectory t;
  t.status = parse_termination(j.at("status").get<std::string>());
  t.message = j.value("message", std::string());
  t.state_labels = j.value("labels", std::vector<std::string>{});
  t.times = j.at("times").get<std::vector<double>>();
  for (const auto& row : j.at("states")) {
    const auto v = row.get<std::vector<double>>();
    t.states.push_back(Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size())));
  }
  if (t.states.size() != t.times.size()) throw ValidationError("trajectory JSON: states and times differ in length");
  for (const auto& ch : j.at("channels")) {
    t.channel_names.push_back(ch.at("name").get<std::string>());
    t.channels.push_back(ch.at("values").get<std::vector<double>>());
    if (t.channels.back().size() != t.times.size())
      throw ValidationError("trajectory JSON: channel " + t.channel_names.back() + " has wrong length");
  }
  return t;
}

nlohmann::json constants_to_json(const StructureConstants& c) {
  const int n = c.dim();
  auto cc = nlohmann::json::array();
  for (int i = 0; i < n; ++i) {
    auto row = nlohmann::json::array();
    for (int j = 0; j < n; ++j) {
      std::vector<double> ks(n);
      for (int k = 0; k < n; ++k) ks[k] = c(i, j, k);
      row.push_back(ks);
    }
    cc.push_back(std::move(row));
  }
  return {{"n", n}, {"C", std::move(cc)}};
}

StructureConstants constants_from_json(const nlohmann::json& j) {
  if (!j.is_object() || !j.contains("n") || !j.contains("C"))
    throw ValidationError("structure constants JSON needs \"n\" and \"C\"");
  const int n = j.at("n").get<int>();
  if (n < 1) throw DimensionError("structure constants: n must be positive");
  const auto& cc = j.at("C");
  if (!cc.is_array() || static_cast<int>(cc.size()) != n)
    throw DimensionError("structure constants: C must have n rows");
  std::vector<double> t(static_cast<std::size_t>(n) * n * n);
  for (int i = 0; i < n; ++i) {
    if (static_cast<int>(cc[i].size()) != n) throw DimensionError("structure constants: ragged C");
    for (int jj = 0; jj < n; ++jj) {
      const auto ks = cc[i][jj].get<std::vector<double>>();
      if (static_cast<int>(ks.size()) != n) throw DimensionError("structure constants: ragged C");
      for (int k = 0; k < n; ++k) t[(i * n + jj) * n + k] = ks[k];
    }
  }
  return StructureConstants::from_tensor(n, t);
}

}  // namespace bianchi
