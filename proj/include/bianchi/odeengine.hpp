#pragma once

// Explicit adaptive integration (Dormand-Prince 5(4) with PI step control)
// over flat state vectors, with diagnostics recorded per sample and
// event-based termination. Events do not throw: they end the run and are
// reported through Trajectory::status, keeping everything recorded so far.

#include <Eigen/Dense>

#include <functional>
#include <limits>
#include <string>
#include <string_view>
#include <vector>

namespace bianchi {

enum class Termination { Completed, BlowUp, Collapse, StepUnderflow, NonFinite, MaxSteps };

std::string_view to_string(Termination t);

struct Trajectory {
  std::vector<double> times;
  std::vector<Eigen::VectorXd> states;
  std::vector<std::string> state_labels;
  std::vector<std::string> channel_names;
  std::vector<std::vector<double>> channels;  // channels[c][sample]
  Termination status = Termination::Completed;
  std::string message;

  std::size_t size() const { return times.size(); }
  bool completed() const { return status == Termination::Completed; }
  /// Throws std::out_of_range for an unknown name.
  const std::vector<double>& channel(std::string_view name) const;
  bool has_channel(std::string_view name) const;
  /// One state component over time.
  std::vector<double> component(int i) const;
  double max_abs_channel(std::string_view name) const;
};

struct IntegrationConfig {
  double t0 = 0.0;
  double t1 = 1.0;
  double rtol = 1e-9;
  double atol = 1e-12;
  double max_step = std::numeric_limits<double>::infinity();
  double initial_step = 0.0;  // 0 picks one automatically
  double blowup_norm = 1e12;
  double min_det = 1e-12;
  /// Diagnostic channel compared against min_det; empty disables the check.
  std::string det_channel;
  /// When non-empty, only these times (plus t0 and the final time) are
  /// recorded; steps are shortened to land on them exactly. Otherwise every
  /// accepted step is recorded.
  std::vector<double> sample_times;
  long max_steps = 10'000'000;

  /// Throws ValidationError on t1 == t0, non-positive tolerances and the like.
  void validate() const;
};

using Field = std::function<Eigen::VectorXd(double, const Eigen::VectorXd&)>;
using Diagnostics = std::function<std::vector<double>(double, const Eigen::VectorXd&)>;

struct DiagnosticSpec {
  std::vector<std::string> names;
  Diagnostics eval;  // may be empty when names is empty
};

/// Integrates x' = field(t, x) from cfg.t0 to cfg.t1 (either direction).
/// A field that throws std::domain_error (for instance on a metric that is no
/// longer positive definite) is treated as a collapse of the state.
Trajectory integrate(const Field& field, const Eigen::VectorXd& x0, const IntegrationConfig& cfg,
                     const DiagnosticSpec& diag = {}, std::vector<std::string> labels = {});

/// Endpoint of integrate. Throws std::runtime_error if the run ends in an event.
Eigen::VectorXd flow_map(const Field& field, const Eigen::VectorXd& x0, double t0, double t1,
                         double rtol = 1e-9, double atol = 1e-12);

}  // namespace bianchi
