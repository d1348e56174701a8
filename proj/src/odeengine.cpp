#include "bianchi/odeengine.hpp"

#include "bianchi/errors.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <stdexcept>

namespace bianchi {

namespace {

// Dormand-Prince 5(4) tableau.
constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                 a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                 a65 = -5103.0 / 18656;
constexpr double a71 = 35.0 / 384, a73 = 500.0 / 1113, a74 = 125.0 / 192, a75 = -2187.0 / 6784,
                 a76 = 11.0 / 84;
// difference between the 5th and embedded 4th order weights
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                 e6 = 22.0 / 525, e7 = -1.0 / 40;

constexpr double kSafe = 0.9;
constexpr double kBeta = 0.04;
constexpr double kExpo = 0.2 - kBeta * 0.75;
constexpr double kFacMin = 0.2;   // largest shrink 1/5
constexpr double kFacMax = 10.0;  // largest growth

enum class EvalFailure { None, NonFinite, Domain };

struct Eval {
  Eigen::VectorXd value;
  EvalFailure failure = EvalFailure::None;
  std::string what;
};

Eval evaluate(const Field& f, double t, const Eigen::VectorXd& x) {
  Eval e;
  try {
    e.value = f(t, x);
  } catch (const std::domain_error& ex) {
    e.failure = EvalFailure::Domain;
    e.what = ex.what();
    return e;
  }
  if (e.value.size() != x.size()) throw DimensionError("integrate: field changed state dimension");
  if (!e.value.allFinite()) {
    e.failure = EvalFailure::NonFinite;
    e.what = "non-finite derivative";
  }
  return e;
}

double error_norm(const Eigen::VectorXd& err, const Eigen::VectorXd& x0, const Eigen::VectorXd& x1,
                  double rtol, double atol) {
  const Eigen::ArrayXd sc = atol + rtol * x0.cwiseAbs().cwiseMax(x1.cwiseAbs()).array();
  return std::sqrt((err.array() / sc).square().mean());
}

double initial_step(const Field& f, double t0, const Eigen::VectorXd& x0, const Eigen::VectorXd& f0,
                    double dir, double span, const IntegrationConfig& cfg) {
  const Eigen::ArrayXd sc = cfg.atol + cfg.rtol * x0.cwiseAbs().array();
  const auto rms = [&](const Eigen::VectorXd& v) {
    return std::sqrt((v.array() / sc).square().mean());
  };
  const double d0 = rms(x0), d1 = rms(f0);
  double h0 = (d0 < 1e-5 || d1 < 1e-5) ? 1e-6 : 0.01 * d0 / d1;
  h0 = std::min({h0, span, cfg.max_step});
  const Eval f1 = evaluate(f, t0 + dir * h0, x0 + dir * h0 * f0);
  double h1 = std::max(1e-6, h0 * 1e-3);
  if (f1.failure == EvalFailure::None) {
    const double d2 = rms(f1.value - f0) / h0;
    const double dm = std::max(d1, d2);
    if (dm > 1e-15) h1 = std::pow(0.01 / dm, 0.2);
  }
  return std::min({100.0 * h0, h1, span, cfg.max_step});
}

}  // namespace

std::string_view to_string(Termination t) {
  switch (t) {
    case Termination::Completed: return "completed";
    case Termination::BlowUp: return "blow-up";
    case Termination::Collapse: return "collapse";
    case Termination::StepUnderflow: return "step-underflow";
    case Termination::NonFinite: return "non-finite";
    case Termination::MaxSteps: return "max-steps";
  }
  return "unknown";
}

const std::vector<double>& Trajectory::channel(std::string_view name) const {
  for (std::size_t i = 0; i < channel_names.size(); ++i)
    if (channel_names[i] == name) return channels[i];
  throw std::out_of_range("Trajectory: no channel " + std::string(name));
}

bool Trajectory::has_channel(std::string_view name) const {
  return std::find(channel_names.begin(), channel_names.end(), name) != channel_names.end();
}

std::vector<double> Trajectory::component(int i) const {
  std::vector<double> out;
  out.reserve(states.size());
  for (const auto& s : states) out.push_back(s(i));
  return out;
}

double Trajectory::max_abs_channel(std::string_view name) const {
  double m = 0.0;
  for (double v : channel(name)) m = std::max(m, std::abs(v));
  return m;
}

void IntegrationConfig::validate() const {
  if (!std::isfinite(t0) || !std::isfinite(t1)) throw ValidationError("integrate: non-finite time span");
  if (t1 == t0) throw ValidationError("integrate: t1 equals t0");
  if (!(rtol > 0.0) || !(atol > 0.0)) throw ValidationError("integrate: tolerances must be positive");
  if (!(max_step > 0.0)) throw ValidationError("integrate: max_step must be positive");
  if (!(blowup_norm > 0.0) || !(min_det > 0.0))
    throw ValidationError("integrate: event thresholds must be positive");
  if (initial_step < 0.0) throw ValidationError("integrate: negative initial step");
}

Trajectory integrate(const Field& field, const Eigen::VectorXd& x0, const IntegrationConfig& cfg,
                     const DiagnosticSpec& diag, std::vector<std::string> labels) {
  cfg.validate();
  if (!x0.allFinite()) throw ValidationError("integrate: non-finite initial state");
  if (!labels.empty() && static_cast<Eigen::Index>(labels.size()) != x0.size())
    throw DimensionError("integrate: label count differs from state size");

  Trajectory traj;
  traj.state_labels = std::move(labels);
  traj.channel_names = diag.names;
  traj.channels.assign(diag.names.size(), {});

  int det_index = -1;
  if (!cfg.det_channel.empty()) {
    const auto it = std::find(diag.names.begin(), diag.names.end(), cfg.det_channel);
    if (it == diag.names.end()) throw ValidationError("integrate: unknown det channel " + cfg.det_channel);
    det_index = static_cast<int>(it - diag.names.begin());
  }

  const double dir = cfg.t1 > cfg.t0 ? 1.0 : -1.0;
  const auto ahead = [dir](double a, double b) { return dir * (a - b) > 0.0; };

  std::vector<double> samples;
  for (double s : cfg.sample_times)
    if (ahead(s, cfg.t0) && !ahead(s, cfg.t1)) samples.push_back(s);
  std::sort(samples.begin(), samples.end(), [dir](double a, double b) { return dir * a < dir * b; });
  samples.erase(std::unique(samples.begin(), samples.end()), samples.end());
  if (samples.empty() || samples.back() != cfg.t1) samples.push_back(cfg.t1);
  const bool record_all = cfg.sample_times.empty();

  // Returns the diagnostics, or nullopt (with traj.status set) when the
  // state has left the domain.
  const auto diagnostics = [&](double t, const Eigen::VectorXd& x) -> std::optional<std::vector<double>> {
    if (!diag.eval) return std::vector<double>{};
    try {
      auto v = diag.eval(t, x);
      if (v.size() != diag.names.size()) throw DimensionError("integrate: diagnostic count mismatch");
      return v;
    } catch (const std::domain_error& ex) {
      traj.status = Termination::Collapse;
      traj.message = ex.what();
      return std::nullopt;
    }
  };
  const auto record = [&](double t, const Eigen::VectorXd& x, const std::vector<double>& d) {
    traj.times.push_back(t);
    traj.states.push_back(x);
    for (std::size_t i = 0; i < d.size(); ++i) traj.channels[i].push_back(d[i]);
  };
  // Checks the events at an accepted state; returns true if the run must stop.
  const auto events = [&](const Eigen::VectorXd& x, const std::vector<double>& d) {
    if (x.lpNorm<Eigen::Infinity>() > cfg.blowup_norm) {
      traj.status = Termination::BlowUp;
      traj.message = "state norm exceeded " + std::to_string(cfg.blowup_norm);
      return true;
    }
    if (det_index >= 0 && d[det_index] < cfg.min_det) {
      traj.status = Termination::Collapse;
      traj.message = cfg.det_channel + " fell below " + std::to_string(cfg.min_det);
      return true;
    }
    return false;
  };

  double t = cfg.t0;
  Eigen::VectorXd x = x0;
  {
    auto d0 = diagnostics(t, x);
    if (!d0) return traj;
    record(t, x, *d0);
    if (events(x, *d0)) return traj;
  }
  Eval f0 = evaluate(field, t, x);
  if (f0.failure != EvalFailure::None) {
    traj.status = f0.failure == EvalFailure::Domain ? Termination::Collapse : Termination::NonFinite;
    traj.message = f0.what;
    return traj;
  }
  Eigen::VectorXd k1 = f0.value;

  const double span = std::abs(cfg.t1 - cfg.t0);
  double h = cfg.initial_step > 0.0 ? std::min(cfg.initial_step, span)
                                    : initial_step(field, t, x, k1, dir, span, cfg);
  double facold = 1e-4;
  std::size_t next = 0;
  EvalFailure last_failure = EvalFailure::None;
  std::string last_what;
  const double eps = std::numeric_limits<double>::epsilon();

  for (long step = 0;; ++step) {
    if (step >= cfg.max_steps) {
      traj.status = Termination::MaxSteps;
      traj.message = "step budget exhausted at t=" + std::to_string(t);
      return traj;
    }
    if (h < 16.0 * eps * std::max(1.0, std::abs(t))) {
      if (last_failure == EvalFailure::Domain) traj.status = Termination::Collapse;
      else if (last_failure == EvalFailure::NonFinite) traj.status = Termination::NonFinite;
      else traj.status = Termination::StepUnderflow;
      traj.message = "step size underflow at t=" + std::to_string(t) +
                     (last_what.empty() ? "" : " (" + last_what + ")");
      return traj;
    }
    h = std::min(h, cfg.max_step);
    const double target = samples[next];
    double hs = h;
    bool hits = false;
    const double remaining = dir * (target - t);
    if (hs >= remaining * (1.0 - 1e-12)) {
      hs = remaining;
      hits = true;
    }
    const double sh = dir * hs;

    // stages; a failing stage rejects the step
    Eigen::VectorXd k2, k3, k4, k5, k6, k7, xn;
    Eval ev;
    auto stage = [&](double tt, const Eigen::VectorXd& xx, Eigen::VectorXd& out) {
      ev = evaluate(field, tt, xx);
      if (ev.failure != EvalFailure::None) return false;
      out = std::move(ev.value);
      return true;
    };
    bool ok = stage(t + c2 * sh, x + sh * a21 * k1, k2) &&
              stage(t + c3 * sh, x + sh * (a31 * k1 + a32 * k2), k3) &&
              stage(t + c4 * sh, x + sh * (a41 * k1 + a42 * k2 + a43 * k3), k4) &&
              stage(t + c5 * sh, x + sh * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4), k5) &&
              stage(t + sh, x + sh * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5), k6);
    if (ok) {
      xn = x + sh * (a71 * k1 + a73 * k3 + a74 * k4 + a75 * k5 + a76 * k6);
      ok = stage(hits ? target : t + sh, xn, k7);
    }
    if (!ok) {
      last_failure = ev.failure;
      last_what = ev.what;
      h = hs * kFacMin;
      continue;
    }

    const Eigen::VectorXd err = sh * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);
    const double en = error_norm(err, x, xn, cfg.rtol, cfg.atol);
    if (!std::isfinite(en)) {
      last_failure = EvalFailure::NonFinite;
      last_what = "non-finite error estimate";
      h = hs * kFacMin;
      continue;
    }
    const double fac11 = std::pow(en, kExpo);
    if (en > 1.0) {
      h = hs / std::min(1.0 / kFacMin, fac11 / kSafe);
      continue;
    }

    // accepted
    last_failure = EvalFailure::None;
    last_what.clear();
    double fac = fac11 / std::pow(facold, kBeta);
    fac = std::clamp(fac / kSafe, 1.0 / kFacMax, 1.0 / kFacMin);
    facold = std::max(en, 1e-4);
    const double hnew = hs / fac;

    t = hits ? target : t + sh;
    x = std::move(xn);
    k1 = std::move(k7);

    const bool at_sample = hits;
    const bool finished = hits && next + 1 == samples.size();
    if (hits) ++next;
    const bool need_diag = record_all || at_sample || det_index >= 0;
    std::vector<double> d;
    if (need_diag) {
      auto dv = diagnostics(t, x);
      if (!dv) return traj;
      d = std::move(*dv);
    }
    const bool stop = events(x, d);
    if (record_all || at_sample || stop) record(t, x, d);
    if (stop || finished) return traj;
    // a step cut short to land on a sample should not throttle the next one
    h = hits ? std::max(hnew, h) : hnew;
  }
}

Eigen::VectorXd flow_map(const Field& field, const Eigen::VectorXd& x0, double t0, double t1,
                         double rtol, double atol) {
  IntegrationConfig cfg;
  cfg.t0 = t0;
  cfg.t1 = t1;
  cfg.rtol = rtol;
  cfg.atol = atol;
  cfg.sample_times = {t1};
  const Trajectory tr = integrate(field, x0, cfg);
  if (!tr.completed())
    throw std::runtime_error("flow_map: integration ended early (" + std::string(to_string(tr.status)) +
                             "): " + tr.message);
  return tr.states.back();
}

}  // namespace bianchi
