#include "cli.hpp"

#include "bianchi/curvature.hpp"
#include "bianchi/einstein.hpp"
#include "bianchi/errors.hpp"
#include "bianchi/liealg.hpp"
#include "bianchi/ricciflow.hpp"
#include "bianchi/symspace.hpp"
#include "bianchi/trajectory_io.hpp"
#include "bianchi/wainwright.hpp"

#include "CLI11.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <future>
#include <iostream>
#include <optional>
#include <sstream>

namespace bianchi::cli {

namespace {

struct Options {
  std::string algebra;
  std::string constants;
  std::string milnor;
  std::string out;
  std::string format = "csv";
  double t0 = 0.0;
  double t1 = 1.0;
  double dt = 0.0;
  double rtol = 1e-9;
  double atol = 1e-12;
  double lambda = 0.0;
  bool allow_invalid = false;
  int jobs = 1;

  std::vector<std::string> q0;
  std::string p0;
  std::string kind = "normalized";
  std::string g, k, kasner;
  bool flat = false;
  std::vector<std::string> state;
  double gamma = 1.0;
  int dim = 3;
};

double parse_number(std::string_view s) {
  const auto trim = [](std::string_view v) {
    while (!v.empty() && v.front() == ' ') v.remove_prefix(1);
    while (!v.empty() && v.back() == ' ') v.remove_suffix(1);
    return v;
  };
  s = trim(s);
  const auto slash = s.find('/');
  if (slash != std::string_view::npos) {
    const double den = parse_number(s.substr(slash + 1));
    if (den == 0.0) throw ValidationError("zero denominator in '" + std::string(s) + "'");
    return parse_number(s.substr(0, slash)) / den;
  }
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  double v = 0.0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size() || s.empty())
    throw ValidationError("not a number: '" + std::string(s) + "'");
  return v;
}

SymMatrix parse_matrix(const std::string& s, int n, const char* what) {
  const auto v = parse_list(s);
  const int m = static_cast<int>(v.size());
  if (m == n) return SymMatrix::diagonal(v);
  if (m == SymMatrix::packed_size(n)) return SymMatrix::from_upper(n, v);
  throw ValidationError(std::string(what) + ": expected " + std::to_string(n) + " diagonal or " +
                        std::to_string(SymMatrix::packed_size(n)) + " upper-triangle values");
}

std::array<double, 3> parse_triple(const std::string& s, const char* what) {
  const auto v = parse_list(s);
  if (v.size() != 3) throw ValidationError(std::string(what) + ": expected three values");
  return {v[0], v[1], v[2]};
}

StructureConstants load_algebra(const Options& o) {
  const int sources = !o.algebra.empty() + !o.constants.empty() + !o.milnor.empty();
  if (sources != 1) throw ValidationError("give exactly one of --algebra, --constants, --milnor");
  if (!o.algebra.empty()) return preset(o.algebra);
  if (!o.milnor.empty()) {
    const auto t = parse_triple(o.milnor, "--milnor");
    return from_milnor({t[0], t[1], t[2]});
  }
  std::ifstream in(o.constants);
  if (!in) throw ValidationError("cannot open " + o.constants);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("malformed JSON: ") + e.what());
  }
  return constants_from_json(j);
}

MilnorParams milnor_of(const Options& o, const StructureConstants& c) {
  if (!o.algebra.empty()) {
    if (auto m = preset_params(o.algebra)) return *m;
  }
  return milnor_params_of(c);
}

IntegrationConfig make_config(const Options& o) {
  IntegrationConfig cfg;
  cfg.t0 = o.t0;
  cfg.t1 = o.t1;
  cfg.rtol = o.rtol;
  cfg.atol = o.atol;
  if (o.dt < 0.0) throw ValidationError("--dt must be positive");
  if (o.dt > 0.0) {
    const double dir = o.t1 > o.t0 ? 1.0 : -1.0;
    const auto count = static_cast<long>(std::floor(std::abs(o.t1 - o.t0) / o.dt + 1e-9));
    for (long i = 1; i <= count; ++i) cfg.sample_times.push_back(o.t0 + dir * o.dt * static_cast<double>(i));
  }
  cfg.validate();
  return cfg;
}

std::string numbers(std::span<const double> v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? " " : "") + format_number(v[i]);
  return s;
}

std::string numbers(const Eigen::VectorXd& v) { return numbers(std::span<const double>(v.data(), v.size())); }

std::string indexed_path(const std::string& path, std::size_t i, std::size_t count) {
  if (count == 1) return path;
  const std::filesystem::path p(path);
  return (p.parent_path() / (p.stem().string() + "_" + std::to_string(i) + p.extension().string())).string();
}

void emit(const Trajectory& t, const Options& o, const std::string& path, std::ostream& out) {
  std::ostringstream buf;
  if (o.format == "json") buf << to_json(t).dump(1) << '\n';
  else write_csv(buf, t);
  if (path.empty()) {
    out << buf.str();
    return;
  }
  std::ofstream f(path, std::ios::binary);
  if (!f) throw ValidationError("cannot write " + path);
  f << buf.str();
}

int report(const std::vector<Trajectory>& runs, const Options& o, std::ostream& out, std::ostream& err) {
  if (runs.size() > 1 && o.out.empty()) throw ValidationError("several runs need --out");
  int code = kOk;
  for (std::size_t i = 0; i < runs.size(); ++i) {
    emit(runs[i], o, o.out.empty() ? "" : indexed_path(o.out, i, runs.size()), out);
    err << "status" << (runs.size() > 1 ? "[" + std::to_string(i) + "]" : "") << ": "
        << to_string(runs[i].status);
    if (!runs[i].message.empty()) err << " (" << runs[i].message << ")";
    err << '\n';
    if (!runs[i].completed()) code = kEvent;
  }
  return code;
}

// Runs jobs with at most o.jobs in flight; results keep input order.
template <class Fn>
std::vector<Trajectory> fan_out(std::size_t count, int jobs, Fn fn) {
  std::vector<Trajectory> results(count);
  const std::size_t width = static_cast<std::size_t>(std::max(1, jobs));
  for (std::size_t start = 0; start < count; start += width) {
    std::vector<std::future<Trajectory>> batch;
    for (std::size_t i = start; i < std::min(count, start + width); ++i)
      batch.push_back(std::async(width == 1 ? std::launch::deferred : std::launch::async, fn, i));
    for (std::size_t i = 0; i < batch.size(); ++i) results[start + i] = batch[i].get();
  }
  return results;
}

int cmd_classify(const Options& o, std::ostream& out) {
  const StructureConstants c = load_algebra(o);
  if (c.dim() != 3) throw DimensionError("classify needs a 3-dimensional algebra");
  const double jac = jacobi_residual(c);
  const bool uni = is_unimodular(c);
  if (!uni) {
    throw ValidationError("algebra is not unimodular (trace form " + numbers(c.trace_form()) + ")");
  }
  const Classification cl = classify(c);
  out << "class: " << to_string(cl.label) << '\n'
      << "sign_pattern: " << cl.sign_pattern << '\n'
      << "milnor: " << numbers(std::vector<double>{cl.normalized.a, cl.normalized.b, cl.normalized.c}) << '\n'
      << "milnor_raw: " << numbers(std::vector<double>{cl.raw.a, cl.raw.b, cl.raw.c}) << '\n'
      << "jacobi_residual: " << format_number(jac) << '\n'
      << "unimodular: true\n";
  if (cl.label == BianchiClass::VI0 || cl.label == BianchiClass::VII0)
    out << "note: sign patterns follow the bracket computation: (0,+,+) is VII0 (euc), "
           "(0,-,+) is VI0 (sol); some tables print these two patterns swapped\n";
  return kOk;
}

int cmd_ricci(const Options& o, std::ostream& out) {
  const StructureConstants c = load_algebra(o);
  if (o.q0.size() != 1) throw ValidationError("ricci needs exactly one --q0");
  const SymMatrix q = parse_matrix(o.q0.front(), c.dim(), "--q0");
  require_positive_definite(q, "--q0");
  const SymMatrix ric = ricci_general(c, q);
  const double r = scalar_curvature(c, q);
  const double h = hilbert_action(c, q);
  const Eigen::VectorXd z = unimodularity_vector(c, q);
  if (o.format == "json") {
    const auto p = ric.packed();
    nlohmann::json j{{"ricci", std::vector<double>(p.begin(), p.end())},
                     {"r", r},
                     {"H", h},
                     {"unimodularity_vector", std::vector<double>(z.data(), z.data() + z.size())}};
    out << j.dump(1) << '\n';
  } else {
    out << "ricci_packed: " << numbers(ric.packed()) << '\n'
        << "r: " << format_number(r) << '\n'
        << "H: " << format_number(h) << '\n'
        << "unimodularity_vector: " << numbers(z) << '\n';
  }
  return kOk;
}

int cmd_flow(const Options& o, std::ostream& out, std::ostream& err) {
  const StructureConstants c = load_algebra(o);
  const FlowKind kind = parse_flow_kind(o.kind);
  if (o.q0.empty()) throw ValidationError("flow needs --q0");
  std::vector<SymMatrix> starts;
  for (const auto& s : o.q0) {
    starts.push_back(parse_matrix(s, c.dim(), "--q0"));
    require_positive_definite(starts.back(), "--q0");
  }
  const IntegrationConfig cfg = make_config(o);
  auto runs = fan_out(starts.size(), o.jobs, [&](std::size_t i) { return run_flow(kind, c, starts[i], cfg); });
  return report(runs, o, out, err);
}

int cmd_einstein(const Options& o, std::ostream& out, std::ostream& err) {
  const StructureConstants c = load_algebra(o);
  const IntegrationConfig cfg = make_config(o);
  EinsteinOptions eo;
  eo.lambda = o.lambda;
  eo.allow_invalid = o.allow_invalid;
  Trajectory t;
  if (!o.kasner.empty()) {
    if (!o.g.empty() || !o.k.empty()) throw ValidationError("--kasner excludes --g/--k");
    const auto p = parse_triple(o.kasner, "--kasner");
    const KasnerParams kp{p[0], p[1], p[2]};
    t = run_einstein_flat(milnor_of(o, c), kasner_exact(kp, o.t0), cfg, eo);
  } else {
    if (o.g.empty() || o.k.empty()) throw ValidationError("einstein needs --g and --k, or --kasner");
    const ADMState s{parse_matrix(o.g, c.dim(), "--g"), parse_matrix(o.k, c.dim(), "--k")};
    if (o.flat) {
      if (!s.g.is_diagonal() || !s.k.is_diagonal()) throw ValidationError("--flat needs diagonal --g and --k");
      const FlatADMState f{s.g(0, 0), s.g(1, 1), s.g(2, 2), s.k(0, 0), s.k(1, 1), s.k(2, 2)};
      t = run_einstein_flat(milnor_of(o, c), f, cfg, eo);
    } else {
      t = run_einstein(c, s, cfg, eo);
    }
  }
  return report({t}, o, out, err);
}

int cmd_wh(const Options& o, std::ostream& out, std::ostream& err) {
  if (o.state.empty()) throw ValidationError("wh needs --state");
  require_gamma(o.gamma);
  std::vector<WHState> starts;
  for (const auto& s : o.state) {
    const auto v = parse_list(s);
    if (v.size() != 5) throw ValidationError("--state: expected Sigma+,Sigma-,N1,N2,N3");
    starts.push_back({v[0], v[1], v[2], v[3], v[4], o.gamma});
  }
  const IntegrationConfig cfg = make_config(o);
  auto runs = fan_out(starts.size(), o.jobs, [&](std::size_t i) { return run_wh(starts[i], cfg); });
  return report(runs, o, out, err);
}

int cmd_geodesic(const Options& o, std::ostream& out, std::ostream& err) {
  if (o.q0.size() != 1 || o.p0.empty()) throw ValidationError("geodesic needs one --q0 and --p0");
  const int n = o.dim;
  if (n < 1) throw ValidationError("--dim must be positive");
  const SymMatrix q0 = parse_matrix(o.q0.front(), n, "--q0");
  const SymMatrix p0 = parse_matrix(o.p0, n, "--p0");
  require_positive_definite(q0, "--q0");
  const int m = SymMatrix::packed_size(n);
  Field field = [n, m](double, const Eigen::VectorXd& v) {
    const auto [dq, dp] = geodesic_rhs(from_packed_vector(n, v, 0), from_packed_vector(n, v, m));
    Eigen::VectorXd d(2 * m);
    d << dq.packed_vector(), dp.packed_vector();
    return d;
  };
  DiagnosticSpec diag;
  diag.names = {"det", "closed_form_err"};
  const double t0 = o.t0;
  diag.eval = [&, n](double t, const Eigen::VectorXd& v) {
    const SymMatrix q = from_packed_vector(n, v, 0);
    const Eigen::MatrixXd exact = geodesic(q0, p0, t - t0).dense();
    return std::vector<double>{spd_eigen(q).values.prod(), (q.dense() - exact).norm() / exact.norm()};
  };
  Eigen::VectorXd x0(2 * m);
  x0 << q0.packed_vector(), p0.packed_vector();
  auto labels = SymMatrix::packed_labels(n, "q");
  for (auto& l : SymMatrix::packed_labels(n, "p")) labels.push_back(l);
  IntegrationConfig cfg = make_config(o);
  cfg.det_channel = "det";
  return report({integrate(field, x0, cfg, diag, labels)}, o, out, err);
}

int cmd_check(const Options& o, std::ostream& out) {
  const StructureConstants c = load_algebra(o);
  if (o.g.empty() || o.k.empty()) throw ValidationError("check needs --g and --k");
  const ADMState s{parse_matrix(o.g, c.dim(), "--g"), parse_matrix(o.k, c.dim(), "--k")};
  const ConstraintReport rep = check_constraints(c, s, o.lambda);
  out << "hamiltonian_residual: " << format_number(rep.hamiltonian) << '\n'
      << "momentum_residual: " << numbers(rep.momentum) << '\n'
      << "wick_residual: " << format_number(wick_residual(c, s)) << '\n'
      << "valid: " << (rep.valid ? "true" : "false") << '\n';
  return kOk;
}

void add_algebra(CLI::App* sub, Options& o) {
  sub->add_option("--algebra", o.algebra, "preset: abelian, heis, euc, sol, sl2, so3");
  sub->add_option("--constants", o.constants, "structure constants JSON file");
  sub->add_option("--milnor", o.milnor, "Milnor parameters a,b,c");
}

void add_integration(CLI::App* sub, Options& o) {
  sub->add_option("--t0", o.t0, "start time");
  sub->add_option("--t1", o.t1, "end time");
  sub->add_option("--dt", o.dt, "sample spacing (default: every step)");
  sub->add_option("--rtol", o.rtol, "relative tolerance");
  sub->add_option("--atol", o.atol, "absolute tolerance");
  sub->add_option("--out", o.out, "output file (default stdout)");
  sub->add_option("--format", o.format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
  sub->add_option("--jobs", o.jobs, "parallel runs for repeated initial conditions");
}

}  // namespace

std::vector<double> parse_list(const std::string& s) {
  std::vector<double> v;
  std::size_t start = 0;
  while (start <= s.size()) {
    const auto comma = s.find(',', start);
    const auto end = comma == std::string::npos ? s.size() : comma;
    v.push_back(parse_number(std::string_view(s).substr(start, end - start)));
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return v;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  Options o;
  CLI::App app{"Curvature flows and Einstein flows of left-invariant metrics", "bianchi"};
  app.require_subcommand(1);

  auto* classify_cmd = app.add_subcommand("classify", "Bianchi class of a unimodular 3-algebra");
  add_algebra(classify_cmd, o);

  auto* ricci_cmd = app.add_subcommand("ricci", "Ricci form, scalar curvature and H at a metric");
  add_algebra(ricci_cmd, o);
  ricci_cmd->add_option("--q0", o.q0, "metric: n diagonal or n(n+1)/2 upper-triangle values")->required();
  ricci_cmd->add_option("--format", o.format, "csv (text) or json")->check(CLI::IsMember({"csv", "json"}));

  auto* flow_cmd = app.add_subcommand("flow", "integrate a Ricci-type flow");
  add_algebra(flow_cmd, o);
  add_integration(flow_cmd, o);
  flow_cmd->add_option("--kind", o.kind, "ricci, normalized, hilbert or cubic");
  flow_cmd->add_option("--q0", o.q0, "initial metric (repeatable)")->required();

  auto* einstein_cmd = app.add_subcommand("einstein", "integrate the vacuum Einstein flow");
  add_algebra(einstein_cmd, o);
  add_integration(einstein_cmd, o);
  einstein_cmd->add_option("--g", o.g, "initial metric");
  einstein_cmd->add_option("--k", o.k, "initial second fundamental form");
  einstein_cmd->add_option("--kasner", o.kasner, "Kasner exponents p1,p2,p3 (data taken at --t0)");
  einstein_cmd->add_option("--lambda", o.lambda, "cosmological constant");
  einstein_cmd->add_flag("--flat", o.flat, "run the diagonal system on a Milnor flat");
  einstein_cmd->add_flag("--allow-invalid", o.allow_invalid, "skip the initial constraint check");

  auto* wh_cmd = app.add_subcommand("wh", "integrate the expansion-normalized 5D system");
  add_integration(wh_cmd, o);
  wh_cmd->add_option("--state", o.state, "Sigma+,Sigma-,N1,N2,N3 (repeatable)")->required();
  wh_cmd->add_option("--gamma", o.gamma, "equation-of-state parameter in (2/3, 2)");

  auto* geo_cmd = app.add_subcommand("geodesic", "integrate a geodesic and compare with the closed form");
  add_integration(geo_cmd, o);
  geo_cmd->add_option("--q0", o.q0, "initial point")->required();
  geo_cmd->add_option("--p0", o.p0, "initial velocity")->required();
  geo_cmd->add_option("--dim", o.dim, "matrix size n");

  auto* check_cmd = app.add_subcommand("check", "constraint residuals of (g, k) data");
  add_algebra(check_cmd, o);
  check_cmd->add_option("--g", o.g, "metric")->required();
  check_cmd->add_option("--k", o.k, "second fundamental form")->required();
  check_cmd->add_option("--lambda", o.lambda, "cosmological constant");

  std::vector<std::string> argv_store{"bianchi"};
  argv_store.insert(argv_store.end(), args.begin(), args.end());
  std::vector<const char*> argv;
  for (const auto& a : argv_store) argv.push_back(a.c_str());

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kInvalid;
  }

  try {
    if (*classify_cmd) return cmd_classify(o, out);
    if (*ricci_cmd) return cmd_ricci(o, out);
    if (*flow_cmd) return cmd_flow(o, out, err);
    if (*einstein_cmd) return cmd_einstein(o, out, err);
    if (*wh_cmd) return cmd_wh(o, out, err);
    if (*geo_cmd) return cmd_geodesic(o, out, err);
    if (*check_cmd) return cmd_check(o, out);
  } catch (const std::invalid_argument& e) {  // ValidationError, DimensionError
    err << "error: " << e.what() << '\n';
    return kInvalid;
  } catch (const std::domain_error& e) {  // NotPositiveDefinite
    err << "error: " << e.what() << '\n';
    return kInvalid;
  } catch (const nlohmann::json::exception& e) {
    err << "error: " << e.what() << '\n';
    return kInvalid;
  }
  return kInvalid;
}

}  // namespace bianchi::cli
