/* Copyright 2026 The qmetro Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/
#include "cli.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <memory>
#include <optional>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "qmetro/adaptive.hpp"
#include "qmetro/errors.hpp"
#include "qmetro/parallel.hpp"
#include "qmetro/qfim.hpp"
#include "qmetro/robustness.hpp"
#include "qmetro/simulator.hpp"
#include "qmetro/variance.hpp"

namespace qmetro::cli {

namespace {

using json = nlohmann::ordered_json;

constexpr int kSchemaVersion = 1;

json record(const std::string& command) {
  json j;
  j["schema_version"] = kSchemaVersion;
  j["command"] = command;
  j["params"] = json::object();
  return j;
}

json to_json(const Vector3& v) { return json::array({v[0], v[1], v[2]}); }

json to_json(const Matrix3& m) {
  json rows = json::array();
  for (int i = 0; i < 3; ++i) rows.push_back(json::array({m(i, 0), m(i, 1), m(i, 2)}));
  return rows;
}

// CSV writer; fields are joined with commas and rows end with a bare LF.
class Csv {
 public:
  explicit Csv(std::ostream& os) : os_(os) {}

  Csv& operator<<(double x) { return field(format_double(x)); }
  Csv& operator<<(const std::string& s) { return field(s); }
  Csv& operator<<(const char* s) { return field(s); }
  Csv& operator<<(std::int64_t x) { return field(std::to_string(x)); }
  Csv& operator<<(int x) { return field(std::to_string(x)); }
  void end() {
    os_ << '\n';
    first_ = true;
  }

 private:
  Csv& field(const std::string& s) {
    if (!first_) os_ << ',';
    os_ << s;
    first_ = false;
    return *this;
  }

  std::ostream& os_;
  bool first_ = true;
};

// Destination for the primary payload: --out when given, else `fallback`.
class Sink {
 public:
  Sink(const std::string& path, std::ostream& fallback) : os_(&fallback) {
    if (!path.empty()) {
      file_ = std::make_unique<std::ofstream>(path, std::ios::binary);
      if (!*file_) fail(ErrorKind::DomainError, "cannot open output file " + path);
      os_ = file_.get();
    }
  }
  std::ostream& stream() { return *os_; }

 private:
  std::unique_ptr<std::ofstream> file_;
  std::ostream* os_;
};

void write_error(std::ostream& err, const std::string& kind, const std::string& message) {
  json j;
  j["error"] = kind;
  j["message"] = message;
  err << j.dump() << '\n';
}

int exit_code_for(ErrorKind kind) {
  return kind == ErrorKind::InvariantViolation ? kExitInvariant : kExitDomain;
}

struct QfimArgs {
  std::string model = "pauli";
  std::string alpha;
  double t = 1.0;
  double n = 1.0;
  std::string format = "json";
  std::string out;
};

int cmd_qfim(const QfimArgs& a, std::ostream& out, std::ostream& err) {
  const HamiltonianModel& model = builtin_model(a.model);
  const Vector3 alpha = parse_vector3(a.alpha);
  if (!(a.t >= 0.0)) fail(ErrorKind::DomainError, "t must be non-negative");
  const QfimMatrix f = qfim_entangled(model, alpha, a.t);

  std::optional<Error> cov_error;
  Covariance3 cov;
  double bound = 0.0;
  try {
    cov = covariance_from_qfim(f, a.n);
    bound = scalar_bound(Matrix3::Identity(), f, a.n);
  } catch (const Error& e) {
    cov_error = e;
  }

  Sink sink(a.out, out);
  if (a.format == "csv") {
    Csv csv(sink.stream());
    csv << "kind" << "i" << "j" << "value";
    csv.end();
    auto emit = [&](const char* kind, const Matrix3& m) {
      for (int i = 0; i < 3; ++i) {
        for (int j = 0; j < 3; ++j) {
          csv << kind << i << j << m(i, j);
          csv.end();
        }
      }
    };
    emit("qfim", f.m);
    if (!cov_error) {
      emit("covariance", cov.m);
      csv << "scalar_bound" << "" << "" << bound;
      csv.end();
    }
  } else {
    json j = record("qfim");
    j["params"] = {{"model", a.model}, {"alpha", to_json(alpha)}, {"t", a.t}, {"n", a.n}};
    j["rows"] = to_json(f.m);
    if (cov_error) {
      j["covariance"] = nullptr;
      j["scalar_bound"] = nullptr;
      j["covariance_error"] = std::string(error_kind_name(cov_error->kind()));
    } else {
      j["covariance"] = to_json(cov.m);
      j["scalar_bound"] = bound;
    }
    sink.stream() << j.dump(2) << '\n';
  }
  if (cov_error) {
    write_error(err, std::string(error_kind_name(cov_error->kind())), cov_error->what());
    return exit_code_for(cov_error->kind());
  }
  return kExitOk;
}

struct CurveArgs {
  std::string model = "btp";
  std::string alpha;
  std::string t_range;
  double n = 1.0;
  int param = 1;
  std::string out;
};

int cmd_variance_curve(const CurveArgs& a, unsigned threads, std::ostream& out) {
  const HamiltonianModel& model = builtin_model(a.model);
  const Vector3 alpha = parse_vector3(a.alpha);
  if (a.param < 1 || a.param > 3) fail(ErrorKind::IndexOutOfRange, "--param must be 1, 2 or 3");
  const std::vector<double> grid = parse_grid(a.t_range);
  const auto rows = variance_curve(model, alpha, grid, a.n, a.param - 1, threads);

  Sink sink(a.out, out);
  Csv csv(sink.stream());
  csv << "t" << "v1" << "v2" << "v3" << "envelope" << "infimum" << "flag";
  csv.end();
  for (const VarianceRow& r : rows) {
    csv << r.t << r.v[0] << r.v[1] << r.v[2] << r.envelope << r.infimum << (r.pole ? "pole" : "ok");
    csv.end();
  }
  return kExitOk;
}

struct ScheduleArgs {
  double v0 = 1.0;
  double n = 0.0;
  std::optional<double> target;
  std::optional<int> m;
  std::string format = "json";
  std::string out;
};

int cmd_schedule(const ScheduleArgs& a, std::ostream& out) {
  if (a.target.has_value() == a.m.has_value()) {
    fail(ErrorKind::DomainError, "exactly one of --target and --m is required");
  }
  const ScheduleTarget target = a.target ? ScheduleTarget{TargetVariance{*a.target}}
                                         : ScheduleTarget{TargetIterations{*a.m}};
  const AdaptiveSchedule s = plan_schedule(a.v0, a.n, target);

  Sink sink(a.out, out);
  if (a.format == "csv") {
    Csv csv(sink.stream());
    csv << "k" << "n" << "t" << "dE2_mean" << "v" << "adaptive_factor";
    csv.end();
    for (const IterationRecord& r : s.records) {
      csv << r.k << r.n << r.t << r.dE2_mean << r.v << s.adaptive_factor;
      csv.end();
    }
    return kExitOk;
  }
  json j = record("schedule");
  j["params"] = {{"v0", a.v0}, {"n", a.n}};
  if (a.target) j["params"]["target"] = *a.target;
  if (a.m) j["params"]["m"] = *a.m;
  json rows = json::array();
  for (const IterationRecord& r : s.records) {
    rows.push_back({{"k", r.k}, {"n", r.n}, {"t", r.t}, {"dE2_mean", r.dE2_mean}, {"v", r.v},
                    {"adaptive_factor", s.adaptive_factor}});
  }
  j["rows"] = rows;
  j["summary"] = {{"m", s.m},
                  {"g0", s.g0},
                  {"v_m", s.v_m},
                  {"total_time", s.total_time},
                  {"sequential_time", s.sequential_time},
                  {"v_m_from_total_time", s.v_m_from_total_time},
                  {"v_m_large_n", s.v_m_large_n},
                  {"v_oc", s.v_oc},
                  {"ratio_vs_optimal", s.ratio_vs_optimal},
                  {"adaptive_factor", s.adaptive_factor}};
  sink.stream() << j.dump(2) << '\n';
  return kExitOk;
}

struct RobustnessArgs {
  std::string grid;
  int m = 2;
  std::int64_t samples = 1000000;
  std::uint64_t seed = 0;
  std::size_t cdf_points = 1001;
  std::string out;
  std::string summary;
};

int cmd_robustness_single(const RobustnessArgs& a, std::ostream& out) {
  const std::vector<double> grid = parse_grid(a.grid);
  std::vector<double> r(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) r[i] = ratio_single(grid[i]);
  Sink sink(a.out, out);
  Csv csv(sink.stream());
  csv << "D" << "R" << "pdf";
  csv.end();
  for (std::size_t i = 0; i < grid.size(); ++i) {
    csv << grid[i] << r[i] << deviation_pdf(grid[i]);
    csv.end();
  }
  return kExitOk;
}

int cmd_robustness_total(const RobustnessArgs& a, unsigned threads, std::ostream& out) {
  RobustnessOptions opt;
  opt.threads = threads;
  opt.cdf_points = a.cdf_points;
  const RobustnessSummary s = robustness_mc(a.m, a.samples, a.seed, opt);
  {
    Sink sink(a.out, out);
    Csv csv(sink.stream());
    csv << "R" << "cdf";
    csv.end();
    for (const auto& [ratio, q] : s.cdf) {
      csv << ratio << q;
      csv.end();
    }
  }
  if (!a.summary.empty()) {
    json j = record("robustness-total");
    j["params"] = {{"m", a.m}, {"samples", a.samples}, {"cdf_points", a.cdf_points}};
    j["seed"] = a.seed;
    j["rows"] = json::array({{{"m", s.m}, {"p_below_one", s.p_below_one}, {"median", s.median}}});
    Sink sink(a.summary, out);
    sink.stream() << j.dump(2) << '\n';
  }
  return kExitOk;
}

struct SimulateArgs {
  std::string beta0;
  std::int64_t n = 1000;
  int m = 4;
  std::string backend = "gaussian";
  std::uint64_t seed = 0;
  std::int64_t reps = 1;
  bool refine = false;
  std::int64_t extra_trials = 0;
  std::optional<double> norm_bound;
  std::optional<double> threshold;
  std::string out;
  std::string summary_csv;
};

json trace_to_json(std::size_t rep, const ExperimentTrace& t) {
  json its = json::array();
  for (const IterationTrace& it : t.iterations) {
    its.push_back({{"k", it.k},
                   {"control", to_json(it.control)},
                   {"delta_beta", to_json(it.delta_beta)},
                   {"dE2", it.dE2},
                   {"dE2_planned", it.dE2_planned},
                   {"d_plan", it.d_plan},
                   {"d_conditional", it.d_conditional},
                   {"t", it.t},
                   {"n", it.n},
                   {"estimate", to_json(it.estimate)},
                   {"error2", it.error2},
                   {"trace_c", it.trace_c}});
  }
  json j = {{"rep", rep},
            {"planned_v", t.planned_v},
            {"realized_v", t.realized_v},
            {"final_trace_c", t.final_trace_c},
            {"t1_norm", t.t1_norm},
            {"t1_from_bound", t.t1_from_bound},
            {"aborted", t.aborted}};
  if (t.aborted) j["abort_reason"] = t.abort_reason;
  j["iterations"] = its;
  return j;
}

int cmd_simulate(const SimulateArgs& a, unsigned threads, std::ostream& out) {
  ExperimentConfig cfg;
  cfg.beta_true = parse_vector3(a.beta0);
  cfg.iterations = a.m;
  cfg.trials = a.n;
  if (a.backend == "gaussian") {
    cfg.backend = Backend::Gaussian;
  } else if (a.backend == "bell") {
    cfg.backend = Backend::Bell;
  } else {
    fail(ErrorKind::DomainError, "--backend must be gaussian or bell");
  }
  cfg.seed = a.seed;
  cfg.refinement.enabled = a.refine;
  cfg.refinement.extra_trials = a.extra_trials;
  cfg.norm_bound = a.norm_bound;
  cfg.refinement_threshold = a.threshold;
  const std::vector<ExperimentTrace> traces = run_experiments(cfg, a.reps, threads);

  std::vector<double> ratios;
  double sum_v = 0.0, sum_c = 0.0;
  int aborted = 0;
  for (const ExperimentTrace& t : traces) {
    if (t.aborted) {
      ++aborted;
      continue;
    }
    ratios.push_back(t.realized_v / t.planned_v);
    sum_v += t.realized_v;
    sum_c += t.final_trace_c;
  }
  std::sort(ratios.begin(), ratios.end());
  const double done = static_cast<double>(ratios.size());

  json j = record("simulate");
  j["params"] = {{"beta0", to_json(cfg.beta_true)}, {"n", a.n},       {"m", a.m},
                 {"backend", a.backend},            {"reps", a.reps}, {"refine", a.refine},
                 {"extra_trials", a.extra_trials}};
  if (a.norm_bound) j["params"]["norm_bound"] = *a.norm_bound;
  if (a.threshold) j["params"]["threshold"] = *a.threshold;
  j["seed"] = a.seed;
  json rows = json::array();
  for (std::size_t r = 0; r < traces.size(); ++r) rows.push_back(trace_to_json(r, traces[r]));
  j["rows"] = rows;
  json summary = {{"planned_v", traces.front().planned_v}, {"completed", ratios.size()},
                  {"aborted", aborted}};
  if (!ratios.empty()) {
    summary["mean_realized_v"] = sum_v / done;
    summary["mean_ratio"] = sum_v / done / traces.front().planned_v;
    summary["median_ratio"] = ratios[ratios.size() / 2];
    summary["mean_final_trace_c"] = sum_c / done;
  }
  j["summary"] = summary;
  {
    Sink sink(a.out, out);
    sink.stream() << j.dump(2) << '\n';
  }

  if (!a.summary_csv.empty()) {
    Sink sink(a.summary_csv, out);
    Csv csv(sink.stream());
    csv << "rep" << "planned_v" << "realized_v" << "ratio" << "final_trace_c" << "aborted";
    csv.end();
    for (std::size_t r = 0; r < traces.size(); ++r) {
      const ExperimentTrace& t = traces[r];
      csv << static_cast<std::int64_t>(r) << t.planned_v << t.realized_v
          << t.realized_v / t.planned_v << t.final_trace_c << (t.aborted ? 1 : 0);
      csv.end();
    }
  }
  return kExitOk;
}

}  // namespace

std::string format_double(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof(buf), x);
  return std::string(buf, res.ptr);
}

std::vector<double> parse_grid(std::string_view text) {
  std::array<double, 3> v{};
  std::size_t pos = 0;
  for (int i = 0; i < 3; ++i) {
    const std::size_t end = (i < 2) ? text.find(':', pos) : text.size();
    if (end == std::string_view::npos) fail(ErrorKind::DomainError, "grid must be start:stop:step");
    const std::string_view part = text.substr(pos, end - pos);
    const auto res = std::from_chars(part.data(), part.data() + part.size(), v[i]);
    if (res.ec != std::errc() || res.ptr != part.data() + part.size()) {
      fail(ErrorKind::DomainError, "grid must be start:stop:step");
    }
    pos = end + 1;
  }
  const double start = v[0], stop = v[1], step = v[2];
  if (!(step > 0.0) || !(stop >= start) || !std::isfinite(stop)) {
    fail(ErrorKind::DomainError, "grid needs start <= stop and a positive step");
  }
  const double count = std::floor((stop - start) / step + 1e-9) + 1.0;
  if (count > 1e7) fail(ErrorKind::DomainError, "grid has more than 1e7 points");
  std::vector<double> grid(static_cast<std::size_t>(count));
  for (std::size_t i = 0; i < grid.size(); ++i) grid[i] = start + static_cast<double>(i) * step;
  return grid;
}

Vector3 parse_vector3(std::string_view text) {
  Vector3 v;
  std::size_t pos = 0;
  for (int i = 0; i < 3; ++i) {
    const std::size_t end = (i < 2) ? text.find(',', pos) : text.size();
    if (end == std::string_view::npos) fail(ErrorKind::DomainError, "expected three comma-separated values");
    const std::string_view part = text.substr(pos, end - pos);
    const auto res = std::from_chars(part.data(), part.data() + part.size(), v[i]);
    if (res.ec != std::errc() || res.ptr != part.data() + part.size() || !std::isfinite(v[i])) {
      fail(ErrorKind::DomainError, "expected three comma-separated values");
    }
    pos = end + 1;
  }
  return v;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Adaptive Hamiltonian estimation toolkit", "qmetro"};
  app.require_subcommand(1);
  unsigned threads_flag = 0;
  app.add_option("--threads", threads_flag, "Worker cap (0: $QMETRO_THREADS or all cores)");

  QfimArgs qa;
  auto* qfim = app.add_subcommand("qfim", "QFIM, covariance and scalar bound at one point");
  qfim->add_option("--model", qa.model, "pauli or btp")->capture_default_str();
  qfim->add_option("--alpha", qa.alpha, "a,b,c")->required();
  qfim->add_option("--t", qa.t, "evolution time")->capture_default_str();
  qfim->add_option("--n", qa.n, "trials for the covariance")->capture_default_str();
  qfim->add_option("--format", qa.format)->check(CLI::IsMember({"json", "csv"}))->capture_default_str();
  qfim->add_option("--out", qa.out, "output file");

  CurveArgs ca;
  auto* curve = app.add_subcommand("variance-curve", "Estimator variances against time (CSV)");
  curve->add_option("--model", ca.model)->capture_default_str();
  curve->add_option("--alpha", ca.alpha, "a,b,c")->required();
  curve->add_option("--t-range", ca.t_range, "start:stop:step")->required();
  curve->add_option("--n", ca.n)->capture_default_str();
  curve->add_option("--param", ca.param, "parameter (1-3) for envelope and infimum")->capture_default_str();
  curve->add_option("--out", ca.out);

  ScheduleArgs sa;
  auto* sched = app.add_subcommand("schedule", "Equal-trials adaptive schedule");
  sched->add_option("--v0", sa.v0, "initial total variance")->capture_default_str();
  sched->add_option("--n", sa.n, "trials per iteration")->required();
  sched->add_option("--target", sa.target, "target total variance");
  sched->add_option("--m", sa.m, "number of iterations");
  sched->add_option("--format", sa.format)->check(CLI::IsMember({"json", "csv"}))->capture_default_str();
  sched->add_option("--out", sa.out);

  RobustnessArgs ra;
  auto* rob = app.add_subcommand("robustness", "Deviation-factor robustness");
  rob->require_subcommand(1);
  auto* single = rob->add_subcommand("single", "R and pdf over a D grid (CSV)");
  single->add_option("--grid", ra.grid, "start:stop:step")->required();
  single->add_option("--out", ra.out);
  auto* total = rob->add_subcommand("total", "Monte Carlo CDF of the whole-process ratio (CSV)");
  total->add_option("--m", ra.m)->required();
  total->add_option("--samples", ra.samples)->capture_default_str();
  total->add_option("--seed", ra.seed)->required();
  total->add_option("--cdf-points", ra.cdf_points)->capture_default_str();
  total->add_option("--out", ra.out);
  total->add_option("--summary", ra.summary, "JSON summary file");

  SimulateArgs ma;
  auto* sim = app.add_subcommand("simulate", "Monte Carlo runs of the adaptive experiment");
  sim->add_option("--beta0", ma.beta0, "true Pauli coefficients a,b,c")->required();
  sim->add_option("--n", ma.n, "trials per iteration")->capture_default_str();
  sim->add_option("--m", ma.m, "iterations")->capture_default_str();
  sim->add_option("--backend", ma.backend)->check(CLI::IsMember({"gaussian", "bell"}))->capture_default_str();
  sim->add_option("--seed", ma.seed)->required();
  sim->add_option("--reps", ma.reps)->capture_default_str();
  sim->add_flag("--refine", ma.refine, "retune each time from extra trials");
  sim->add_option("--extra-trials", ma.extra_trials, "extra trials per refinement (0: n)")->capture_default_str();
  sim->add_option("--norm-bound", ma.norm_bound, "rough |beta0| used to plan t_1");
  sim->add_option("--threshold", ma.threshold, "refinement target for |delta_beta| t (default g0)");
  sim->add_option("--out", ma.out);
  sim->add_option("--summary-csv", ma.summary_csv);

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    write_error(err, "UsageError", e.what());
    return kExitDomain;
  }

  try {
    const unsigned threads = resolve_threads(threads_flag);
    if (qfim->parsed()) return cmd_qfim(qa, out, err);
    if (curve->parsed()) return cmd_variance_curve(ca, threads, out);
    if (sched->parsed()) return cmd_schedule(sa, out);
    if (single->parsed()) return cmd_robustness_single(ra, out);
    if (total->parsed()) return cmd_robustness_total(ra, threads, out);
    if (sim->parsed()) return cmd_simulate(ma, threads, out);
    write_error(err, "UsageError", "no command given");
    return kExitDomain;
  } catch (const Error& e) {
    write_error(err, std::string(error_kind_name(e.kind())), e.what());
    return exit_code_for(e.kind());
  } catch (const std::exception& e) {
    write_error(err, "InternalError", e.what());
    return kExitInvariant;
  }
}

}  // namespace qmetro::cli
