#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <mutex>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "caradory/caradory.hpp"

namespace caradory::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitInput = 1;
inline constexpr int kExitIterCap = 2;

/// Upper limit on the derived default iteration cap.
inline constexpr std::size_t kDefaultIterCeiling = 1000000;

inline double parse_exponent(const std::string& s) {
  if (s == "inf" || s == "Inf" || s == "INF" || s == "infinity") return kInf;
  std::size_t used = 0;
  double p;
  try {
    p = std::stod(s, &used);
  } catch (const std::exception&) {
    throw InputError("--p: cannot parse '" + s + "'");
  }
  if (used != s.size()) throw InputError("--p: cannot parse '" + s + "'");
  mode_for_exponent(p);
  return p;
}

inline std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) out.push_back(item);
  }
  if (out.empty()) throw InputError("empty list '" + s + "'");
  return out;
}

struct AlgoChoice {
  Algorithm algorithm;
  StepRule step;
};

inline AlgoChoice parse_algo(const std::string& s) {
  if (s == "fw") return {Algorithm::FW, StepRule::ClosedLoop};
  if (s == "fw-open") return {Algorithm::FW, StepRule::OpenLoop};
  if (s == "nep-fw") return {Algorithm::NEP_FW, StepRule::OpenLoop};
  if (s == "fcfw") return {Algorithm::FCFW, StepRule::ClosedLoop};
  if (s == "afw") return {Algorithm::AFW, StepRule::ClosedLoop};
  if (s == "hcgs") return {Algorithm::HCGS, StepRule::OpenLoop};
  if (s == "smoothed-fw") return {Algorithm::SMOOTHED_FW, StepRule::OpenLoop};
  throw InputError("unknown algorithm '" + s + "'");
}

inline const std::vector<std::string>& algo_names() {
  static const std::vector<std::string> names{"fw", "fw-open", "nep-fw", "fcfw", "afw", "hcgs", "smoothed-fw"};
  return names;
}

struct InstanceOptions {
  std::string instance;
  std::string gen = "random";
  long long n = 100;
  long long m = 101;
  long long k = 10;
  double q = 2.0;
  double radius = 1.0;
  std::optional<double> offset;
  std::uint64_t seed = 0;
};

inline void add_instance_options(CLI::App& app, InstanceOptions& o) {
  app.add_option("--instance", o.instance, "Instance JSON file (overrides --gen)");
  app.add_option("--gen", o.gen, "Generator for the instance")
      ->check(CLI::IsMember({"random", "hadamard", "ball", "simplex"}))
      ->capture_default_str();
  app.add_option("--n", o.n, "Dimension")->capture_default_str();
  app.add_option("--m", o.m, "Number of vertices (random)")->capture_default_str();
  app.add_option("--k", o.k, "Target support size (random)")->capture_default_str();
  app.add_option("--q", o.q, "Ball exponent in [2, inf) (ball)")->capture_default_str();
  app.add_option("--radius", o.radius, "Ball radius (ball)")->capture_default_str();
  app.add_option("--offset", o.offset, "Target offset along e_1 (ball; default 2*radius with --project, else radius/2)");
  app.add_option("--seed", o.seed, "Seed for generators and random starts")->capture_default_str();
}

inline Instance build_instance(const InstanceOptions& o, double p, bool project, std::optional<std::uint64_t> seed = {}) {
  Instance inst = [&] {
    if (!o.instance.empty()) return load_instance(o.instance);
    if (o.gen == "random") return gen_random_polytope(o.n, o.m, o.k, seed.value_or(o.seed), p);
    if (o.gen == "hadamard") return hadamard_instance(o.n, p);
    if (o.gen == "simplex") return simplex_barycenter_instance(o.n, p);
    const double offset = o.offset.value_or(project ? 2.0 * o.radius : 0.5 * o.radius);
    return ball_instance(o.n, o.q, o.radius, offset, p);
  }();
  inst.p = p;
  if (!inst.target_inside && !project) {
    throw InputError("the target lies outside the feasible set; use --project");
  }
  return inst;
}

/// Iteration count after which the matching envelope guarantees accuracy eps.
inline double bound_iterations(const FeasibleSet& set, const ObjectiveSpec& spec, const AlgoChoice& a, double eps) {
  const DerivedConstants k = derive_constants(set, spec.p);
  if (a.algorithm == Algorithm::HCGS) return std::pow(4.0 * k.G_2 * k.D_2 / eps, 2.0);
  if (a.algorithm == Algorithm::SMOOTHED_FW) return std::floor(4.0 * k.G_2 * k.G_2 * k.D_2 * k.D_2 / (eps * eps));
  const double L = spec.p - 1.0;
  const double factor = a.step == StepRule::ClosedLoop ? 8.0 : 4.0;
  return factor * L * k.D_p * k.D_p / (eps * eps);
}

inline std::size_t default_max_iter(const FeasibleSet& set, const ObjectiveSpec& spec, const AlgoChoice& a,
                                    double eps) {
  const double b = std::ceil(bound_iterations(set, spec, a, eps));
  const double cap = 10.0 * std::max(1.0, b);
  return cap >= static_cast<double>(kDefaultIterCeiling) ? kDefaultIterCeiling : static_cast<std::size_t>(cap);
}

struct ReferenceInfo {
  std::optional<ProjectionReference> ref;
  std::string source;
};

/// dist_p(x*, C) when it can be computed: closed form on axis-aligned ball
/// targets, the small-instance oracle on vertex sets with m <= 200.
inline ReferenceInfo projection_reference(const Instance& inst, const ObjectiveSpec& spec) {
  ReferenceInfo info;
  if (const auto* ball = std::get_if<LqBall>(&inst.set)) {
    const Vector rel = inst.target - ball->center;
    if (rel.tail(rel.size() - 1).isZero(0.0)) {
      ProjectionReference r;
      r.distance = std::max(0.0, std::abs(rel[0]) - ball->radius);
      if (ball->q == 2.0) {
        const double nrm = rel.norm();
        r.proj2 = nrm <= ball->radius ? inst.target : Vector(ball->center + rel * (ball->radius / nrm));
      }
      info.ref = r;
      info.source = "closed-form";
    }
    return info;
  }
  const auto& vs = std::get<VertexSet>(inst.set);
  if (vs.size() > 200 || !(spec.p > 1.0) || std::isinf(spec.p)) return info;
  const OracleDistance od = oracle_distance(vs, spec.target, spec.p);
  ProjectionReference r;
  r.distance = od.distance;
  if (spec.p == 2.0) r.proj2 = od.point;
  info.ref = r;
  info.source = "oracle";
  return info;
}

/// Constants for the envelope report; fields that cannot be derived stay empty
/// and the bound evaluation names them.
inline TheoryBounds theory_for(const Instance& inst, const ObjectiveSpec& spec, double eps,
                               const std::optional<ProjectionReference>& ref) {
  const DerivedConstants k = derive_constants(inst.set, spec.p);
  TheoryBounds b;
  if (spec.mode == Mode::SmoothSquared) {
    b.L = spec.p - 1.0;
    b.D = k.D_p * k.slack;
    b.mu = 1.0;
    b.sigma = std::sqrt(2.0);
  }
  b.G2 = k.G_2;
  b.D2 = k.D_2 * k.slack;
  b.epsilon = eps;
  if (const auto* ball = std::get_if<LqBall>(&inst.set); ball && ball->q == 2.0 && spec.p == 2.0) {
    b.alpha = 1.0 / (2.0 * ball->radius);
    if (ref && ref->distance > 0.0) b.c = ref->distance;
  }
  return b;
}

inline BoundId parse_bound(const std::string& s, StepRule step) {
  if (s == "thm1") return step == StepRule::ClosedLoop ? BoundId::Thm1Closed : BoundId::Thm1Open;
  if (s == "thm2") return BoundId::Thm2;
  if (s == "thm3") return BoundId::Thm3;
  if (s == "thm4") return BoundId::Thm4;
  if (s == "thm7") return BoundId::Thm7;
  if (s == "thm8") return BoundId::Thm8;
  if (s == "lemma2") return BoundId::Lemma2;
  throw InputError("unknown bound '" + s + "'");
}

inline int exit_code(Status s) { return s == Status::IterCap ? kExitIterCap : kExitOk; }

inline std::ofstream open_output(const std::string& path) {
  std::ofstream f(path);
  if (!f) throw InputError(path + ": cannot open for writing");
  return f;
}

/// Distance ||x_t - x*||_p recorded in a trace entry.
inline double record_accuracy(const IterationRecord& r, Mode mode) {
  return mode == Mode::SmoothSquared ? std::sqrt(2.0 * std::max(0.0, r.f_value)) : r.f_value;
}

struct SolveOptions {
  InstanceOptions inst;
  std::string algo = "fw";
  std::string p = "2";
  double epsilon = 0.02;
  std::optional<std::size_t> max_iter;
  std::string out;
  std::string format = "csv";
  bool project = false;
  std::string bound;
};

inline int run_solve(const SolveOptions& o, std::ostream& out) {
  const double p = parse_exponent(o.p);
  const AlgoChoice a = parse_algo(o.algo);
  if (!(o.epsilon > 0.0)) throw InputError("--epsilon must be positive");
  const Instance inst = build_instance(o.inst, p, o.project);
  const ObjectiveSpec spec = inst.objective();
  SolverConfig cfg;
  cfg.algorithm = a.algorithm;
  cfg.step = a.step;
  cfg.epsilon = o.epsilon;
  cfg.seed = o.inst.seed;
  cfg.max_iter = o.max_iter ? *o.max_iter : default_max_iter(inst.set, spec, a, o.epsilon);
  validate(cfg, spec, inst.set);
  std::optional<BoundId> bound;
  if (!o.bound.empty()) bound = parse_bound(o.bound, a.step);

  ReferenceInfo refinfo;
  SolveResult res;
  std::optional<GapReport> report;
  if (o.project) {
    refinfo = projection_reference(inst, spec);
    ProjectionResult pr = projection_solve(inst.set, spec, cfg, refinfo.ref);
    res = std::move(pr.result);
    report = pr.report;
  } else {
    res = solve(inst.set, spec, cfg, 0.0);
  }

  std::vector<double> envelope;
  if (bound) {
    const TheoryBounds tb = theory_for(inst, spec, o.epsilon, refinfo.ref);
    envelope = evaluate_bound(res.trace, tb, *bound);
  }

  std::vector<std::string> header{
      "caradory solve",
      "algo=" + o.algo,
      "p=" + format_exponent(p),
      "epsilon=" + std::to_string(o.epsilon),
      "seed=" + std::to_string(o.inst.seed),
      "max_iter=" + std::to_string(cfg.max_iter) + (o.max_iter ? "" : " (default: 10*ceil(bound iterations))"),
      "format=" + o.format,
      "instance=" + (o.inst.instance.empty() ? inst.kind + " " + inst.params.dump() : o.inst.instance),
  };
  if (!o.out.empty()) {
    auto f = open_output(o.out);
    if (o.format == "json") {
      nlohmann::json h = nlohmann::json::object();
      for (const auto& line : header) {
        const auto eq = line.find('=');
        if (eq != std::string::npos) h[line.substr(0, eq)] = line.substr(eq + 1);
      }
      nlohmann::json j{{"header", h}, {"trace", to_json(res.trace)}, {"combination", to_json(res.combination)}};
      if (bound) {
        nlohmann::json env = nlohmann::json::array();
        for (double v : envelope) env.push_back(std::isinf(v) ? nlohmann::json(nullptr) : nlohmann::json(v));
        j["envelope"] = {{"bound", to_string(*bound)}, {"values", env}};
      }
      f << j.dump(1) << '\n';
    } else {
      write_trace_csv(f, res.trace, header);
      if (bound) {
        auto e = open_output(o.out + ".envelope.csv");
        e << "# bound=" << to_string(*bound) << "\nt,primal_gap,bound\n" << std::setprecision(17);
        for (std::size_t i = 0; i < envelope.size(); ++i) {
          e << res.trace.records[i].t << ',' << res.trace.records[i].primal_gap << ',';
          if (!std::isinf(envelope[i])) e << envelope[i];
          e << '\n';
        }
      }
    }
  }

  const IterationRecord& last = res.trace.last();
  out << std::setprecision(10);
  out << "algorithm=" << o.algo << " status=" << to_string(res.trace.status) << " iterations=" << last.t
      << " cardinality=" << res.combination.cardinality()
      << " accuracy=" << target_distance(res.combination.point, spec) << '\n';
  if (res.trace.inner_cap_hit) out << "warning: an inner correction stopped at its iteration cap\n";
  if (report) {
    out << "projection reference=" << (refinfo.ref ? refinfo.source : "best-running-value");
    if (report->reference_distance) out << " distance=" << *report->reference_distance;
    if (report->accuracy_gap) out << " accuracy_gap=" << *report->accuracy_gap;
    if (report->proj2_distance) out << " proj2_distance=" << *report->proj2_distance;
    out << '\n';
  }
  if (bound) {
    std::size_t violations = 0;
    double worst = 0.0;
    for (std::size_t i = 0; i < envelope.size(); ++i) {
      if (std::isinf(envelope[i])) continue;
      const double gap = res.trace.records[i].primal_gap;
      if (gap > envelope[i]) ++violations;
      worst = std::max(worst, gap / envelope[i]);
    }
    out << "bound=" << to_string(*bound) << " violations=" << violations << " max_ratio=" << worst << '\n';
  }
  return exit_code(res.trace.status);
}

struct BenchOptions {
  InstanceOptions inst;
  std::string algos = "fw,afw,fcfw";
  std::string ps = "2";
  std::size_t seeds = 10;
  double epsilon = 0.02;
  std::optional<std::size_t> max_iter;
  std::string out;
  unsigned threads = 0;
};

struct BenchJob {
  std::size_t algo_pos = 0;
  std::string algo;
  std::uint64_t seed = 0;
  double p = 2.0;
};

struct BenchRow {
  BenchJob job;
  std::optional<std::size_t> cardinality;
  std::size_t iterations = 0;
  double accuracy = 0.0;
  Status status = Status::IterCap;
  std::vector<std::pair<std::size_t, double>> curve;  // (cardinality, accuracy) per iterate
  std::string error;
};

inline unsigned resolve_threads(unsigned requested) {
  if (requested > 0) return requested;
  const unsigned hw = std::thread::hardware_concurrency();
  return hw > 0 ? hw : 1;
}

inline BenchRow run_bench_job(const BenchOptions& o, const BenchJob& job) {
  BenchRow row{job};
  const AlgoChoice a = parse_algo(job.algo);
  const Instance inst = build_instance(o.inst, job.p, false, job.seed);
  const ObjectiveSpec spec = inst.objective();
  SolverConfig cfg;
  cfg.algorithm = a.algorithm;
  cfg.step = a.step;
  cfg.epsilon = o.epsilon;
  cfg.seed = job.seed;
  cfg.max_iter = o.max_iter ? *o.max_iter : default_max_iter(inst.set, spec, a, o.epsilon);
  const SolveResult res = solve(inst.set, spec, cfg, 0.0);
  for (const auto& r : res.trace.records) {
    const double acc = record_accuracy(r, spec.mode);
    row.curve.emplace_back(r.cardinality, acc);
    if (!row.cardinality && acc <= o.epsilon) row.cardinality = r.cardinality;
  }
  row.iterations = res.trace.last().t;
  row.accuracy = target_distance(res.combination.point, spec);
  row.status = res.trace.status;
  return row;
}

inline int run_bench(const BenchOptions& o, std::ostream& out) {
  const auto algos = split_list(o.algos);
  std::vector<double> ps;
  for (const auto& s : split_list(o.ps)) ps.push_back(parse_exponent(s));
  if (o.seeds == 0) throw InputError("--seeds must be positive");
  if (!(o.epsilon > 0.0)) throw InputError("--epsilon must be positive");

  // Validate every combination before any solve.
  std::vector<BenchJob> jobs;
  for (std::size_t ai = 0; ai < algos.size(); ++ai) {
    const AlgoChoice a = parse_algo(algos[ai]);
    for (double p : ps) {
      SolverConfig cfg;
      cfg.algorithm = a.algorithm;
      cfg.step = a.step;
      cfg.epsilon = o.epsilon;
      const Instance probe = build_instance(o.inst, p, false, o.inst.seed);
      validate(cfg, probe.objective(), probe.set);
    }
    for (std::size_t s = 0; s < o.seeds; ++s) {
      for (double p : ps) jobs.push_back({ai, algos[ai], o.inst.seed + s, p});
    }
  }

  std::vector<BenchRow> rows(jobs.size());
  std::atomic<std::size_t> next{0};
  const unsigned workers = std::min<unsigned>(resolve_threads(o.threads), static_cast<unsigned>(jobs.size()));
  auto work = [&] {
    for (std::size_t i = next.fetch_add(1); i < jobs.size(); i = next.fetch_add(1)) {
      try {
        rows[i] = run_bench_job(o, jobs[i]);
      } catch (const std::exception& e) {
        rows[i] = BenchRow{jobs[i]};
        rows[i].error = e.what();
      }
    }
  };
  std::vector<std::thread> pool;
  for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work);
  for (auto& t : pool) t.join();
  for (const auto& r : rows) {
    if (!r.error.empty()) throw Error(r.job.algo + " seed " + std::to_string(r.job.seed) + ": " + r.error);
  }
  std::stable_sort(rows.begin(), rows.end(), [](const BenchRow& x, const BenchRow& y) {
    if (x.job.algo_pos != y.job.algo_pos) return x.job.algo_pos < y.job.algo_pos;
    if (x.job.seed != y.job.seed) return x.job.seed < y.job.seed;
    return x.job.p < y.job.p;
  });

  auto write_table = [&](std::ostream& os) {
    os << "# caradory bench epsilon=" << o.epsilon << " gen=" << (o.inst.instance.empty() ? o.inst.gen : o.inst.instance)
       << " threads=" << workers << '\n';
    os << "algorithm,seed,p,cardinality,iterations,accuracy,status\n" << std::setprecision(10);
    for (const auto& r : rows) {
      os << r.job.algo << ',' << r.job.seed << ',' << format_exponent(r.job.p) << ',';
      if (r.cardinality) os << *r.cardinality;
      os << ',' << r.iterations << ',' << r.accuracy << ',' << to_string(r.status) << '\n';
    }
  };
  write_table(out);
  if (!o.out.empty()) {
    auto f = open_output(o.out);
    write_table(f);
    auto c = open_output(o.out + ".curves.csv");
    c << "algorithm,seed,p,t,cardinality,accuracy\n" << std::setprecision(17);
    for (const auto& r : rows) {
      for (std::size_t t = 0; t < r.curve.size(); ++t) {
        c << r.job.algo << ',' << r.job.seed << ',' << format_exponent(r.job.p) << ',' << t << ','
          << r.curve[t].first << ',' << r.curve[t].second << '\n';
      }
    }
    if (o.inst.instance.empty() && o.inst.gen == "hadamard") {
      auto lb = open_output(o.out + ".lower_bound.csv");
      lb << "s,epsilon\n" << std::setprecision(17);
      for (const auto& [s, e] : LowerBoundCurve(o.inst.n).points()) lb << s << ',' << e << '\n';
    }
  }
  bool all_converged = true;
  for (const auto& r : rows) all_converged = all_converged && r.status != Status::IterCap;
  return all_converged ? kExitOk : kExitIterCap;
}

inline int run_hadamard(long long n, const std::string& p_str, const std::string& out_path, std::ostream& out) {
  const double p = parse_exponent(p_str);
  const Instance inst = hadamard_instance(n, p);
  const std::string text = instance_json(inst).dump(1);
  if (out_path.empty()) {
    out << text << '\n';
  } else {
    open_output(out_path) << text << '\n';
  }
  return kExitOk;
}

inline int run_lower_bound(long long n, std::optional<double> eps, std::ostream& out) {
  out << std::setprecision(17);
  if (eps) {
    out << "n=" << n << " epsilon=" << *eps << " bound=" << lower_bound_cardinality(n, *eps) << '\n';
    return kExitOk;
  }
  out << "s,epsilon\n";
  for (const auto& [s, e] : LowerBoundCurve(n).points()) out << s << ',' << e << '\n';
  return kExitOk;
}

inline int run_oracle(const InstanceOptions& io, const std::string& p_str, std::ostream& out) {
  const double p = parse_exponent(p_str);
  InstanceOptions o = io;
  const Instance inst = build_instance(o, p, true);
  const auto* vs = std::get_if<VertexSet>(&inst.set);
  if (!vs) throw InputError("oracle: needs a vertex set instance");
  const SmallOracle so = exact_small_oracle(*vs, inst.target, p);
  nlohmann::json j{{"distance", so.distance}, {"p", format_exponent(p)}};
  if (so.minimal) {
    nlohmann::json support = nlohmann::json::array();
    for (const Atom& a : so.minimal->weights) support.push_back({{"index", a.index}, {"weight", a.weight}});
    j["minimal_cardinality"] = so.minimal->cardinality;
    j["support"] = support;
  } else {
    j["minimal_cardinality"] = nullptr;
  }
  out << j.dump(1) << '\n';
  return kExitOk;
}

/// Entry point shared by the executable and the tests.
inline int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Sparse convex decompositions and sparse l_p projections with Frank-Wolfe methods", "caradory"};
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all", "Show help for all subcommands");

  SolveOptions so;
  auto* solve = app.add_subcommand("solve", "Run one solver on one instance");
  add_instance_options(*solve, so.inst);
  solve->add_option("--algo", so.algo, "Algorithm")->check(CLI::IsMember(algo_names()))->capture_default_str();
  solve->add_option("--p", so.p, "Norm exponent: number in [1, inf) or 'inf'")->capture_default_str();
  solve->add_option("--epsilon", so.epsilon, "Target accuracy")->capture_default_str();
  solve->add_option("--max-iter", so.max_iter, "Iteration cap (default: 10*ceil(bound iterations), at most 1000000)");
  solve->add_option("--out", so.out, "Trace output file");
  solve->add_option("--format", so.format, "Trace format")->check(CLI::IsMember({"csv", "json"}))->capture_default_str();
  solve->add_flag("--project", so.project, "Projection mode: the target may lie outside the set");
  solve->add_option("--bound", so.bound, "Envelope report")
      ->check(CLI::IsMember({"thm1", "thm2", "thm3", "thm4", "thm7", "thm8", "lemma2"}));

  BenchOptions bo;
  auto* bench = app.add_subcommand("bench", "Compare solvers over seeds and exponents");
  add_instance_options(*bench, bo.inst);
  bench->add_option("--algo", bo.algos, "Comma-separated algorithms")->capture_default_str();
  bench->add_option("--p", bo.ps, "Comma-separated exponents")->capture_default_str();
  bench->add_option("--seeds", bo.seeds, "Number of seeds, starting at --seed")->capture_default_str();
  bench->add_option("--epsilon", bo.epsilon, "Accuracy threshold")->capture_default_str();
  bench->add_option("--max-iter", bo.max_iter, "Iteration cap per run (default: 10*ceil(bound iterations))");
  bench->add_option("--out", bo.out, "Table output; curves go to <out>.curves.csv");
  bench->add_option("--threads", bo.threads, "Worker count (default: logical CPUs)")->envname("CARADORY_THREADS");

  long long hn = 64;
  std::string hp = "2";
  std::string hout;
  auto* had = app.add_subcommand("hadamard", "Write the Hadamard lower-bound instance as JSON");
  had->add_option("--n", hn, "Dimension, a power of two")->capture_default_str();
  had->add_option("--p", hp, "Exponent in [2, inf]")->capture_default_str();
  had->add_option("--out", hout, "Output file (default: standard output)");

  long long ln = 64;
  std::optional<double> leps;
  auto* lower = app.add_subcommand("lower-bound", "Cardinality lower bound 1/(eps^2 + 1/n), or its curve");
  lower->add_option("--n", ln, "Dimension, a power of two")->capture_default_str();
  lower->add_option("--epsilon", leps, "Accuracy; without it the curve s -> eps(s) is printed");

  InstanceOptions oo;
  oo.n = 4;
  oo.m = 8;
  oo.k = 3;
  std::string op = "2";
  auto* oracle = app.add_subcommand("oracle", "Exact distance and minimal cardinality on small vertex sets");
  add_instance_options(*oracle, oo);
  oracle->add_option("--p", op, "Norm exponent")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitInput;
  }

  try {
    if (*solve) return run_solve(so, out);
    if (*bench) return run_bench(bo, out);
    if (*had) return run_hadamard(hn, hp, hout, out);
    if (*lower) return run_lower_bound(ln, leps, out);
    if (*oracle) return run_oracle(oo, op, out);
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kExitInput;
  } catch (const nlohmann::json::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitInput;
  }
  return kExitInput;
}

}  // namespace caradory::cli
