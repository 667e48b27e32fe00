#include "dfsaqc/experiment.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <bit>
#include <cctype>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <span>
#include <sstream>

#include "dfsaqc/aqc.hpp"
#include "dfsaqc/control_opt.hpp"
#include "dfsaqc/dfs_code.hpp"
#include "dfsaqc/grover.hpp"
#include "dfsaqc/noise_bench.hpp"
#include "dfsaqc/trotter.hpp"

namespace dfsaqc {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

bool valid_key(const std::string& key) {
  return !key.empty() && std::all_of(key.begin(), key.end(), [](char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-' || c == '.';
  });
}

const std::map<std::string, std::vector<ConfigKey>>& schemas() {
  static const std::map<std::string, std::vector<ConfigKey>> table = {
      {"basis", {{"n", "4", "even spin count (2..16)"}}},
      {"spectrum",
       {{"n_L", "7", "logical qubits"},
        {"J", "1", "XXX coupling"},
        {"w", "0", "marked logical index"},
        {"grid", "1024", "gap-profile grid points (>= 64)"}}},
      {"grover-cont",
       {{"space", "logical", "logical | dfs"},
        {"n", "6", "even spin count; the logical space uses n/2 qubits"},
        {"w", "0", "marked index in the chosen space"},
        {"t_max", "auto", "last sample time; auto = pi sqrt(N)"},
        {"samples", "201", "number of equally spaced times including 0"}}},
      {"aqc-run",
       {{"n_L", "3", "logical qubits"},
        {"J", "1", "XXX coupling"},
        {"T", "60", "total time, or auto for 225 * 2^((n_L - 7)/2)"},
        {"M", "120", "schedule intervals, or auto for round(2T)"},
        {"schedule", "linear", "linear | gap"},
        {"w", "0", "marked logical index"},
        {"space", "logical", "logical | full"},
        {"substeps", "64", "propagation substeps per interval"},
        {"gap_grid", "1024", "gap-profile grid points for the gap schedule"}}},
      {"trotter-sweep",
       {{"n_L", "3", "logical qubits"},
        {"J", "1", "XXX coupling"},
        {"T_list", "20,30,40,60", "total times; auto picks the default chain value"},
        {"M_list", "5,10,15,20,25,30,40,50,60,80,100,150,200", "Trotter step counts"},
        {"K", "1", "inner repetition: a positive integer or nL"},
        {"schedule", "linear", "linear | gap"},
        {"w", "random", "marked index: an integer, all, or random (seeded)"},
        {"space", "logical", "logical | full (full adds sector leakage)"},
        {"gap_grid", "1024", "gap-profile grid points for the gap schedule"},
        {"seed", "1", "seed for w = random"}}},
      {"schedule",
       {{"n_L", "7", "logical qubits"},
        {"J", "1", "XXX coupling"},
        {"w", "0", "marked logical index"},
        {"T", "auto", "total time, or auto for 225 * 2^((n_L - 7)/2)"},
        {"M", "auto", "steps, or auto for round(2T)"},
        {"gap_grid", "1024", "gap-profile grid points"}}},
      {"krotov",
       {{"n_L", "5", "logical qubits"},
        {"J", "1", "XXX coupling"},
        {"w", "0", "marked logical index"},
        {"T", "auto", "total time, or auto for 225 * 2^((n_L - 7)/2)"},
        {"M", "auto", "steps, or auto for round(2T)"},
        {"K", "1", "inner Trotter repetition"},
        {"step_weight", "auto", "inverse update size, or auto for 50 M / T"},
        {"max_iters", "500", "iteration cap"},
        {"convergence_eps", "1e-7", "stop when the objective changes less than this"},
        {"clamp", "true", "keep s_l inside [0, 1]"},
        {"gap_grid", "1024", "gap-profile grid points for the seed"}}},
      {"noise-bench",
       {{"protocol", "grover", "grover | aqc"},
        {"n", "4", "system spins (4 or 6)"},
        {"w", "0", "marked index (DFS sector for grover, logical for aqc)"},
        {"J", "1", "XXX coupling for the aqc protocol"},
        {"K", "1", "Trotter repetition for the aqc protocol"},
        {"stray_field", "0", "X field on spin 0 (breaks the symmetry when nonzero)"},
        {"bath", "spin", "spin | stochastic"},
        {"m", "1", "bath spins (spin bath)"},
        {"g", "1", "coupling B = g sum Z (spin bath)"},
        {"h", "0.3", "bath field H_B = h sum X (spin bath)"},
        {"amplitude", "0.5", "noise standard deviation (stochastic bath)"},
        {"correlation_time", "1", "noise correlation time (stochastic bath)"},
        {"ensemble", "200", "trajectories (stochastic bath, >= 100)"},
        {"seed", "7", "trajectory seed (stochastic bath)"},
        {"dt", "0.05", "noise hold time (stochastic bath)"}}},
  };
  return table;
}

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.15g", v);
  return buf;
}

std::string fmt_ms(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.3f", v);
  return buf;
}

double resolve_time(const std::string& text, int n_logical, const EffectiveConfig& cfg, const std::string& key) {
  if (text == "auto") return default_total_time(n_logical);
  double v = 0.0;
  const auto* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, v);
  if (ec != std::errc() || ptr != end || !(v >= 0.0) || !std::isfinite(v))
    throw ConfigError("'" + key + "' must be a non-negative time or auto, got '" + text + "' in " + cfg.experiment());
  return v;
}

int resolve_steps(const std::string& text, double T) {
  if (text == "auto") return std::max(1, static_cast<int>(std::lround(2.0 * T)));
  int v = 0;
  const auto* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, v);
  if (ec != std::errc() || ptr != end || v < 1) throw ConfigError("step count must be a positive integer or auto, got '" + text + "'");
  return v;
}

ScheduleKind sweep_schedule(const std::string& text) {
  const ScheduleKind kind = parse_schedule_kind(text);
  if (kind == ScheduleKind::Krotov) throw ConfigError("schedule must be linear or gap here; use the krotov experiment");
  return kind;
}

class CsvFile {
 public:
  CsvFile(const std::string& path, const EffectiveConfig& cfg, const std::vector<std::string>& notes,
          const std::string& columns)
      : path_(path), out_(path) {
    if (!out_) throw std::runtime_error("cannot open '" + path + "' for writing");
    const std::string text = cfg.canonical_text();
    out_ << "# dfsaqc " << tool_version() << "\n";
    out_ << "# experiment: " << cfg.experiment() << "\n";
    out_ << "# config-hash: " << content_hash(text) << "\n";
    std::istringstream lines(text);
    for (std::string line; std::getline(lines, line);) out_ << "# config: " << line << "\n";
    for (const auto& n : notes) out_ << "# " << n << "\n";
    out_ << columns << "\n";
  }

  void row(const std::string& line) {
    out_ << line << "\n";
    ++rows_;
  }

  std::size_t close() {
    out_.close();
    if (!out_) throw std::runtime_error("failed writing '" + path_ + "'");
    return rows_;
  }

 private:
  std::string path_;
  std::ofstream out_;
  std::size_t rows_ = 0;
};

constexpr const char* kFidelityColumns = "experiment,n_L,T,M,K,schedule,w,fidelity,leakage,wall_ms";

std::string fidelity_row(const FidelityRecord& r, bool continuous = false) {
  std::ostringstream s;
  s << r.experiment << ',' << r.n_logical << ',' << fmt(r.T) << ',' << r.M << ',';
  if (!continuous) s << r.K;
  s << ',' << to_string(r.schedule) << ',' << r.w << ',' << fmt(r.fidelity) << ',';
  if (r.leakage) s << fmt(*r.leakage);
  s << ',' << fmt_ms(r.wall_ms);
  return s.str();
}

std::string spin_string(std::uint64_t bits, int n) {
  std::string s;
  for (int k = 0; k < n; ++k) s += (bits >> (n - 1 - k)) & 1U ? 'd' : 'u';
  return s;
}

std::string bit_string(std::uint64_t bits, int n) {
  std::string s;
  for (int k = 0; k < n; ++k) s += (bits >> (n - 1 - k)) & 1U ? '1' : '0';
  return s;
}

double elapsed_ms(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
}

RunSummary run_basis(const EffectiveConfig& cfg, const std::string& out) {
  const int n = cfg.integer("n");
  if (n > kMaxFullSpins) throw DimensionError("basis enumeration is capped at " + std::to_string(kMaxFullSpins) + " spins");
  const SpaceMap map = dfs_basis(n);
  CsvFile csv(out, cfg,
              {"sector size " + std::to_string(map.dfs_indices().size()) + ", logical size " +
               std::to_string(map.logical_indices().size())},
              "space,position,full_index,bits,spins,total_z");
  auto emit = [&](const char* space, std::span<const std::uint64_t> list) {
    for (std::size_t i = 0; i < list.size(); ++i) {
      const int downs = std::popcount(list[i]);
      csv.row(std::string(space) + ',' + std::to_string(i) + ',' + std::to_string(list[i]) + ',' +
              bit_string(list[i], n) + ',' + spin_string(list[i], n) + ',' + std::to_string(n - 2 * downs));
    }
  };
  emit("dfs", map.dfs_indices());
  emit("logical", map.logical_indices());
  return {{out}, {}, csv.close()};
}

RunSummary run_spectrum(const EffectiveConfig& cfg, const std::string& out) {
  const int nL = cfg.integer("n_L");
  if (nL < 1 || nL > 12) throw DimensionError("spectrum runs in the logical space with 1 <= n_L <= 12");
  const Space logical = Space::logical(nL);
  const auto w = static_cast<Eigen::Index>(cfg.integer("w"));
  if (w < 0 || w >= logical.dim()) throw ConfigError("w outside the logical space");
  const GapProfile prof = gap_profile(logical_initial_h(nL, cfg.real("J")), oracle_h(logical, w), cfg.integer("grid"));
  const std::size_t m = prof.min_gap_index();
  CsvFile csv(out, cfg, {"minimum gap " + fmt(prof.gap(m)) + " at s = " + fmt(prof.grid[m])}, "s,e0,e1,gap");
  for (std::size_t i = 0; i < prof.grid.size(); ++i)
    csv.row(fmt(prof.grid[i]) + ',' + fmt(prof.e0[i]) + ',' + fmt(prof.e1[i]) + ',' + fmt(prof.gap(i)));
  RunSummary summary{{out}, {}, 0};
  if (!prof.degenerate.empty()) summary.warnings.push_back("gap closes at " + std::to_string(prof.degenerate.size()) + " grid points");
  summary.rows = csv.close();
  return summary;
}

RunSummary run_grover(const EffectiveConfig& cfg, const std::string& out) {
  const std::string space_name = cfg.str("space");
  const int n = cfg.integer("n");
  if (n < 2 || n % 2 != 0) throw ConfigError("n must be even and >= 2");
  if (n > kMaxFullSpins) throw DimensionError("grover-cont is capped at " + std::to_string(kMaxFullSpins) + " spins");
  Space space = Space::logical(n / 2);
  if (space_name == "dfs")
    space = Space::dfs(n);
  else if (space_name != "logical")
    throw ConfigError("space must be logical or dfs, got '" + space_name + "'");
  const auto w = static_cast<Eigen::Index>(cfg.integer("w"));
  if (w < 0 || w >= space.dim()) throw ConfigError("w outside the search space");
  const auto inst = GroverInstance::make(space, w);
  const double t_max = cfg.str("t_max") == "auto" ? grover_quoted_time(inst.N) : resolve_time(cfg.str("t_max"), 0, cfg, "t_max");
  const int samples = cfg.integer("samples");
  if (samples < 2) throw ConfigError("samples must be >= 2");

  const SpectralDecomposition<double> sd(grover_h(inst));
  const CVector s = uniform_state(space).amplitudes();
  CsvFile csv(out, cfg,
              {"N " + std::to_string(inst.N), "peak time (pi/2) sqrt(N) = " + fmt(grover_peak_time(inst.N)),
               "quoted time pi sqrt(N) = " + fmt(grover_quoted_time(inst.N))},
              "t,p_numeric,p_analytic,abs_diff");
  for (int i = 0; i < samples; ++i) {
    const double t = t_max * i / (samples - 1);
    const double pn = std::norm(sd.propagate(s, t)(w));
    const double pa = success_probability(t, inst.N);
    csv.row(fmt(t) + ',' + fmt(pn) + ',' + fmt(pa) + ',' + fmt(std::abs(pn - pa)));
  }
  return {{out}, {}, csv.close()};
}

RunSummary run_aqc(const EffectiveConfig& cfg, const std::string& out) {
  const auto start = std::chrono::steady_clock::now();
  const int nL = cfg.integer("n_L");
  const double J = cfg.real("J");
  const std::string space_name = cfg.str("space");
  if (space_name != "logical" && space_name != "full") throw ConfigError("space must be logical or full");
  if (nL < 1 || nL > 12) throw DimensionError("aqc-run is limited to 1 <= n_L <= 12");
  if (space_name == "full" && 2 * nL > kMaxFullSpins) throw DimensionError("FULL-space runs are capped at 16 spins");
  const double T = resolve_time(cfg.str("T"), nL, cfg, "T");
  const int M = resolve_steps(cfg.str("M"), T);
  const ScheduleKind kind = sweep_schedule(cfg.str("schedule"));
  const Space logical = Space::logical(nL);
  const auto w = static_cast<Eigen::Index>(cfg.integer("w"));
  if (w < 0 || w >= logical.dim()) throw ConfigError("w outside the logical space");

  const Operator Hi = logical_initial_h(nL, J);
  const Operator Hf = oracle_h(logical, w);
  const Schedule sch =
      kind == ScheduleKind::GapOptimized ? gap_schedule(gap_profile(Hi, Hf, cfg.integer("gap_grid")), T, M) : linear_schedule(T, M);

  FidelityRecord rec{"aqc-run", nL, T, M, 0, kind, w, 0.0, std::nullopt, 0.0};
  if (space_name == "logical") {
    const State psi = adiabatic_evolve(Hi, Hf, sch, xxx_ground_state(nL), cfg.integer("substeps"));
    rec.fidelity = std::norm(psi[w]);
  } else {
    const int n = 2 * nL;
    const SpaceMap map(n);
    const auto target = static_cast<Eigen::Index>(logical_to_full(static_cast<std::uint64_t>(w), nL));
    const State psi = adiabatic_evolve(xxx_pairs(n, J), oracle_h(Space::full(n), target), sch,
                                       embed(xxx_ground_state(nL), Space::full(n), map), cfg.integer("substeps"));
    rec.fidelity = std::norm(psi[target]);
    rec.leakage = std::clamp(leakage(psi.amplitudes(), logical, map), 0.0, 1.0);
  }
  rec.fidelity = std::clamp(rec.fidelity, 0.0, 1.0);
  rec.wall_ms = elapsed_ms(start);
  CsvFile csv(out, cfg, {"continuous reference; K is empty"}, kFidelityColumns);
  csv.row(fidelity_row(rec, true));
  return {{out}, {}, csv.close()};
}

RunSummary run_sweep(const EffectiveConfig& cfg, const std::string& out) {
  SweepSpec spec;
  spec.n_logical = cfg.integer("n_L");
  if (spec.n_logical < 1 || spec.n_logical > 12) throw DimensionError("sweeps are limited to 1 <= n_L <= 12");
  spec.J = cfg.real("J");
  for (const auto& t : cfg.list("T_list")) spec.T_list.push_back(resolve_time(t, spec.n_logical, cfg, "T_list"));
  for (const auto& m : cfg.list("M_list")) spec.M_list.push_back(resolve_steps(m, 0.0));
  spec.k_rule = KRule::parse(cfg.str("K"));
  spec.schedule = sweep_schedule(cfg.str("schedule"));
  spec.w = WSelector::parse(cfg.str("w"));
  const std::string space_name = cfg.str("space");
  if (space_name == "full")
    spec.space = SweepSpace::Full;
  else if (space_name != "logical")
    throw ConfigError("space must be logical or full");
  spec.gap_grid = cfg.integer("gap_grid");
  spec.seed = cfg.unsigned64("seed");
  if (spec.w.kind == WSelector::Kind::Index && spec.w.index >= Space::logical(spec.n_logical).dim())
    throw ConfigError("w outside the logical space");

  const SweepResult result = fidelity_sweep(spec);
  RunSummary summary{{out}, {}, 0};
  std::vector<std::string> notes{"max dt |H_i - H_f| over the sweep: " + fmt(result.max_validity)};
  if (result.max_validity >= 1.0) {
    summary.warnings.push_back("Trotter validity dt |H_i - H_f| reaches " + fmt(result.max_validity) +
                               " (>= 1); coarse points are outside the product-formula regime");
    notes.push_back("warning: " + summary.warnings.back());
  }
  CsvFile csv(out, cfg, notes, kFidelityColumns);
  for (const auto& r : result.records) csv.row(fidelity_row(r));
  summary.rows = csv.close();
  return summary;
}

RunSummary run_schedule(const EffectiveConfig& cfg, const std::string& out) {
  const int nL = cfg.integer("n_L");
  if (nL < 1 || nL > 12) throw DimensionError("schedule runs in the logical space with 1 <= n_L <= 12");
  const Space logical = Space::logical(nL);
  const auto w = static_cast<Eigen::Index>(cfg.integer("w"));
  if (w < 0 || w >= logical.dim()) throw ConfigError("w outside the logical space");
  const double T = resolve_time(cfg.str("T"), nL, cfg, "T");
  const int M = resolve_steps(cfg.str("M"), T);
  const GapProfile prof = gap_profile(logical_initial_h(nL, cfg.real("J")), oracle_h(logical, w), cfg.integer("gap_grid"));
  const Schedule sch = gap_schedule(prof, T, M);
  const std::size_t m = prof.min_gap_index();
  CsvFile csv(out, cfg, {"T " + fmt(T) + ", M " + std::to_string(M), "minimum gap " + fmt(prof.gap(m)) + " at s = " + fmt(prof.grid[m])},
              "l,t,tau,s_gap,s_linear");
  csv.row("0,0,0,0,0");
  for (int l = 1; l <= M; ++l) {
    const double tau = static_cast<double>(l) / M;
    csv.row(std::to_string(l) + ',' + fmt(tau * T) + ',' + fmt(tau) + ',' + fmt(sch.values[static_cast<std::size_t>(l - 1)]) + ',' +
            fmt(tau));
  }
  return {{out}, {}, csv.close()};
}

std::string companion(const std::string& out, const std::string& tag) {
  const auto slash = out.find_last_of('/');
  const auto dot = out.find_last_of('.');
  const std::string stem = (dot != std::string::npos && (slash == std::string::npos || dot > slash)) ? out.substr(0, dot) : out;
  return stem + "." + tag + ".csv";
}

std::string basename(const std::string& path) {
  const auto slash = path.find_last_of('/');
  return slash == std::string::npos ? path : path.substr(slash + 1);
}

RunSummary run_krotov(const EffectiveConfig& cfg, const std::string& out) {
  const auto start = std::chrono::steady_clock::now();
  ControlProblem problem;
  problem.n_logical = cfg.integer("n_L");
  if (problem.n_logical < 1 || problem.n_logical > 8) throw DimensionError("Krotov runs are limited to n_L <= 8");
  problem.J = cfg.real("J");
  problem.K = cfg.integer("K");
  problem.w = cfg.integer("w");
  const Space logical = Space::logical(problem.n_logical);
  if (problem.w < 0 || problem.w >= logical.dim()) throw ConfigError("w outside the logical space");
  if (problem.K < 1) throw ConfigError("K must be >= 1");
  const double T = resolve_time(cfg.str("T"), problem.n_logical, cfg, "T");
  if (!(T > 0.0)) throw ConfigError("Krotov needs T > 0");
  const int M = resolve_steps(cfg.str("M"), T);

  KrotovConfig kc;
  kc.step_weight = cfg.str("step_weight") == "auto" ? 0.0 : cfg.real("step_weight");
  if (cfg.str("step_weight") != "auto" && !(kc.step_weight > 0.0)) throw ConfigError("step_weight must be > 0");
  kc.max_iters = cfg.integer("max_iters");
  kc.convergence_eps = cfg.real("convergence_eps");
  kc.clamp = cfg.boolean("clamp");
  try {
    kc.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }

  const GapProfile prof =
      gap_profile(logical_initial_h(problem.n_logical, problem.J), oracle_h(logical, problem.w), cfg.integer("gap_grid"));
  const Schedule seed = gap_schedule(prof, T, M);
  const auto seed_curve = fidelity_curve(seed, problem);
  const OptimizationTrace trace = krotov_optimize(seed, kc, problem);
  const double wall = elapsed_ms(start);

  const std::string trace_path = companion(out, "trace");
  const std::string schedule_path = companion(out, "schedule");
  const std::vector<std::string> notes{
      "seed fidelity " + fmt(trace.seed_objective()) + ", final fidelity " + fmt(trace.final_objective()),
      std::string("iterations ") + std::to_string(trace.objective.size() - 1) + (trace.converged ? " (converged)" : " (iteration cap)") +
          ", step-weight adjustments " + std::to_string(trace.weight_adjustments),
      "trace: " + basename(trace_path), "schedule: " + basename(schedule_path)};

  CsvFile main(out, cfg, notes, kFidelityColumns);
  FidelityRecord rec{"krotov", problem.n_logical, T, M, problem.K, ScheduleKind::GapOptimized, problem.w, 0.0, std::nullopt, 0.0};
  rec.fidelity = std::clamp(trace.seed_objective(), 0.0, 1.0);
  main.row(fidelity_row(rec));
  rec.schedule = ScheduleKind::Krotov;
  rec.fidelity = std::clamp(trace.final_objective(), 0.0, 1.0);
  rec.wall_ms = wall;
  main.row(fidelity_row(rec));

  CsvFile tr(trace_path, cfg, notes, "iteration,objective,step_weight");
  for (std::size_t i = 0; i < trace.objective.size(); ++i)
    tr.row(std::to_string(i) + ',' + fmt(trace.objective[i]) + ',' + (i == 0 ? std::string() : fmt(trace.step_weight[i - 1])));

  CsvFile sc(schedule_path, cfg, notes, "l,tau,s_seed,s_krotov,f_seed,f_krotov");
  for (int l = 1; l <= M; ++l) {
    const auto i = static_cast<std::size_t>(l - 1);
    sc.row(std::to_string(l) + ',' + fmt(trace.tau[i]) + ',' + fmt(seed.values[i]) + ',' + fmt(trace.schedule.values[i]) + ',' +
           fmt(seed_curve[i]) + ',' + fmt(trace.fidelity[i]));
  }
  tr.close();
  sc.close();
  return {{out, trace_path, schedule_path}, {}, main.close()};
}

RunSummary run_noise(const EffectiveConfig& cfg, const std::string& out) {
  const ProtectedProtocol protocol = [&] {
    const std::string p = cfg.str("protocol");
    if (p == "grover") return ProtectedProtocol::ContinuousGrover;
    if (p == "aqc") return ProtectedProtocol::TrotterizedAqc;
    return parse_protected_protocol(p);
  }();
  const int n = cfg.integer("n");
  if (n != 4 && n != 6) throw ConfigError("noise-bench runs at n = 4 or n = 6");
  BathModel bath;
  const std::string kind = cfg.str("bath");
  if (kind == "spin") {
    bath = SpinBath{cfg.integer("m"), cfg.real("g"), cfg.real("h")};
  } else if (kind == "stochastic") {
    bath = StochasticBath{cfg.real("amplitude"), cfg.real("correlation_time"), cfg.integer("ensemble"), cfg.unsigned64("seed"),
                          cfg.real("dt")};
  } else {
    throw ConfigError("bath must be spin or stochastic, got '" + kind + "'");
  }
  validate_bath(bath, n);
  ProtectionOptions opt;
  opt.stray_field = cfg.real("stray_field");
  opt.w = cfg.integer("w");
  opt.J = cfg.real("J");
  opt.K = cfg.integer("K");
  const Eigen::Index limit = protocol == ProtectedProtocol::ContinuousGrover ? Space::dfs(n).dim() : Space::logical(n / 2).dim();
  if (opt.w < 0 || opt.w >= limit) throw ConfigError("w outside the search space");
  if (opt.K < 1) throw ConfigError("K must be >= 1");

  const ProtectionReport rep = protection_report(protocol, bath, n, opt);
  CsvFile csv(out, cfg, {}, "protocol,n,bath,stray_field,fidelity_with_bath,fidelity_without_bath,difference,max_purity_loss,symmetric");
  csv.row(to_string(rep.protocol) + ',' + std::to_string(rep.n) + ',' + kind + ',' + fmt(opt.stray_field) + ',' +
          fmt(rep.fidelity_with_bath) + ',' + fmt(rep.fidelity_without_bath) + ',' + fmt(rep.difference) + ',' +
          fmt(rep.max_purity_loss) + ',' + (rep.symmetric ? "true" : "false"));
  return {{out}, {}, csv.close()};
}

}  // namespace

int exit_code_for(const std::exception_ptr& error) {
  try {
    std::rethrow_exception(error);
  } catch (const DimensionError&) {
    return kExitDimensionGuard;
  } catch (const std::invalid_argument&) {
    return kExitInvalidConfig;
  } catch (const std::out_of_range&) {
    return kExitInvalidConfig;
  } catch (...) {
    return kExitFailure;
  }
}

const std::vector<std::string>& experiment_names() {
  static const std::vector<std::string> names = {"basis",   "spectrum", "grover-cont", "aqc-run",
                                                 "trotter-sweep", "schedule", "krotov", "noise-bench"};
  return names;
}

const std::vector<ConfigKey>& experiment_keys(const std::string& experiment) {
  const auto it = schemas().find(experiment);
  if (it == schemas().end()) throw ConfigError("unknown experiment '" + experiment + "'");
  return it->second;
}

Config Config::parse(std::istream& in, const std::string& origin) {
  Config cfg;
  std::string line;
  for (int number = 1; std::getline(in, line); ++number) {
    const auto comment = line.find_first_of("#;");
    const std::string body = trim(comment == std::string::npos ? line : line.substr(0, comment));
    if (body.empty()) continue;
    const std::string where = origin + ":" + std::to_string(number);
    if (body.front() == '[') {
      if (body.back() != ']' || body.size() < 3) throw ConfigError(where + ": malformed section header");
      continue;
    }
    const auto eq = body.find('=');
    if (eq == std::string::npos) throw ConfigError(where + ": expected key = value");
    const std::string key = trim(body.substr(0, eq));
    if (!valid_key(key)) throw ConfigError(where + ": invalid key '" + key + "'");
    if (cfg.contains(key)) throw ConfigError(where + ": duplicate key '" + key + "'");
    cfg.values_[key] = trim(body.substr(eq + 1));
  }
  return cfg;
}

Config Config::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file '" + path + "'");
  return parse(in, path);
}

void Config::set(const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos) throw ConfigError("override must look like key=value, got '" + assignment + "'");
  set(trim(assignment.substr(0, eq)), trim(assignment.substr(eq + 1)));
}

void Config::set(const std::string& key, const std::string& value) {
  if (!valid_key(key)) throw ConfigError("invalid key '" + key + "'");
  values_[key] = value;
}

EffectiveConfig::EffectiveConfig(const std::string& experiment, const Config& given) : experiment_(experiment) {
  const auto& keys = experiment_keys(experiment);
  for (const auto& [key, value] : given.values()) {
    if (key == "experiment") {
      if (value != experiment) throw ConfigError("config names experiment '" + value + "' but '" + experiment + "' was requested");
      continue;
    }
    if (std::none_of(keys.begin(), keys.end(), [&](const ConfigKey& k) { return k.name == key; }))
      throw ConfigError("unknown key '" + key + "' for experiment " + experiment);
  }
  entries_.emplace_back("experiment", experiment);
  for (const auto& k : keys) {
    const auto it = given.values().find(k.name);
    entries_.emplace_back(k.name, it == given.values().end() ? k.default_value : it->second);
  }
}

std::string EffectiveConfig::canonical_text() const {
  std::string text;
  for (const auto& [k, v] : entries_) text += k + "=" + v + "\n";
  return text;
}

std::string EffectiveConfig::str(const std::string& key) const {
  for (const auto& [k, v] : entries_)
    if (k == key) return v;
  throw std::logic_error("experiment " + experiment_ + " has no key '" + key + "'");
}

int EffectiveConfig::integer(const std::string& key) const {
  const std::string text = str(key);
  int v = 0;
  const auto* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, v);
  if (ec != std::errc() || ptr != end) throw ConfigError("'" + key + "' must be an integer, got '" + text + "'");
  return v;
}

double EffectiveConfig::real(const std::string& key) const {
  const std::string text = str(key);
  double v = 0.0;
  const auto* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, v);
  if (ec != std::errc() || ptr != end || !std::isfinite(v)) throw ConfigError("'" + key + "' must be a number, got '" + text + "'");
  return v;
}

std::uint64_t EffectiveConfig::unsigned64(const std::string& key) const {
  const std::string text = str(key);
  std::uint64_t v = 0;
  const auto* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, v);
  if (ec != std::errc() || ptr != end) throw ConfigError("'" + key + "' must be a non-negative integer, got '" + text + "'");
  return v;
}

bool EffectiveConfig::boolean(const std::string& key) const {
  const std::string text = str(key);
  if (text == "true" || text == "1" || text == "yes") return true;
  if (text == "false" || text == "0" || text == "no") return false;
  throw ConfigError("'" + key + "' must be true or false, got '" + text + "'");
}

std::vector<std::string> EffectiveConfig::list(const std::string& key) const {
  std::vector<std::string> items;
  std::istringstream in(str(key));
  for (std::string item; std::getline(in, item, ',');) {
    item = trim(item);
    if (item.empty()) throw ConfigError("'" + key + "' has an empty list entry");
    items.push_back(item);
  }
  if (items.empty()) throw ConfigError("'" + key + "' must not be empty");
  return items;
}

std::string content_hash(const std::string& text) {
  const std::string blob = "blob " + std::to_string(text.size()) + '\0' + text;
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(blob.data(), blob.size(), digest, &len, EVP_sha1(), nullptr) != 1)
    throw std::runtime_error("SHA-1 digest failed");
  static const char* hex = "0123456789abcdef";
  std::string out;
  for (unsigned int i = 0; i < len; ++i) {
    out += hex[digest[i] >> 4];
    out += hex[digest[i] & 0xF];
  }
  return out;
}

std::string tool_version() { return DFSAQC_VERSION; }

RunSummary run_experiment(const EffectiveConfig& config, const std::string& out_path) {
  using Runner = std::function<RunSummary(const EffectiveConfig&, const std::string&)>;
  static const std::map<std::string, Runner> runners = {
      {"basis", run_basis},   {"spectrum", run_spectrum}, {"grover-cont", run_grover}, {"aqc-run", run_aqc},
      {"trotter-sweep", run_sweep}, {"schedule", run_schedule}, {"krotov", run_krotov}, {"noise-bench", run_noise},
  };
  if (out_path.empty()) throw ConfigError("an output path is required");
  return runners.at(config.experiment())(config, out_path);
}

}  // namespace dfsaqc
