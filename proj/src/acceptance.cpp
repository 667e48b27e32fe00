#include "dfsaqc/acceptance.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <map>
#include <random>
#include <sstream>

#include <json.hpp>

#include "dfsaqc/aqc.hpp"
#include "dfsaqc/control_opt.hpp"
#include "dfsaqc/dfs_code.hpp"
#include "dfsaqc/grover.hpp"
#include "dfsaqc/noise_bench.hpp"
#include "dfsaqc/trotter.hpp"

namespace dfsaqc {

namespace {

std::string num(double v, int digits = 6) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*g", digits, v);
  return buf;
}

struct Outcome {
  bool pass;
  std::string measured;
};

using Check = std::function<Outcome(const AcceptanceOptions&)>;

std::uint64_t binomial(int n, int k) {
  std::uint64_t r = 1;
  for (int i = 1; i <= k; ++i) r = r * static_cast<std::uint64_t>(n - k + i) / static_cast<std::uint64_t>(i);
  return r;
}

Outcome dfs_dimension(const AcceptanceOptions&) {
  bool ok = true;
  std::string sizes;
  for (int n = 2; n <= 14; n += 2) {
    const SpaceMap map = dfs_basis(n);
    ok = ok && map.dfs_indices().size() == binomial(n, n / 2) && map.logical_indices().size() == (std::size_t{1} << (n / 2));
    sizes += (sizes.empty() ? "" : ",") + std::to_string(map.dfs_indices().size());
  }
  // reference n = 4 list, dduu first; ascending integers give it in reverse
  const std::vector<std::uint64_t> listed = {0b1100, 0b1010, 0b1001, 0b0110, 0b0101, 0b0011};
  const SpaceMap four = dfs_basis(4);
  std::vector<std::uint64_t> got(four.dfs_indices().begin(), four.dfs_indices().end());
  std::vector<std::uint64_t> expected(listed.rbegin(), listed.rend());
  const bool list_ok = got == expected;
  return {ok && list_ok, "sizes n=2..14: " + sizes + "; n=4 list " + (list_ok ? "matches" : "differs")};
}

Outcome pair_spectra(const AcceptanceOptions&) {
  double worst = 0.0;
  auto check = [&](const Operator& H, const std::vector<double>& expected) {
    const auto w = lowest_eigenvalues(H, H.dim());
    for (std::size_t i = 0; i < expected.size(); ++i) worst = std::max(worst, std::abs(w[i] - expected[i]));
  };
  check(xx_pairs(2), {-2, 0, 0, 2});
  for (double J : {0.5, 1.0, 2.0}) check(xxx_pairs(2, J), {-3 * J, J, J, J});
  const auto g = eig_lowest(xxx_pairs(2, 1.0), 1).front();
  CVector singlet = CVector::Zero(4);
  singlet(1) = 1.0 / std::sqrt(2.0);
  singlet(2) = -1.0 / std::sqrt(2.0);
  const double overlap = std::norm(singlet.dot(g.vector));
  const bool ok = worst < tol::residual && overlap > 1.0 - 1e-12;
  return {ok, "max eigenvalue error " + num(worst, 3) + ", singlet overlap 1-" + num(1.0 - overlap, 3)};
}

Outcome closed_form_grover(const AcceptanceOptions&) {
  std::mt19937_64 rng(2024);
  double worst = 0.0, worst_peak = 1.0;
  for (int nL : {2, 3, 4, 5}) {
    const Space space = Space::logical(nL);
    const auto inst = GroverInstance::make(space, 1);
    const SpectralDecomposition<double> sd(grover_h(inst));
    const CVector s = uniform_state(space).amplitudes();
    std::uniform_real_distribution<double> pick(0.0, 2.0 * grover_quoted_time(inst.N));
    for (int i = 0; i < 50; ++i) {
      const double t = pick(rng);
      worst = std::max(worst, std::abs(std::norm(sd.propagate(s, t)(inst.w)) - success_probability(t, inst.N)));
    }
    worst_peak = std::min(worst_peak, std::norm(sd.propagate(s, grover_peak_time(inst.N))(inst.w)));
  }
  return {worst < 1e-9 && worst_peak >= 1.0 - 1e-9,
          "max |numeric - closed form| " + num(worst, 3) + ", min peak probability 1-" + num(1.0 - worst_peak, 3)};
}

Outcome linear_saturation(const AcceptanceOptions&) {
  const std::vector<double> Ts = {20, 30, 40, 60};
  SweepSpec spec;
  spec.n_logical = 3;
  spec.J = 1.0;
  spec.T_list = Ts;
  spec.M_list = {250, 500, 1000, 2000};
  spec.w = WSelector{WSelector::Kind::Index, 0};
  const auto records = fidelity_sweep(spec).records;
  const Operator Hi = logical_initial_h(3, 1.0);
  const Operator Hf = oracle_h(Space::logical(3), 0);
  bool ok = true;
  double prev = -1.0, worst_ref = 0.0, worst_sat = 0.0;
  std::string values;
  for (std::size_t t = 0; t < Ts.size(); ++t) {
    const auto at = [&](std::size_t m) { return records[t * spec.M_list.size() + m].fidelity; };
    const double saturated = at(3);
    worst_sat = std::max(worst_sat, std::abs(at(3) - at(2)));
    const double ref = std::norm(adiabatic_evolve(Hi, Hf, linear_schedule(Ts[t], 200), xxx_ground_state(3))[0]);
    worst_ref = std::max(worst_ref, std::abs(saturated - ref));
    ok = ok && saturated >= prev;
    prev = saturated;
    values += (values.empty() ? "" : ",") + num(saturated, 5);
  }
  ok = ok && worst_ref < 1e-3 && worst_sat < 1e-3;
  return {ok, "saturated F(T=20,30,40,60) " + values + "; |M=2000 - M=1000| " + num(worst_sat, 3) +
                  "; |saturated - continuous| " + num(worst_ref, 3)};
}

Outcome gap_schedule_shape(const AcceptanceOptions&) {
  GapProfile flat;
  for (int i = 0; i < 257; ++i) {
    flat.grid.push_back(i / 256.0);
    flat.e0.push_back(-1.0);
    flat.e1.push_back(0.5);
  }
  const Schedule s_flat = gap_schedule(flat, 10.0, 50);
  double linear_dev = 0.0;
  for (int l = 1; l <= 50; ++l) linear_dev = std::max(linear_dev, std::abs(s_flat.values[static_cast<std::size_t>(l - 1)] - l / 50.0));

  const int nL = 7;
  const GapProfile prof = gap_profile(logical_initial_h(nL, 1.0), oracle_h(Space::logical(nL), 0));
  const double T = default_total_time(nL);
  const int M = static_cast<int>(std::lround(2.0 * T));
  const Schedule sch = gap_schedule(prof, T, M);
  std::vector<double> slope(static_cast<std::size_t>(M));
  bool monotone = true;
  double prev = 0.0;
  for (std::size_t l = 0; l < slope.size(); ++l) {
    slope[l] = (sch.values[l] - prev) / sch.dt();
    monotone = monotone && sch.values[l] >= prev;
    prev = sch.values[l];
  }
  const auto imax = static_cast<std::size_t>(std::max_element(slope.begin(), slope.end()) - slope.begin());
  const auto imin = static_cast<std::size_t>(std::min_element(slope.begin(), slope.end()) - slope.begin());
  const bool endpoint_max = (imax == 0 || imax + 1 == slope.size()) && slope.front() >= slope[1] &&
                            slope.back() >= slope[slope.size() - 2];
  const double s_gap = prof.grid[prof.min_gap_index()];
  const double lo = imin == 0 ? 0.0 : sch.values[imin - 1];
  const double hi = sch.values[imin];
  const double grid_step = 1.0 / (static_cast<double>(prof.grid.size()) - 1.0);
  const bool min_at_gap = s_gap >= lo - grid_step && s_gap <= hi + grid_step;
  return {linear_dev < 1e-6 && monotone && endpoint_max && min_at_gap,
          "constant-gap deviation " + num(linear_dev, 3) + "; n_L=7 monotone " + (monotone ? "yes" : "no") +
              ", max slope at step " + std::to_string(imax + 1) + "/" + std::to_string(M) + ", min slope on s in [" + num(lo, 4) +
              "," + num(hi, 4) + "], minimum gap at s=" + num(s_gap, 4)};
}

Outcome k_effect(const AcceptanceOptions&) {
  const int nL = 4;
  const double T = default_total_time(nL);
  std::vector<int> Ms;
  for (int M = 10; M <= 200; M += 10) Ms.push_back(M);
  Ms.push_back(static_cast<int>(std::lround(2.0 * T)));
  std::sort(Ms.begin(), Ms.end());

  auto sweep = [&](ScheduleKind kind, KRule rule) {
    SweepSpec spec;
    spec.n_logical = nL;
    spec.T_list = {T};
    spec.M_list = Ms;
    spec.k_rule = rule;
    spec.schedule = kind;
    spec.w = WSelector{WSelector::Kind::Index, 0};
    return fidelity_sweep(spec).records;
  };
  std::string detail;
  int violations = 0;
  for (ScheduleKind kind : {ScheduleKind::GapOptimized, ScheduleKind::Linear}) {
    const auto one = sweep(kind, KRule{KRule::Kind::Constant, 1});
    const auto many = sweep(kind, KRule{KRule::Kind::EqualLogical, 0});
    std::vector<int> bad;
    double kind_worst = 0.0;
    for (std::size_t i = 0; i < Ms.size(); ++i) {
      const double drop = one[i].fidelity - many[i].fidelity;
      if (drop > 1e-6) {
        bad.push_back(Ms[i]);
        kind_worst = std::max(kind_worst, drop);
      }
    }
    // the K-effect is claimed for the optimized switching; the linear sweep is context
    if (kind == ScheduleKind::GapOptimized) violations += static_cast<int>(bad.size());
    std::string list;
    for (int M : bad) list += (list.empty() ? "" : ",") + std::to_string(M);
    detail += (detail.empty() ? "" : "; ") + to_string(kind) + ": " + std::to_string(bad.size()) + "/" + std::to_string(Ms.size()) +
              " points with F(K=1) - F(K=4) > 1e-6" + (bad.empty() ? "" : " at M=" + list + " (worst " + num(kind_worst, 3) + ")");
  }
  return {violations == 0, "T=" + num(T, 6) + ", M=10..200 step 10 and 2T; " + detail};
}

Outcome krotov(const AcceptanceOptions&) {
  bool ok = true;
  std::string detail;
  for (int nL : {5, 6, 7}) {
    const ControlProblem problem{nL, 1.0, 1, 0};
    const double T = default_total_time(nL);
    const int M = static_cast<int>(std::lround(2.0 * T));
    const Schedule seed = gap_schedule(gap_profile(logical_initial_h(nL, 1.0), oracle_h(Space::logical(nL), 0)), T, M);
    const KrotovConfig cfg;
    const OptimizationTrace trace = krotov_optimize(seed, cfg, problem);
    bool monotone = true;
    for (std::size_t i = 1; i < trace.objective.size(); ++i)
      monotone = monotone && trace.objective[i] >= trace.objective[i - 1] - 10.0 * cfg.convergence_eps;
    const bool pass = trace.final_objective() >= 0.999 && monotone && trace.seed_objective() < trace.final_objective();
    ok = ok && pass;
    detail += (detail.empty() ? "" : "; ") + std::string("n_L=") + std::to_string(nL) + ": " + num(trace.seed_objective(), 6) + " -> " +
              num(trace.final_objective(), 7) + " in " + std::to_string(trace.objective.size() - 1) + " iterations" +
              (monotone ? "" : " (non-monotone)");
  }
  return {ok, detail};
}

Outcome gradient_correctness(const AcceptanceOptions&) {
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> value(0.05, 0.95);
  double worst = 0.0;
  int checked = 0;
  for (int instance = 0; instance < 2; ++instance) {
    Schedule sch{8.0, std::vector<double>(20), ScheduleKind::Krotov};
    for (auto& s : sch.values) s = value(rng);
    const ControlProblem problem{2, 1.0, 1 + instance, static_cast<Eigen::Index>(instance + 1)};
    std::uniform_int_distribution<int> pick(1, sch.M());
    for (int i = 0; i < 5; ++i) {
      worst = std::max(worst, gradient_check(sch, problem, pick(rng), 1e-5));
      ++checked;
    }
  }
  return {worst < 1e-4, std::to_string(checked) + " coordinates, max relative error " + num(worst, 3)};
}

Outcome self_protection(const AcceptanceOptions&) {
  const SpinBath bath{1, 1.0, 0.3};
  const auto clean = protection_report(ProtectedProtocol::ContinuousGrover, bath, 4);
  ProtectionOptions broken;
  broken.stray_field = 0.5;
  const auto control = protection_report(ProtectedProtocol::ContinuousGrover, bath, 4, broken);
  const SpaceMap map(4);
  const auto inst = GroverInstance::make(Space::dfs(4), 0);
  const double fact = factorization_deviation(lift_operator(grover_h(inst), map), bath, grover_peak_time(inst.N));
  return {clean.difference < 1e-8 && control.difference > 1e-3 && fact < 1e-9,
          "protected difference " + num(clean.difference, 3) + ", stray-field difference " + num(control.difference, 4) +
              ", factorization deviation " + num(fact, 3)};
}

Outcome logical_full(const AcceptanceOptions&) {
  SweepSpec spec;
  spec.n_logical = 3;
  spec.T_list = {20.0, 40.0};
  spec.M_list = {10, 40};
  spec.schedule = ScheduleKind::GapOptimized;
  spec.w = WSelector{WSelector::Kind::All, 0};
  spec.space = SweepSpace::Logical;
  const auto logical = fidelity_sweep(spec).records;
  spec.space = SweepSpace::Full;
  const auto full = fidelity_sweep(spec).records;
  double diff = 0.0, leak = 0.0;
  for (std::size_t i = 0; i < logical.size(); ++i) {
    diff = std::max(diff, std::abs(logical[i].fidelity - full[i].fidelity));
    leak = std::max(leak, full[i].leakage.value_or(1.0));
  }
  return {diff < 1e-8 && leak < 1e-10, std::to_string(logical.size()) + " runs, max fidelity difference " + num(diff, 3) +
                                           ", max leakage " + num(leak, 3)};
}

Outcome cnot(const AcceptanceOptions&) {
  const double dev = cnot_check();
  return {dev < 1e-8, "max deviation up to global phase " + num(dev, 3)};
}

Outcome sign_flip(const AcceptanceOptions& options) {
  const int nL = 3;
  const Space logical = Space::logical(nL);
  const Operator U = options.sign_flip ? options.sign_flip(nL) : sign_flip_unitary(nL);
  const double state_dev = (U.apply(xxx_ground_state(nL).amplitudes()) - uniform_state(logical).amplitudes()).cwiseAbs().maxCoeff();

  // conjugating the XXX driver gives the standard transverse driver sum(-J 1 - 2J X_q)
  CMatrix standard = CMatrix::Zero(logical.dim(), logical.dim());
  for (int q = 0; q < nL; ++q) standard -= CMatrix::Identity(logical.dim(), logical.dim()) + 2.0 * pauli(Pauli::X, q, nL).dense();
  const Operator Hi = logical_initial_h(nL, 1.0);
  const double driver_dev = (U.dense() * Hi.dense() * U.dense() - standard).cwiseAbs().maxCoeff();

  double fid_dev = 0.0;
  const Schedule sch = linear_schedule(30.0, 60);
  for (Eigen::Index w = 0; w < logical.dim(); ++w) {
    const Operator Hf = oracle_h(logical, w);
    const double a = std::norm(trotter_evolve(Hi, Hf, schedule_coeffs(sch), xxx_ground_state(nL))[w]);
    const Operator Hf_conj(logical, CMatrix(U.dense() * Hf.dense() * U.dense()));
    const Operator Hi_std(logical, standard);
    const double b = std::norm(trotter_evolve(Hi_std, Hf_conj, schedule_coeffs(sch), uniform_state(logical))[w]);
    fid_dev = std::max(fid_dev, std::abs(a - b));
  }
  return {state_dev < 1e-12 && driver_dev < 1e-12 && fid_dev < 1e-12,
          "|U Psi0 - s| " + num(state_dev, 3) + ", |U H_i U - H_std| " + num(driver_dev, 3) + ", fidelity difference " + num(fid_dev, 3)};
}

struct Entry {
  std::string id;
  std::string title;
  bool fast;
  Check check;
};

const std::vector<Entry>& registry() {
  static const std::vector<Entry> entries = {
      {"1", "DFS dimension and n=4 basis", true, dfs_dimension},
      {"2", "pair spectra and singlet ground state", true, pair_spectra},
      {"3", "closed-form continuous Grover", true, closed_form_grover},
      {"4", "linear-schedule saturation (n_L=3)", false, linear_saturation},
      {"5", "gap-optimized schedule shape", true, gap_schedule_shape},
      {"6", "Trotter K-effect (n_L=4)", false, k_effect},
      {"7", "Krotov reaches 0.999 (n_L=5,6,7)", false, krotov},
      {"8", "adjoint gradient vs finite differences", true, gradient_correctness},
      {"9", "self-protection under a spin bath", true, self_protection},
      {"10", "logical/full equivalence and leakage", true, logical_full},
      {"11", "CNOT construction in the DFS", true, cnot},
      {"sign-flip", "sign-flip correspondence", true, sign_flip},
  };
  return entries;
}

}  // namespace

Suite parse_suite(const std::string& text) {
  if (text == "fast") return Suite::Fast;
  if (text == "full") return Suite::Full;
  throw std::invalid_argument("suite must be fast or full, got '" + text + "'");
}

std::vector<std::string> suite_ids(Suite suite) {
  std::vector<std::string> ids;
  for (const auto& e : registry())
    if (suite == Suite::Full || e.fast) ids.push_back(e.id);
  return ids;
}

std::vector<CriterionResult> run_acceptance(const AcceptanceOptions& options,
                                            const std::function<void(const CriterionResult&)>& on_result) {
  for (const auto& id : options.only)
    if (std::none_of(registry().begin(), registry().end(), [&](const Entry& e) { return e.id == id; }))
      throw std::invalid_argument("unknown criterion id '" + id + "'");
  std::vector<CriterionResult> results;
  for (const auto& e : registry()) {
    if (options.suite == Suite::Fast && !e.fast) continue;
    if (!options.only.empty() && std::find(options.only.begin(), options.only.end(), e.id) == options.only.end()) continue;
    CriterionResult r{e.id, e.title, false, "", 0.0};
    const auto start = std::chrono::steady_clock::now();
    try {
      const Outcome o = e.check(options);
      r.pass = o.pass;
      r.measured = o.measured;
    } catch (const std::exception& ex) {
      r.pass = false;
      r.measured = std::string("exception: ") + ex.what();
    }
    r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (on_result) on_result(r);
    results.push_back(std::move(r));
  }
  return results;
}

std::string format_line(const CriterionResult& r) {
  char secs[32];
  std::snprintf(secs, sizeof secs, "%.2fs", r.seconds);
  return std::string(r.pass ? "[PASS] " : "[FAIL] ") + r.id + "  " + r.title + "  (" + r.measured + ") [" + secs + "]";
}

std::string to_json_line(const CriterionResult& r) {
  const nlohmann::json j = {{"criterion", r.id}, {"title", r.title}, {"pass", r.pass}, {"measured", r.measured}, {"seconds", r.seconds}};
  return j.dump();
}

}  // namespace dfsaqc
