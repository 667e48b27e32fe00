#include "dfsaqc/trotter.hpp"

#include <algorithm>
#include <chrono>
#include <random>

#include "dfsaqc/dfs_code.hpp"
#include "dfsaqc/grover.hpp"
#include "dfsaqc/parallel.hpp"

namespace dfsaqc {

TrotterPlan linear_coeffs(double T, int M, int K) {
  if (M < 1) throw std::invalid_argument("Trotter plan needs M >= 1");
  if (K < 1) throw std::invalid_argument("Trotter repetition K must be >= 1");
  TrotterPlan plan{K, T, std::vector<TrotterStep>(static_cast<std::size_t>(M))};
  const double dt = T / M;
  for (int l = 1; l <= M; ++l)
    plan.coeffs[static_cast<std::size_t>(l - 1)] = {(1.0 - dt * l / T) * dt, dt * dt * l / T};
  if (T == 0.0)
    for (auto& c : plan.coeffs) c = {0.0, 0.0};
  return plan;
}

TrotterPlan schedule_coeffs(const Schedule& schedule, int K) {
  schedule.validate();
  if (K < 1) throw std::invalid_argument("Trotter repetition K must be >= 1");
  TrotterPlan plan{K, schedule.T, {}};
  plan.coeffs.reserve(schedule.values.size());
  const double dt = schedule.dt();
  for (double s : schedule.values) plan.coeffs.push_back({(1.0 - s) * dt, s * dt});
  return plan;
}

void trotter_step(const Generator& H_i, const Generator& H_f, const TrotterStep& step, int K, CVector& v) {
  const double half = step.g / (2.0 * K);
  const double mid = step.f / K;
  for (int k = 0; k < K; ++k) {
    H_f.propagate(v, half);
    H_i.propagate(v, mid);
    H_f.propagate(v, half);
  }
}

void trotter_propagate(const Generator& H_i, const Generator& H_f, const TrotterPlan& plan, CVector& v,
                       const std::function<void(int, const CVector&)>& observer) {
  require_same_space(H_i.space(), H_f.space());
  if (v.size() != H_i.space().dim()) throw SpaceMismatch("initial state does not match the Hamiltonians");
  int l = 0;
  for (const auto& step : plan.coeffs) {
    trotter_step(H_i, H_f, step, plan.K, v);
    if (observer) observer(++l, v);
  }
}

State trotter_evolve(const Generator& H_i, const Generator& H_f, const TrotterPlan& plan, const State& psi0) {
  require_same_space(H_i.space(), psi0.space());
  CVector v = psi0.amplitudes();
  trotter_propagate(H_i, H_f, plan, v);
  if (std::abs(v.norm() - 1.0) > tol::norm) throw std::runtime_error("Trotter product lost normalization");
  return State::normalized(psi0.space(), std::move(v));
}

State trotter_evolve(const Operator& H_i, const Operator& H_f, const TrotterPlan& plan, const State& psi0) {
  return trotter_evolve(SpectralGenerator(H_i), SpectralGenerator(H_f), plan, psi0);
}

double trotter_validity(const Operator& H_i, const Operator& H_f, const TrotterPlan& plan) {
  const Operator diff = H_i - H_f;
  const auto w = lowest_eigenvalues(diff, diff.dim());
  const double norm = std::max(std::abs(w.front()), std::abs(w.back()));
  return plan.dt() * norm;
}

KRule KRule::parse(const std::string& text) {
  if (text == "nL" || text == "n_L" || text == "equal_nL" || text == "equal") return {Kind::EqualLogical, 0};
  std::size_t used = 0;
  int k = 0;
  try {
    k = std::stoi(text, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != text.size() || k < 1) throw std::invalid_argument("K rule must be a positive integer or 'nL', got '" + text + "'");
  return {Kind::Constant, k};
}

std::string KRule::str() const { return kind == Kind::EqualLogical ? "nL" : std::to_string(k); }

WSelector WSelector::parse(const std::string& text) {
  if (text == "all") return {Kind::All, 0};
  if (text == "random" || text == "seeded") return {Kind::Random, 0};
  std::size_t used = 0;
  long long idx = -1;
  try {
    idx = std::stoll(text, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != text.size() || idx < 0) throw std::invalid_argument("w must be an index, 'all' or 'random', got '" + text + "'");
  return {Kind::Index, static_cast<Eigen::Index>(idx)};
}

std::string WSelector::str() const {
  switch (kind) {
    case Kind::All:
      return "all";
    case Kind::Random:
      return "random";
    case Kind::Index:
      return std::to_string(index);
  }
  return "?";
}

std::vector<Eigen::Index> WSelector::resolve(Eigen::Index N, std::uint64_t seed) const {
  switch (kind) {
    case Kind::Index:
      if (index >= N) throw std::out_of_range("marked index " + std::to_string(index) + " outside [0, N)");
      return {index};
    case Kind::All: {
      std::vector<Eigen::Index> all(static_cast<std::size_t>(N));
      for (Eigen::Index i = 0; i < N; ++i) all[static_cast<std::size_t>(i)] = i;
      return all;
    }
    case Kind::Random: {
      std::mt19937_64 rng(seed);
      std::uniform_int_distribution<Eigen::Index> pick(0, N - 1);
      return {pick(rng)};
    }
  }
  return {};
}

SweepResult fidelity_sweep(const SweepSpec& spec) {
  if (spec.T_list.empty() || spec.M_list.empty()) throw std::invalid_argument("sweep needs non-empty T and M lists");
  if (spec.schedule == ScheduleKind::Krotov)
    throw std::invalid_argument("Krotov schedules come from the krotov experiment, not from a sweep");
  for (int M : spec.M_list)
    if (M < 1) throw std::invalid_argument("sweep M values must be >= 1");
  const int nL = spec.n_logical;
  if (spec.space == SweepSpace::Full && 2 * nL > kMaxFullSpins)
    throw DimensionError("FULL-space sweeps are capped at " + std::to_string(kMaxFullSpins) + " spins");
  const int K = spec.k_rule.resolve(nL);
  const Space logical = Space::logical(nL);
  const auto ws = spec.w.resolve(logical.dim(), spec.seed);

  const Operator Hi_logical = logical_initial_h(nL, spec.J);
  std::optional<GapProfile> profile;
  if (spec.schedule == ScheduleKind::GapOptimized)
    profile = gap_profile(Hi_logical, oracle_h(logical, 0), spec.gap_grid);

  const double hnorm = [&] {
    const auto w = lowest_eigenvalues(Hi_logical - oracle_h(logical, 0), logical.dim());
    return std::max(std::abs(w.front()), std::abs(w.back()));
  }();

  struct Job {
    double T;
    int M;
    Eigen::Index w;
  };
  std::vector<Job> jobs;
  for (double T : spec.T_list)
    for (int M : spec.M_list)
      for (auto w : ws) jobs.push_back({T, M, w});

  std::optional<SpaceMap> map;
  if (spec.space == SweepSpace::Full) map.emplace(2 * nL);

  SweepResult result;
  result.records.resize(jobs.size());
  parallel_for(
      jobs.size(),
      [&](std::size_t j) {
        const auto start = std::chrono::steady_clock::now();
        const Job& job = jobs[j];
        const Schedule sch = profile ? gap_schedule(*profile, job.T, job.M) : linear_schedule(job.T, job.M);
        const TrotterPlan plan =
            spec.schedule == ScheduleKind::Linear ? linear_coeffs(job.T, job.M, K) : schedule_coeffs(sch, K);

        FidelityRecord rec{spec.experiment, nL, job.T, job.M, K, spec.schedule, job.w, 0.0, std::nullopt, 0.0};
        if (spec.space == SweepSpace::Logical) {
          const LogicalDriver Hi(nL, spec.J);
          const ProjectorOracle Hf(logical, job.w);
          CVector v = xxx_ground_state(nL).amplitudes();
          trotter_propagate(Hi, Hf, plan, v);
          rec.fidelity = std::norm(v(job.w));
        } else {
          const int n = 2 * nL;
          const auto target = static_cast<Eigen::Index>(logical_to_full(static_cast<std::uint64_t>(job.w), nL));
          const PairChain Hi(n, spec.J, spec.J);
          const ProjectorOracle Hf(Space::full(n), target);
          CVector v = embed(xxx_ground_state(nL), Space::full(n), *map).amplitudes();
          double worst = 0.0;
          trotter_propagate(Hi, Hf, plan, v, [&](int, const CVector& state) {
            worst = std::max(worst, leakage(state, logical, *map));
          });
          rec.fidelity = std::norm(v(target));
          rec.leakage = std::clamp(worst, 0.0, 1.0);
        }
        rec.fidelity = std::clamp(rec.fidelity, 0.0, 1.0);
        rec.wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
        result.records[j] = rec;
      },
      spec.workers == 0 ? worker_count() : spec.workers);

  for (const auto& job : jobs) result.max_validity = std::max(result.max_validity, job.T / job.M * hnorm);
  return result;
}

}  // namespace dfsaqc
