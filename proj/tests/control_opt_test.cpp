#include <gtest/gtest.h>

#include <random>

#include "dfsaqc/control_opt.hpp"
#include "dfsaqc/grover.hpp"

using namespace dfsaqc;

namespace {

Schedule random_schedule(double T, int M, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  Schedule s;
  s.T = T;
  s.kind = ScheduleKind::Krotov;
  for (int l = 0; l < M; ++l) s.values.push_back(u(rng));
  return s;
}

Schedule seed_for(const ControlProblem& p, double T, int M) {
  const auto prof = gap_profile(logical_initial_h(p.n_logical, p.J), oracle_h(Space::logical(p.n_logical), p.w), 256);
  return gap_schedule(prof, T, M);
}

}  // namespace

TEST(Objective, GapSeedBaselineIsAProperFidelity) {
  const ControlProblem p{3, 1.0, 1, 5};
  const double f = objective(seed_for(p, 40.0, 80), p);
  EXPECT_GT(f, 0.0);
  EXPECT_LT(f, 1.0);
  // matches a direct Trotter run of the same plan
  const State out = trotter_evolve(logical_initial_h(3, 1.0), oracle_h(Space::logical(3), 5),
                                   schedule_coeffs(seed_for(p, 40.0, 80)), xxx_ground_state(3));
  EXPECT_NEAR(f, std::norm(out[5]), 1e-12);
}

TEST(Objective, PureOracleScheduleKeepsInitialOverlap) {
  for (int nl : {1, 2, 4}) {
    const ControlProblem p{nl, 1.0, 2, 1};
    Schedule s;
    s.T = 13.0;
    s.values.assign(20, 1.0);
    EXPECT_NEAR(objective(s, p), 1.0 / static_cast<double>(Eigen::Index{1} << nl), 1e-13);
  }
}

TEST(Objective, AlwaysInUnitInterval) {
  std::mt19937_64 rng(3);
  for (int i = 0; i < 30; ++i) {
    const double f = objective(random_schedule(10.0, 15, rng), ControlProblem{3, 1.0, 1, 2});
    EXPECT_GE(f, 0.0);
    EXPECT_LE(f, 1.0);
  }
}

TEST(Objective, FidelityCurveEndsAtObjective) {
  const ControlProblem p{3, 1.0, 2, 0};
  const Schedule s = seed_for(p, 20.0, 30);
  const auto curve = fidelity_curve(s, p);
  ASSERT_EQ(curve.size(), 30U);
  EXPECT_NEAR(curve.back(), objective(s, p), 1e-14);
}

TEST(Objective, ProblemValidation) {
  const Schedule s = linear_schedule(10, 10);
  EXPECT_THROW(objective(s, ControlProblem{3, 1.0, 0, 0}), std::invalid_argument);
  EXPECT_THROW(objective(s, ControlProblem{3, 1.0, 1, 8}), std::out_of_range);
  EXPECT_THROW(objective(s, ControlProblem{13, 1.0, 1, 0}), DimensionError);
}

TEST(Gradient, RandomSchedulesPassTheCheck) {
  std::mt19937_64 rng(2024);
  for (int K : {1, 2}) {
    const ControlProblem p{2, 1.0, K, 3};
    const Schedule s = random_schedule(8.0, 20, rng);
    std::uniform_int_distribution<int> pick(1, 20);
    for (int i = 0; i < 5; ++i) EXPECT_LT(gradient_check(s, p, pick(rng), 1e-5), 1e-4);
  }
}

TEST(Gradient, BoundaryControlUsesOneSidedDifference) {
  std::mt19937_64 rng(5);
  const ControlProblem p{2, 1.0, 1, 0};
  Schedule s = random_schedule(8.0, 12, rng);
  s.values[4] = 1.0;
  s.values[7] = 0.0;
  EXPECT_LT(gradient_check(s, p, 5, 1e-6), 1e-4);
  EXPECT_LT(gradient_check(s, p, 8, 1e-6), 1e-4);
  // the estimate never evaluates outside [0, 1]: a central difference would
  // differ from the one-sided one by O(h)
  const double g = gradient(s, p)[4];
  EXPECT_NEAR(finite_difference(s, p, 5, 1e-6), g, 1e-4 * std::max(1.0, std::abs(g)));
}

TEST(Gradient, FiniteDifferenceErrorFallsQuadratically) {
  std::mt19937_64 rng(19);
  const ControlProblem p{2, 1.0, 1, 1};
  const Schedule s = random_schedule(8.0, 10, rng);
  const auto g = gradient(s, p);
  for (int l : {2, 6}) {
    const double e1 = std::abs(finite_difference(s, p, l, 1e-3) - g[static_cast<std::size_t>(l - 1)]);
    const double e2 = std::abs(finite_difference(s, p, l, 5e-4) - g[static_cast<std::size_t>(l - 1)]);
    EXPECT_GT(e1 / e2, 3.5) << l;
    EXPECT_LT(e1 / e2, 4.5) << l;
  }
}

TEST(Gradient, RejectsBadArguments) {
  const ControlProblem p{2, 1.0, 1, 1};
  const Schedule s = linear_schedule(8, 10);
  EXPECT_THROW(gradient_check(s, p, 0, 1e-5), std::out_of_range);
  EXPECT_THROW(gradient_check(s, p, 11, 1e-5), std::out_of_range);
  EXPECT_THROW(gradient_check(s, p, 3, 1e-2), std::invalid_argument);
  EXPECT_THROW(gradient_check(s, p, 3, 1e-8), std::invalid_argument);
}

TEST(Krotov, ImprovesGapSeedMonotonically) {
  const ControlProblem p{4, 1.0, 1, 7};
  const double T = default_total_time(4);
  const Schedule seed = seed_for(p, T, static_cast<int>(std::lround(2 * T)));
  KrotovConfig cfg;
  const auto tr = krotov_optimize(seed, cfg, p);
  EXPECT_NEAR(tr.seed_objective(), objective(seed, p), 1e-12);
  EXPECT_GT(tr.final_objective(), tr.seed_objective());
  EXPECT_GE(tr.final_objective(), 0.999);
  for (std::size_t k = 1; k < tr.objective.size(); ++k)
    EXPECT_GE(tr.objective[k], tr.objective[k - 1] - 10 * cfg.convergence_eps);
  for (double s : tr.schedule.values) {
    EXPECT_GE(s, 0.0);
    EXPECT_LE(s, 1.0);
  }
  EXPECT_EQ(tr.schedule.kind, ScheduleKind::Krotov);
  EXPECT_NEAR(objective(tr.schedule, p), tr.final_objective(), 1e-12);
  EXPECT_EQ(tr.tau.size(), seed.values.size());
  EXPECT_DOUBLE_EQ(tr.tau.back(), 1.0);
  EXPECT_NEAR(tr.fidelity.back(), tr.final_objective(), 1e-12);
}

TEST(Krotov, OptimizedScheduleAgreesWithSeedEarly) {
  const ControlProblem p{4, 1.0, 1, 0};
  const double T = default_total_time(4);
  const int M = static_cast<int>(std::lround(2 * T));
  const Schedule seed = seed_for(p, T, M);
  const auto tr = krotov_optimize(seed, KrotovConfig{}, p);
  double early = 0, late = 0;
  for (int l = 0; l < M; ++l) {
    const double d = std::abs(tr.schedule.values[static_cast<std::size_t>(l)] - seed.values[static_cast<std::size_t>(l)]);
    double& slot = l < M / 4 ? early : late;
    slot = std::max(slot, d);
  }
  EXPECT_LT(early, late);
}

TEST(Krotov, ConvergedScheduleIsAFixedPoint) {
  const ControlProblem p{1, 1.0, 1, 0};
  const Schedule seed = seed_for(p, 6.0, 12);
  KrotovConfig cfg;
  const auto first = krotov_optimize(seed, cfg, p);
  ASSERT_TRUE(first.converged);
  const auto again = krotov_optimize(first.schedule, cfg, p);
  ASSERT_GE(again.objective.size(), 2U);
  EXPECT_LT(std::abs(again.objective[1] - again.objective[0]), cfg.convergence_eps);
  EXPECT_TRUE(again.converged);
}

TEST(Krotov, ClampKeepsControlsInRangeUnderLargeSteps) {
  const ControlProblem p{3, 1.0, 1, 2};
  const Schedule seed = seed_for(p, 20.0, 40);
  KrotovConfig cfg;
  cfg.step_weight = 0.5;
  cfg.max_iters = 20;
  cfg.max_weight_adjustments = 30;
  const auto tr = krotov_optimize(seed, cfg, p);
  for (double s : tr.schedule.values) {
    EXPECT_GE(s, 0.0);
    EXPECT_LE(s, 1.0);
  }
  for (std::size_t k = 1; k < tr.objective.size(); ++k)
    EXPECT_GE(tr.objective[k], tr.objective[k - 1] - 10 * cfg.convergence_eps);
}

TEST(Krotov, MonitorAbortsWhenNoAdjustmentIsAllowed) {
  const ControlProblem p{3, 1.0, 1, 2};
  const Schedule seed = seed_for(p, 20.0, 40);
  KrotovConfig cfg;
  cfg.step_weight = 1e-4;
  cfg.max_weight_adjustments = 0;
  EXPECT_THROW(krotov_optimize(seed, cfg, p), std::runtime_error);
  cfg.max_weight_adjustments = 40;
  const auto tr = krotov_optimize(seed, cfg, p);
  EXPECT_GT(tr.weight_adjustments, 0);
  EXPECT_GT(tr.step_weight.front(), 1e-4);
}

TEST(Krotov, ZeroIterationsReturnsTheSeed) {
  const ControlProblem p{2, 1.0, 1, 0};
  const Schedule seed = seed_for(p, 10.0, 10);
  KrotovConfig cfg;
  cfg.max_iters = 0;
  const auto tr = krotov_optimize(seed, cfg, p);
  EXPECT_EQ(tr.objective.size(), 1U);
  EXPECT_EQ(tr.schedule.values, seed.values);
}

TEST(KrotovConfig, Validation) {
  KrotovConfig cfg;
  EXPECT_NO_THROW(cfg.validate());
  cfg.convergence_eps = 0;
  EXPECT_THROW(cfg.validate(), std::invalid_argument);
  cfg = KrotovConfig{};
  cfg.max_iters = -1;
  EXPECT_THROW(cfg.validate(), std::invalid_argument);
  cfg = KrotovConfig{};
  cfg.max_weight_adjustments = -1;
  EXPECT_THROW(cfg.validate(), std::invalid_argument);
}
