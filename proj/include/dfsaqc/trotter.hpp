// Trotterized adiabatic evolution:
//   U(T) = prod_l ( e^{-i H_f g_l/2K} e^{-i H_i f_l/K} e^{-i H_f g_l/2K} )^K
// with step 1 applied first, plus fidelity sweeps over (T, M, w).
#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "dfsaqc/aqc.hpp"
#include "dfsaqc/generators.hpp"

namespace dfsaqc {

struct TrotterStep {
  double f;  ///< duration under H_i
  double g;  ///< duration under H_f
};

struct TrotterPlan {
  int K = 1;
  double T = 0.0;
  std::vector<TrotterStep> coeffs;

  int M() const { return static_cast<int>(coeffs.size()); }
  double dt() const { return T / static_cast<double>(coeffs.size()); }
};

/// f_l = (1 - dt l / T) dt, g_l = dt^2 l / T.
TrotterPlan linear_coeffs(double T, int M, int K = 1);

/// f_l = (1 - s_l) dt, g_l = s_l dt.
TrotterPlan schedule_coeffs(const Schedule& schedule, int K = 1);

/// One symmetric step (A B A)^K applied in place.
void trotter_step(const Generator& H_i, const Generator& H_f, const TrotterStep& step, int K, CVector& v);

/// Applies the whole product. `observer(l, v)` (optional) sees the state after
/// each step l = 1..M.
void trotter_propagate(const Generator& H_i, const Generator& H_f, const TrotterPlan& plan, CVector& v,
                       const std::function<void(int, const CVector&)>& observer = {});

State trotter_evolve(const Generator& H_i, const Generator& H_f, const TrotterPlan& plan, const State& psi0);

/// Operator overload; both operators go through SpectralGenerator.
State trotter_evolve(const Operator& H_i, const Operator& H_f, const TrotterPlan& plan, const State& psi0);

/// dt |H_i - H_f|_2. The product formula is only trustworthy well below 1.
double trotter_validity(const Operator& H_i, const Operator& H_f, const TrotterPlan& plan);

// ---------------------------------------------------------------------------
// Sweeps

struct FidelityRecord {
  std::string experiment;
  int n_logical = 0;
  double T = 0.0;
  int M = 0;
  int K = 1;
  ScheduleKind schedule = ScheduleKind::Linear;
  Eigen::Index w = 0;
  double fidelity = 0.0;
  std::optional<double> leakage;
  double wall_ms = 0.0;
};

struct KRule {
  enum class Kind { Constant, EqualLogical } kind = Kind::Constant;
  int k = 1;

  int resolve(int n_logical) const { return kind == Kind::EqualLogical ? n_logical : k; }
  static KRule parse(const std::string& text);
  std::string str() const;
};

struct WSelector {
  enum class Kind { Index, All, Random } kind = Kind::Random;
  Eigen::Index index = 0;

  static WSelector parse(const std::string& text);
  std::string str() const;
  /// Concrete marked indices for a search space of dimension N.
  std::vector<Eigen::Index> resolve(Eigen::Index N, std::uint64_t seed) const;
};

enum class SweepSpace { Logical, Full };

struct SweepSpec {
  int n_logical = 3;
  double J = 1.0;
  std::vector<double> T_list;
  std::vector<int> M_list;
  KRule k_rule;
  ScheduleKind schedule = ScheduleKind::Linear;
  WSelector w;
  SweepSpace space = SweepSpace::Logical;
  int gap_grid = kDefaultGapGrid;
  std::uint64_t seed = 1;
  unsigned workers = 0;  ///< 0 = worker_count()
  std::string experiment = "trotter-sweep";
};

struct SweepResult {
  std::vector<FidelityRecord> records;
  double max_validity = 0.0;  ///< largest dt |H_i - H_f| over the sweep
};

/// One record per (T, M, w), ordered by T, then M, then w.
SweepResult fidelity_sweep(const SweepSpec& spec);

}  // namespace dfsaqc
