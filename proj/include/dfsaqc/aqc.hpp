// Adiabatic Grover search on pair-encoded logical qubits: interpolated
// Hamiltonian, XXX driver and its ground state, the sign-flip correspondence,
// spectral gap profiles and the gap-adapted switching schedule.
#pragma once

#include <string>
#include <vector>

#include "dfsaqc/spinlab.hpp"

namespace dfsaqc {

enum class ScheduleKind { Linear, GapOptimized, Krotov };

std::string to_string(ScheduleKind kind);
ScheduleKind parse_schedule_kind(const std::string& text);

/// Switching function sampled at the end of each of M equal intervals of a
/// total time T; values[l-1] = s_l, and s_0 = 0 is implied.
struct Schedule {
  double T = 0.0;
  std::vector<double> values;
  ScheduleKind kind = ScheduleKind::Linear;

  int M() const { return static_cast<int>(values.size()); }
  double dt() const { return T / static_cast<double>(values.size()); }

  /// Throws std::invalid_argument when an invariant is broken.
  void validate() const;
};

/// s_l = l / M
Schedule linear_schedule(double T, int M);

/// (1 - s) H_i + s H_f
Operator h_interp(double s, const Operator& H_i, const Operator& H_f);

/// sum over logical qubits of (-J 1 + 2J X_L); the XXX pair Hamiltonian
/// restricted to the logical subspace.
Operator logical_initial_h(int n_logical, double J);

/// Product of (|0>_L - |1>_L)/sqrt(2) over the logical qubits.
State xxx_ground_state(int n_logical);

/// Diagonal +-1 by parity of the number of |1>_L factors.
Operator sign_flip_unitary(int n_logical);

/// Default total time for n_L logical qubits: 225 at n_L = 7, scaled by
/// sqrt(2) per logical qubit.
double default_total_time(int n_logical);

struct GapProfile {
  std::vector<double> grid;
  std::vector<double> e0;
  std::vector<double> e1;
  std::vector<std::size_t> degenerate;  ///< grid points where E1 - E0 < 1e-10

  double gap(std::size_t i) const { return e1[i] - e0[i]; }
  std::size_t min_gap_index() const;
};

inline constexpr int kDefaultGapGrid = 1024;

/// E0, E1 of h_interp(s) on a uniform grid of `grid_size` points in [0, 1].
GapProfile gap_profile(const Operator& H_i, const Operator& H_f, int grid_size = kDefaultGapGrid);

/// F(s) = int_0^s ds' / (E1 - E0)^2 by cumulative trapezoid, with a monotone
/// cubic (Fritsch-Carlson) interpolant and bisection inverse.
class GapIntegral {
 public:
  explicit GapIntegral(const GapProfile& profile);

  double operator()(double s) const;
  double total() const { return cumulative_.back(); }
  /// s with F(s) = y, y in [0, total()].
  double inverse(double y) const;

 private:
  std::vector<double> grid_;
  std::vector<double> cumulative_;
  std::vector<double> slopes_;
};

/// s_l solving l dt = T F(s_l) / F(1).
Schedule gap_schedule(const GapProfile& profile, double T, int M);

inline constexpr int kDefaultSubsteps = 64;
/// Longest sub-interval the reference integrator takes, whatever `substeps` is.
inline constexpr double kReferenceMaxStep = 1.0 / 32;

/// Continuous-evolution reference: within interval l the switching function is
/// interpolated linearly from s_{l-1} to s_l. The interval is cut into
/// max(substeps, ceil(dt / kReferenceMaxStep)) equal sub-intervals, each
/// propagated with a fourth-order commutator-free Magnus step.
State adiabatic_evolve(const Operator& H_i, const Operator& H_f, const Schedule& schedule, const State& psi0,
                       int substeps = kDefaultSubsteps);

}  // namespace dfsaqc
