// Krotov-style optimization of the discretized switching function s_l.
//
// The optimizer differentiates the exact Trotter product that is run, not the
// continuous dynamics. One iteration is a backward costate pass with the
// current controls followed by a forward pass that updates s_l sequentially:
//
//   s_l <- clamp( s_l + (1/step_weight) * 2 Re <chi_l| dU_l/ds_l |psi_{l-1}> )
//
// where psi_{l-1} already carries the updated controls of steps 1..l-1 and
// chi_l = U_{l+1}^dagger ... U_M^dagger |w><w|psi(T)>. Writing U_l in terms of
// its generator, the same quantity is the Im<chi|dH/ds|psi> of the continuous
// Krotov update.
#pragma once

#include <vector>

#include "dfsaqc/aqc.hpp"
#include "dfsaqc/generators.hpp"
#include "dfsaqc/trotter.hpp"

namespace dfsaqc {

/// Search problem whose switching function is optimized. The schedule carries
/// T and M.
struct ControlProblem {
  int n_logical = 3;
  double J = 1.0;
  int K = 1;
  Eigen::Index w = 0;
};

struct KrotovConfig {
  double step_weight = 0.0;  ///< inverse update size; <= 0 selects 50 M / T
  int max_iters = 500;
  double convergence_eps = 1e-7;
  bool clamp = true;
  int max_weight_adjustments = 6;

  void validate() const;
};

struct OptimizationTrace {
  std::vector<double> objective;   ///< index 0 is the seed
  std::vector<double> step_weight; ///< weight used for each accepted iteration
  Schedule schedule;               ///< kind Krotov
  std::vector<double> tau;         ///< l / M for l = 1..M
  std::vector<double> fidelity;    ///< |<w|psi_l>|^2 along the final run
  int weight_adjustments = 0;
  bool converged = false;

  double seed_objective() const { return objective.front(); }
  double final_objective() const { return objective.back(); }
};

/// |<w| trotter_evolve(schedule_coeffs(schedule)) |Psi_0>|^2 with Psi_0 the
/// XXX ground state.
double objective(const Schedule& schedule, const ControlProblem& problem);

/// dF/ds_l for l = 1..M by the adjoint method.
std::vector<double> gradient(const Schedule& schedule, const ControlProblem& problem);

/// |<w|psi_l>|^2 after each step.
std::vector<double> fidelity_curve(const Schedule& schedule, const ControlProblem& problem);

/// Throws std::runtime_error if the objective drops by more than
/// 10 convergence_eps even after all step-weight adjustments.
OptimizationTrace krotov_optimize(const Schedule& seed, const KrotovConfig& cfg, const ControlProblem& problem);

/// Relative error between the adjoint dF/ds_l (l 1-based) and a central finite
/// difference with step h; one-sided when s_l -+ h leaves [0, 1].
double gradient_check(const Schedule& schedule, const ControlProblem& problem, int l, double h);

/// The finite-difference estimate used by gradient_check.
double finite_difference(const Schedule& schedule, const ControlProblem& problem, int l, double h);

}  // namespace dfsaqc
