// Continuous-time (Farhi-Gutmann) Grover search: H = -|s><s| - |w><w|.
#pragma once

#include <complex>

#include "dfsaqc/dfs_code.hpp"
#include "dfsaqc/spinlab.hpp"

namespace dfsaqc {

struct GroverInstance {
  Space space;        ///< LOGICAL(n_L) or DFS(n)
  Eigen::Index N;     ///< search-space dimension
  Eigen::Index w;     ///< marked basis index
  double x;           ///< 1/sqrt(N)

  static GroverInstance make(const Space& space, Eigen::Index w);
};

/// Equal superposition over every basis vector of `space`.
State uniform_state(const Space& space);

/// -|w><w| on `space`.
Operator oracle_h(const Space& space, Eigen::Index w);

/// -|s><s| - |w><w|, stored dense.
Operator grover_h(const GroverInstance& inst);

/// (|s> - x|w>)/sqrt(1 - x^2)
State r_state(const GroverInstance& inst);

struct GroverAmplitudes {
  std::complex<double> a_w;
  std::complex<double> a_r;
};

/// Closed-form amplitudes of exp(-iHt)|s> on |w> and |r>.
GroverAmplitudes analytic_amplitudes(double t, Eigen::Index N);

/// |a_w(t)|^2
double success_probability(double t, Eigen::Index N);

/// argmax of the success probability, (pi/2) sqrt(N).
double grover_peak_time(Eigen::Index N);
/// The pi sqrt(N) stopping time quoted alongside the closed form; reported
/// next to the peak time, never used as the stopping rule.
double grover_quoted_time(Eigen::Index N);

/// Sum over all raising/lowering strings s+_{m1}..s+_{mk} s-_{..}..s-_{m2k}
/// + h.c. on FULL(n), built from explicit Pauli products (n even, n <= 8).
Operator driver_string_sum(int n);

/// max deviation of P(string sum)P from N_sec|s><s| - 1 on the Z_t = 0 sector.
double driver_string_check(int n);

}  // namespace dfsaqc
