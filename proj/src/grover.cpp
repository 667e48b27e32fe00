#include "dfsaqc/grover.hpp"

#include <bit>
#include <numbers>
#include <string>

namespace dfsaqc {

GroverInstance GroverInstance::make(const Space& space, Eigen::Index w) {
  if (space.kind == SpaceKind::Full) throw std::invalid_argument("Grover instances live in LOGICAL or DFS space");
  const Eigen::Index N = space.dim();
  if (N < 2) throw std::invalid_argument("Grover search needs N >= 2");
  if (w < 0 || w >= N) throw std::out_of_range("marked index " + std::to_string(w) + " outside [0, N)");
  return {space, N, w, 1.0 / std::sqrt(static_cast<double>(N))};
}

State uniform_state(const Space& space) {
  const Eigen::Index N = space.dim();
  return State(space, CVector::Constant(N, 1.0 / std::sqrt(static_cast<double>(N))));
}

Operator oracle_h(const Space& space, Eigen::Index w) {
  if (w < 0 || w >= space.dim()) throw std::out_of_range("marked index outside the space");
  Operator::Sparse m(space.dim(), space.dim());
  m.insert(w, w) = -1.0;
  return Operator(space, std::move(m), Hermiticity::Yes);
}

Operator grover_h(const GroverInstance& inst) {
  const CVector s = uniform_state(inst.space).amplitudes();
  CMatrix h = -s * s.adjoint();
  h(inst.w, inst.w) -= 1.0;
  return Operator(inst.space, std::move(h), Hermiticity::Yes);
}

State r_state(const GroverInstance& inst) {
  CVector v = uniform_state(inst.space).amplitudes();
  v(inst.w) -= inst.x;
  v /= std::sqrt(1.0 - inst.x * inst.x);
  return State(inst.space, std::move(v));
}

GroverAmplitudes analytic_amplitudes(double t, Eigen::Index N) {
  if (N < 2) throw std::invalid_argument("analytic_amplitudes needs N >= 2");
  if (t < 0) throw std::invalid_argument("analytic_amplitudes needs t >= 0");
  const double x = 1.0 / std::sqrt(static_cast<double>(N));
  const std::complex<double> phase = std::polar(1.0, t);
  const std::complex<double> aw = phase * std::complex<double>(x * std::cos(x * t), std::sin(x * t));
  const std::complex<double> ar = phase * (std::sqrt(1.0 - x * x) * std::cos(x * t));
  return {aw, ar};
}

double success_probability(double t, Eigen::Index N) { return std::norm(analytic_amplitudes(t, N).a_w); }

double grover_peak_time(Eigen::Index N) { return 0.5 * std::numbers::pi * std::sqrt(static_cast<double>(N)); }

double grover_quoted_time(Eigen::Index N) { return std::numbers::pi * std::sqrt(static_cast<double>(N)); }

Operator driver_string_sum(int n) {
  if (n < 2 || n % 2 != 0) throw std::invalid_argument("driver_string_sum needs an even spin count");
  if (n > 8) throw DimensionError("driver_string_sum enumerates all strings; capped at n = 8");
  const Space full = Space::full(n);
  const std::complex<double> i(0.0, 1.0);

  // sigma_k = |up><down| = (X + iY)/2 raises; its adjoint lowers.
  std::vector<Operator::Sparse> raise, lower;
  for (int k = 0; k < n; ++k) {
    raise.push_back((0.5 * pauli(Pauli::X, k, n) + (0.5 * i) * pauli(Pauli::Y, k, n)).sparse());
    lower.push_back(Operator::Sparse(raise.back().adjoint()));
  }

  Operator::Sparse sum(full.dim(), full.dim());
  Operator::Sparse id(full.dim(), full.dim());
  id.setIdentity();
  const unsigned all = (1U << n) - 1U;
  for (unsigned support = 1; support <= all; ++support) {
    const int size = std::popcount(support);
    if (size % 2 != 0) continue;
    const int lowest = std::countr_zero(support);
    // choose which half carries the adjoint; the lowest site always does, so
    // each unordered split appears once and "+ h.c." supplies the mirror
    for (unsigned part = support; part; part = (part - 1) & support) {
      if (std::popcount(part) != size / 2 || !((part >> lowest) & 1U)) continue;
      Operator::Sparse term = id;
      for (int k = 0; k < n; ++k) {
        if (!((support >> k) & 1U)) continue;
        term = ((part >> k) & 1U) ? Operator::Sparse(term * lower[k]) : Operator::Sparse(term * raise[k]);
      }
      sum += term;
    }
  }
  Operator::Sparse herm = sum + Operator::Sparse(sum.adjoint());
  return Operator(full, std::move(herm), Hermiticity::Yes);
}

double driver_string_check(int n) {
  const SpaceMap map(n);
  const Space sector = Space::dfs(n);
  const CMatrix projected = restrict_operator(driver_string_sum(n), sector, map).dense();
  const Eigen::Index N = sector.dim();
  const CMatrix expected = CMatrix::Ones(N, N) - CMatrix::Identity(N, N);
  return max_abs_diff(projected, expected);
}

}  // namespace dfsaqc
