#include "dfsaqc/dfs_code.hpp"

#include <algorithm>
#include <bit>
#include <numbers>
#include <string>

namespace dfsaqc {

namespace {

void require_even_spins(int n) {
  if (n < 2 || n % 2 != 0) throw std::invalid_argument("spin count must be even and >= 2, got " + std::to_string(n));
}

void require_pair(int pair, int n) {
  if (pair < 1 || pair > n / 2)
    throw std::out_of_range("pair index " + std::to_string(pair) + " outside [1, " + std::to_string(n / 2) + "]");
}

bool is_pair_product(std::uint64_t b, int n) {
  for (int l = 0; l < n / 2; ++l) {
    const bool d1 = (b & spin_mask(2 * l, n)) != 0;
    const bool d2 = (b & spin_mask(2 * l + 1, n)) != 0;
    if (d1 == d2) return false;
  }
  return true;
}

std::optional<Eigen::Index> find_sorted(const std::vector<std::uint64_t>& v, std::uint64_t x) {
  auto it = std::lower_bound(v.begin(), v.end(), x);
  if (it == v.end() || *it != x) return std::nullopt;
  return static_cast<Eigen::Index>(it - v.begin());
}

CVector to_full(const State& psi, const SpaceMap& map) {
  if (!map.covers(psi.space())) throw SpaceMismatch("state space " + to_string(psi.space()) + " not covered by map");
  const auto idx = map.indices(psi.space());
  CVector full = CVector::Zero(Eigen::Index{1} << map.n());
  for (std::size_t i = 0; i < idx.size(); ++i) full(static_cast<Eigen::Index>(idx[i])) = psi[static_cast<Eigen::Index>(i)];
  return full;
}

/// Position of every FULL basis integer inside `idx`, or -1.
std::vector<Eigen::Index> position_table(const std::vector<std::uint64_t>& idx, int n) {
  std::vector<Eigen::Index> pos(std::size_t{1} << n, -1);
  for (std::size_t i = 0; i < idx.size(); ++i) pos[idx[i]] = static_cast<Eigen::Index>(i);
  return pos;
}

}  // namespace

SpaceMap::SpaceMap(int n) : n_(n) {
  require_even_spins(n);
  if (n > kMaxFullSpins)
    throw DimensionError("sector enumeration is capped at " + std::to_string(kMaxFullSpins) + " spins");
  const std::uint64_t dim = std::uint64_t{1} << n;
  for (std::uint64_t b = 0; b < dim; ++b) {
    if (std::popcount(b) != n / 2) continue;
    dfs_.push_back(b);
    if (is_pair_product(b, n)) logical_.push_back(b);
  }
}

std::optional<Eigen::Index> SpaceMap::dfs_position(std::uint64_t full_index) const {
  return find_sorted(dfs_, full_index);
}

std::optional<Eigen::Index> SpaceMap::logical_position(std::uint64_t full_index) const {
  return find_sorted(logical_, full_index);
}

bool SpaceMap::covers(const Space& space) const {
  switch (space.kind) {
    case SpaceKind::Full:
    case SpaceKind::Dfs:
      return space.n == n_;
    case SpaceKind::Logical:
      return space.n == n_ / 2;
  }
  return false;
}

std::vector<std::uint64_t> SpaceMap::indices(const Space& space) const {
  if (!covers(space)) throw SpaceMismatch(to_string(space) + " is not covered by the map for n=" + std::to_string(n_));
  switch (space.kind) {
    case SpaceKind::Full: {
      std::vector<std::uint64_t> all(std::size_t{1} << n_);
      for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
      return all;
    }
    case SpaceKind::Dfs:
      return dfs_;
    case SpaceKind::Logical:
      return logical_;
  }
  return {};
}

SpaceMap dfs_basis(int n) { return SpaceMap(n); }

std::uint64_t logical_to_full(std::uint64_t k, int n_logical) {
  const int n = 2 * n_logical;
  std::uint64_t b = 0;
  for (int l = 0; l < n_logical; ++l) {
    const bool one = (k >> (n_logical - 1 - l)) & 1U;
    b |= one ? spin_mask(2 * l, n) : spin_mask(2 * l + 1, n);
  }
  return b;
}

Operator logical_op(LogicalAxis axis, int pair, int n) {
  require_even_spins(n);
  require_pair(pair, n);
  const int s1 = 2 * pair - 2, s2 = 2 * pair - 1;
  switch (axis) {
    case LogicalAxis::X:
      return 0.5 * (pauli(Pauli::X, s1, n) * pauli(Pauli::X, s2, n) + pauli(Pauli::Y, s1, n) * pauli(Pauli::Y, s2, n));
    case LogicalAxis::Y:
      return 0.5 * (pauli(Pauli::Y, s1, n) * pauli(Pauli::X, s2, n) - pauli(Pauli::X, s1, n) * pauli(Pauli::Y, s2, n));
    case LogicalAxis::Z:
      return 0.5 * (pauli(Pauli::Z, s1, n) - pauli(Pauli::Z, s2, n));
  }
  throw std::invalid_argument("unknown logical axis");
}

Operator logical_zz(int pair1, int pair2, int n) {
  require_even_spins(n);
  require_pair(pair1, n);
  require_pair(pair2, n);
  if (pair1 == pair2) throw std::invalid_argument("logical_zz needs two distinct pairs");
  // 1-based sites 2 l1 and 2 l2 - 1
  return -1.0 * (pauli(Pauli::Z, 2 * pair1 - 1, n) * pauli(Pauli::Z, 2 * pair2 - 2, n));
}

SymmetryReport check_symmetry(const Operator& H) {
  if (H.space().kind != SpaceKind::Full) throw SpaceMismatch("check_symmetry expects a FULL-space operator");
  const int n = H.space().n;
  auto magnetization = [n](Eigen::Index b) { return n - 2 * std::popcount(static_cast<std::uint64_t>(b)); };
  const auto sp = H.sparse();
  double worst = 0.0;
  for (int k = 0; k < sp.outerSize(); ++k)
    for (Operator::Sparse::InnerIterator it(sp, k); it; ++it) {
      const double dz = magnetization(it.col()) - magnetization(it.row());
      worst = std::max(worst, std::abs(it.value()) * std::abs(dz));
    }
  return {worst < 1e-10, worst};
}

State Projection::state() const {
  if (!renormalized) throw LeakageError("projection leaked " + std::to_string(leakage) + "; no normalized state");
  return State(space, amplitudes);
}

double leakage(const CVector& full_amplitudes, const Space& target, const SpaceMap& map) {
  double kept = 0.0;
  for (auto b : map.indices(target)) kept += std::norm(full_amplitudes(static_cast<Eigen::Index>(b)));
  return std::max(0.0, full_amplitudes.squaredNorm() - kept);
}

Projection project(const State& psi, const Space& target, const SpaceMap& map) {
  const CVector full = to_full(psi, map);
  const auto idx = map.indices(target);
  CVector r(static_cast<Eigen::Index>(idx.size()));
  for (std::size_t i = 0; i < idx.size(); ++i) r(static_cast<Eigen::Index>(i)) = full(static_cast<Eigen::Index>(idx[i]));
  const double kept = r.squaredNorm();
  Projection p{std::move(r), std::max(0.0, 1.0 - kept), false, target};
  if (p.leakage < 1e-6 && kept > 0.0) {
    p.amplitudes /= std::sqrt(kept);
    p.renormalized = true;
  }
  return p;
}

State embed(const State& psi, const Space& target, const SpaceMap& map) {
  const CVector full = to_full(psi, map);
  const auto idx = map.indices(target);
  CVector r(static_cast<Eigen::Index>(idx.size()));
  for (std::size_t i = 0; i < idx.size(); ++i) r(static_cast<Eigen::Index>(i)) = full(static_cast<Eigen::Index>(idx[i]));
  const double outside = std::max(0.0, full.squaredNorm() - r.squaredNorm());
  if (outside > 1e-12)
    throw LeakageError("state has weight " + std::to_string(outside) + " outside " + to_string(target));
  return State::normalized(target, std::move(r));
}

Operator restrict_operator(const Operator& H, const Space& target, const SpaceMap& map) {
  const auto src = map.indices(H.space());
  const auto dst = map.indices(target);
  const auto dst_pos = position_table(dst, map.n());
  std::vector<Eigen::Triplet<std::complex<double>>> t;
  const auto sp = H.sparse();
  for (int k = 0; k < sp.outerSize(); ++k)
    for (Operator::Sparse::InnerIterator it(sp, k); it; ++it) {
      const Eigen::Index r = dst_pos[src[static_cast<std::size_t>(it.row())]];
      const Eigen::Index c = dst_pos[src[static_cast<std::size_t>(it.col())]];
      if (r >= 0 && c >= 0) t.emplace_back(r, c, it.value());
    }
  Operator::Sparse m(target.dim(), target.dim());
  m.setFromTriplets(t.begin(), t.end());
  return Operator(target, std::move(m), H.hermitian() ? Hermiticity::Yes : Hermiticity::Detect);
}

Operator lift_operator(const Operator& A, const SpaceMap& map) {
  const auto src = map.indices(A.space());
  const Space full = Space::full(map.n());
  std::vector<Eigen::Triplet<std::complex<double>>> t;
  const auto sp = A.sparse();
  for (int k = 0; k < sp.outerSize(); ++k)
    for (Operator::Sparse::InnerIterator it(sp, k); it; ++it)
      t.emplace_back(static_cast<Eigen::Index>(src[static_cast<std::size_t>(it.row())]),
                     static_cast<Eigen::Index>(src[static_cast<std::size_t>(it.col())]), it.value());
  Operator::Sparse m(full.dim(), full.dim());
  m.setFromTriplets(t.begin(), t.end());
  return Operator(full, std::move(m), A.hermitian() ? Hermiticity::Yes : Hermiticity::Detect);
}

CMatrix cnot_composed() {
  constexpr int n = 4;
  const SpaceMap map(n);
  const double pi = std::numbers::pi;

  // Hadamard on logical qubit 2 up to phase: rotation by pi about (x + z)/sqrt(2)
  const Operator axis = (1.0 / std::numbers::sqrt2) * (logical_op(LogicalAxis::X, 2, n) + logical_op(LogicalAxis::Z, 2, n));
  const CMatrix had = expm_hermitian(axis, pi / 2);
  // CZ up to phase: exp(i pi/4 (Z1 Z2 - Z1 - Z2))
  const CMatrix zz = expm_hermitian(logical_zz(1, 2, n), -pi / 4);
  const CMatrix z1 = expm_hermitian(logical_op(LogicalAxis::Z, 1, n), pi / 4);
  const CMatrix z2 = expm_hermitian(logical_op(LogicalAxis::Z, 2, n), pi / 4);
  const CMatrix full = had * zz * z1 * z2 * had;

  const auto idx = map.logical_indices();
  CMatrix u(4, 4);
  for (Eigen::Index i = 0; i < 4; ++i)
    for (Eigen::Index j = 0; j < 4; ++j)
      u(i, j) = full(static_cast<Eigen::Index>(idx[static_cast<std::size_t>(i)]),
                     static_cast<Eigen::Index>(idx[static_cast<std::size_t>(j)]));
  return u;
}

double cnot_check() {
  CMatrix cnot = CMatrix::Zero(4, 4);
  cnot(0, 0) = cnot(1, 1) = cnot(2, 3) = cnot(3, 2) = 1.0;
  const CMatrix u = cnot_composed();
  const std::complex<double> phase = u(0, 0) / std::abs(u(0, 0));
  return max_abs_diff(u / phase, cnot);
}

}  // namespace dfsaqc
