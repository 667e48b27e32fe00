// Zero-magnetization sector, pair-encoded logical qubits and the maps between
// FULL, DFS-sector and LOGICAL spaces.
//
// Logical qubit l (1-based) lives on physical spins (2l-1, 2l):
//   |0>_L = |up down>,  |1>_L = |down up>.
// Logical basis index k has logical qubit 1 as its most significant bit. With
// the physical ordering of spinlab.hpp the logical basis sorted by k is also
// sorted by the FULL basis integer.
#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "dfsaqc/spinlab.hpp"

namespace dfsaqc {

/// Upper bound on physical spins for anything that enumerates FULL space.
inline constexpr int kMaxFullSpins = 16;

class SpaceMap {
 public:
  /// Enumerates the zero-Z_t sector of n spins (n even, 2 <= n <= 16).
  explicit SpaceMap(int n);

  int n() const { return n_; }
  int n_logical() const { return n_ / 2; }

  /// FULL basis integers with Z_t = 0, ascending.
  std::span<const std::uint64_t> dfs_indices() const { return dfs_; }
  /// FULL basis integers that are products of pair states, ascending.
  std::span<const std::uint64_t> logical_indices() const { return logical_; }

  std::optional<Eigen::Index> dfs_position(std::uint64_t full_index) const;
  std::optional<Eigen::Index> logical_position(std::uint64_t full_index) const;

  /// FULL basis integer of logical basis state k.
  std::uint64_t full_index_of_logical(Eigen::Index k) const { return logical_[static_cast<std::size_t>(k)]; }

  /// FULL basis integers spanning `space` (identity list for FULL).
  std::vector<std::uint64_t> indices(const Space& space) const;

  /// Whether `space` is one of the three spaces this map covers.
  bool covers(const Space& space) const;

 private:
  int n_;
  std::vector<std::uint64_t> dfs_;
  std::vector<std::uint64_t> logical_;
};

SpaceMap dfs_basis(int n);

/// FULL-space pattern for logical basis index k of n_L logical qubits.
std::uint64_t logical_to_full(std::uint64_t k, int n_logical);

enum class LogicalAxis { X, Y, Z };

/// SU(2) generator on pair l (1-based) in FULL space:
///   Tx = (X1 X2 + Y1 Y2)/2,  Ty = (Y1 X2 - X1 Y2)/2,  Tz = (Z1 - Z2)/2.
Operator logical_op(LogicalAxis axis, int pair, int n);

/// -Z_{2 l1} Z_{2 l2 - 1}; on the logical subspace it equals Z_L (x) Z_L of
/// logical qubits l1 and l2.
Operator logical_zz(int pair1, int pair2, int n);

struct SymmetryReport {
  bool symmetric;
  double commutator_norm;  ///< max-entry norm of [H, Z_t]
};

/// Tests [H, Z_t] = 0 to 1e-10.
SymmetryReport check_symmetry(const Operator& H);

/// Lifts a state into a larger space, or restricts it into a smaller one. A
/// restriction that would discard more than 1e-12 of weight throws
/// LeakageError.
State embed(const State& psi, const Space& target, const SpaceMap& map);

struct Projection {
  CVector amplitudes;     ///< restricted amplitudes, renormalized when allowed
  double leakage;         ///< 1 - |restricted part|^2
  bool renormalized;      ///< false when leakage >= 1e-6 (or the restriction is zero)
  Space space;

  /// Only valid when renormalized.
  State state() const;
};

/// Restricts to `target`; renormalizes only when leakage < 1e-6.
Projection project(const State& psi, const Space& target, const SpaceMap& map);

/// Weight of `v` (FULL amplitudes) outside `target`.
double leakage(const CVector& full_amplitudes, const Space& target, const SpaceMap& map);

/// P H P restricted to `target` (H on FULL or on a space containing target).
Operator restrict_operator(const Operator& H, const Space& target, const SpaceMap& map);

/// Embeds an operator on `from` into FULL(n), zero outside the subspace.
Operator lift_operator(const Operator& A, const SpaceMap& map);

/// CNOT (control logical qubit 1, target logical qubit 2) composed from
/// exp(i theta logical_zz) and single-pair SU(2) rotations at n = 4,
/// returned on the 4-dim logical space.
CMatrix cnot_composed();

/// max |U_composed - CNOT| after removing the global phase.
double cnot_check();

}  // namespace dfsaqc
