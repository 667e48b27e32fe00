// Time-independent Hamiltonians that know how to exponentiate themselves
// cheaply. Trotter products and the optimizer only ever need exp(-iHt)v and
// Hv, so each generator supplies exactly those two actions.
#pragma once

#include <memory>

#include "dfsaqc/spinlab.hpp"

namespace dfsaqc {

class Generator {
 public:
  virtual ~Generator() = default;
  virtual const Space& space() const = 0;
  /// v <- exp(-i H t) v
  virtual void propagate(CVector& v, double t) const = 0;
  /// H v
  virtual CVector apply(const CVector& v) const = 0;
  /// Dense matrix (tests and diagnostics only).
  virtual Operator op() const = 0;
};

/// Any Hermitian operator, through a cached eigendecomposition.
class SpectralGenerator final : public Generator {
 public:
  explicit SpectralGenerator(const Operator& H) : H_(H), sd_(H) {}
  const Space& space() const override { return H_.space(); }
  void propagate(CVector& v, double t) const override { v = sd_.propagate(v, t); }
  CVector apply(const CVector& v) const override { return H_.apply(v); }
  Operator op() const override { return H_; }

 private:
  Operator H_;
  SpectralDecomposition<double> sd_;
};

/// sum_q (-J 1 + 2J X_q) on LOGICAL(n_L): a product of commuting 2x2 blocks.
class LogicalDriver final : public Generator {
 public:
  LogicalDriver(int n_logical, double J);
  const Space& space() const override { return space_; }
  void propagate(CVector& v, double t) const override;
  CVector apply(const CVector& v) const override;
  Operator op() const override;

 private:
  Space space_;
  double J_;
};

/// sum over pairs (2l-1, 2l) of cxy (XX + YY) + cz ZZ on FULL(n); each pair
/// block exponentiates in closed form. xx_pairs is (-1, 0), xxx_pairs is (J, J).
class PairChain final : public Generator {
 public:
  PairChain(int n, double cxy, double cz);
  const Space& space() const override { return space_; }
  void propagate(CVector& v, double t) const override;
  CVector apply(const CVector& v) const override;
  Operator op() const override;

 private:
  Space space_;
  double cxy_;
  double cz_;
};

/// weight * |w><w| (weight = -1 is the search oracle). exp(-iHt) is the
/// rank-1 update v + (exp(-i weight t) - 1) v_w |w>.
class ProjectorOracle final : public Generator {
 public:
  ProjectorOracle(const Space& space, Eigen::Index w, double weight = -1.0);
  const Space& space() const override { return space_; }
  void propagate(CVector& v, double t) const override;
  CVector apply(const CVector& v) const override;
  Operator op() const override;
  Eigen::Index marked() const { return w_; }

 private:
  Space space_;
  Eigen::Index w_;
  double weight_;
};

}  // namespace dfsaqc
