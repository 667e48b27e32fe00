#include "dfsaqc/generators.hpp"

#include "dfsaqc/aqc.hpp"
#include "dfsaqc/grover.hpp"

namespace dfsaqc {

namespace {

void require_length(const CVector& v, const Space& space) {
  if (v.size() != space.dim()) throw SpaceMismatch("vector length does not match " + to_string(space));
}

}  // namespace

LogicalDriver::LogicalDriver(int n_logical, double J) : space_(Space::logical(n_logical)), J_(J) {
  if (n_logical < 1 || n_logical > 24) throw std::invalid_argument("logical qubit count out of range");
  if (!(J > 0.0)) throw std::invalid_argument("LogicalDriver requires J > 0");
}

void LogicalDriver::propagate(CVector& v, double t) const {
  require_length(v, space_);
  if (t == 0.0) return;
  // exp(-it(-J n_L + 2J sum X)) = exp(i J n_L t) prod_q (cos(2Jt) - i sin(2Jt) X_q)
  const std::complex<double> c(std::cos(2.0 * J_ * t), 0.0);
  const std::complex<double> s(0.0, -std::sin(2.0 * J_ * t));
  const Eigen::Index dim = v.size();
  for (int q = 0; q < space_.n; ++q) {
    const Eigen::Index bit = Eigen::Index{1} << q;
    for (Eigen::Index k = 0; k < dim; ++k) {
      if (k & bit) continue;
      const std::complex<double> a = v(k), b = v(k | bit);
      v(k) = c * a + s * b;
      v(k | bit) = s * a + c * b;
    }
  }
  v *= std::polar(1.0, J_ * space_.n * t);
}

CVector LogicalDriver::apply(const CVector& v) const {
  require_length(v, space_);
  CVector out = (-J_ * space_.n) * v;
  for (int q = 0; q < space_.n; ++q) {
    const Eigen::Index bit = Eigen::Index{1} << q;
    for (Eigen::Index k = 0; k < v.size(); ++k) out(k) += 2.0 * J_ * v(k ^ bit);
  }
  return out;
}

Operator LogicalDriver::op() const { return logical_initial_h(space_.n, J_); }

PairChain::PairChain(int n, double cxy, double cz) : space_(Space::full(n)), cxy_(cxy), cz_(cz) {
  if (n < 2 || n % 2 != 0 || n > 24) throw std::invalid_argument("PairChain needs an even spin count");
}

void PairChain::propagate(CVector& v, double t) const {
  require_length(v, space_);
  if (t == 0.0) return;
  const int n = space_.n;
  // parallel pair: energy cz; antiparallel block [[-cz, 2cxy], [2cxy, -cz]]
  const std::complex<double> par = std::polar(1.0, -cz_ * t);
  const std::complex<double> anti = std::polar(1.0, cz_ * t);
  const std::complex<double> c = anti * std::cos(2.0 * cxy_ * t);
  const std::complex<double> s = anti * std::complex<double>(0.0, -std::sin(2.0 * cxy_ * t));
  const Eigen::Index dim = v.size();
  for (int l = 0; l < n / 2; ++l) {
    const auto m1 = static_cast<Eigen::Index>(spin_mask(2 * l, n));
    const auto m2 = static_cast<Eigen::Index>(spin_mask(2 * l + 1, n));
    for (Eigen::Index b = 0; b < dim; ++b) {
      const bool d1 = b & m1, d2 = b & m2;
      if (d1 == d2) {
        v(b) *= par;
      } else if (!d1) {  // visit each antiparallel pair once, from |up down>
        const Eigen::Index partner = b ^ (m1 | m2);
        const std::complex<double> a = v(b), p = v(partner);
        v(b) = c * a + s * p;
        v(partner) = s * a + c * p;
      }
    }
  }
}

CVector PairChain::apply(const CVector& v) const {
  require_length(v, space_);
  const int n = space_.n;
  CVector out = CVector::Zero(v.size());
  for (int l = 0; l < n / 2; ++l) {
    const auto m1 = static_cast<Eigen::Index>(spin_mask(2 * l, n));
    const auto m2 = static_cast<Eigen::Index>(spin_mask(2 * l + 1, n));
    for (Eigen::Index b = 0; b < v.size(); ++b) {
      const bool d1 = b & m1, d2 = b & m2;
      if (d1 == d2) {
        out(b) += cz_ * v(b);
      } else {
        out(b) += -cz_ * v(b) + 2.0 * cxy_ * v(b ^ (m1 | m2));
      }
    }
  }
  return out;
}

Operator PairChain::op() const { return detail::pair_coupling<double>(space_.n, cxy_, cz_); }

ProjectorOracle::ProjectorOracle(const Space& space, Eigen::Index w, double weight)
    : space_(space), w_(w), weight_(weight) {
  if (w < 0 || w >= space.dim()) throw std::out_of_range("marked index outside the space");
}

void ProjectorOracle::propagate(CVector& v, double t) const {
  require_length(v, space_);
  v(w_) *= std::polar(1.0, -weight_ * t);
}

CVector ProjectorOracle::apply(const CVector& v) const {
  require_length(v, space_);
  CVector out = CVector::Zero(v.size());
  out(w_) = weight_ * v(w_);
  return out;
}

Operator ProjectorOracle::op() const { return (-weight_) * oracle_h(space_, w_); }

}  // namespace dfsaqc
