#include "dfsaqc/aqc.hpp"

#include <algorithm>
#include <bit>
#include <cmath>

#include "dfsaqc/parallel.hpp"

namespace dfsaqc {

std::string to_string(ScheduleKind kind) {
  switch (kind) {
    case ScheduleKind::Linear:
      return "linear";
    case ScheduleKind::GapOptimized:
      return "gap";
    case ScheduleKind::Krotov:
      return "krotov";
  }
  return "?";
}

ScheduleKind parse_schedule_kind(const std::string& text) {
  if (text == "linear") return ScheduleKind::Linear;
  if (text == "gap" || text == "gap-optimized" || text == "gap_optimized") return ScheduleKind::GapOptimized;
  if (text == "krotov") return ScheduleKind::Krotov;
  throw std::invalid_argument("unknown schedule kind '" + text + "'");
}

void Schedule::validate() const {
  if (values.empty()) throw std::invalid_argument("schedule has no steps");
  if (!(T >= 0.0) || !std::isfinite(T)) throw std::invalid_argument("schedule total time must be finite and >= 0");
  for (double s : values)
    if (!(s >= 0.0 && s <= 1.0)) throw std::invalid_argument("schedule value outside [0, 1]");
  if (kind != ScheduleKind::Krotov && std::abs(values.back() - 1.0) > 1e-12)
    throw std::invalid_argument("linear and gap-optimized schedules must end at s = 1");
  if (kind == ScheduleKind::GapOptimized)
    for (std::size_t l = 1; l < values.size(); ++l)
      if (values[l] < values[l - 1]) throw std::invalid_argument("gap-optimized schedule must be non-decreasing");
}

Schedule linear_schedule(double T, int M) {
  if (M < 1) throw std::invalid_argument("schedule needs M >= 1");
  Schedule sch{T, std::vector<double>(static_cast<std::size_t>(M)), ScheduleKind::Linear};
  for (int l = 1; l <= M; ++l) sch.values[static_cast<std::size_t>(l - 1)] = static_cast<double>(l) / M;
  return sch;
}

Operator h_interp(double s, const Operator& H_i, const Operator& H_f) {
  if (!(s >= 0.0 && s <= 1.0)) throw std::invalid_argument("mixing parameter s outside [0, 1]");
  require_same_space(H_i.space(), H_f.space());
  return (1.0 - s) * H_i + s * H_f;
}

Operator logical_initial_h(int n_logical, double J) {
  if (n_logical < 1 || n_logical > 24) throw std::invalid_argument("logical qubit count out of range");
  if (!(J > 0.0)) throw std::invalid_argument("logical_initial_h requires J > 0");
  const Space space = Space::logical(n_logical);
  const Eigen::Index dim = space.dim();
  std::vector<Eigen::Triplet<std::complex<double>>> t;
  t.reserve(static_cast<std::size_t>(dim) * (n_logical + 1));
  for (Eigen::Index k = 0; k < dim; ++k) {
    t.emplace_back(k, k, -J * n_logical);
    for (int q = 0; q < n_logical; ++q) t.emplace_back(k ^ (Eigen::Index{1} << q), k, 2.0 * J);
  }
  Operator::Sparse m(dim, dim);
  m.setFromTriplets(t.begin(), t.end());
  return Operator(space, std::move(m), Hermiticity::Yes);
}

State xxx_ground_state(int n_logical) {
  if (n_logical < 1) throw std::invalid_argument("xxx_ground_state needs n_L >= 1");
  const Space space = Space::logical(n_logical);
  const double a = std::pow(2.0, -0.5 * n_logical);
  CVector v(space.dim());
  for (Eigen::Index k = 0; k < v.size(); ++k) v(k) = (std::popcount(static_cast<std::uint64_t>(k)) % 2) ? -a : a;
  return State(space, std::move(v));
}

Operator sign_flip_unitary(int n_logical) {
  if (n_logical < 1) throw std::invalid_argument("sign_flip_unitary needs n_L >= 1");
  const Space space = Space::logical(n_logical);
  Operator::Sparse m(space.dim(), space.dim());
  m.reserve(Eigen::VectorXi::Constant(space.dim(), 1));
  for (Eigen::Index k = 0; k < space.dim(); ++k)
    m.insert(k, k) = (std::popcount(static_cast<std::uint64_t>(k)) % 2) ? -1.0 : 1.0;
  return Operator(space, std::move(m), Hermiticity::Yes);
}

double default_total_time(int n_logical) { return 225.0 * std::pow(2.0, 0.5 * (n_logical - 7)); }

std::size_t GapProfile::min_gap_index() const {
  std::size_t best = 0;
  for (std::size_t i = 1; i < grid.size(); ++i)
    if (gap(i) < gap(best)) best = i;
  return best;
}

GapProfile gap_profile(const Operator& H_i, const Operator& H_f, int grid_size) {
  if (grid_size < 64) throw std::invalid_argument("gap profile needs at least 64 grid points");
  require_same_space(H_i.space(), H_f.space());
  if (H_i.dim() < 2) throw std::invalid_argument("gap profile needs dimension >= 2");
  GapProfile p;
  const auto n = static_cast<std::size_t>(grid_size);
  p.grid.resize(n);
  p.e0.resize(n);
  p.e1.resize(n);
  for (std::size_t i = 0; i < n; ++i) p.grid[i] = static_cast<double>(i) / static_cast<double>(n - 1);
  parallel_for(n, [&](std::size_t i) {
    const auto w = lowest_eigenvalues(h_interp(p.grid[i], H_i, H_f), 2);
    p.e0[i] = w[0];
    p.e1[i] = w[1];
  });
  for (std::size_t i = 0; i < n; ++i)
    if (p.gap(i) < 1e-10) p.degenerate.push_back(i);
  return p;
}

GapIntegral::GapIntegral(const GapProfile& profile) : grid_(profile.grid) {
  if (!profile.degenerate.empty())
    throw std::invalid_argument("gap profile has a closed gap; the schedule integral diverges");
  const std::size_t n = grid_.size();
  if (n < 2 || grid_.front() != 0.0 || grid_.back() != 1.0)
    throw std::invalid_argument("gap grid must span [0, 1]");
  std::vector<double> f(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double g = profile.gap(i);
    f[i] = 1.0 / (g * g);
  }
  cumulative_.assign(n, 0.0);
  for (std::size_t i = 1; i < n; ++i) {
    const double h = grid_[i] - grid_[i - 1];
    if (!(h > 0.0)) throw std::invalid_argument("gap grid must be strictly increasing");
    cumulative_[i] = cumulative_[i - 1] + 0.5 * h * (f[i] + f[i - 1]);
    if (!(cumulative_[i] > cumulative_[i - 1])) throw std::logic_error("cumulative gap integral is not monotone");
  }

  // Fritsch-Carlson monotone slopes
  std::vector<double> delta(n - 1);
  for (std::size_t i = 0; i + 1 < n; ++i) delta[i] = (cumulative_[i + 1] - cumulative_[i]) / (grid_[i + 1] - grid_[i]);
  slopes_.assign(n, 0.0);
  slopes_.front() = delta.front();
  slopes_.back() = delta.back();
  for (std::size_t i = 1; i + 1 < n; ++i) {
    if (delta[i - 1] * delta[i] <= 0.0) continue;
    const double h0 = grid_[i] - grid_[i - 1], h1 = grid_[i + 1] - grid_[i];
    const double w1 = 2.0 * h1 + h0, w2 = h1 + 2.0 * h0;
    slopes_[i] = (w1 + w2) / (w1 / delta[i - 1] + w2 / delta[i]);
  }
}

double GapIntegral::operator()(double s) const {
  if (s <= grid_.front()) return 0.0;
  if (s >= grid_.back()) return cumulative_.back();
  const auto it = std::upper_bound(grid_.begin(), grid_.end(), s);
  const std::size_t i = static_cast<std::size_t>(it - grid_.begin()) - 1;
  const double h = grid_[i + 1] - grid_[i];
  const double t = (s - grid_[i]) / h;
  const double t2 = t * t, t3 = t2 * t;
  const double h00 = 2 * t3 - 3 * t2 + 1, h10 = t3 - 2 * t2 + t;
  const double h01 = -2 * t3 + 3 * t2, h11 = t3 - t2;
  return h00 * cumulative_[i] + h10 * h * slopes_[i] + h01 * cumulative_[i + 1] + h11 * h * slopes_[i + 1];
}

double GapIntegral::inverse(double y) const {
  if (y <= 0.0) return 0.0;
  if (y >= cumulative_.back()) return 1.0;
  const auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), y);
  const std::size_t i = static_cast<std::size_t>(it - cumulative_.begin()) - 1;
  double lo = grid_[i], hi = grid_[i + 1];
  for (int iter = 0; iter < 200 && hi - lo > 1e-15; ++iter) {
    const double mid = 0.5 * (lo + hi);
    if ((*this)(mid) < y) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

Schedule gap_schedule(const GapProfile& profile, double T, int M) {
  if (M < 1) throw std::invalid_argument("schedule needs M >= 1");
  const GapIntegral F(profile);
  Schedule sch{T, std::vector<double>(static_cast<std::size_t>(M)), ScheduleKind::GapOptimized};
  for (int l = 1; l < M; ++l) sch.values[static_cast<std::size_t>(l - 1)] = F.inverse(F.total() * l / M);
  sch.values.back() = 1.0;
  for (std::size_t l = 1; l < sch.values.size(); ++l)
    if (sch.values[l] < sch.values[l - 1]) throw std::logic_error("gap schedule inversion is not monotone");
  return sch;
}

State adiabatic_evolve(const Operator& H_i, const Operator& H_f, const Schedule& schedule, const State& psi0,
                       int substeps) {
  schedule.validate();
  require_same_space(H_i.space(), H_f.space());
  require_same_space(H_i.space(), psi0.space());
  if (substeps < 1) throw std::invalid_argument("substeps must be >= 1");
  substeps = std::max(substeps, static_cast<int>(std::ceil(schedule.dt() / kReferenceMaxStep)));
  const double tau = schedule.dt() / substeps;
  CVector v = psi0.amplitudes();
  if (tau == 0.0) return psi0;
  // Fourth-order commutator-free Magnus step for the affine H(t) of each
  // sub-interval: two exponentials of H at Gauss-node combinations. The
  // combined mixing parameters can leave [0, 1] slightly, so H(s) is formed
  // directly instead of through h_interp.
  const CMatrix hi = H_i.dense();
  const CMatrix dh = H_f.dense() - hi;
  const double node = std::sqrt(3.0) / 6.0;
  const double a1 = (3.0 - 2.0 * std::sqrt(3.0)) / 6.0, a2 = 1.0 - a1;
  auto half_step = [&](double s) {
    const Operator h(psi0.space(), CMatrix(hi + s * dh), Hermiticity::Yes);
    v = SpectralDecomposition<double>(h).propagate(v, tau / 2);
  };
  double prev = 0.0;
  for (double s : schedule.values) {
    for (int j = 0; j < substeps; ++j) {
      const double s1 = prev + (s - prev) * (j + 0.5 - node) / substeps;
      const double s2 = prev + (s - prev) * (j + 0.5 + node) / substeps;
      half_step(a2 * s1 + a1 * s2);
      half_step(a1 * s1 + a2 * s2);
    }
    prev = s;
  }
  if (std::abs(v.norm() - 1.0) > tol::norm) throw std::runtime_error("adiabatic evolution lost normalization");
  return State::normalized(psi0.space(), std::move(v));
}

}  // namespace dfsaqc
