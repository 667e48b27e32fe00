#include "dfsaqc/control_opt.hpp"

#include <algorithm>
#include <sstream>

namespace dfsaqc {

namespace {

struct Dynamics {
  LogicalDriver Hi;
  ProjectorOracle Hf;
  CVector psi0;

  explicit Dynamics(const ControlProblem& p)
      : Hi(p.n_logical, p.J), Hf(Space::logical(p.n_logical), p.w), psi0(xxx_ground_state(p.n_logical).amplitudes()) {}
};

TrotterStep step_for(double s, double dt) { return {(1.0 - s) * dt, s * dt}; }

/// v <- U(s)^dagger v
void step_adjoint(const Dynamics& d, double s, double dt, int K, CVector& v) {
  const TrotterStep st = step_for(s, dt);
  const double half = st.g / (2.0 * K), mid = st.f / K;
  for (int k = 0; k < K; ++k) {
    d.Hf.propagate(v, -half);
    d.Hi.propagate(v, -mid);
    d.Hf.propagate(v, -half);
  }
}

/// <chi| dU/ds |psi> for U = (A B A)^K, A = exp(-i H_f s dt/2K),
/// B = exp(-i H_i (1-s) dt/K).
std::complex<double> step_derivative(const Dynamics& d, double s, double dt, int K, const CVector& chi,
                                     const CVector& psi) {
  const TrotterStep st = step_for(s, dt);
  const double half = st.g / (2.0 * K), mid = st.f / K;
  const std::complex<double> i(0.0, 1.0);
  const double da = dt / (2.0 * K);  // d(half)/ds
  const double db = -dt / K;         // d(mid)/ds

  auto apply_v = [&](CVector& v) {
    d.Hf.propagate(v, half);
    d.Hi.propagate(v, mid);
    d.Hf.propagate(v, half);
  };
  auto apply_v_adjoint = [&](CVector& v) {
    d.Hf.propagate(v, -half);
    d.Hi.propagate(v, -mid);
    d.Hf.propagate(v, -half);
  };

  // phi_k = V^k psi, eta_k = (V^dagger)^(K-1-k) chi
  std::vector<CVector> eta(static_cast<std::size_t>(K));
  eta[static_cast<std::size_t>(K - 1)] = chi;
  for (int k = K - 2; k >= 0; --k) {
    eta[static_cast<std::size_t>(k)] = eta[static_cast<std::size_t>(k + 1)];
    apply_v_adjoint(eta[static_cast<std::size_t>(k)]);
  }

  std::complex<double> total = 0.0;
  CVector phi = psi;
  for (int k = 0; k < K; ++k) {
    // dV phi = dA B A phi + A dB A phi + A B dA phi, with dA = -i da H_f A, dB = -i db H_i B
    CVector x = phi;
    d.Hf.propagate(x, half);  // A phi
    CVector y = x;
    d.Hi.propagate(y, mid);   // B A phi

    CVector t1 = y;
    d.Hf.propagate(t1, half);
    t1 = (-i * da) * d.Hf.apply(t1);

    CVector t2 = (-i * db) * d.Hi.apply(y);
    d.Hf.propagate(t2, half);

    CVector t3 = (-i * da) * d.Hf.apply(x);
    d.Hi.propagate(t3, mid);
    d.Hf.propagate(t3, half);

    total += eta[static_cast<std::size_t>(k)].dot(t1 + t2 + t3);
    apply_v(phi);
  }
  return total;
}

CVector forward(const Dynamics& d, const std::vector<double>& s, double dt, int K) {
  CVector v = d.psi0;
  for (double sl : s) trotter_step(d.Hi, d.Hf, step_for(sl, dt), K, v);
  return v;
}

double raw_objective(const Dynamics& d, const std::vector<double>& s, double dt, int K, Eigen::Index w) {
  return std::norm(forward(d, s, dt, K)(w));
}

/// chi_l for l = 1..M (index l-1) given the final state.
std::vector<CVector> costates(const Dynamics& d, const std::vector<double>& s, double dt, int K, Eigen::Index w,
                              const CVector& final_state) {
  const std::size_t M = s.size();
  std::vector<CVector> chi(M);
  CVector c = CVector::Zero(final_state.size());
  c(w) = final_state(w);
  for (std::size_t l = M; l-- > 0;) {
    chi[l] = c;
    step_adjoint(d, s[l], dt, K, c);
  }
  return chi;
}

void check_problem(const Schedule& schedule, const ControlProblem& problem) {
  schedule.validate();
  if (problem.K < 1) throw std::invalid_argument("Trotter repetition K must be >= 1");
  if (problem.n_logical < 1 || problem.n_logical > 12)
    throw DimensionError("control problems are limited to 1 <= n_L <= 12");
  if (problem.w < 0 || problem.w >= Space::logical(problem.n_logical).dim())
    throw std::out_of_range("marked index outside the logical space");
}

}  // namespace

void KrotovConfig::validate() const {
  if (max_iters < 0) throw std::invalid_argument("max_iters must be >= 0");
  if (!(convergence_eps > 0.0)) throw std::invalid_argument("convergence_eps must be > 0");
  if (max_weight_adjustments < 0) throw std::invalid_argument("max_weight_adjustments must be >= 0");
}

double objective(const Schedule& schedule, const ControlProblem& problem) {
  check_problem(schedule, problem);
  const Dynamics d(problem);
  return std::clamp(raw_objective(d, schedule.values, schedule.dt(), problem.K, problem.w), 0.0, 1.0);
}

std::vector<double> gradient(const Schedule& schedule, const ControlProblem& problem) {
  check_problem(schedule, problem);
  const Dynamics d(problem);
  const double dt = schedule.dt();
  const auto& s = schedule.values;
  const auto chi = costates(d, s, dt, problem.K, problem.w, forward(d, s, dt, problem.K));
  std::vector<double> g(s.size());
  CVector psi = d.psi0;
  for (std::size_t l = 0; l < s.size(); ++l) {
    g[l] = 2.0 * std::real(step_derivative(d, s[l], dt, problem.K, chi[l], psi));
    trotter_step(d.Hi, d.Hf, step_for(s[l], dt), problem.K, psi);
  }
  return g;
}

std::vector<double> fidelity_curve(const Schedule& schedule, const ControlProblem& problem) {
  check_problem(schedule, problem);
  const Dynamics d(problem);
  std::vector<double> f;
  f.reserve(schedule.values.size());
  CVector v = d.psi0;
  for (double sl : schedule.values) {
    trotter_step(d.Hi, d.Hf, step_for(sl, schedule.dt()), problem.K, v);
    f.push_back(std::norm(v(problem.w)));
  }
  return f;
}

OptimizationTrace krotov_optimize(const Schedule& seed, const KrotovConfig& cfg, const ControlProblem& problem) {
  check_problem(seed, problem);
  cfg.validate();
  const Dynamics d(problem);
  const double dt = seed.dt();
  const int K = problem.K;
  const auto w = problem.w;
  double weight = cfg.step_weight > 0.0 ? cfg.step_weight : 50.0 * seed.M() / seed.T;
  if (!(weight > 0.0) || !std::isfinite(weight)) throw std::invalid_argument("step weight must be positive");

  OptimizationTrace trace;
  std::vector<double> s = seed.values;
  CVector final_state = forward(d, s, dt, K);
  trace.objective.push_back(std::norm(final_state(w)));

  for (int iter = 0; iter < cfg.max_iters; ++iter) {
    const auto chi = costates(d, s, dt, K, w, final_state);
    for (;;) {
      std::vector<double> next = s;
      CVector psi = d.psi0;
      for (std::size_t l = 0; l < next.size(); ++l) {
        const double g = 2.0 * std::real(step_derivative(d, s[l], dt, K, chi[l], psi));
        next[l] = s[l] + g / weight;
        if (cfg.clamp) next[l] = std::clamp(next[l], 0.0, 1.0);
        trotter_step(d.Hi, d.Hf, step_for(next[l], dt), K, psi);
      }
      const double value = std::norm(psi(w));
      if (value >= trace.objective.back() - 10.0 * cfg.convergence_eps) {
        s = std::move(next);
        final_state = std::move(psi);
        trace.objective.push_back(value);
        trace.step_weight.push_back(weight);
        break;
      }
      if (trace.weight_adjustments >= cfg.max_weight_adjustments) {
        std::ostringstream msg;
        msg << "Krotov objective fell from " << trace.objective.back() << " to " << value << " at iteration "
            << iter + 1 << " with step weight " << weight << " after " << trace.weight_adjustments
            << " adjustments; the update is too aggressive for this time grid";
        throw std::runtime_error(msg.str());
      }
      weight *= 2.0;
      ++trace.weight_adjustments;
    }
    const auto n = trace.objective.size();
    if (std::abs(trace.objective[n - 1] - trace.objective[n - 2]) < cfg.convergence_eps) {
      trace.converged = true;
      break;
    }
  }

  trace.schedule = Schedule{seed.T, s, ScheduleKind::Krotov};
  trace.fidelity = fidelity_curve(trace.schedule, problem);
  trace.tau.resize(s.size());
  for (std::size_t l = 0; l < s.size(); ++l) trace.tau[l] = static_cast<double>(l + 1) / static_cast<double>(s.size());
  return trace;
}

double finite_difference(const Schedule& schedule, const ControlProblem& problem, int l, double h) {
  check_problem(schedule, problem);
  if (l < 1 || l > schedule.M()) throw std::out_of_range("control index outside [1, M]");
  if (!(h >= 1e-7 && h <= 1e-3)) throw std::invalid_argument("finite-difference step must lie in [1e-7, 1e-3]");
  const Dynamics d(problem);
  const double dt = schedule.dt();
  const auto idx = static_cast<std::size_t>(l - 1);
  std::vector<double> plus = schedule.values, minus = schedule.values;
  const double s = schedule.values[idx];
  auto eval = [&](std::vector<double>& v) { return raw_objective(d, v, dt, problem.K, problem.w); };
  if (s + h > 1.0) {  // backward difference at the upper clamp
    minus[idx] = s - h;
    return (eval(plus) - eval(minus)) / h;
  }
  if (s - h < 0.0) {
    plus[idx] = s + h;
    return (eval(plus) - eval(minus)) / h;
  }
  plus[idx] = s + h;
  minus[idx] = s - h;
  return (eval(plus) - eval(minus)) / (2.0 * h);
}

double gradient_check(const Schedule& schedule, const ControlProblem& problem, int l, double h) {
  const double fd = finite_difference(schedule, problem, l, h);
  const double adj = gradient(schedule, problem)[static_cast<std::size_t>(l - 1)];
  return std::abs(adj - fd) / std::max({std::abs(fd), std::abs(adj), 1e-12});
}

}  // namespace dfsaqc
