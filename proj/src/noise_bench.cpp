#include "dfsaqc/noise_bench.hpp"

#include <unsupported/Eigen/KroneckerProduct>

#include <cmath>
#include <random>

#include "dfsaqc/aqc.hpp"
#include "dfsaqc/dfs_code.hpp"
#include "dfsaqc/grover.hpp"
#include "dfsaqc/parallel.hpp"
#include "dfsaqc/trotter.hpp"

namespace dfsaqc {

namespace {

constexpr int kMaxJointSpins = 12;
constexpr int kMaxBathSpins = 4;

using RowMajor = Eigen::Matrix<std::complex<double>, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

CMatrix reduce(const CVector& joint, Eigen::Index sys_dim, Eigen::Index bath_dim) {
  Eigen::Map<const RowMajor> psi(joint.data(), sys_dim, bath_dim);
  return psi * psi.adjoint();
}

struct Sample {
  double purity_loss;
  double trace;
  double min_eig;
};

Sample inspect(const CMatrix& rho) {
  Eigen::SelfAdjointEigenSolver<CMatrix> es(rho, Eigen::EigenvaluesOnly);
  return {1.0 - purity(rho), std::real(rho.trace()), es.eigenvalues().minCoeff()};
}

void record(BathRun& run, const Sample& s) {
  run.max_purity_loss = std::max(run.max_purity_loss, s.purity_loss);
  run.min_trace = std::min(run.min_trace, s.trace);
  run.max_trace = std::max(run.max_trace, s.trace);
  run.min_eigenvalue = std::min(run.min_eigenvalue, s.min_eig);
}

void require_protocol(const Protocol& p, const State& psi) {
  if (p.hamiltonians.empty()) throw std::invalid_argument("protocol has no Hamiltonians");
  for (const auto& H : p.hamiltonians) {
    if (H.space().kind != SpaceKind::Full) throw SpaceMismatch("noise bench protocols act on FULL space");
    require_same_space(H.space(), p.hamiltonians.front().space());
  }
  for (const auto& seg : p.segments)
    if (seg.index >= p.hamiltonians.size()) throw std::out_of_range("protocol segment refers to a missing Hamiltonian");
  require_same_space(psi.space(), p.hamiltonians.front().space());
}

BathRun run_spin_bath(const Protocol& p, const SpinBath& bath, const State& psi) {
  const Eigen::Index ds = psi.dim();
  const Eigen::Index db = Eigen::Index{1} << bath.m;
  std::vector<SpectralDecomposition<double>> joint;
  joint.reserve(p.hamiltonians.size());
  for (const auto& H : p.hamiltonians) joint.emplace_back(joint_hamiltonian(H, bath));

  BathRun run;
  CVector v = Eigen::kroneckerProduct(psi.amplitudes(), bath_ground_state(bath)).eval();
  run.rho = reduce(v, ds, db);
  record(run, inspect(run.rho));
  for (const auto& seg : p.segments) {
    v = joint[seg.index].propagate(v, seg.duration);
    run.rho = reduce(v, ds, db);
    record(run, inspect(run.rho));
  }
  return run;
}

BathRun run_stochastic(const Protocol& p, const StochasticBath& bath, const State& psi) {
  const int n = p.n();
  const CVector zt = total_z(n).dense().diagonal();
  std::vector<SpectralDecomposition<double>> sys;
  std::vector<bool> commuting;
  for (const auto& H : p.hamiltonians) {
    sys.emplace_back(H);
    commuting.push_back(check_symmetry(H).symmetric);
  }

  const auto traj = static_cast<std::size_t>(bath.ensemble);
  const std::size_t samples = p.segments.size() + 1;
  // states[t][k]: trajectory t after k segments
  std::vector<std::vector<CVector>> states(traj);
  const double decay = std::exp(-bath.dt / bath.correlation_time);
  parallel_for(traj, [&](std::size_t t) {
    std::seed_seq seq{bath.seed, static_cast<std::uint64_t>(t)};
    std::mt19937_64 rng(seq);
    std::normal_distribution<double> normal(0.0, 1.0);
    double eta = bath.amplitude * normal(rng);
    CVector v = psi.amplitudes();
    auto& out = states[t];
    out.reserve(samples);
    out.push_back(v);
    for (const auto& seg : p.segments) {
      double left = seg.duration;
      while (left > 1e-15) {
        const double tau = std::min(bath.dt, left);
        if (commuting[seg.index]) {
          v = sys[seg.index].propagate(v, tau);
          for (Eigen::Index i = 0; i < v.size(); ++i) v(i) *= std::polar(1.0, -eta * std::real(zt(i)) * tau);
        } else {
          const Operator H = p.hamiltonians[seg.index] + eta * total_z(n);
          v = SpectralDecomposition<double>(H).propagate(v, tau);
        }
        const double a = tau == bath.dt ? decay : std::exp(-tau / bath.correlation_time);
        eta = a * eta + bath.amplitude * std::sqrt(1.0 - a * a) * normal(rng);
        left -= tau;
      }
      out.push_back(v);
    }
  });

  BathRun run;
  for (std::size_t k = 0; k < samples; ++k) {
    std::vector<CMatrix> terms(traj);
    for (std::size_t t = 0; t < traj; ++t) terms[t] = states[t][k] * states[t][k].adjoint();
    CMatrix rho = pairwise_sum(terms, 0, traj) / static_cast<double>(traj);
    record(run, inspect(rho));
    if (k + 1 == samples) run.rho = std::move(rho);
  }
  return run;
}

}  // namespace

void validate_bath(const BathModel& bath, int n_system) {
  if (const auto* sb = std::get_if<SpinBath>(&bath)) {
    if (sb->m < 1 || sb->m > kMaxBathSpins) throw DimensionError("spin bath needs 1 <= m <= 4");
    if (n_system + sb->m > kMaxJointSpins) throw DimensionError("joint dimension 2^(n+m) exceeds 2^12");
  } else {
    const auto& st = std::get<StochasticBath>(bath);
    if (st.ensemble < 100) throw std::invalid_argument("stochastic bath needs an ensemble of at least 100");
    if (!(st.dt > 0.0) || !(st.correlation_time > 0.0) || !(st.amplitude >= 0.0))
      throw std::invalid_argument("stochastic bath needs dt > 0, correlation_time > 0, amplitude >= 0");
  }
}

Operator bath_hamiltonian(const SpinBath& bath) {
  Operator H = bath.h * pauli(Pauli::X, 0, bath.m);
  for (int k = 1; k < bath.m; ++k) H = H + bath.h * pauli(Pauli::X, k, bath.m);
  return H;
}

Operator bath_coupling(const SpinBath& bath) { return bath.g * total_z(bath.m); }

CVector bath_ground_state(const SpinBath& bath) { return eig_lowest(bath_hamiltonian(bath), 1).front().vector; }

Operator joint_hamiltonian(const Operator& H_s, const SpinBath& bath) {
  if (H_s.space().kind != SpaceKind::Full) throw SpaceMismatch("joint_hamiltonian expects a FULL-space system operator");
  const int n = H_s.space().n;
  validate_bath(bath, n);
  Operator::Sparse id_s(H_s.dim(), H_s.dim()), id_b(Eigen::Index{1} << bath.m, Eigen::Index{1} << bath.m);
  id_s.setIdentity();
  id_b.setIdentity();
  Operator::Sparse joint = Eigen::kroneckerProduct(H_s.sparse(), id_b).eval();
  joint += Eigen::kroneckerProduct(id_s, bath_hamiltonian(bath).sparse()).eval();
  joint += Eigen::kroneckerProduct(total_z(n).sparse(), bath_coupling(bath).sparse()).eval();
  return Operator(Space::full(n + bath.m), std::move(joint), H_s.hermitian() ? Hermiticity::Yes : Hermiticity::Detect);
}

Protocol constant_protocol(const Operator& H_s, double t, int samples) {
  if (samples < 1) throw std::invalid_argument("samples must be >= 1");
  Protocol p;
  p.hamiltonians.push_back(H_s);
  for (int k = 0; k < samples; ++k) p.segments.push_back({0, t / samples});
  return p;
}

BathRun joint_evolve(const Protocol& protocol, const BathModel& bath, const State& psi_sys) {
  require_protocol(protocol, psi_sys);
  validate_bath(bath, protocol.n());
  bool symmetric = true;
  for (const auto& H : protocol.hamiltonians) symmetric = symmetric && check_symmetry(H).symmetric;
  BathRun run = std::holds_alternative<SpinBath>(bath) ? run_spin_bath(protocol, std::get<SpinBath>(bath), psi_sys)
                                                       : run_stochastic(protocol, std::get<StochasticBath>(bath), psi_sys);
  run.symmetric = symmetric;
  return run;
}

BathRun joint_evolve(const Operator& H_s, const BathModel& bath, const State& psi_sys, double t) {
  return joint_evolve(constant_protocol(H_s, t), bath, psi_sys);
}

State closed_evolve(const Protocol& protocol, const State& psi_sys) {
  require_protocol(protocol, psi_sys);
  std::vector<SpectralDecomposition<double>> sys;
  for (const auto& H : protocol.hamiltonians) sys.emplace_back(H);
  CVector v = psi_sys.amplitudes();
  for (const auto& seg : protocol.segments) v = sys[seg.index].propagate(v, seg.duration);
  return State::normalized(psi_sys.space(), std::move(v));
}

double purity(const CMatrix& rho) { return std::real((rho * rho).trace()); }

double state_fidelity(const CMatrix& rho, const CVector& psi) { return std::real(psi.dot(rho * psi)); }

double factorization_deviation(const Operator& H_s, const SpinBath& bath, double t) {
  const int n = H_s.space().n;
  validate_bath(bath, n);
  const Eigen::Index db = Eigen::Index{1} << bath.m;
  const CMatrix joint = expm_hermitian(joint_hamiltonian(H_s, bath), t);

  Operator::Sparse id_s(H_s.dim(), H_s.dim()), id_b(db, db);
  id_s.setIdentity();
  id_b.setIdentity();
  Operator::Sparse deph = Eigen::kroneckerProduct(id_s, bath_hamiltonian(bath).sparse()).eval();
  deph += Eigen::kroneckerProduct(total_z(n).sparse(), bath_coupling(bath).sparse()).eval();
  const CMatrix u_deph = expm_hermitian(Operator(Space::full(n + bath.m), deph, Hermiticity::Yes), t);
  const CMatrix u_sys = Eigen::kroneckerProduct(expm_hermitian(H_s, t), CMatrix::Identity(db, db)).eval();

  Eigen::JacobiSVD<CMatrix> svd(joint - u_deph * u_sys);
  return svd.singularValues()(0);
}

double sector_channel_deviation(int n, const SpinBath& bath, double t) {
  validate_bath(bath, n);
  const SpaceMap map(n);
  const Eigen::Index ds = Eigen::Index{1} << n, db = Eigen::Index{1} << bath.m;
  Operator::Sparse id_s(ds, ds), id_b(db, db);
  id_s.setIdentity();
  id_b.setIdentity();
  Operator::Sparse deph = Eigen::kroneckerProduct(id_s, bath_hamiltonian(bath).sparse()).eval();
  deph += Eigen::kroneckerProduct(total_z(n).sparse(), bath_coupling(bath).sparse()).eval();
  const CMatrix u = expm_hermitian(Operator(Space::full(n + bath.m), deph, Hermiticity::Yes), t);
  const CMatrix ub = expm_hermitian(bath_hamiltonian(bath), t);

  double worst = 0.0;
  for (auto a : map.dfs_indices())
    for (auto a2 : map.dfs_indices()) {
      const CMatrix block = u.block(static_cast<Eigen::Index>(a) * db, static_cast<Eigen::Index>(a2) * db, db, db);
      worst = std::max(worst, a == a2 ? max_abs_diff(block, ub) : block.cwiseAbs().maxCoeff());
    }
  return worst;
}

std::string to_string(ProtectedProtocol p) {
  return p == ProtectedProtocol::ContinuousGrover ? "grover-cont" : "trotter-aqc";
}

ProtectedProtocol parse_protected_protocol(const std::string& text) {
  if (text == "grover-cont" || text == "grover_cont" || text == "grover") return ProtectedProtocol::ContinuousGrover;
  if (text == "trotter-aqc" || text == "aqc" || text == "trotter") return ProtectedProtocol::TrotterizedAqc;
  throw std::invalid_argument("unknown protocol '" + text + "'");
}

ProtectionReport protection_report(ProtectedProtocol protocol, const BathModel& bath, int n,
                                   const ProtectionOptions& options) {
  if (n != 4 && n != 6) throw std::invalid_argument("protection_report runs at n = 4 or n = 6");
  validate_bath(bath, n);
  const SpaceMap map(n);
  const Space full = Space::full(n);
  const std::optional<Operator> stray =
      options.stray_field != 0.0 ? std::optional<Operator>(options.stray_field * pauli(Pauli::X, 0, n)) : std::nullopt;
  auto with_stray = [&](Operator H) { return stray ? H + *stray : H; };

  Protocol p;
  State psi0 = State::basis(full, 0);
  Eigen::Index target = 0;

  if (protocol == ProtectedProtocol::ContinuousGrover) {
    const auto inst = GroverInstance::make(Space::dfs(n), options.w);
    p = constant_protocol(with_stray(lift_operator(grover_h(inst), map)), grover_peak_time(inst.N));
    psi0 = embed(uniform_state(inst.space), full, map);
    target = static_cast<Eigen::Index>(map.dfs_indices()[static_cast<std::size_t>(options.w)]);
  } else {
    const int nL = n / 2;
    const Space logical = Space::logical(nL);
    const double T = default_total_time(nL);
    const int M = static_cast<int>(std::lround(2.0 * T));
    const Schedule sch =
        gap_schedule(gap_profile(logical_initial_h(nL, options.J), oracle_h(logical, options.w)), T, M);
    const TrotterPlan plan = schedule_coeffs(sch, options.K);
    target = static_cast<Eigen::Index>(logical_to_full(static_cast<std::uint64_t>(options.w), nL));
    p.hamiltonians.push_back(with_stray(xxx_pairs(n, options.J)));
    p.hamiltonians.push_back(with_stray(oracle_h(full, target)));
    for (const auto& st : plan.coeffs)
      for (int k = 0; k < plan.K; ++k) {
        p.segments.push_back({1, st.g / (2.0 * plan.K)});
        p.segments.push_back({0, st.f / plan.K});
        p.segments.push_back({1, st.g / (2.0 * plan.K)});
      }
    psi0 = embed(xxx_ground_state(nL), full, map);
  }

  const BathRun run = joint_evolve(p, bath, psi0);
  const State closed = closed_evolve(p, psi0);
  const double f_with = std::clamp(std::real(run.rho(target, target)), 0.0, 1.0);
  const double f_without = std::clamp(std::norm(closed[target]), 0.0, 1.0);
  return {protocol, n, f_with, f_without, std::abs(f_with - f_without), run.max_purity_loss, run.symmetric};
}

}  // namespace dfsaqc
