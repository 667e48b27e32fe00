// Spin-1/2 operator algebra, Hamiltonian assembly, eigensolvers and unitary
// propagation. Everything above this layer is built from these pieces.
//
// Basis convention: a computational basis state is the integer whose bit
// (n - 1 - k) is 0 when spin k is up and 1 when it is down, so spin 0 is the
// most significant bit. Every index map in the library derives from this.
#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include <algorithm>
#include <bit>
#include <cmath>
#include <complex>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <type_traits>
#include <utility>
#include <variant>
#include <vector>

namespace dfsaqc {

// ---------------------------------------------------------------------------
// Errors

/// Operands live on different state spaces.
class SpaceMismatch : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// A size guard was exceeded (joint dimension, enumeration bound).
class DimensionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Probability weight left a subspace where it was required to stay.
class LeakageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// ---------------------------------------------------------------------------
// Tolerances

namespace tol {
inline constexpr double hermitian = 1e-12;
inline constexpr double norm = 1e-10;
inline constexpr double propagation = 1e-10;
inline constexpr double residual = 1e-9;
}  // namespace tol

/// Dense eigendecomposition is used up to this dimension; above it evolve()
/// switches to a Krylov action.
inline constexpr Eigen::Index kDenseLimit = 4096;
/// Storage switches to sparse when density falls below this fraction...
inline constexpr double kSparseDensity = 0.10;
/// ...and the dimension is at least this.
inline constexpr Eigen::Index kSparseMinDim = 1024;

// ---------------------------------------------------------------------------
// Spaces

enum class SpaceKind { Full, Dfs, Logical };

/// Label of the state space an operator or state acts on. `n` is the number of
/// physical spins for Full and Dfs, and the number of logical qubits for
/// Logical.
struct Space {
  SpaceKind kind = SpaceKind::Full;
  int n = 0;

  static Space full(int n) { return {SpaceKind::Full, n}; }
  static Space dfs(int n) { return {SpaceKind::Dfs, n}; }
  static Space logical(int n_logical) { return {SpaceKind::Logical, n_logical}; }

  Eigen::Index dim() const {
    switch (kind) {
      case SpaceKind::Full:
      case SpaceKind::Logical:
        return Eigen::Index{1} << n;
      case SpaceKind::Dfs: {
        // C(n, n/2)
        Eigen::Index c = 1;
        for (int i = 1; i <= n / 2; ++i) c = c * (n / 2 + i) / i;
        return c;
      }
    }
    return 0;
  }

  bool operator==(const Space&) const = default;
};

inline std::string to_string(const Space& s) {
  switch (s.kind) {
    case SpaceKind::Full:
      return "FULL(" + std::to_string(s.n) + ")";
    case SpaceKind::Dfs:
      return "DFS(" + std::to_string(s.n) + ")";
    case SpaceKind::Logical:
      return "LOGICAL(" + std::to_string(s.n) + ")";
  }
  return "?";
}

inline void require_same_space(const Space& a, const Space& b) {
  if (!(a == b)) throw SpaceMismatch("space mismatch: " + to_string(a) + " vs " + to_string(b));
}

/// Bit mask of spin `site` in a register of `n` spins.
inline std::uint64_t spin_mask(int site, int n) { return std::uint64_t{1} << (n - 1 - site); }

// ---------------------------------------------------------------------------
// Operator

enum class Hermiticity { No, Yes, Detect };

template <typename Scalar>
class BasicOperator {
 public:
  using Complex = std::complex<Scalar>;
  using Dense = Eigen::Matrix<Complex, Eigen::Dynamic, Eigen::Dynamic>;
  using Sparse = Eigen::SparseMatrix<Complex>;
  using Vector = Eigen::Matrix<Complex, Eigen::Dynamic, 1>;

  BasicOperator(Space space, Dense m, Hermiticity h = Hermiticity::Detect) : space_(space) {
    check_dim(m.rows(), m.cols());
    const Eigen::Index nnz = (m.array() != Complex(0)).count();
    if (prefers_sparse(nnz, m.rows())) {
      storage_ = Sparse(m.sparseView());
    } else {
      storage_ = std::move(m);
    }
    set_hermitian(h);
  }

  BasicOperator(Space space, Sparse m, Hermiticity h = Hermiticity::Detect) : space_(space) {
    check_dim(m.rows(), m.cols());
    m.makeCompressed();
    if (prefers_sparse(m.nonZeros(), m.rows())) {
      storage_ = std::move(m);
    } else {
      storage_ = Dense(m);
    }
    set_hermitian(h);
  }

  static BasicOperator identity(Space space) {
    Sparse id(space.dim(), space.dim());
    id.setIdentity();
    return BasicOperator(space, std::move(id), Hermiticity::Yes);
  }

  const Space& space() const { return space_; }
  Eigen::Index dim() const { return space_.dim(); }
  bool hermitian() const { return hermitian_; }
  bool is_sparse() const { return std::holds_alternative<Sparse>(storage_); }

  Dense dense() const {
    if (auto* s = std::get_if<Sparse>(&storage_)) return Dense(*s);
    return std::get<Dense>(storage_);
  }

  Sparse sparse() const {
    if (auto* s = std::get_if<Sparse>(&storage_)) return *s;
    return std::get<Dense>(storage_).sparseView();
  }

  Vector apply(const Vector& v) const {
    if (v.size() != dim()) throw SpaceMismatch("vector length does not match operator dimension");
    return std::visit([&](const auto& m) -> Vector { return m * v; }, storage_);
  }

  /// max_ij |A_ij - conj(A_ji)|
  Scalar hermiticity_defect() const {
    if (auto* s = std::get_if<Sparse>(&storage_)) {
      Sparse d = *s - Sparse(s->adjoint());
      Scalar worst = 0;
      for (int k = 0; k < d.outerSize(); ++k)
        for (typename Sparse::InnerIterator it(d, k); it; ++it) worst = std::max(worst, std::abs(it.value()));
      return worst;
    }
    const Dense& m = std::get<Dense>(storage_);
    if (m.size() == 0) return 0;
    return (m - m.adjoint()).cwiseAbs().maxCoeff();
  }

  friend BasicOperator operator+(const BasicOperator& a, const BasicOperator& b) {
    require_same_space(a.space_, b.space_);
    const Hermiticity h = a.hermitian_ && b.hermitian_ ? Hermiticity::Yes : Hermiticity::No;
    if (a.is_sparse() && b.is_sparse()) return BasicOperator(a.space_, Sparse(a.sparse() + b.sparse()), h);
    return BasicOperator(a.space_, Dense(a.dense() + b.dense()), h);
  }

  friend BasicOperator operator-(const BasicOperator& a, const BasicOperator& b) { return a + Scalar(-1) * b; }

  friend BasicOperator operator*(Scalar c, const BasicOperator& a) {
    const Hermiticity h = a.hermitian_ ? Hermiticity::Yes : Hermiticity::No;
    return std::visit(
        [&](const auto& m) {
          using M = std::decay_t<decltype(m)>;
          return BasicOperator(a.space_, M(Complex(c) * m), h);
        },
        a.storage_);
  }

  friend BasicOperator operator*(Complex c, const BasicOperator& a) {
    return std::visit(
        [&](const auto& m) {
          using M = std::decay_t<decltype(m)>;
          return BasicOperator(a.space_, M(c * m), Hermiticity::Detect);
        },
        a.storage_);
  }

  /// Matrix product. Hermiticity of the result is detected numerically.
  friend BasicOperator operator*(const BasicOperator& a, const BasicOperator& b) {
    require_same_space(a.space_, b.space_);
    if (a.is_sparse() && b.is_sparse())
      return BasicOperator(a.space_, Sparse(a.sparse() * b.sparse()), Hermiticity::Detect);
    return BasicOperator(a.space_, Dense(a.dense() * b.dense()), Hermiticity::Detect);
  }

 private:
  void check_dim(Eigen::Index rows, Eigen::Index cols) const {
    if (rows != cols || rows != space_.dim())
      throw std::invalid_argument("operator matrix is " + std::to_string(rows) + "x" + std::to_string(cols) +
                                  " but " + to_string(space_) + " has dimension " + std::to_string(space_.dim()));
  }

  static bool prefers_sparse(Eigen::Index nnz, Eigen::Index dim) {
    return dim >= kSparseMinDim && static_cast<double>(nnz) < kSparseDensity * static_cast<double>(dim) * dim;
  }

  void set_hermitian(Hermiticity h) {
    switch (h) {
      case Hermiticity::No:
        hermitian_ = false;
        break;
      case Hermiticity::Yes:
        if (hermiticity_defect() >= tol::hermitian)
          throw std::invalid_argument("operator flagged Hermitian has |A - A^dagger|_max >= 1e-12");
        hermitian_ = true;
        break;
      case Hermiticity::Detect:
        hermitian_ = hermiticity_defect() < tol::hermitian;
        break;
    }
  }

  Space space_;
  std::variant<Dense, Sparse> storage_;
  bool hermitian_ = false;
};

// ---------------------------------------------------------------------------
// State

template <typename Scalar>
class BasicState {
 public:
  using Complex = std::complex<Scalar>;
  using Vector = Eigen::Matrix<Complex, Eigen::Dynamic, 1>;

  /// Takes amplitudes that are already normalized to within 1e-10.
  BasicState(Space space, Vector amplitudes) : space_(space), amps_(std::move(amplitudes)) {
    if (amps_.size() != space_.dim())
      throw std::invalid_argument("state length " + std::to_string(amps_.size()) + " does not match " +
                                  to_string(space_));
    if (std::abs(amps_.norm() - Scalar(1)) > tol::norm) throw std::invalid_argument("state is not normalized");
  }

  static BasicState normalized(Space space, Vector v) {
    const Scalar nrm = v.norm();
    if (nrm == Scalar(0)) throw std::invalid_argument("cannot normalize the zero vector");
    v /= nrm;
    return BasicState(space, std::move(v));
  }

  static BasicState basis(Space space, Eigen::Index index) {
    if (index < 0 || index >= space.dim()) throw std::out_of_range("basis index out of range");
    Vector v = Vector::Zero(space.dim());
    v(index) = Complex(1);
    return BasicState(space, std::move(v));
  }

  const Space& space() const { return space_; }
  Eigen::Index dim() const { return amps_.size(); }
  const Vector& amplitudes() const { return amps_; }
  Complex operator[](Eigen::Index i) const { return amps_(i); }

  Complex inner(const BasicState& other) const {
    require_same_space(space_, other.space_);
    return amps_.dot(other.amps_);
  }

  /// |<this|other>|^2
  Scalar overlap(const BasicState& other) const { return std::norm(inner(other)); }

 private:
  Space space_;
  Vector amps_;
};

using Operator = BasicOperator<double>;
using State = BasicState<double>;
using CVector = Eigen::VectorXcd;
using CMatrix = Eigen::MatrixXcd;

// ---------------------------------------------------------------------------
// Pauli construction

enum class Pauli { X, Y, Z };

/// sigma_kind on spin `site` (0-based) of an n-spin register.
template <typename Scalar = double>
BasicOperator<Scalar> pauli(Pauli kind, int site, int n) {
  using Complex = std::complex<Scalar>;
  if (n < 1 || n > 30) throw std::invalid_argument("spin count out of range");
  if (site < 0 || site >= n) throw std::out_of_range("pauli site " + std::to_string(site) + " outside [0, n)");
  const Eigen::Index dim = Eigen::Index{1} << n;
  const std::uint64_t mask = spin_mask(site, n);
  std::vector<Eigen::Triplet<Complex>> t;
  t.reserve(dim);
  for (Eigen::Index b = 0; b < dim; ++b) {
    const bool down = (static_cast<std::uint64_t>(b) & mask) != 0;
    switch (kind) {
      case Pauli::X:
        t.emplace_back(static_cast<Eigen::Index>(b ^ mask), b, Complex(1));
        break;
      case Pauli::Y:
        // Y|up> = i|down>, Y|down> = -i|up>
        t.emplace_back(static_cast<Eigen::Index>(b ^ mask), b, down ? Complex(0, -1) : Complex(0, 1));
        break;
      case Pauli::Z:
        t.emplace_back(b, b, down ? Complex(-1) : Complex(1));
        break;
    }
  }
  Eigen::SparseMatrix<Complex> m(dim, dim);
  m.setFromTriplets(t.begin(), t.end());
  return BasicOperator<Scalar>(Space::full(n), std::move(m), Hermiticity::Yes);
}

/// Z_t = sum_i Z_i, diagonal with eigenvalue (#up - #down).
template <typename Scalar = double>
BasicOperator<Scalar> total_z(int n) {
  using Complex = std::complex<Scalar>;
  if (n < 1 || n > 30) throw std::invalid_argument("spin count out of range");
  const Eigen::Index dim = Eigen::Index{1} << n;
  Eigen::SparseMatrix<Complex> m(dim, dim);
  m.reserve(Eigen::VectorXi::Constant(dim, 1));
  for (Eigen::Index b = 0; b < dim; ++b) {
    const int down = std::popcount(static_cast<std::uint64_t>(b));
    m.insert(b, b) = Complex(Scalar(n - 2 * down));
  }
  m.makeCompressed();
  return BasicOperator<Scalar>(Space::full(n), std::move(m), Hermiticity::Yes);
}

namespace detail {

/// Sum over pairs (2l, 2l+1), 0-based, of cx*(XX + YY) + cz*ZZ, built directly
/// in the computational basis: XX + YY swaps antiparallel pairs with weight 2.
template <typename Scalar>
BasicOperator<Scalar> pair_coupling(int n, Scalar cxy, Scalar cz) {
  using Complex = std::complex<Scalar>;
  if (n < 2 || n > 30 || n % 2 != 0) throw std::invalid_argument("pair Hamiltonians need an even spin count >= 2");
  const Eigen::Index dim = Eigen::Index{1} << n;
  std::vector<Eigen::Triplet<Complex>> t;
  t.reserve(static_cast<std::size_t>(dim) * (n / 2 + 1));
  for (Eigen::Index b = 0; b < dim; ++b) {
    Scalar diag = 0;
    for (int l = 0; l < n / 2; ++l) {
      const std::uint64_t m1 = spin_mask(2 * l, n), m2 = spin_mask(2 * l + 1, n);
      const bool d1 = (static_cast<std::uint64_t>(b) & m1) != 0;
      const bool d2 = (static_cast<std::uint64_t>(b) & m2) != 0;
      if (d1 == d2) {
        diag += cz;
      } else {
        diag -= cz;
        if (cxy != Scalar(0)) t.emplace_back(static_cast<Eigen::Index>(b ^ (m1 | m2)), b, Complex(2 * cxy));
      }
    }
    if (diag != Scalar(0)) t.emplace_back(b, b, Complex(diag));
  }
  Eigen::SparseMatrix<Complex> m(dim, dim);
  m.setFromTriplets(t.begin(), t.end());
  return BasicOperator<Scalar>(Space::full(n), std::move(m), Hermiticity::Yes);
}

}  // namespace detail

/// -sum_l (X_{2l-1} X_{2l} + Y_{2l-1} Y_{2l}) over disjoint neighbouring pairs.
template <typename Scalar = double>
BasicOperator<Scalar> xx_pairs(int n) {
  return detail::pair_coupling<Scalar>(n, Scalar(-1), Scalar(0));
}

/// J sum_l (XX + YY + ZZ) on pairs (2l-1, 2l). Antiferromagnetic J > 0 gives a
/// product of singlets as the unique ground state.
template <typename Scalar = double>
BasicOperator<Scalar> xxx_pairs(int n, Scalar J) {
  if (!(J > Scalar(0))) throw std::invalid_argument("xxx_pairs requires J > 0");
  return detail::pair_coupling<Scalar>(n, J, J);
}

// ---------------------------------------------------------------------------
// Spectra

template <typename Scalar>
struct Eigenpair {
  Scalar value;
  Eigen::Matrix<std::complex<Scalar>, Eigen::Dynamic, 1> vector;
};

/// Dense Hermitian eigendecomposition H = V diag(w) V^dagger, reusable for
/// propagation at any time.
template <typename Scalar>
class SpectralDecomposition {
 public:
  using Complex = std::complex<Scalar>;
  using Dense = Eigen::Matrix<Complex, Eigen::Dynamic, Eigen::Dynamic>;
  using Vector = Eigen::Matrix<Complex, Eigen::Dynamic, 1>;
  using Real = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

  explicit SpectralDecomposition(const BasicOperator<Scalar>& H) : space_(H.space()) {
    if (!H.hermitian()) throw std::invalid_argument("spectral decomposition requires a Hermitian operator");
    if (H.dim() > 2 * kDenseLimit)
      throw DimensionError("dense eigendecomposition refused above dimension " + std::to_string(2 * kDenseLimit));
    const Dense m = H.dense();
    if (m.imag().cwiseAbs().maxCoeff() == Scalar(0)) {
      // real symmetric: cheaper solver, identical spectrum
      using RealMat = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
      Eigen::SelfAdjointEigenSolver<RealMat> es(RealMat(m.real()));
      if (es.info() != Eigen::Success) throw std::runtime_error("Hermitian eigensolver failed");
      values_ = es.eigenvalues();
      vectors_ = es.eigenvectors().template cast<Complex>();
    } else {
      Eigen::SelfAdjointEigenSolver<Dense> es(m);
      if (es.info() != Eigen::Success) throw std::runtime_error("Hermitian eigensolver failed");
      values_ = es.eigenvalues();
      vectors_ = es.eigenvectors();
    }
  }

  const Space& space() const { return space_; }
  const Real& values() const { return values_; }
  const Dense& vectors() const { return vectors_; }

  /// exp(-i H t) v
  Vector propagate(const Vector& v, Scalar t) const {
    Vector c = vectors_.adjoint() * v;
    for (Eigen::Index i = 0; i < c.size(); ++i) c(i) *= std::polar(Scalar(1), -values_(i) * t);
    return vectors_ * c;
  }

  /// H v
  Vector apply(const Vector& v) const {
    Vector c = vectors_.adjoint() * v;
    c.array() *= values_.array().template cast<Complex>();
    return vectors_ * c;
  }

  /// exp(-i H t) as a dense matrix.
  Dense unitary(Scalar t) const {
    Vector phases(values_.size());
    for (Eigen::Index i = 0; i < phases.size(); ++i) phases(i) = std::polar(Scalar(1), -values_(i) * t);
    return vectors_ * phases.asDiagonal() * vectors_.adjoint();
  }

 private:
  Space space_;
  Real values_;
  Dense vectors_;
};

/// The k smallest eigenvalues in ascending order with orthonormal eigenvectors.
template <typename Scalar>
std::vector<Eigenpair<Scalar>> eig_lowest(const BasicOperator<Scalar>& H, Eigen::Index k) {
  if (k < 0 || k > H.dim()) throw std::invalid_argument("eig_lowest: k exceeds the operator dimension");
  SpectralDecomposition<Scalar> sd(H);
  std::vector<Eigenpair<Scalar>> out;
  out.reserve(static_cast<std::size_t>(k));
  for (Eigen::Index i = 0; i < k; ++i) out.push_back({sd.values()(i), sd.vectors().col(i)});
  return out;
}

/// The k smallest eigenvalues only (no eigenvectors), ascending.
template <typename Scalar>
std::vector<Scalar> lowest_eigenvalues(const BasicOperator<Scalar>& H, Eigen::Index k) {
  using Dense = typename BasicOperator<Scalar>::Dense;
  using RealMat = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  if (k < 0 || k > H.dim()) throw std::invalid_argument("lowest_eigenvalues: k exceeds the operator dimension");
  if (!H.hermitian()) throw std::invalid_argument("lowest_eigenvalues requires a Hermitian operator");
  const Dense m = H.dense();
  Eigen::Matrix<Scalar, Eigen::Dynamic, 1> w;
  if (m.imag().cwiseAbs().maxCoeff() == Scalar(0)) {
    w = Eigen::SelfAdjointEigenSolver<RealMat>(RealMat(m.real()), Eigen::EigenvaluesOnly).eigenvalues();
  } else {
    w = Eigen::SelfAdjointEigenSolver<Dense>(m, Eigen::EigenvaluesOnly).eigenvalues();
  }
  return {w.data(), w.data() + k};
}

// ---------------------------------------------------------------------------
// Propagation

/// exp(-i H t) v by a restarted Lanczos (Krylov) approximation with full
/// reorthogonalization. Substeps are accepted when the local error estimate is
/// below tolerance * |substep| / |t|.
template <typename Scalar>
Eigen::Matrix<std::complex<Scalar>, Eigen::Dynamic, 1> krylov_propagate(
    const BasicOperator<Scalar>& H, const Eigen::Matrix<std::complex<Scalar>, Eigen::Dynamic, 1>& v0, Scalar t,
    Scalar tolerance = Scalar(tol::propagation), int krylov_dim = 40) {
  using Complex = std::complex<Scalar>;
  using Vector = Eigen::Matrix<Complex, Eigen::Dynamic, 1>;
  using RealMat = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

  Vector v = v0;
  if (t == Scalar(0)) return v;
  const auto sparse = H.sparse();
  const Eigen::Index dim = H.dim();
  const int m_max = static_cast<int>(std::min<Eigen::Index>(krylov_dim, dim));

  // crude bound on |H| from the max absolute row sum
  Scalar hnorm = 0;
  {
    Eigen::Matrix<Scalar, Eigen::Dynamic, 1> rows = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>::Zero(dim);
    for (int k = 0; k < sparse.outerSize(); ++k)
      for (typename Eigen::SparseMatrix<Complex>::InnerIterator it(sparse, k); it; ++it)
        rows(it.row()) += std::abs(it.value());
    hnorm = std::max(rows.maxCoeff(), Scalar(1e-300));
  }

  const Scalar sign = t > 0 ? Scalar(1) : Scalar(-1);
  const Scalar total = std::abs(t);
  Scalar done = 0;
  Scalar step = std::min(total, Scalar(10) / hnorm);

  std::vector<Vector> basis;
  while (done < total) {
    step = std::min(step, total - done);
    const Scalar beta0 = v.norm();
    basis.assign(1, v / beta0);
    RealMat tri = RealMat::Zero(m_max + 1, m_max + 1);
    int m = 0;
    Scalar beta_next = 0;
    bool breakdown = false;
    for (int j = 0; j < m_max; ++j) {
      Vector w = sparse * basis[j];
      for (int i = 0; i <= j; ++i) {  // full reorthogonalization, twice
        const Complex c = basis[i].dot(w);
        w -= c * basis[i];
      }
      for (int i = 0; i <= j; ++i) w -= basis[i].dot(w) * basis[i];
      tri(j, j) = std::real(basis[j].dot(sparse * basis[j]));
      beta_next = w.norm();
      m = j + 1;
      if (beta_next < Scalar(1e-13) * hnorm) {
        breakdown = true;
        break;
      }
      tri(j + 1, j) = tri(j, j + 1) = beta_next;
      if (j + 1 < m_max) basis.push_back(w / beta_next);
    }

    Eigen::SelfAdjointEigenSolver<RealMat> es(tri.topLeftCorner(m, m));
    for (;;) {
      // y = exp(-i T tau) e1
      Vector ph(m);
      for (int i = 0; i < m; ++i) ph(i) = std::polar(Scalar(1), -sign * es.eigenvalues()(i) * step);
      const Vector y = es.eigenvectors().template cast<Complex>() *
                       (ph.asDiagonal() * es.eigenvectors().row(0).transpose().template cast<Complex>());
      const Scalar err = breakdown ? Scalar(0) : beta0 * beta_next * std::abs(y(m - 1));
      if (err <= tolerance * step / total || step < Scalar(1e-12) * total) {
        Vector next = Vector::Zero(dim);
        for (int i = 0; i < m; ++i) next += (beta0 * y(i)) * basis[i];
        v = next;
        done += step;
        if (err < Scalar(0.1) * tolerance * step / total) step *= Scalar(1.5);
        break;
      }
      step *= Scalar(0.5);
    }
  }
  return v;
}

/// exp(-i H t) psi. Exact eigendecomposition for dim <= 4096, Krylov action
/// above that.
template <typename Scalar>
BasicState<Scalar> evolve(const BasicOperator<Scalar>& H, const BasicState<Scalar>& psi, Scalar t) {
  require_same_space(H.space(), psi.space());
  if (!H.hermitian()) throw std::invalid_argument("evolve requires a Hermitian generator");
  if (t == Scalar(0)) return psi;
  typename BasicState<Scalar>::Vector out;
  if (H.dim() <= kDenseLimit) {
    out = SpectralDecomposition<Scalar>(H).propagate(psi.amplitudes(), t);
  } else {
    out = krylov_propagate(H, psi.amplitudes(), t);
  }
  const Scalar drift = std::abs(out.norm() - Scalar(1));
  if (drift > Scalar(tol::norm)) throw std::runtime_error("propagation lost unitarity beyond 1e-10");
  return BasicState<Scalar>::normalized(psi.space(), std::move(out));
}

/// exp(-i H t) as a dense matrix.
template <typename Scalar>
typename BasicOperator<Scalar>::Dense expm_hermitian(const BasicOperator<Scalar>& H, Scalar t) {
  return SpectralDecomposition<Scalar>(H).unitary(t);
}

/// Largest absolute entry of a - b.
template <typename DerivedA, typename DerivedB>
double max_abs_diff(const Eigen::MatrixBase<DerivedA>& a, const Eigen::MatrixBase<DerivedB>& b) {
  if (a.size() == 0) return 0.0;
  return static_cast<double>((a - b).cwiseAbs().maxCoeff());
}

}  // namespace dfsaqc
