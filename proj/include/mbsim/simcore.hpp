// Copyright 2026 The mbsim Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef MBSIM_SIMCORE_HPP_
#define MBSIM_SIMCORE_HPP_

#include <Eigen/Dense>

#include <algorithm>
#include <bit>
#include <cmath>
#include <complex>
#include <cstdint>
#include <map>
#include <random>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace mbsim {

using cplx = std::complex<double>;
using Mat = Eigen::MatrixXcd;
using Vec = Eigen::VectorXcd;
using RVec = Eigen::VectorXd;

inline constexpr int kMaxQubits = 12;
inline constexpr double kPi = 3.14159265358979323846;

struct ValidationError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct CapacityError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct NotSupportedError : std::logic_error {
  using std::logic_error::logic_error;
};

inline void check_capacity(int n) {
  if (n < 1) throw ValidationError("register size must be positive");
  if (n > kMaxQubits)
    throw CapacityError("register of " + std::to_string(n) + " qubits exceeds capacity " +
                        std::to_string(kMaxQubits));
}

// Qubit 0 is the most significant bit of a basis index and the leftmost
// character of a bitstring.
inline std::uint64_t qubit_bit(int q, int n) { return std::uint64_t{1} << (n - 1 - q); }

inline std::string bitstring(std::uint64_t index, int n) {
  std::string s(n, '0');
  for (int q = 0; q < n; ++q)
    if (index & qubit_bit(q, n)) s[q] = '1';
  return s;
}

// ---------------------------------------------------------------------------
// Pauli algebra

struct PauliTerm {
  cplx coeff{1.0, 0.0};
  std::map<int, char> factors;  // qubit -> 'X' | 'Y' | 'Z'

  PauliTerm() = default;
  PauliTerm(cplx c, std::map<int, char> f) : coeff(c), factors(std::move(f)) {
    for (auto& [q, a] : factors) {
      if (q < 0) throw ValidationError("negative qubit index");
      if (a != 'X' && a != 'Y' && a != 'Z') throw ValidationError("Pauli axis must be X, Y or Z");
    }
  }

  int weight() const { return static_cast<int>(factors.size()); }
  int max_qubit() const { return factors.empty() ? -1 : factors.rbegin()->first; }

  std::string label() const {
    std::string s;
    for (auto& [q, a] : factors) s += std::string(1, a) + std::to_string(q);
    return s.empty() ? "I" : s;
  }

  std::uint64_t xmask(int n) const {
    std::uint64_t m = 0;
    for (auto& [q, a] : factors)
      if (a != 'Z') m |= qubit_bit(q, n);
    return m;
  }
  std::uint64_t zmask(int n) const {
    std::uint64_t m = 0;
    for (auto& [q, a] : factors)
      if (a != 'X') m |= qubit_bit(q, n);
    return m;
  }
  int num_y() const {
    int k = 0;
    for (auto& [q, a] : factors) k += (a == 'Y');
    return k;
  }
};

namespace detail {

inline std::pair<cplx, char> pauli_mul(char a, char b) {
  if (a == 'I') return {1.0, b};
  if (b == 'I') return {1.0, a};
  if (a == b) return {1.0, 'I'};
  const cplx i{0.0, 1.0};
  if (a == 'X' && b == 'Y') return {i, 'Z'};
  if (a == 'Y' && b == 'Z') return {i, 'X'};
  if (a == 'Z' && b == 'X') return {i, 'Y'};
  if (a == 'Y' && b == 'X') return {-i, 'Z'};
  if (a == 'Z' && b == 'Y') return {-i, 'X'};
  return {-i, 'Y'};  // X * Z
}

inline cplx i_pow(int k) {
  switch (((k % 4) + 4) % 4) {
    case 0: return {1, 0};
    case 1: return {0, 1};
    case 2: return {-1, 0};
    default: return {0, -1};
  }
}

}  // namespace detail

inline PauliTerm operator*(const PauliTerm& p, const PauliTerm& q) {
  PauliTerm r;
  r.coeff = p.coeff * q.coeff;
  r.factors = p.factors;
  for (auto& [k, b] : q.factors) {
    auto it = r.factors.find(k);
    char a = it == r.factors.end() ? 'I' : it->second;
    auto [ph, c] = detail::pauli_mul(a, b);
    r.coeff *= ph;
    if (c == 'I')
      r.factors.erase(k);
    else
      r.factors[k] = c;
  }
  return r;
}

struct PauliSum {
  std::vector<PauliTerm> terms;

  PauliSum() = default;
  explicit PauliSum(std::vector<PauliTerm> t) : terms(std::move(t)) {}

  PauliSum& add(cplx c, std::map<int, char> f) {
    terms.emplace_back(c, std::move(f));
    return *this;
  }
  PauliSum& add(const PauliTerm& t) {
    terms.push_back(t);
    return *this;
  }

  int max_qubit() const {
    int m = -1;
    for (auto& t : terms) m = std::max(m, t.max_qubit());
    return m;
  }

  // Pauli strings are self-adjoint, so the sum is Hermitian once like terms
  // are combined and every coefficient is real.
  bool is_hermitian(double tol = 1e-12) const {
    for (auto& t : simplified().terms)
      if (std::abs(t.coeff.imag()) > tol) return false;
    return true;
  }

  void hermitian_check(double tol = 1e-12) const {
    if (!is_hermitian(tol)) throw ValidationError("operator is not Hermitian");
  }

  PauliSum simplified(double tol = 0.0) const {
    std::map<std::map<int, char>, cplx> acc;
    std::vector<std::map<int, char>> order;
    for (auto& t : terms) {
      auto [it, inserted] = acc.emplace(t.factors, cplx{0.0, 0.0});
      if (inserted) order.push_back(t.factors);
      it->second += t.coeff;
    }
    PauliSum out;
    for (auto& f : order) {
      cplx c = acc[f];
      if (std::abs(c) > tol) out.terms.emplace_back(c, f);
    }
    return out;
  }
};

inline PauliSum operator*(const PauliSum& a, const PauliSum& b) {
  PauliSum r;
  for (auto& s : a.terms)
    for (auto& t : b.terms) r.terms.push_back(s * t);
  return r;
}

inline PauliSum operator+(PauliSum a, const PauliSum& b) {
  a.terms.insert(a.terms.end(), b.terms.begin(), b.terms.end());
  return a;
}

inline PauliSum operator*(cplx c, PauliSum a) {
  for (auto& t : a.terms) t.coeff *= c;
  return a;
}

inline void check_register(const PauliSum& p, int n) {
  check_capacity(n);
  if (p.max_qubit() >= n) throw ValidationError("Pauli index out of range for register");
}

inline Mat pauli_to_dense(const PauliSum& p, int n) {
  check_register(p, n);
  const std::uint64_t dim = std::uint64_t{1} << n;
  Mat m = Mat::Zero(dim, dim);
  for (auto& t : p.terms) {
    const std::uint64_t xm = t.xmask(n), zm = t.zmask(n);
    const cplx base = t.coeff * detail::i_pow(t.num_y());
    for (std::uint64_t b = 0; b < dim; ++b) {
      const double s = (std::popcount(b & zm) & 1) ? -1.0 : 1.0;
      m(b ^ xm, b) += base * s;
    }
  }
  return m;
}

inline Mat pauli_to_dense(const PauliTerm& t, int n) { return pauli_to_dense(PauliSum({t}), n); }

// Matrix-free y = H x.
inline Vec apply_pauli_sum(const PauliSum& p, int n, const Vec& x) {
  const std::uint64_t dim = std::uint64_t{1} << n;
  Vec y = Vec::Zero(dim);
  for (auto& t : p.terms) {
    const std::uint64_t xm = t.xmask(n), zm = t.zmask(n);
    const cplx base = t.coeff * detail::i_pow(t.num_y());
    for (std::uint64_t b = 0; b < dim; ++b) {
      const double s = (std::popcount(b & zm) & 1) ? -1.0 : 1.0;
      y(b ^ xm) += base * s * x(b);
    }
  }
  return y;
}

inline Mat kron(const Mat& a, const Mat& b) {
  Mat r(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j) r.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return r;
}

inline bool is_unitary(const Mat& u, double tol = 1e-10) {
  return (u.adjoint() * u - Mat::Identity(u.rows(), u.cols())).cwiseAbs().maxCoeff() < tol;
}

// ---------------------------------------------------------------------------
// States

class QuantumState {
 public:
  static QuantumState basis(int n, std::uint64_t index = 0) {
    check_capacity(n);
    Vec v = Vec::Zero(std::int64_t{1} << n);
    v(index) = 1.0;
    return QuantumState(n, std::move(v));
  }

  QuantumState(int n, Vec v) : n_(n), vec_(std::move(v)) {
    check_capacity(n);
    if (vec_.size() != (std::int64_t{1} << n)) throw ValidationError("statevector size mismatch");
  }
  QuantumState(int n, Mat rho) : n_(n), rho_(std::move(rho)), mixed_(true) {
    check_capacity(n);
    if (rho_.rows() != (std::int64_t{1} << n) || rho_.cols() != rho_.rows())
      throw ValidationError("density matrix size mismatch");
  }

  int num_qubits() const { return n_; }
  std::int64_t dim() const { return std::int64_t{1} << n_; }
  bool is_mixed() const { return mixed_; }
  const Vec& vector() const {
    if (mixed_) throw ValidationError("state is a density matrix");
    return vec_;
  }
  Vec& vector() {
    if (mixed_) throw ValidationError("state is a density matrix");
    return vec_;
  }
  const Mat& density() const {
    if (!mixed_) throw ValidationError("state is a statevector");
    return rho_;
  }
  Mat& density() {
    if (!mixed_) throw ValidationError("state is a statevector");
    return rho_;
  }

  QuantumState to_density() const {
    if (mixed_) return *this;
    return QuantumState(n_, Mat(vec_ * vec_.adjoint()));
  }

  RVec probabilities() const {
    if (mixed_) return rho_.diagonal().real();
    return vec_.cwiseAbs2();
  }

  void validate(double tol = 1e-10) const {
    if (!mixed_) {
      if (std::abs(vec_.norm() - 1.0) > tol) throw ValidationError("statevector is not normalized");
      return;
    }
    if (std::abs(rho_.trace() - cplx{1.0, 0.0}) > tol) throw ValidationError("trace is not 1");
    if ((rho_ - rho_.adjoint()).cwiseAbs().maxCoeff() > tol)
      throw ValidationError("density matrix is not Hermitian");
    Eigen::SelfAdjointEigenSolver<Mat> es(rho_, Eigen::EigenvaluesOnly);
    if (es.eigenvalues().minCoeff() < -1e-9) throw ValidationError("density matrix is not PSD");
  }

  QuantumState& apply_operator(const Mat& u) {
    if (mixed_)
      rho_ = u * rho_ * u.adjoint();
    else
      vec_ = u * vec_;
    return *this;
  }

 private:
  int n_ = 0;
  Vec vec_;
  Mat rho_;
  bool mixed_ = false;
};

inline double state_fidelity(const QuantumState& a, const QuantumState& b) {
  if (a.num_qubits() != b.num_qubits()) throw ValidationError("register size mismatch");
  if (!a.is_mixed() && !b.is_mixed()) return std::norm(a.vector().dot(b.vector()));
  if (!a.is_mixed()) return std::max(0.0, (a.vector().adjoint() * b.density() * a.vector())(0).real());
  if (!b.is_mixed()) return state_fidelity(b, a);
  Eigen::SelfAdjointEigenSolver<Mat> es(a.density());
  RVec ev = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  Mat sa = es.eigenvectors() * ev.asDiagonal() * es.eigenvectors().adjoint();
  Mat m = sa * b.density() * sa;
  Eigen::SelfAdjointEigenSolver<Mat> es2((m + m.adjoint()) / 2.0, Eigen::EigenvaluesOnly);
  double tr = es2.eigenvalues().cwiseMax(0.0).cwiseSqrt().sum();
  return std::min(1.0, tr * tr);
}

// ---------------------------------------------------------------------------
// Evolution

inline Mat hermitian_exp(const Mat& h, double dt) {
  Eigen::SelfAdjointEigenSolver<Mat> es(h);
  Vec ph(es.eigenvalues().size());
  for (Eigen::Index k = 0; k < ph.size(); ++k) ph(k) = std::exp(cplx{0.0, -es.eigenvalues()(k) * dt});
  return es.eigenvectors() * ph.asDiagonal() * es.eigenvectors().adjoint();
}

inline Mat evolution_operator(const PauliSum& h, double dt, int n) {
  h.hermitian_check();
  return hermitian_exp(pauli_to_dense(h, n), dt);
}

inline QuantumState exact_evolve(const PauliSum& h, double dt, QuantumState state) {
  if (!std::isfinite(dt)) throw ValidationError("dt must be finite");
  state.apply_operator(evolution_operator(h, dt, state.num_qubits()));
  return state;
}

// Matrix-free Taylor propagation for registers where repeated dense
// diagonalization is too slow. Substeps keep ||H|| dt below 1/2.
inline Vec taylor_evolve(const PauliSum& h, double dt, int n, Vec psi, double tol = 1e-14) {
  double bound = 0.0;
  for (auto& t : h.terms) bound += std::abs(t.coeff);
  const int sub = std::max(1, static_cast<int>(std::ceil(std::abs(dt) * bound / 0.5)));
  const double h_dt = dt / sub;
  const cplx f{0.0, -h_dt};
  for (int s = 0; s < sub; ++s) {
    Vec term = psi, acc = psi;
    for (int k = 1; k < 60; ++k) {
      term = apply_pauli_sum(h, n, term) * (f / static_cast<double>(k));
      acc += term;
      if (term.norm() < tol) break;
    }
    psi = std::move(acc);
  }
  return psi;
}

// ---------------------------------------------------------------------------
// Sampling

inline double uniform01(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

inline std::vector<int> sample_indices(const RVec& probs, int shots, std::uint64_t seed) {
  if (shots <= 0) throw ValidationError("shots must be positive");
  std::vector<double> cdf(probs.size());
  double acc = 0.0;
  for (Eigen::Index k = 0; k < probs.size(); ++k) {
    acc += std::max(0.0, probs(k));
    cdf[k] = acc;
  }
  std::mt19937_64 rng(seed);
  std::vector<int> counts(probs.size(), 0);
  for (int s = 0; s < shots; ++s) {
    double u = uniform01(rng) * acc;
    auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
    auto k = std::min<std::ptrdiff_t>(it - cdf.begin(), probs.size() - 1);
    ++counts[k];
  }
  return counts;
}

inline std::map<std::string, int> sample_counts(const QuantumState& state, int shots, std::uint64_t seed) {
  auto counts = sample_indices(state.probabilities(), shots, seed);
  std::map<std::string, int> out;
  for (std::size_t k = 0; k < counts.size(); ++k)
    if (counts[k]) out[bitstring(k, state.num_qubits())] = counts[k];
  return out;
}

// splitmix64 finalizer, used to derive independent per-point seeds.
inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t index) {
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (index + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

}  // namespace mbsim

#endif  // MBSIM_SIMCORE_HPP_
