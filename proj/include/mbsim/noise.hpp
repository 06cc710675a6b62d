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

#ifndef MBSIM_NOISE_HPP_
#define MBSIM_NOISE_HPP_

#include <cmath>
#include <map>
#include <string>
#include <vector>

#include "mbsim/circuits.hpp"

namespace mbsim {

inline void check_probability(double p, const char* what) {
  if (!(p >= 0.0 && p <= 0.5)) throw ValidationError(std::string(what) + " must lie in [0, 0.5]");
}

struct NoiseModel {
  double eps_1q = 0.0;
  double eps_cnot = 0.0;
  double delay_rate = 0.0;  // bit-flip probability per ns of inserted delay
  double readout_p10 = 0.0;  // p(read 1 | prepared 0)
  double readout_p01 = 0.0;  // p(read 0 | prepared 1)
  // Charge two-qubit gates between non-neighbouring qubits of a line as the
  // four nearest-neighbour CNOTs that build them.
  bool linear_connectivity = false;

  static NoiseModel none() { return {}; }

  void validate() const {
    check_probability(eps_1q, "eps_1q");
    check_probability(eps_cnot, "eps_cnot");
    check_probability(readout_p10, "readout_p10");
    check_probability(readout_p01, "readout_p01");
    if (!(delay_rate >= 0.0) || !std::isfinite(delay_rate)) throw ValidationError("delay_rate must be >= 0");
  }

  bool is_zero() const {
    return eps_1q == 0 && eps_cnot == 0 && delay_rate == 0 && readout_p10 == 0 && readout_p01 == 0;
  }
  bool has_readout_error() const { return readout_p10 != 0 || readout_p01 != 0; }
};

// Superoperator of (1-eps) I + eps X acting on rho in column-major vec form.
inline Mat bitflip_superop(double eps, int arity) {
  check_probability(eps, "eps");
  if (arity != 1 && arity != 2) throw ValidationError("arity must be 1 or 2");
  Mat x = pauli_matrix('X');
  Mat one = (1 - eps) * Mat::Identity(4, 4) + eps * kron(x.conjugate(), x);
  if (arity == 1) return one;
  // Error2 = Error1 (x) Error1 in the vec(rho) ordering of a two-qubit rho.
  Mat x0 = kron(x, Mat::Identity(2, 2)), x1 = kron(Mat::Identity(2, 2), x);
  Mat s0 = (1 - eps) * Mat::Identity(16, 16) + eps * kron(x0.conjugate(), x0);
  Mat s1 = (1 - eps) * Mat::Identity(16, 16) + eps * kron(x1.conjugate(), x1);
  return s0 * s1;
}

inline void bitflip_inplace(Mat& rho, int n, int q, double eps) {
  if (eps == 0.0) return;
  const std::int64_t b = static_cast<std::int64_t>(qubit_bit(q, n));
  const std::int64_t dim = rho.rows();
  Mat flipped(dim, dim);
  for (std::int64_t r = 0; r < dim; ++r)
    for (std::int64_t c = 0; c < dim; ++c) flipped(r, c) = rho(r ^ b, c ^ b);
  rho = (1 - eps) * rho + eps * flipped;
}

inline QuantumState bitflip_channel(QuantumState s, int q, double eps) {
  check_probability(eps, "eps");
  s = s.to_density();
  bitflip_inplace(s.density(), s.num_qubits(), q, eps);
  return s;
}

// Error probability of a ZX(phi) rotation, linear in the rotation angle.
inline double epsilon_for_angle(double phi, double eps_cnot) {
  if (!(phi >= 0.0 && phi <= kPi)) throw ValidationError("phi must lie in [0, pi]");
  return phi / kPi * eps_cnot;
}

// Rotation angle folded into [0, pi].
inline double folded_angle(double theta) { return std::abs(std::remainder(theta, 2 * kPi)); }

inline double gate_error(const Gate& g, const NoiseModel& m) {
  if (g.is_rotation()) return m.eps_1q;
  if (g.is_controlled_pauli()) return m.eps_cnot;
  if (g.kind == GateKind::ZX) return epsilon_for_angle(folded_angle(g.angle), m.eps_cnot);
  if (g.kind == GateKind::Delay) return std::min(0.5, m.delay_rate * g.angle);
  return 0.0;
}

// Channel after each gate.
inline QuantumState noisy_apply(QuantumState state, const Circuit& c, const NoiseModel& m) {
  m.validate();
  if (c.num_qubits != state.num_qubits()) throw ValidationError("register size mismatch");
  state = state.to_density();
  const int n = state.num_qubits();
  for (auto& g : c.gates) {
    apply_gate_inplace(state, g);
    const double e = gate_error(g, m);
    if (e == 0.0) continue;
    Mat& rho = state.density();
    if (g.arity() == 1) {
      bitflip_inplace(rho, n, g.q[0], e);
      continue;
    }
    int lo = std::min(g.q[0], g.q[1]), hi = std::max(g.q[0], g.q[1]);
    if (m.linear_connectivity && g.kind != GateKind::Delay && hi - lo > 1) {
      if (hi - lo != 2) throw NotSupportedError("routing model covers qubits at distance 2 only");
      const int mid = lo + 1;
      for (int rep = 0; rep < 2; ++rep) {
        bitflip_inplace(rho, n, lo, e), bitflip_inplace(rho, n, mid, e);
        bitflip_inplace(rho, n, mid, e), bitflip_inplace(rho, n, hi, e);
      }
      continue;
    }
    bitflip_inplace(rho, n, g.q[0], e);
    bitflip_inplace(rho, n, g.q[1], e);
  }
  return state;
}

// Appends a delay after every two-qubit gate.
inline Circuit with_delays(const Circuit& c, double ns) {
  if (ns <= 0) return c;
  Circuit r(c.num_qubits);
  for (auto& g : c.gates) {
    r.gates.push_back(g);
    if (g.is_two_qubit()) r.gates.push_back(Gate::delay(g.q[0], g.q[1], ns));
  }
  return r;
}

// ---------------------------------------------------------------------------
// Readout

struct ConfusionMatrix {
  Mat m;  // real, m(observed, prepared)

  void validate() const {
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      if (std::abs(m.col(c).sum() - cplx{1.0, 0.0}) > 1e-12) throw ValidationError("column does not sum to 1");
      for (Eigen::Index r = 0; r < m.rows(); ++r)
        if (m(r, c).real() < 0) throw ValidationError("negative confusion entry");
    }
  }
};

inline ConfusionMatrix build_confusion(const NoiseModel& model, int n) {
  model.validate();
  check_capacity(n);
  Mat one(2, 2);
  one << 1 - model.readout_p10, model.readout_p01, model.readout_p10, 1 - model.readout_p01;
  Mat m = Mat::Identity(1, 1);
  for (int q = 0; q < n; ++q) m = kron(m, one);
  return {m};
}

inline RVec apply_confusion(const ConfusionMatrix& cm, const RVec& p) { return cm.m.real() * p; }

inline RVec mitigate_readout(const RVec& freqs, const ConfusionMatrix& cm) {
  Eigen::MatrixXd m = cm.m.real();
  Eigen::FullPivLU<Eigen::MatrixXd> lu(m);
  if (!lu.isInvertible()) throw ValidationError("confusion matrix is singular");
  RVec p = lu.solve(freqs);
  bool clipped = false;
  for (Eigen::Index k = 0; k < p.size(); ++k)
    if (p(k) < 0) p(k) = 0, clipped = true;
  if (clipped) {
    const double s = p.sum();
    if (s > 0) p /= s;
  }
  return p;
}

inline RVec mitigate_readout(const std::map<std::string, int>& counts, int n, const ConfusionMatrix& cm) {
  RVec f = RVec::Zero(std::int64_t{1} << n);
  double total = 0;
  for (auto& [s, k] : counts) {
    std::uint64_t idx = 0;
    for (int q = 0; q < n; ++q)
      if (s.at(q) == '1') idx |= qubit_bit(q, n);
    f(idx) += k;
    total += k;
  }
  if (total <= 0) throw ValidationError("empty counts");
  return mitigate_readout(RVec(f / total), cm);
}

}  // namespace mbsim

#endif  // MBSIM_NOISE_HPP_
