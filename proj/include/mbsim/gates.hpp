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

#ifndef MBSIM_GATES_HPP_
#define MBSIM_GATES_HPP_

#include <array>
#include <string>

#include "mbsim/simcore.hpp"

namespace mbsim {

// CX, CY and CZ are the controlled-Pauli family; qubits = {control, target}.
// ZX(theta) = exp(-i theta Z_q0 X_q1 / 2). Delay is an identity placeholder
// whose angle field carries a duration in ns for the noise layer.
enum class GateKind { Rx, Ry, Rz, CX, CY, CZ, ZX, Delay };

inline const char* gate_name(GateKind k) {
  switch (k) {
    case GateKind::Rx: return "rx";
    case GateKind::Ry: return "ry";
    case GateKind::Rz: return "rz";
    case GateKind::CX: return "cx";
    case GateKind::CY: return "cy";
    case GateKind::CZ: return "cz";
    case GateKind::ZX: return "zx";
    case GateKind::Delay: return "delay";
  }
  return "?";
}

inline GateKind gate_kind_from_name(const std::string& s) {
  for (auto k : {GateKind::Rx, GateKind::Ry, GateKind::Rz, GateKind::CX, GateKind::CY, GateKind::CZ,
                 GateKind::ZX, GateKind::Delay})
    if (s == gate_name(k)) return k;
  if (s == "cnot") return GateKind::CX;
  throw ValidationError("unknown gate kind '" + s + "'");
}

struct Gate {
  GateKind kind = GateKind::Rz;
  std::array<int, 2> q{0, -1};
  double angle = 0.0;

  static Gate rx(int a, double t) { return {GateKind::Rx, {a, -1}, t}; }
  static Gate ry(int a, double t) { return {GateKind::Ry, {a, -1}, t}; }
  static Gate rz(int a, double t) { return {GateKind::Rz, {a, -1}, t}; }
  static Gate rot(char axis, int a, double t) {
    switch (axis) {
      case 'X': return rx(a, t);
      case 'Y': return ry(a, t);
      case 'Z': return rz(a, t);
    }
    throw ValidationError("bad rotation axis");
  }
  static Gate cx(int c, int t) { return {GateKind::CX, {c, t}, 0.0}; }
  static Gate cy(int c, int t) { return {GateKind::CY, {c, t}, 0.0}; }
  static Gate cz(int c, int t) { return {GateKind::CZ, {c, t}, 0.0}; }
  static Gate cpauli(char axis, int c, int t) {
    switch (axis) {
      case 'X': return cx(c, t);
      case 'Y': return cy(c, t);
      case 'Z': return cz(c, t);
    }
    throw ValidationError("bad controlled-Pauli axis");
  }
  static Gate zx(int c, int t, double theta) { return {GateKind::ZX, {c, t}, theta}; }
  static Gate delay(int a, int b, double ns) { return {GateKind::Delay, {a, b}, ns}; }

  int arity() const { return q[1] < 0 ? 1 : 2; }
  bool is_rotation() const {
    return kind == GateKind::Rx || kind == GateKind::Ry || kind == GateKind::Rz;
  }
  bool is_controlled_pauli() const {
    return kind == GateKind::CX || kind == GateKind::CY || kind == GateKind::CZ;
  }
  bool is_two_qubit() const { return arity() == 2 && kind != GateKind::Delay; }
  bool has_angle() const { return is_rotation() || kind == GateKind::ZX || kind == GateKind::Delay; }
  char axis() const {
    switch (kind) {
      case GateKind::Rx: case GateKind::CX: return 'X';
      case GateKind::Ry: case GateKind::CY: return 'Y';
      case GateKind::Rz: case GateKind::CZ: return 'Z';
      default: return '?';
    }
  }

  Gate inverse() const {
    Gate g = *this;
    if (is_rotation() || kind == GateKind::ZX) g.angle = -angle;
    return g;
  }
};

inline Mat pauli_matrix(char a) {
  Mat m(2, 2);
  const cplx i{0, 1};
  switch (a) {
    case 'X': m << 0, 1, 1, 0; break;
    case 'Y': m << 0, -i, i, 0; break;
    case 'Z': m << 1, 0, 0, -1; break;
    default: m = Mat::Identity(2, 2);
  }
  return m;
}

// Local matrix; for two-qubit gates the first listed qubit is the more
// significant factor.
inline Mat gate_matrix(const Gate& g) {
  const cplx i{0, 1};
  if (g.is_rotation()) {
    return std::cos(g.angle / 2) * Mat::Identity(2, 2) - i * std::sin(g.angle / 2) * pauli_matrix(g.axis());
  }
  if (g.is_controlled_pauli()) {
    Mat m = Mat::Identity(4, 4);
    m.block(2, 2, 2, 2) = pauli_matrix(g.axis());
    return m;
  }
  if (g.kind == GateKind::ZX) {
    Mat zx = kron(pauli_matrix('Z'), pauli_matrix('X'));
    return std::cos(g.angle / 2) * Mat::Identity(4, 4) - i * std::sin(g.angle / 2) * zx;
  }
  return Mat::Identity(g.arity() == 1 ? 2 : 4, g.arity() == 1 ? 2 : 4);
}

inline void check_gate(const Gate& g, int n) {
  if (g.q[0] < 0 || g.q[0] >= n) throw ValidationError("gate qubit out of range");
  if (g.arity() == 2) {
    if (g.q[1] >= n) throw ValidationError("gate qubit out of range");
    if (g.q[1] == g.q[0]) throw ValidationError("two-qubit gate on a single qubit");
  }
}

namespace detail {

// Apply a local 2x2 or 4x4 matrix to every column of a 2^n x m block.
inline void apply_local(Mat& cols, int n, const Mat& u, int q0, int q1) {
  const std::int64_t dim = cols.rows();
  if (q1 < 0) {
    const std::uint64_t b0 = qubit_bit(q0, n);
    for (std::int64_t c = 0; c < cols.cols(); ++c)
      for (std::int64_t k = 0; k < dim; ++k) {
        if (k & b0) continue;
        cplx a0 = cols(k, c), a1 = cols(k | b0, c);
        cols(k, c) = u(0, 0) * a0 + u(0, 1) * a1;
        cols(k | b0, c) = u(1, 0) * a0 + u(1, 1) * a1;
      }
    return;
  }
  const std::uint64_t b0 = qubit_bit(q0, n), b1 = qubit_bit(q1, n);
  for (std::int64_t c = 0; c < cols.cols(); ++c)
    for (std::int64_t k = 0; k < dim; ++k) {
      if ((k & b0) || (k & b1)) continue;
      const std::int64_t idx[4] = {k, static_cast<std::int64_t>(k | b1), static_cast<std::int64_t>(k | b0),
                                   static_cast<std::int64_t>(k | b0 | b1)};
      cplx a[4];
      for (int r = 0; r < 4; ++r) a[r] = cols(idx[r], c);
      for (int r = 0; r < 4; ++r) {
        cplx s = 0;
        for (int t = 0; t < 4; ++t) s += u(r, t) * a[t];
        cols(idx[r], c) = s;
      }
    }
}

}  // namespace detail

inline void apply_local_operator(QuantumState& s, const Mat& u, int q0, int q1 = -1) {
  const int n = s.num_qubits();
  if (!s.is_mixed()) {
    Mat v = s.vector();
    detail::apply_local(v, n, u, q0, q1);
    s.vector() = v.col(0);
    return;
  }
  Mat& rho = s.density();
  detail::apply_local(rho, n, u, q0, q1);
  Mat t = rho.adjoint();
  detail::apply_local(t, n, u, q0, q1);
  rho = t.adjoint();
}

inline QuantumState& apply_gate_inplace(QuantumState& s, const Gate& g) {
  check_gate(g, s.num_qubits());
  if (g.kind == GateKind::Delay) return s;
  apply_local_operator(s, gate_matrix(g), g.q[0], g.arity() == 2 ? g.q[1] : -1);
  return s;
}

inline QuantumState apply_gate(QuantumState s, const Gate& g) {
  apply_gate_inplace(s, g);
  return s;
}

// Full-register matrix of a gate, used by oracle comparisons.
inline Mat gate_unitary(const Gate& g, int n) {
  check_capacity(n);
  check_gate(g, n);
  Mat u = Mat::Identity(std::int64_t{1} << n, std::int64_t{1} << n);
  if (g.kind != GateKind::Delay) detail::apply_local(u, n, gate_matrix(g), g.q[0], g.arity() == 2 ? g.q[1] : -1);
  return u;
}

}  // namespace mbsim

#endif  // MBSIM_GATES_HPP_
