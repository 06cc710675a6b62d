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

#ifndef MBSIM_CIRCUITS_HPP_
#define MBSIM_CIRCUITS_HPP_

#include <cstdio>
#include <sstream>
#include <string>
#include <vector>

#include "mbsim/gates.hpp"
#include "mbsim/models.hpp"

namespace mbsim {

struct Circuit {
  int num_qubits = 3;
  std::vector<Gate> gates;

  Circuit() = default;
  explicit Circuit(int n, std::vector<Gate> g = {}) : num_qubits(n), gates(std::move(g)) {}

  Circuit& add(const Gate& g) {
    check_gate(g, num_qubits);
    gates.push_back(g);
    return *this;
  }
  Circuit& append(const Circuit& c) {
    if (c.num_qubits != num_qubits) throw ValidationError("register size mismatch");
    gates.insert(gates.end(), c.gates.begin(), c.gates.end());
    return *this;
  }

  Circuit inverse() const {
    Circuit r(num_qubits);
    r.gates.reserve(gates.size());
    for (auto it = gates.rbegin(); it != gates.rend(); ++it) r.gates.push_back(it->inverse());
    return r;
  }

  std::size_t size() const { return gates.size(); }

  int two_qubit_count() const {
    int k = 0;
    for (auto& g : gates) k += g.is_two_qubit();
    return k;
  }
  int count(GateKind kind) const {
    int k = 0;
    for (auto& g : gates) k += g.kind == kind;
    return k;
  }
  int single_qubit_count() const {
    int k = 0;
    for (auto& g : gates) k += g.is_rotation();
    return k;
  }

  std::string to_text() const {
    std::ostringstream os;
    os << "qubits " << num_qubits << "\n";
    char buf[64];
    for (auto& g : gates) {
      os << gate_name(g.kind) << ' ' << g.q[0];
      if (g.arity() == 2) os << ' ' << g.q[1];
      if (g.has_angle()) {
        std::snprintf(buf, sizeof buf, "%.17g", g.angle);
        os << ' ' << buf;
      }
      os << "\n";
    }
    return os.str();
  }

  static Circuit from_text(const std::string& text) {
    std::istringstream is(text);
    std::string line, word;
    Circuit c;
    bool header = false;
    while (std::getline(is, line)) {
      if (line.empty() || line[0] == '#') continue;
      std::istringstream ls(line);
      ls >> word;
      if (!header) {
        if (word != "qubits" || !(ls >> c.num_qubits)) throw ValidationError("missing 'qubits N' header");
        check_capacity(c.num_qubits);
        header = true;
        continue;
      }
      Gate g;
      g.kind = gate_kind_from_name(word);
      const bool two = g.is_controlled_pauli() || g.kind == GateKind::ZX || g.kind == GateKind::Delay;
      if (!(ls >> g.q[0])) throw ValidationError("bad gate line: " + line);
      if (two && !(ls >> g.q[1])) throw ValidationError("bad gate line: " + line);
      if (g.has_angle() && !(ls >> g.angle)) throw ValidationError("bad gate line: " + line);
      c.add(g);
    }
    if (!header) throw ValidationError("empty circuit text");
    return c;
  }
};

inline QuantumState& apply_circuit_inplace(QuantumState& s, const Circuit& c) {
  if (c.num_qubits != s.num_qubits()) throw ValidationError("register size mismatch");
  for (auto& g : c.gates) apply_gate_inplace(s, g);
  return s;
}

inline QuantumState apply_circuit(QuantumState s, const Circuit& c) { return apply_circuit_inplace(s, c); }

inline Mat circuit_to_unitary(const Circuit& c) {
  check_capacity(c.num_qubits);
  const std::int64_t dim = std::int64_t{1} << c.num_qubits;
  Mat u = Mat::Identity(dim, dim);
  for (auto& g : c.gates) {
    check_gate(g, c.num_qubits);
    if (g.kind == GateKind::Delay) continue;
    detail::apply_local(u, c.num_qubits, gate_matrix(g), g.q[0], g.arity() == 2 ? g.q[1] : -1);
  }
  return u;
}

inline QuantumState prepare(const Circuit& c) { return apply_circuit(QuantumState::basis(c.num_qubits), c); }

// ---------------------------------------------------------------------------
// Initializers

inline void check_sign(int sign) {
  if (sign != 1 && sign != -1) throw ValidationError("sign must be +1 or -1");
}

inline Circuit init_pm(int sign) {
  check_sign(sign);
  Circuit c(3);
  c.add(Gate::rx(0, kPi / 2)).add(Gate::cx(0, 1)).add(Gate::ry(0, sign * kPi / 2)).add(Gate::ry(2, kPi));
  return c;
}

// Frame change between the qubit and rotated Hamiltonians.
inline Circuit frame_rotation() {
  Circuit c(3);
  c.add(Gate::cy(0, 1)).add(Gate::ry(0, -kPi / 2)).add(Gate::cy(0, 1)).add(Gate::rz(1, kPi));
  return c;
}

inline Circuit rotated_init(int sign) { return init_pm(sign).append(frame_rotation()); }

// Arm 2 and the auxiliary qubit are prepared identically for both signs: the
// auxiliary qubit is flipped and arm 2 is put in an alternating cat state. Arms
// 0 and 1 are alternating X-basis product states whose pattern sets the sign.
inline Circuit chain_init(int sign, const ChainModelParams& c) {
  check_sign(sign);
  c.validate();
  if (c.arm_length != 3) throw NotSupportedError("chain initializer is defined for arm length 3 only");
  Circuit k(c.register_size());
  k.add(Gate::rx(ChainModelParams::aux(), kPi));
  k.add(Gate::ry(c.qubit(2, 0), kPi / 2));
  k.add(Gate::cx(c.qubit(2, 0), c.qubit(2, 1)));
  k.add(Gate::cx(c.qubit(2, 1), c.qubit(2, 2)));
  k.add(Gate::rx(c.qubit(2, 1), kPi));
  for (int i = 0; i < 3; ++i) k.add(Gate::ry(c.qubit(2, i), kPi / 2));
  for (int a = 0; a < 2; ++a)
    for (int i = 0; i < 3; ++i) k.add(Gate::ry(c.qubit(a, i), (i % 2 ? -1 : 1) * sign * kPi / 2));
  return k;
}

// ---------------------------------------------------------------------------
// Pauli exponentials exp(-i theta P / 2)

// Controlled-Pauli conjugation around one rotation. The pivot carries an X or Y
// factor and controls a Pauli on every other qubit of the string.
inline Circuit pauli_exp_basis(const PauliTerm& t, double theta, int n) {
  Circuit c(n);
  if (t.factors.empty()) return c;
  if (t.weight() == 1) {
    auto [q, a] = *t.factors.begin();
    c.add(Gate::rot(a, q, theta));
    return c;
  }
  int pivot = -1, best = -1;
  for (auto& [p, a] : t.factors) {
    if (a == 'Z') continue;
    int score = 0;
    for (auto& [q, b] : t.factors) score += (q != p && b == 'X');
    if (score >= best) best = score, pivot = p;
  }
  std::vector<Gate> conj;
  if (pivot < 0) {
    pivot = t.factors.rbegin()->first;
    for (auto& [q, b] : t.factors)
      if (q != pivot) conj.push_back(Gate::cx(q, pivot));
  } else {
    for (auto& [q, b] : t.factors)
      if (q != pivot) conj.push_back(Gate::cpauli(b, pivot, q));
  }
  for (auto& g : conj) c.add(g);
  c.add(Gate::rot(t.factors.at(pivot), pivot, theta));
  for (auto it = conj.rbegin(); it != conj.rend(); ++it) c.add(*it);
  return c;
}

namespace detail {

// Single-qubit Clifford V (as a gate list in time order) with V P V^dag = Q.
inline std::vector<Gate> clifford_map(char from, char to, int q) {
  if (from == to) return {};
  static const std::pair<char, double> cand[] = {
      {'Y', kPi / 2}, {'Y', -kPi / 2}, {'X', kPi / 2}, {'X', -kPi / 2}, {'Z', kPi / 2}, {'Z', -kPi / 2}};
  for (auto [ax, ang] : cand) {
    Mat v = gate_matrix(Gate::rot(ax, 0, ang));
    if ((v * pauli_matrix(from) * v.adjoint() - pauli_matrix(to)).cwiseAbs().maxCoeff() < 1e-12)
      return {Gate::rot(ax, q, ang)};
  }
  throw ValidationError("no single-rotation Clifford map");
}

}  // namespace detail

// Basis changes around one ZX(theta): exp(-i theta a_i b_j / 2) =
// (V_i W_j) ZX_ij(theta) (V_i W_j)^dag with V Z V^dag = a and W X W^dag = b.
inline Circuit pauli_exp_scaled(const PauliTerm& t, double theta, int n) {
  if (t.weight() > 2) throw ValidationError("scaled lowering needs terms of weight <= 2; rotate the basis first");
  Circuit c(n);
  if (t.factors.empty()) return c;
  if (t.weight() == 1) {
    auto [q, a] = *t.factors.begin();
    c.add(Gate::rot(a, q, theta));
    return c;
  }
  auto it = t.factors.begin();
  int i = it->first, j = std::next(it)->first;
  char a = it->second, b = std::next(it)->second;
  if (b == 'Z') std::swap(i, j), std::swap(a, b);
  auto v = detail::clifford_map('Z', a, i);
  auto w = detail::clifford_map('X', b, j);
  for (auto& g : v) c.add(g.inverse());
  for (auto& g : w) c.add(g.inverse());
  c.add(Gate::zx(i, j, theta));
  for (auto& g : v) c.add(g);
  for (auto& g : w) c.add(g);
  return c;
}

// exp(-i c dt P) for a real-coefficient term; zero terms emit nothing.
inline double term_angle(const PauliTerm& t, double dt) { return 2.0 * t.coeff.real() * dt; }

// ---------------------------------------------------------------------------
// Trotter slices

enum class Flavor { Basis, Scaled };

inline const char* flavor_name(Flavor f) { return f == Flavor::Basis ? "basis" : "scaled"; }

inline Flavor flavor_from_name(const std::string& s) {
  if (s == "basis") return Flavor::Basis;
  if (s == "scaled") return Flavor::Scaled;
  throw ValidationError("unknown flavor '" + s + "'");
}

// Single-qubit terms for half a step on both sides of the multi-qubit terms,
// which run for a full step in order (or reversed order when `reverse`).
// Alternating the order between consecutive slices makes the product of two
// slices symmetric.
inline Circuit trotter_step_basis(const PauliSum& h, double dt, int n, bool reverse = false) {
  if (!(dt > 0)) throw ValidationError("dt must be positive");
  std::vector<PauliTerm> one, multi;
  for (auto& t : h.terms) {
    if (t.coeff == cplx{0.0, 0.0}) continue;
    (t.weight() == 1 ? one : multi).push_back(t);
  }
  if (reverse) std::reverse(multi.begin(), multi.end());
  Circuit c(n);
  for (auto& t : one) c.append(pauli_exp_basis(t, term_angle(t, dt / 2), n));
  for (auto& t : multi) c.append(pauli_exp_basis(t, term_angle(t, dt), n));
  for (auto& t : one) c.append(pauli_exp_basis(t, term_angle(t, dt / 2), n));
  return c;
}

// Symmetric (palindromic) ordering: every nonzero term for half a step, the
// last one for a full step, then the first ones again in reverse.
inline Circuit trotter_step_scaled(const PauliSum& hbar, double dt, int n) {
  if (!(dt > 0)) throw ValidationError("dt must be positive");
  std::vector<PauliTerm> ts;
  for (auto& t : hbar.terms) {
    if (t.weight() > 2) throw ValidationError("scaled lowering needs terms of weight <= 2; rotate the basis first");
    if (t.coeff != cplx{0.0, 0.0}) ts.push_back(t);
  }
  Circuit c(n);
  if (ts.empty()) return c;
  for (std::size_t k = 0; k + 1 < ts.size(); ++k) c.append(pauli_exp_scaled(ts[k], term_angle(ts[k], dt / 2), n));
  c.append(pauli_exp_scaled(ts.back(), term_angle(ts.back(), dt), n));
  for (std::size_t k = ts.size() - 1; k-- > 0;) c.append(pauli_exp_scaled(ts[k], term_angle(ts[k], dt / 2), n));
  return c;
}

// Merge same-axis rotations that are adjacent on a wire. Rotations summing to a
// multiple of 4 pi are dropped.
inline Circuit peephole_merge(const Circuit& in) {
  Circuit out(in.num_qubits);
  std::vector<int> last(in.num_qubits, -1);
  std::vector<char> dead;
  for (auto& g : in.gates) {
    if (g.is_rotation()) {
      int k = last[g.q[0]];
      if (k >= 0 && !dead[k] && out.gates[k].kind == g.kind) {
        double a = out.gates[k].angle + g.angle;
        out.gates[k].angle = a;
        if (std::abs(std::remainder(a, 4 * kPi)) < 1e-12) {
          dead[k] = 1;
          last[g.q[0]] = -1;
        }
        continue;
      }
    }
    out.gates.push_back(g);
    dead.push_back(0);
    const int idx = static_cast<int>(out.gates.size()) - 1;
    last[g.q[0]] = idx;
    if (g.arity() == 2) last[g.q[1]] = idx;
  }
  Circuit r(in.num_qubits);
  for (std::size_t k = 0; k < out.gates.size(); ++k)
    if (!dead[k]) r.gates.push_back(out.gates[k]);
  return r;
}

struct TrotterPlan {
  Flavor flavor = Flavor::Basis;
  int steps = 3;
  double dt = 1.1;
  double t0 = 0.0;

  double t1() const { return t0 + steps * dt; }
};

inline TrotterPlan make_plan(const TriJunctionParams& p, Flavor f, double t0, double t1) {
  p.validate();
  const double per = p.trotter_steps_per_swap / p.tau;
  const int steps = static_cast<int>(std::llround((t1 - t0) * per));
  if (steps < 1) throw ValidationError("empty Trotter interval");
  return {f, steps, (t1 - t0) / steps, t0};
}

// Hamiltonian sampled at each slice midpoint. The scaled flavor evolves the
// rotated Hamiltonian and therefore acts in the rotated frame.
inline Circuit trotter_circuit(const TriJunctionParams& p, const TrotterPlan& plan, bool merge = true) {
  const CouplingSchedule sched = CouplingSchedule::of(p);
  Circuit c(3);
  const long first = std::lround(plan.t0 / plan.dt);
  for (int k = 0; k < plan.steps; ++k) {
    const double t = plan.t0 + (k + 0.5) * plan.dt;
    const Couplings j = sched(t);
    if (plan.flavor == Flavor::Basis)
      c.append(trotter_step_basis(build_qubit_hamiltonian(p, j), plan.dt, 3, (first + k) % 2 != 0));
    else
      c.append(trotter_step_scaled(build_rotated_hamiltonian(p, j), plan.dt, 3));
  }
  return merge ? peephole_merge(c) : c;
}

inline Circuit braid_circuit(const TriJunctionParams& p, Flavor f, int step_begin = 0, int step_end = 6) {
  return trotter_circuit(p, make_plan(p, f, step_begin * p.tau, step_end * p.tau));
}

inline Circuit unwind_gates(int step) {
  Circuit c(3);
  switch (step) {
    case 1: c.add(Gate::ry(0, kPi / 2)).add(Gate::rx(1, kPi / 2)).add(Gate::ry(2, kPi / 2)); break;
    case 2: c.add(Gate::rx(0, kPi / 2)).add(Gate::ry(1, kPi / 2)).add(Gate::ry(2, kPi / 2)); break;
    case 3: c.add(Gate::ry(0, kPi / 2)); break;
    case 4: case 5: case 6:
      throw NotSupportedError("unwinding after steps 4-6 requires several CNOT gates and is not provided");
    default: throw ValidationError("step must be in 1..6");
  }
  return c;
}

// exp(-i theta Y_a X_b / 2) on a two-qubit register.
inline Circuit uyx_double_cnot(double theta) {
  return pauli_exp_basis(PauliTerm(1.0, {{0, 'Y'}, {1, 'X'}}), theta, 2);
}

inline Circuit uyx_scaled(double theta) {
  return pauli_exp_scaled(PauliTerm(1.0, {{0, 'Y'}, {1, 'X'}}), theta, 2);
}

inline Mat uyx_exact(double theta) {
  return hermitian_exp(pauli_to_dense(PauliTerm(1.0, {{0, 'Y'}, {1, 'X'}}), 2), theta / 2);
}

}  // namespace mbsim

#endif  // MBSIM_CIRCUITS_HPP_
