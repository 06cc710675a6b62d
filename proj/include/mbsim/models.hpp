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

#ifndef MBSIM_MODELS_HPP_
#define MBSIM_MODELS_HPP_

#include <array>
#include <cmath>

#include "mbsim/simcore.hpp"

namespace mbsim {

using Couplings = std::array<double, 3>;  // (J01, J12, J20)

struct TriJunctionParams {
  std::array<double, 3> alpha{0.2, 0.2, 0.2};
  double j_max = 1.0;
  double tau = 3.3;
  int trotter_steps_per_swap = 3;

  static TriJunctionParams uniform(double a, double tau = 3.3, int slices = 3) {
    TriJunctionParams p;
    p.alpha = {a, a, a};
    p.tau = tau;
    p.trotter_steps_per_swap = slices;
    return p;
  }

  // The literal protocol table values (alpha = 3 J_max).
  static TriJunctionParams table() { return uniform(3.0); }

  void validate() const {
    if (!(j_max > 0)) throw ValidationError("j_max must be positive");
    if (!(tau > 0)) throw ValidationError("tau must be positive");
    if (trotter_steps_per_swap < 1) throw ValidationError("trotter_steps_per_swap must be >= 1");
    for (double a : alpha)
      if (!std::isfinite(a)) throw ValidationError("alpha must be finite");
  }
};

// Six linear ramps over [0, 6 tau]. During step k the coupling k%3 falls from
// J_max to 0 while coupling (k+1)%3 rises from 0 to J_max.
struct CouplingSchedule {
  double j_max = 1.0;
  double tau = 3.3;
  int steps = 6;

  static CouplingSchedule of(const TriJunctionParams& p) { return {p.j_max, p.tau, 6}; }

  double duration() const { return steps * tau; }

  Couplings operator()(double t) const {
    const double T = duration();
    if (!(t >= -1e-12 * T && t <= T * (1 + 1e-12)))
      throw ValidationError("time outside protocol window");
    t = std::clamp(t, 0.0, T);
    int k = std::min(static_cast<int>(std::floor(t / tau)), steps - 1);
    const double s = std::clamp(t / tau - k, 0.0, 1.0);
    Couplings j{0.0, 0.0, 0.0};
    j[k % 3] = j_max * (1.0 - s);
    j[(k + 1) % 3] += j_max * s;
    return j;
  }
};

inline Couplings schedule_eval(const CouplingSchedule& s, double t) { return s(t); }

inline PauliSum build_qubit_hamiltonian(const TriJunctionParams& p, const Couplings& j) {
  p.validate();
  PauliSum h;
  for (int a = 0; a < 3; ++a) h.add(p.alpha[a], {{a, 'Z'}});
  h.add(j[0], {{0, 'Y'}, {1, 'X'}});
  h.add(j[1], {{1, 'Y'}, {2, 'X'}});
  h.add(j[2], {{0, 'Y'}, {1, 'Z'}, {2, 'X'}});
  return h;
}

// Jordan-Wigner Majoranas: gx[a] = (prod_{j<a} Z_j) X_a, gy[a] = -(prod_{j<a} Z_j) Y_a,
// so that i gx[a] gy[a] = Z_a.
struct Majoranas {
  std::array<Mat, 3> gx, gy;
};

inline Majoranas majorana_operators() {
  Majoranas m;
  for (int a = 0; a < 3; ++a) {
    std::map<int, char> fx, fy;
    for (int j = 0; j < a; ++j) fx[j] = fy[j] = 'Z';
    fx[a] = 'X';
    fy[a] = 'Y';
    m.gx[a] = pauli_to_dense(PauliSum({PauliTerm(1.0, fx)}), 3);
    m.gy[a] = pauli_to_dense(PauliSum({PauliTerm(-1.0, fy)}), 3);
  }
  return m;
}

// i sum_a alpha_a gx_a gy_a + (i/2) sum_{a != b} J_ab gx_a gx_b with
// J_ab = -J_ba and J01, J12, J20 taken from the coupling triple.
inline Mat build_fermion_hamiltonian(const TriJunctionParams& p, const Couplings& j) {
  p.validate();
  const Majoranas m = majorana_operators();
  const cplx i{0, 1};
  Mat h = Mat::Zero(8, 8);
  for (int a = 0; a < 3; ++a) h += i * p.alpha[a] * m.gx[a] * m.gy[a];
  double jm[3][3] = {{0, j[0], -j[2]}, {-j[0], 0, j[1]}, {j[2], -j[1], 0}};
  for (int a = 0; a < 3; ++a)
    for (int b = 0; b < 3; ++b)
      if (a != b) h += 0.5 * i * jm[a][b] * m.gx[a] * m.gx[b];
  return h;
}

// U = (Z1 + Y0 X1)/sqrt(2); Hermitian and unitary.
inline PauliSum rotation_generator() {
  const double r = 1.0 / std::sqrt(2.0);
  return PauliSum({PauliTerm(r, {{1, 'Z'}}), PauliTerm(r, {{0, 'Y'}, {1, 'X'}})});
}

// U H U term by term. Every term has weight <= 2; the J12 coefficient picks up
// a minus sign under the conjugation.
inline PauliSum build_rotated_hamiltonian(const TriJunctionParams& p, const Couplings& j) {
  p.validate();
  PauliSum h;
  h.add(p.alpha[2], {{2, 'Z'}});
  h.add(j[0], {{1, 'Z'}});
  h.add(p.alpha[0], {{0, 'X'}, {1, 'Y'}});
  h.add(p.alpha[1], {{0, 'Y'}, {1, 'X'}});
  h.add(-j[1], {{1, 'Y'}, {2, 'X'}});
  h.add(j[2], {{1, 'X'}, {2, 'X'}});
  return h;
}

inline PauliSum conjugate_by_rotation(const PauliSum& h) {
  PauliSum u = rotation_generator();
  return (u * h * u).simplified(1e-15);
}

inline PauliSum total_parity(int n = 3) {
  std::map<int, char> f;
  for (int q = 0; q < n; ++q) f[q] = 'Z';
  return PauliSum({PauliTerm(1.0, f)});
}

// ---------------------------------------------------------------------------
// Chain model: three arms of L sites plus one auxiliary qubit at index 0.

struct ChainModelParams {
  double mu = 0.0;
  double delta = 1.0;
  int arm_length = 3;
  Couplings j{1.0, 0.0, 0.0};

  int register_size() const { return 3 * arm_length + 1; }
  int qubit(int arm, int site) const { return 1 + arm * arm_length + site; }
  static constexpr int aux() { return 0; }

  void validate() const {
    if (arm_length < 1) throw ValidationError("arm length must be >= 1");
    check_capacity(register_size());
    if (!std::isfinite(mu) || !std::isfinite(delta)) throw ValidationError("chain parameters must be finite");
  }
};

// Auxiliary Pauli attached to the junction pair (a, b) is the axis of the third arm.
inline char chain_aux_axis(int a, int b) { return "XYZ"[3 - a - b]; }

inline PauliSum build_chain_hamiltonian(const ChainModelParams& c, bool include_junction = true) {
  c.validate();
  PauliSum h;
  const int L = c.arm_length;
  for (int a = 0; a < 3; ++a) {
    if (c.mu != 0.0)
      for (int i = 0; i < L; ++i) h.add(c.mu, {{c.qubit(a, i), 'Z'}});
    for (int i = 0; i + 1 < L; ++i) h.add(c.delta, {{c.qubit(a, i), 'X'}, {c.qubit(a, i + 1), 'X'}});
  }
  if (include_junction) {
    const int pairs[3][2] = {{0, 1}, {1, 2}, {2, 0}};
    for (int k = 0; k < 3; ++k) {
      if (c.j[k] == 0.0) continue;
      auto [a, b] = pairs[k];
      h.add(c.j[k], {{ChainModelParams::aux(), chain_aux_axis(a, b)}, {c.qubit(a, 0), 'X'}, {c.qubit(b, 0), 'X'}});
    }
  }
  return h;
}

}  // namespace mbsim

#endif  // MBSIM_MODELS_HPP_
