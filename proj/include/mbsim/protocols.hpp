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

// Braiding protocols on the tri-junction and the chain: noisy circuit runs,
// measurement through inverse initializers, and exact-evolution references.

#ifndef MBSIM_PROTOCOLS_HPP_
#define MBSIM_PROTOCOLS_HPP_

#include <algorithm>
#include <cmath>
#include <utility>
#include <vector>

#include "mbsim/noise.hpp"

namespace mbsim {

// Bit-flip probability per ns of inserted delay. Chosen so that the braiding
// bias of the default scaled-flavor braid falls to 0.05 at 150 ns of delay
// after every two-qubit gate.
inline constexpr double kTunedDelayRate = 1.19e-4;

// Mid-range device errors, readout assignment errors of a few percent, and a
// linear qubit chain.
inline NoiseModel device_noise(double eps_cnot = 8.15e-3) {
  NoiseModel m;
  m.eps_1q = 2.5e-4;
  m.eps_cnot = eps_cnot;
  m.delay_rate = kTunedDelayRate;
  m.readout_p10 = 0.02;
  m.readout_p01 = 0.03;
  m.linear_connectivity = true;
  return m;
}

// Initializer in the frame the flavor evolves in.
inline Circuit flavor_init(Flavor f, int sign) { return f == Flavor::Basis ? init_pm(sign) : rotated_init(sign); }

struct Estimate {
  double value = 0;
  double sd = 0;  // spread over trials; 0 for exact probabilities
};

struct Sampling {
  int shots = 0;  // 0 selects exact probabilities
  int trials = 1;
  std::uint64_t seed = 0;
  bool mitigate = true;
};

struct Distribution {
  RVec mean;
  RVec sd;  // spread over trials; zero for exact probabilities
};

// Bitstring distribution of rho seen through the readout model, exact or
// estimated from shots, with confusion-matrix mitigation when enabled.
inline Distribution measured_distribution(const QuantumState& rho, const NoiseModel& m, const Sampling& s) {
  const ConfusionMatrix cm = build_confusion(m, rho.num_qubits());
  const bool mitigate = m.has_readout_error() && s.mitigate;
  RVec p = apply_confusion(cm, rho.probabilities());
  if (s.shots <= 0) {
    if (mitigate) p = mitigate_readout(p, cm);
    return {p, RVec::Zero(p.size())};
  }
  if (s.trials < 1) throw ValidationError("trials must be >= 1");
  RVec sum = RVec::Zero(p.size()), sq = RVec::Zero(p.size());
  for (int t = 0; t < s.trials; ++t) {
    auto counts = sample_indices(p, s.shots, mix_seed(s.seed, t));
    RVec f(p.size());
    for (Eigen::Index k = 0; k < p.size(); ++k) f(k) = static_cast<double>(counts[k]) / s.shots;
    if (mitigate) f = mitigate_readout(f, cm);
    sum += f;
    sq += f.cwiseProduct(f);
  }
  RVec mean = sum / s.trials;
  RVec sd = RVec::Zero(p.size());
  if (s.trials > 1)
    sd = ((sq - s.trials * mean.cwiseProduct(mean)) / (s.trials - 1)).cwiseMax(0.0).cwiseSqrt();
  return {mean, sd};
}

inline Estimate zero_probability(const QuantumState& rho, const NoiseModel& m, const Sampling& s) {
  Distribution d = measured_distribution(rho, m, s);
  return {d.mean(0), d.sd(0)};
}

struct BraidOutcome {
  int start = 1;
  Estimate p_plus, p_minus;  // overlap with the psi+ and psi- targets
  double bias() const {      // (P- - P+) / (P- + P+) for a psi+ start, sign-flipped for psi-
    const double s = p_plus.value + p_minus.value;
    if (s <= 0) return 0.0;
    return start * (p_minus.value - p_plus.value) / s;
  }
  double subspace() const { return p_plus.value + p_minus.value; }
  double leakage() const { return 1.0 - subspace(); }
};

struct ProtocolRun {
  TriJunctionParams params;
  Flavor flavor = Flavor::Scaled;
  int step_begin = 0, step_end = 6;
  NoiseModel noise;
  double delay_ns = 0;
  Sampling sampling;
};

// Prepares psi(start), runs the Trotter circuit for the step range (with
// delays), then applies the inverse initializer of each target and reads 000.
inline BraidOutcome run_protocol(const ProtocolRun& r, int start) {
  check_sign(start);
  Circuit body = flavor_init(r.flavor, start);
  body.append(with_delays(trotter_circuit(r.params, make_plan(r.params, r.flavor, r.step_begin * r.params.tau,
                                                                r.step_end * r.params.tau)),
                          r.delay_ns));
  QuantumState rho = noisy_apply(QuantumState::basis(3), body, r.noise);
  BraidOutcome out;
  out.start = start;
  for (int target : {1, -1}) {
    QuantumState fin = noisy_apply(rho, flavor_init(r.flavor, target).inverse(), r.noise);
    Sampling s = r.sampling;
    s.seed = mix_seed(r.sampling.seed, target > 0 ? 0 : 1);
    (target > 0 ? out.p_plus : out.p_minus) = zero_probability(fin, r.noise, s);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Exact-evolution references

// Time-ordered propagation with the Hamiltonian frozen at slice midpoints.
// `max_dt` bounds the slice length.
inline QuantumState exact_protocol(const TriJunctionParams& p, QuantumState psi, double t0, double t1,
                                   double max_dt = 0.01, bool rotated = false) {
  const CouplingSchedule s = CouplingSchedule::of(p);
  const int n = std::max(1, static_cast<int>(std::ceil((t1 - t0) / max_dt - 1e-9)));
  const double dt = (t1 - t0) / n;
  for (int k = 0; k < n; ++k) {
    const Couplings j = s(t0 + (k + 0.5) * dt);
    psi = exact_evolve(rotated ? build_rotated_hamiltonian(p, j) : build_qubit_hamiltonian(p, j), dt, std::move(psi));
  }
  return psi;
}

inline BraidOutcome exact_outcome(const TriJunctionParams& p, int start, int step_begin, int step_end,
                                  double max_dt = 0.01) {
  QuantumState psi = exact_protocol(p, prepare(init_pm(start)), step_begin * p.tau, step_end * p.tau, max_dt);
  BraidOutcome out;
  out.start = start;
  out.p_plus.value = state_fidelity(psi, prepare(init_pm(1)));
  out.p_minus.value = state_fidelity(psi, prepare(init_pm(-1)));
  return out;
}

// psi+- = (|e> +- |g>)/sqrt(2) from the two lowest eigenvectors of H(0), each
// phase-aligned with the psi+ initializer.
inline QuantumState eigen_pm(const TriJunctionParams& p, int sign) {
  check_sign(sign);
  Mat h = pauli_to_dense(build_qubit_hamiltonian(p, CouplingSchedule::of(p)(0.0)), 3);
  Eigen::SelfAdjointEigenSolver<Mat> es(h);
  Vec ref = prepare(init_pm(1)).vector();
  Vec g = es.eigenvectors().col(0), e = es.eigenvectors().col(1);
  auto align = [&](Vec v) {
    cplx ov = v.dot(ref);
    return std::abs(ov) > 0 ? Vec(v * (ov / std::abs(ov))) : v;
  };
  g = align(g);
  e = align(e);
  return QuantumState(3, Vec((e + double(sign) * g) / std::sqrt(2.0)));
}

// Fidelity of the exact full braid of `evolved` from the eigen_pm(start) state
// of `targets` with its eigen_pm(-start) state.
inline double exact_braid_fidelity(const TriJunctionParams& targets, const TriJunctionParams& evolved, int start = 1,
                                   double max_dt = 0.02) {
  QuantumState psi = exact_protocol(evolved, eigen_pm(targets, start), 0.0, 6 * evolved.tau, max_dt);
  return state_fidelity(psi, eigen_pm(targets, -start));
}

struct AlphaOptimum {
  double alpha = 0;
  double fidelity = 0;
};

inline AlphaOptimum optimize_alpha(double tau, const std::vector<double>& grid, double max_dt = 0.02) {
  if (grid.empty()) throw ValidationError("alpha grid is empty");
  AlphaOptimum best{grid.front(), -1.0};
  for (double a : grid) {
    TriJunctionParams p = TriJunctionParams::uniform(a, tau);
    const double f = exact_braid_fidelity(p, p, 1, max_dt);
    if (f > best.fidelity + 1e-12) best = {a, f};
  }
  return best;
}

inline std::vector<double> linspace(double a, double b, int n) {
  if (n < 1) throw ValidationError("linspace needs n >= 1");
  std::vector<double> v(n);
  for (int k = 0; k < n; ++k) v[k] = n == 1 ? a : a + (b - a) * k / (n - 1);
  return v;
}

// Width of the contiguous region around x = 0 where y > frac * y(0), with
// linear interpolation at the crossings.
inline double plateau_width(const std::vector<double>& x, const std::vector<double>& y, double frac = 0.9) {
  if (x.size() != y.size() || x.empty()) throw ValidationError("plateau needs matching nonempty samples");
  std::size_t c = 0;
  for (std::size_t k = 1; k < x.size(); ++k)
    if (std::abs(x[k]) < std::abs(x[c])) c = k;
  const double thr = frac * y[c];
  auto cross = [&](std::size_t in, std::size_t out) {
    return x[in] + (x[out] - x[in]) * (y[in] - thr) / (y[in] - y[out]);
  };
  std::size_t i = c, j = c;
  while (i > 0 && y[i - 1] > thr) --i;
  while (j + 1 < x.size() && y[j + 1] > thr) ++j;
  const double lo = i > 0 ? cross(i, i - 1) : x.front();
  const double hi = j + 1 < x.size() ? cross(j, j + 1) : x.back();
  return hi - lo;
}

// ---------------------------------------------------------------------------
// Chain braid

struct ChainBraid {
  double j_max = 1.0;
  double tau = 20.0;
  double max_dt = 0.05;
};

// Full six-step protocol on the chain, integrated matrix-free. Returns F(U psi(start), psi(-start)) and
// F(U psi(start), psi(start)).
inline std::pair<double, double> chain_braid_fidelity(const ChainModelParams& c, const ChainBraid& b, int start = 1) {
  c.validate();
  const int n = c.register_size();
  const CouplingSchedule s{b.j_max, b.tau, 6};
  Vec psi = prepare(chain_init(start, c)).vector();
  const int steps = std::max(1, static_cast<int>(std::ceil(s.duration() / b.max_dt)));
  const double dt = s.duration() / steps;
  ChainModelParams ct = c;
  for (int k = 0; k < steps; ++k) {
    ct.j = s((k + 0.5) * dt);
    psi = taylor_evolve(build_chain_hamiltonian(ct), dt, n, std::move(psi));
  }
  QuantumState out(n, Vec(psi.normalized()));
  return {state_fidelity(out, prepare(chain_init(-start, c))), state_fidelity(out, prepare(chain_init(start, c)))};
}

}  // namespace mbsim

#endif  // MBSIM_PROTOCOLS_HPP_
