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

#ifndef MBSIM_TOMO_HPP_
#define MBSIM_TOMO_HPP_

#include <array>
#include <functional>
#include <string>
#include <vector>

#include "mbsim/noise.hpp"

namespace mbsim {

// Two-qubit Pauli basis, index 4*a + b for P_a (x) P_b with a, b in I, X, Y, Z.
inline constexpr char kPauliAxes[4] = {'I', 'X', 'Y', 'Z'};

inline Mat two_qubit_pauli(int idx) {
  return kron(pauli_matrix(kPauliAxes[idx / 4]), pauli_matrix(kPauliAxes[idx % 4]));
}

using ProcessMatrix = Eigen::Matrix<double, 16, 16>;
using Channel = std::function<Mat(const Mat&)>;

inline ProcessMatrix ptm_of_channel(const Channel& e) {
  ProcessMatrix r;
  std::array<Mat, 16> p;
  for (int k = 0; k < 16; ++k) p[k] = two_qubit_pauli(k);
  for (int j = 0; j < 16; ++j) {
    Mat out = e(p[j]);
    for (int i = 0; i < 16; ++i) r(i, j) = (p[i] * out).trace().real() / 4.0;
  }
  return r;
}

inline ProcessMatrix ptm_of_unitary(const Mat& u) {
  return ptm_of_channel([&](const Mat& x) { return Mat(u * x * u.adjoint()); });
}

inline Channel circuit_channel(const Circuit& c, const NoiseModel& m) {
  if (c.num_qubits != 2) throw ValidationError("tomography target must act on two qubits");
  return [c, m](const Mat& x) {
    // The channel is linear, so feed the (possibly non-physical) operator
    // through the gate-by-gate map directly.
    QuantumState s(2, x);
    NoiseModel gates_only = m;
    gates_only.readout_p01 = gates_only.readout_p10 = 0.0;
    for (auto& g : c.gates) {
      apply_gate_inplace(s, g);
      const double e = gate_error(g, gates_only);
      if (e == 0.0) continue;
      bitflip_inplace(s.density(), 2, g.q[0], e);
      if (g.arity() == 2) bitflip_inplace(s.density(), 2, g.q[1], e);
    }
    return s.density();
  };
}

inline double process_fidelity(const ProcessMatrix& measured, const Mat& ideal_unitary) {
  if (ideal_unitary.rows() != 4) throw ValidationError("ideal unitary must be 4x4");
  ProcessMatrix ideal = ptm_of_unitary(ideal_unitary);
  return (ideal.transpose() * measured).trace() / 16.0;
}

inline double average_gate_fidelity(double f_pro, int d = 4) { return (d * f_pro + 1.0) / (d + 1.0); }

// Fidelity of the Choi state of `e` with the maximally entangled state rotated by U.
inline double choi_fidelity(const Channel& e, const Mat& u) {
  Mat choi = Mat::Zero(16, 16);
  for (int a = 0; a < 4; ++a)
    for (int b = 0; b < 4; ++b) {
      Mat eab = Mat::Zero(4, 4);
      eab(a, b) = 1.0;
      choi += kron(eab, e(eab)) / 4.0;
    }
  Vec phi = Vec::Zero(16);
  for (int a = 0; a < 4; ++a) {
    Vec ea = Vec::Zero(4);
    ea(a) = 1.0;
    Vec ua = u * ea;
    for (int b = 0; b < 4; ++b) phi(4 * a + b) = ua(b) / 2.0;
  }
  return (phi.adjoint() * choi * phi)(0).real();
}

struct QPTOptions {
  int shots = 0;  // 0 selects infinite-shot mode
  std::uint64_t seed = 0;
  bool mitigate = true;
};

struct QPTOutput {
  ProcessMatrix ptm;
  bool physical = true;    // first row and entry bounds within tolerance
  bool ill_conditioned = false;
};

namespace detail {

inline Mat qpt_input_state(int k) {
  // |0>, |1>, |+>, |+i>
  Vec v(2);
  const double r = 1.0 / std::sqrt(2.0);
  switch (k) {
    case 0: v << 1, 0; break;
    case 1: v << 0, 1; break;
    case 2: v << r, r; break;
    default: v << r, cplx(0, r); break;
  }
  return v * v.adjoint();
}

// Rotation taking the +1 eigenvector of the measured axis to |0>.
inline Mat measurement_rotation(char axis) {
  if (axis == 'X') return gate_matrix(Gate::ry(0, -kPi / 2));
  if (axis == 'Y') return gate_matrix(Gate::rx(0, kPi / 2));
  return Mat::Identity(2, 2);
}

}  // namespace detail

inline QPTOutput qpt(const Circuit& c, const NoiseModel& noise, const QPTOptions& opt = {}) {
  noise.validate();
  const Channel e = circuit_channel(c, noise);
  const ConfusionMatrix cm = build_confusion(noise, 2);
  static const char settings_axes[3] = {'X', 'Y', 'Z'};

  Eigen::Matrix<double, 16, 16> in, out;
  for (int k = 0; k < 16; ++k) {
    Mat rho_in = kron(detail::qpt_input_state(k / 4), detail::qpt_input_state(k % 4));
    for (int j = 0; j < 16; ++j) in(j, k) = (two_qubit_pauli(j) * rho_in).trace().real();
    Mat rho_out = e(rho_in);

    std::array<double, 16> sum{};
    std::array<int, 16> hits{};
    for (int s = 0; s < 9; ++s) {
      const char a0 = settings_axes[s / 3], a1 = settings_axes[s % 3];
      Mat r = kron(detail::measurement_rotation(a0), detail::measurement_rotation(a1));
      RVec p = (r * rho_out * r.adjoint()).diagonal().real();
      p = apply_confusion(cm, p);
      if (opt.shots > 0) {
        auto counts = sample_indices(p, opt.shots, mix_seed(opt.seed, 9 * k + s));
        for (int b = 0; b < 4; ++b) p(b) = static_cast<double>(counts[b]) / opt.shots;
      }
      if (opt.mitigate && noise.has_readout_error()) p = mitigate_readout(p, cm);
      for (int i = 0; i < 16; ++i) {
        const int pa = i / 4, pb = i % 4;
        if ((pa && kPauliAxes[pa] != a0) || (pb && kPauliAxes[pb] != a1)) continue;
        double v = 0;
        for (int b = 0; b < 4; ++b) {
          int sign = 1;
          if (pa && (b & 2)) sign = -sign;
          if (pb && (b & 1)) sign = -sign;
          v += sign * p(b);
        }
        sum[i] += v;
        ++hits[i];
      }
    }
    for (int i = 0; i < 16; ++i) out(i, k) = sum[i] / hits[i];
  }
  QPTOutput res;
  Eigen::FullPivLU<Eigen::Matrix<double, 16, 16>> lu(in);
  res.ill_conditioned = lu.rcond() < 1e-8;
  res.ptm = out * lu.inverse();
  res.physical = std::abs(res.ptm(0, 0) - 1.0) < 1e-9 && res.ptm.row(0).tail(15).cwiseAbs().maxCoeff() < 1e-9 &&
                 res.ptm.cwiseAbs().maxCoeff() <= 1.0 + 1e-9;
  return res;
}

enum class UyxFlavor { DoubleCnot, Scaled };

inline const char* uyx_flavor_name(UyxFlavor f) { return f == UyxFlavor::DoubleCnot ? "double_cnot" : "scaled"; }

struct QPTResult {
  double theta = 0;
  UyxFlavor flavor = UyxFlavor::DoubleCnot;
  double fidelity = 0;          // process fidelity
  double average_fidelity = 0;  // (d F + 1) / (d + 1)
  double error = 0;             // 1 - process fidelity
  int shots = 0;
  std::uint64_t seed = 0;
  bool physical = true;
};

inline QPTResult qpt_uyx(double theta, UyxFlavor f, const NoiseModel& noise, const QPTOptions& opt = {}) {
  Circuit c = f == UyxFlavor::DoubleCnot ? uyx_double_cnot(theta) : uyx_scaled(theta);
  QPTOutput out = qpt(c, noise, opt);
  QPTResult r;
  r.theta = theta;
  r.flavor = f;
  r.fidelity = process_fidelity(out.ptm, uyx_exact(theta));
  r.average_fidelity = average_gate_fidelity(r.fidelity);
  r.error = 1.0 - r.fidelity;
  r.shots = opt.shots;
  r.seed = opt.seed;
  r.physical = out.physical;
  return r;
}

struct ReductionPoint {
  double theta = 0;
  QPTResult a, b;
  double reduction = 0;  // 1 - E_b / E_a
  bool defined = true;
};

// Flavors are interleaved per angle; each evaluation owns its seed.
inline std::vector<ReductionPoint> error_reduction_curve(const std::vector<double>& thetas, const NoiseModel& noise,
                                                         int shots, std::uint64_t seed) {
  if (thetas.empty()) throw ValidationError("theta list is empty");
  std::vector<ReductionPoint> out;
  for (std::size_t k = 0; k < thetas.size(); ++k) {
    const double t = thetas[k];
    if (!(t > 0 && t <= kPi)) throw ValidationError("theta must lie in (0, pi]");
    ReductionPoint p;
    p.theta = t;
    p.a = qpt_uyx(t, UyxFlavor::DoubleCnot, noise, {shots, mix_seed(seed, 2 * k), true});
    p.b = qpt_uyx(t, UyxFlavor::Scaled, noise, {shots, mix_seed(seed, 2 * k + 1), true});
    if (std::abs(p.a.error) < 1e-12) {
      p.defined = false;
      p.reduction = 0.0;
    } else {
      p.reduction = 1.0 - p.b.error / p.a.error;
    }
    out.push_back(p);
  }
  return out;
}

}  // namespace mbsim

#endif  // MBSIM_TOMO_HPP_
