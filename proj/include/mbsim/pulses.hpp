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

#ifndef MBSIM_PULSES_HPP_
#define MBSIM_PULSES_HPP_

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <sstream>
#include <string>
#include <tuple>
#include <vector>

#include "mbsim/circuits.hpp"

namespace mbsim {

inline constexpr int kDurationQuantum = 16;

struct CalibrationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Flat-top Gaussian. All lengths are in AWG samples.
struct GaussianSquarePulse {
  int duration = 0;
  cplx amp{0.0, 0.0};
  double sigma = 64.0;
  double width = 0.0;
  double n_sigma = 2.0;

  double gaussian_area_unit() const { return sigma * std::sqrt(2.0 * kPi) * std::erf(n_sigma); }

  void validate() const {
    if (!(sigma > 0)) throw ValidationError("sigma must be positive");
    if (!(n_sigma > 0)) throw ValidationError("n_sigma must be positive");
    if (width < 0) throw ValidationError("width must be >= 0");
    if (std::abs(amp) > 1.0 + 1e-12) throw ValidationError("|A| must be <= 1");
    if (duration % kDurationQuantum != 0) throw ValidationError("duration must be a multiple of 16 samples");
    if (duration < width + n_sigma * sigma - 1e-9) throw ValidationError("duration shorter than pulse support");
  }

  // Envelope magnitude at time t (samples). The flanks are Gaussian and are
  // cut at sqrt(2) n_sigma sigma from the flat top, the cut at which the
  // closed-form area below is exact.
  double envelope(double t) const {
    const double h = std::sqrt(2.0) * n_sigma * sigma;
    const double x = t - h;
    if (x < -h || x > width + h) return 0.0;
    double off = x < 0 ? -x : (x > width ? x - width : 0.0);
    return std::abs(amp) * std::exp(-off * off / (2 * sigma * sigma));
  }

  int envelope_span() const {
    return static_cast<int>(std::ceil(width + 2 * std::sqrt(2.0) * n_sigma * sigma));
  }
};

inline double pulse_area(const GaussianSquarePulse& p) {
  return std::abs(p.amp) * p.width + std::abs(p.amp) * p.gaussian_area_unit();
}

// Midpoint sum of the envelope on the integer sample grid.
inline double numeric_pulse_area(const GaussianSquarePulse& p) {
  double s = 0;
  for (int k = 0; k < p.envelope_span(); ++k) s += p.envelope(k + 0.5);
  return s;
}

inline int quantized_duration(double width, double n_sigma, double sigma) {
  return static_cast<int>(std::ceil((width + n_sigma * sigma) / kDurationQuantum - 1e-12)) * kDurationQuantum;
}

struct CRCalibration {
  GaussianSquarePulse cr{624, std::polar(0.25, 0.5), 64.0, 368.0, 2.0};
  GaussianSquarePulse rotary{624, std::polar(0.05, 0.0), 64.0, 368.0, 2.0};
  double sample_dt_ns = 0.222;
  int sq_duration = 160;  // single-qubit pulse length
  double sq_sigma = 40.0;
  double sq_amp_half_pi = 0.1;

  static CRCalibration fixture() { return {}; }

  double reference_area() const { return pulse_area(cr); }

  void validate() const {
    if (!(sample_dt_ns > 0)) throw ValidationError("sample_dt must be positive");
    if (std::abs(cr.amp) > 1.0 || std::abs(rotary.amp) > 1.0) throw CalibrationError("calibrated |A| exceeds 1");
    cr.validate();
    rotary.validate();
    if (!(reference_area() > 0)) throw ValidationError("reference area must be positive");
    if (sq_duration <= 0 || sq_duration % kDurationQuantum) throw ValidationError("bad single-qubit pulse duration");
  }
};

// Rescale a calibrated pulse to area (theta / (pi/2)) times its own area:
// stretch the flat top while there is one, otherwise shrink the amplitude.
inline GaussianSquarePulse scale_pulse(double theta, const GaussianSquarePulse& ref) {
  if (!(theta > 0 && theta <= kPi)) throw ValidationError("theta must lie in (0, pi]");
  const double target = theta / (kPi / 2) * pulse_area(ref);
  const double g = ref.gaussian_area_unit();
  const double a_ref = std::abs(ref.amp);
  GaussianSquarePulse p = ref;
  if (target > a_ref * g) {
    p.width = target / a_ref - g;
  } else {
    p.width = 0.0;
    const double mag = target / g;
    if (mag > 1.0) throw CalibrationError("scaled amplitude exceeds 1");
    p.amp = std::polar(mag, std::arg(ref.amp));
  }
  p.duration = quantized_duration(p.width, p.n_sigma, p.sigma);
  return p;
}

inline GaussianSquarePulse scale_cr(double theta, const CRCalibration& cal) {
  cal.validate();
  return scale_pulse(theta, cal.cr);
}

// ---------------------------------------------------------------------------
// Schedules

struct PulseEvent {
  std::string channel;
  int start = 0;
  std::string kind;
  GaussianSquarePulse pulse;
  int end() const { return start + pulse.duration; }
};

struct PhaseEvent {
  std::string channel;
  int start = 0;
  double phase = 0;
};

struct PulseSchedule {
  std::vector<PulseEvent> pulses;
  std::vector<PhaseEvent> phases;

  int duration() const {
    int d = 0;
    for (auto& p : pulses) d = std::max(d, p.end());
    for (auto& p : phases) d = std::max(d, p.start);
    return d;
  }

  void validate() const {
    std::map<std::string, std::vector<std::pair<int, int>>> by;
    for (auto& p : pulses) by[p.channel].push_back({p.start, p.end()});
    for (auto& [ch, v] : by) {
      std::sort(v.begin(), v.end());
      for (std::size_t k = 1; k < v.size(); ++k)
        if (v[k].first < v[k - 1].second) throw ValidationError("overlapping pulses on channel " + ch);
    }
  }

  int single_qubit_pulse_count() const {
    int k = 0;
    for (auto& p : pulses) k += p.kind == "x90" || p.kind == "x180" || p.kind == "sq";
    return k;
  }

  double two_qubit_area() const {
    double a = 0;
    for (auto& p : pulses)
      if (!p.channel.empty() && p.channel[0] == 'u') a += pulse_area(p.pulse);
    return a;
  }

  // One line per event, sorted by channel then start sample.
  std::string serialize() const {
    std::vector<std::tuple<std::string, int, int, std::string>> rows;
    char buf[256];
    for (std::size_t k = 0; k < pulses.size(); ++k) {
      auto& p = pulses[k];
      std::snprintf(buf, sizeof buf, "pulse %s %d %s %d %.17g %.17g %.17g %.17g", p.channel.c_str(), p.start,
                    p.kind.c_str(), p.pulse.duration, p.pulse.amp.real(), p.pulse.amp.imag(), p.pulse.sigma,
                    p.pulse.width);
      rows.emplace_back(p.channel, p.start, 1, buf);
    }
    for (auto& p : phases) {
      std::snprintf(buf, sizeof buf, "phase %s %d %.17g", p.channel.c_str(), p.start, p.phase);
      rows.emplace_back(p.channel, p.start, 0, buf);
    }
    std::stable_sort(rows.begin(), rows.end(), [](auto& a, auto& b) {
      return std::tie(std::get<0>(a), std::get<1>(a), std::get<2>(a)) <
             std::tie(std::get<0>(b), std::get<1>(b), std::get<2>(b));
    });
    std::ostringstream os;
    os << "duration " << duration() << "\n";
    for (auto& r : rows) os << std::get<3>(r) << "\n";
    return os.str();
  }
};

inline std::string drive_channel(int q) { return "d" + std::to_string(q); }
inline std::string control_channel(int c, int t) { return "u" + std::to_string(c) + "_" + std::to_string(t); }

namespace detail {

inline GaussianSquarePulse sq_pulse(const CRCalibration& cal, double theta, double phase) {
  GaussianSquarePulse p;
  p.duration = cal.sq_duration;
  p.sigma = cal.sq_sigma;
  p.width = 0.0;
  p.n_sigma = cal.sq_duration / (2.0 * cal.sq_sigma);
  const double mag = cal.sq_amp_half_pi * std::abs(theta) / (kPi / 2);
  if (mag > 1.0) throw CalibrationError("single-qubit amplitude exceeds 1");
  p.amp = std::polar(mag, phase + (theta < 0 ? kPi : 0.0));
  return p;
}

}  // namespace detail

// Echoed cross resonance for ZX(theta), starting at sample `t0`:
// x90 on the control, CR(+) with rotary, x180 echo, CR(-) with rotary, closing x90.
inline void append_zx(PulseSchedule& s, double theta, const CRCalibration& cal, int c, int t, int t0) {
  theta = std::remainder(theta, 2 * kPi);  // ZX(theta + 2 pi) = -ZX(theta)
  if (theta == 0.0) return;
  const double mag = std::abs(theta);
  const double flip = theta < 0 ? kPi : 0.0;
  GaussianSquarePulse cr = scale_pulse(mag, cal.cr);
  GaussianSquarePulse rot = scale_pulse(mag, cal.rotary);
  GaussianSquarePulse cr_m = cr, rot_m = rot;
  cr.amp *= std::polar(1.0, flip);
  rot.amp *= std::polar(1.0, flip);
  cr_m.amp = -cr.amp;
  rot_m.amp = -rot.amp;
  const int d = std::max(cr.duration, rot.duration);
  const int sq = cal.sq_duration;
  int at = t0;
  s.pulses.push_back({drive_channel(c), at, "x90", detail::sq_pulse(cal, kPi / 2, 0.0)});
  at += sq;
  s.pulses.push_back({control_channel(c, t), at, "cr", cr});
  s.pulses.push_back({drive_channel(t), at, "rotary", rot});
  at += d;
  s.pulses.push_back({drive_channel(c), at, "x180", detail::sq_pulse(cal, kPi, 0.0)});
  at += sq;
  s.pulses.push_back({control_channel(c, t), at, "cr", cr_m});
  s.pulses.push_back({drive_channel(t), at, "rotary", rot_m});
  at += d;
  s.pulses.push_back({drive_channel(c), at, "x90", detail::sq_pulse(cal, kPi / 2, 0.0)});
}

inline int zx_duration(double theta, const CRCalibration& cal) {
  theta = std::remainder(theta, 2 * kPi);
  if (theta == 0.0) return 0;
  const double m = std::abs(theta);
  const int d = std::max(scale_pulse(m, cal.cr).duration, scale_pulse(m, cal.rotary).duration);
  return 3 * cal.sq_duration + 2 * d;
}

inline PulseSchedule build_zx_schedule(double theta, const CRCalibration& cal, int control = 0, int target = 1) {
  cal.validate();
  if (!(theta > 0 && theta <= kPi)) throw ValidationError("theta must lie in (0, pi]");
  PulseSchedule s;
  append_zx(s, theta, cal, control, target, 0);
  s.validate();
  return s;
}

// Gate-level lowering with as-soon-as-possible placement. Z rotations are
// frame changes. Controlled-Paulis use the calibrated ZX(pi/2) echo plus target
// pulses (one for CX, two for CZ; CY adds frame changes).
inline PulseSchedule compile_schedule(const Circuit& c, const CRCalibration& cal) {
  cal.validate();
  PulseSchedule s;
  std::vector<int> avail(c.num_qubits, 0);
  for (auto& g : c.gates) {
    if (g.kind == GateKind::Rz) {
      s.phases.push_back({drive_channel(g.q[0]), avail[g.q[0]], -g.angle});
      continue;
    }
    if (g.kind == GateKind::Rx || g.kind == GateKind::Ry) {
      const int q = g.q[0];
      if (g.angle == 0.0) continue;
      s.pulses.push_back({drive_channel(q), avail[q], "sq",
                          detail::sq_pulse(cal, g.angle, g.kind == GateKind::Ry ? kPi / 2 : 0.0)});
      avail[q] += cal.sq_duration;
      continue;
    }
    if (g.kind == GateKind::Delay) continue;
    const int a = g.q[0], b = g.q[1];
    int t0 = std::max(avail[a], avail[b]);
    if (g.kind == GateKind::ZX) {
      append_zx(s, g.angle, cal, a, b, t0);
      avail[a] = avail[b] = t0 + zx_duration(g.angle, cal);
      continue;
    }
    if (g.kind == GateKind::CY) s.phases.push_back({drive_channel(b), t0, kPi / 2});
    int at = t0;
    const int pre = g.kind == GateKind::CZ ? 1 : 0;
    for (int k = 0; k < pre; ++k) {
      s.pulses.push_back({drive_channel(b), at, "sq", detail::sq_pulse(cal, kPi / 2, kPi / 2)});
      at += cal.sq_duration;
    }
    append_zx(s, kPi / 2, cal, a, b, at);
    at += zx_duration(kPi / 2, cal);
    s.pulses.push_back({drive_channel(b), at, "sq", detail::sq_pulse(cal, g.kind == GateKind::CZ ? -kPi / 2 : kPi / 2, 0.0)});
    at += cal.sq_duration;
    if (g.kind == GateKind::CY) s.phases.push_back({drive_channel(b), at, -kPi / 2});
    avail[a] = avail[b] = at;
  }
  s.validate();
  return s;
}

struct ScheduleComparison {
  double duration_ratio = 0;
  double cr_area_ratio = 0;
};

inline ScheduleComparison compare_schedules(const PulseSchedule& a, const PulseSchedule& b) {
  if (b.duration() == 0) throw ValidationError("reference schedule has zero duration");
  if (b.two_qubit_area() == 0) throw ValidationError("reference schedule has no two-qubit pulses");
  return {static_cast<double>(a.duration()) / b.duration(), a.two_qubit_area() / b.two_qubit_area()};
}

}  // namespace mbsim

#endif  // MBSIM_PULSES_HPP_
