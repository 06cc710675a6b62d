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

#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>

#include "mbsim/experiments.hpp"
#include "mbsim/plot.hpp"

namespace mbsim {
namespace {

ExperimentConfig cfg(const std::string& text) { return parse_config_text(text); }

std::vector<std::size_t> rows_where(const RunRecord& r, const std::string& col, const std::string& v) {
  std::vector<std::size_t> out;
  for (std::size_t k = 0; k < r.rows.size(); ++k)
    if (r.text(k, col) == v) out.push_back(k);
  return out;
}

// ---------------------------------------------------------------------------
// Config

TEST(Config, DefaultsFollowTheProtocol) {
  EXPECT_EQ(cfg(R"({"experiment": "move"})").shots, 1024);
  auto b = cfg(R"({"experiment": "braid"})");
  EXPECT_EQ(b.shots, 8192);
  EXPECT_EQ(b.trials, 4);
  EXPECT_EQ(b.flavor, "scaled");
  auto q = cfg(R"({"experiment": "qpt"})");
  EXPECT_EQ(q.shots, 2048);
  EXPECT_EQ(q.trials, 4);
  ASSERT_EQ(q.sweep_values.size(), 15u);
  EXPECT_NEAR(q.sweep_values.back(), kPi, 1e-15);
  auto e = cfg(R"({"experiment": "errorsweep"})");
  EXPECT_NEAR(e.sweep_values.front(), 0.0, 0);
  EXPECT_NEAR(e.sweep_values.back(), 0.012, 1e-12);
  EXPECT_EQ(cfg(R"({"experiment": "protect"})").taus.size(), 3u);
}

TEST(Config, ParsesFields) {
  auto c = cfg(R"({"experiment": "braid", "model": {"alpha": [0.1, 0.2, 0.3], "tau": 6.6, "slices": 4},
                   "noise": {"eps_cnot": 0.01, "linear_connectivity": true}, "seed": 99,
                   "sweep": {"axis": "delay_ns", "values": {"start": 0, "stop": 100, "step": 25}}})");
  EXPECT_DOUBLE_EQ(c.model.alpha[2], 0.3);
  EXPECT_DOUBLE_EQ(c.model.tau, 6.6);
  EXPECT_EQ(c.model.trotter_steps_per_swap, 4);
  EXPECT_DOUBLE_EQ(c.noise.eps_cnot, 0.01);
  EXPECT_DOUBLE_EQ(c.noise.eps_1q, 0.0);
  EXPECT_TRUE(c.noise.linear_connectivity);
  EXPECT_EQ(c.seed, 99u);
  EXPECT_EQ(c.sweep_values, (std::vector<double>{0, 25, 50, 75, 100}));
}

TEST(Config, NoisePresets) {
  auto c = cfg(R"({"experiment": "move", "noise": {"preset": "device", "eps_cnot": 0.001}})");
  EXPECT_DOUBLE_EQ(c.noise.eps_1q, device_noise().eps_1q);
  EXPECT_DOUBLE_EQ(c.noise.eps_cnot, 0.001);
  EXPECT_TRUE(cfg(R"({"experiment": "move", "noise": "none"})").noise.is_zero());
}

TEST(Config, Rejections) {
  EXPECT_THROW(cfg("{"), ValidationError);
  EXPECT_THROW(cfg("[]"), ValidationError);
  EXPECT_THROW(cfg(R"({"experiment": "dance"})"), ValidationError);
  EXPECT_THROW(cfg(R"({"experiment": "move", "shot": 5})"), ValidationError);
  EXPECT_THROW(cfg(R"({"experiment": "move", "model": {"alpah": 1}})"), ValidationError);
  EXPECT_THROW(cfg(R"({"experiment": "move", "flavor": "fancy"})"), ValidationError);
  EXPECT_THROW(cfg(R"({"experiment": "move", "shots": -1})"), ValidationError);
  EXPECT_THROW(cfg(R"({"experiment": "move", "shots": 1.5})"), ValidationError);
  EXPECT_THROW(cfg(R"({"experiment": "move", "model": {"tau": 0}})"), ValidationError);
  EXPECT_THROW(cfg(R"({"experiment": "move", "noise": {"eps_cnot": 2}})"), ValidationError);
  EXPECT_THROW(cfg(R"({"experiment": "move", "noise": "loud"})"), ValidationError);
  EXPECT_THROW(cfg(R"({"experiment": "braid", "sweep": {"axis": "theta"}})"), ValidationError);
  EXPECT_THROW(cfg(R"({"experiment": "braid", "sweep": {"values": []}})"), ValidationError);
  EXPECT_THROW(cfg(R"({"experiment": "braid", "sweep": {"values": [-1]}})"), ValidationError);
  EXPECT_THROW(cfg(R"({"experiment": "qpt", "sweep": {"values": [0]}})"), ValidationError);
  EXPECT_THROW(cfg(R"({"experiment": "protect", "taus": []})"), ValidationError);
  EXPECT_THROW(cfg(R"({"experiment": "track", "sweep": {"values": [1.5]}})"), ValidationError);
  EXPECT_THROW(cfg(R"({"experiment": "track", "sweep": {"values": [4]}})"), NotSupportedError);
  EXPECT_THROW(cfg(R"({"experiment": "move", "seed": -3})"), ValidationError);
}

TEST(Config, HashIgnoresOutputAndTracksResults) {
  auto a = cfg(R"({"experiment": "move", "out": "x"})");
  auto b = cfg(R"({"experiment": "move", "out": "y", "threads": 3})");
  auto c = cfg(R"({"experiment": "move", "seed": 2})");
  EXPECT_EQ(config_hash(a), config_hash(b));
  EXPECT_NE(config_hash(a), config_hash(c));
  EXPECT_EQ(config_hash(a).size(), 16u);
}

TEST(Config, ShippedConfigsLoad) {
  for (auto& e : experiment_names()) {
    auto c = load_config(std::string(MBSIM_SOURCE_DIR) + "/configs/" + e + ".json");
    EXPECT_EQ(c.experiment, e);
  }
}

// ---------------------------------------------------------------------------
// Plumbing

TEST(Plumbing, FormatHasNoNegativeZero) {
  EXPECT_EQ(fmt(-0.0), "0");
  EXPECT_EQ(fmt(0.5), "0.5");
  EXPECT_EQ(fmt(1.0 / 3), "0.333333333333");
}

TEST(Plumbing, ParallelMapKeepsOrderAndRethrows) {
  auto v = parallel_map<int>(100, [](std::size_t k) { return static_cast<int>(k * k); }, 4);
  for (int k = 0; k < 100; ++k) EXPECT_EQ(v[k], k * k);
  EXPECT_THROW(parallel_map<int>(
                   10, [](std::size_t k) -> int { return k == 7 ? throw ValidationError("x") : 0; }, 3),
               ValidationError);
}

TEST(Plumbing, PlateauWidthInterpolates) {
  std::vector<double> x{-2, -1, 0, 1, 2}, y{0, 0.5, 1, 0.8, 0};
  // threshold 0.9: left crossing at -0.2, right at 0.5
  EXPECT_NEAR(plateau_width(x, y, 0.9), 0.7, 1e-12);
  std::vector<double> flat(5, 1.0);
  EXPECT_NEAR(plateau_width(x, flat, 0.9), 4.0, 1e-12);
}

TEST(Plumbing, WriteRecordAndPlot) {
  auto c = cfg(R"({"experiment": "braid", "shots": 0, "sweep": {"values": [0, 100]}})");
  RunRecord r = run_experiment(c);
  auto dir = std::filesystem::temp_directory_path() / "mbsim_write_record";
  std::filesystem::remove_all(dir);
  write_record(r, dir);
  std::ifstream f(dir / "results.csv");
  std::stringstream ss;
  ss << f.rdbuf();
  EXPECT_EQ(ss.str(), r.csv());
  auto run = json::parse(std::ifstream(dir / "run.json"));
  EXPECT_EQ(run["config_hash"], r.hash);
  EXPECT_EQ(run["csv_schema"], "braid/1");
  EXPECT_EQ(run["version"], kVersion);
  std::string svg = svg_plot(r, default_plots("braid").front());
  EXPECT_NE(svg.find("<polyline"), std::string::npos);
  EXPECT_NE(svg.find("start=-1"), std::string::npos);
}

// ---------------------------------------------------------------------------
// Reproducibility

TEST(Reproducibility, SameConfigSameCsv) {
  const std::string text =
      R"({"experiment": "braid", "shots": 512, "trials": 2, "seed": 7, "sweep": {"values": [0, 150]}})";
  auto a = run_experiment(cfg(text)).csv();
  auto b = run_experiment(cfg(text)).csv();
  EXPECT_EQ(a, b);
  auto c = cfg(text);
  c.seed = 8;
  EXPECT_NE(run_experiment(c).csv(), a);
}

TEST(Reproducibility, ThreadCountDoesNotChangeOutput) {
  auto c = cfg(R"({"experiment": "track", "shots": 256, "seed": 3})");
  c.threads = 1;
  auto a = run_experiment(c).csv();
  c.threads = 4;
  EXPECT_EQ(run_experiment(c).csv(), a);
}

// ---------------------------------------------------------------------------
// Move

TEST(Move, NoiselessPrefersTarget) {
  RunRecord r = run_experiment(cfg(R"({"experiment": "move", "shots": 0})"));
  ASSERT_EQ(r.rows.size(), 5u);
  auto noiseless = rows_where(r, "run", "noiseless");
  ASSERT_EQ(noiseless.size(), 2u);
  for (auto k : noiseless) {
    EXPECT_GT(r.number(k, "p_plus_norm"), 0.9);
    EXPECT_NEAR(r.number(k, "p_plus_norm") + r.number(k, "p_minus_norm"), 1.0, 1e-12);
  }
  const auto basis = noiseless[0], scaled = noiseless[1];
  EXPECT_EQ(r.text(basis, "flavor"), "basis");
  EXPECT_EQ(r.number(basis, "two_qubit_gates"), 12);
  EXPECT_GT(r.number(scaled, "leakage"), r.number(basis, "leakage"));
  const double exact = r.number(0, "bias");
  EXPECT_NEAR(r.number(basis, "bias"), exact, 0.05);
  EXPECT_NEAR(r.number(scaled, "bias"), exact, 0.05);
}

TEST(Move, NoiseReducesPreference) {
  RunRecord r = run_experiment(cfg(R"({"experiment": "move", "shots": 0})"));
  for (std::size_t k = 1; k <= 2; ++k)
    EXPECT_LT(r.number(k + 2, "p_plus_norm"), r.number(k, "p_plus_norm")) << r.text(k, "flavor");
}

// ---------------------------------------------------------------------------
// Braid

TEST(Braid, ZeroNoiseMatchesExactOracle) {
  auto r = run_experiment(
      cfg(R"({"experiment": "braid", "flavor": "both", "noise": "none", "shots": 0, "sweep": {"values": [0]}})"));
  const double exact = r.summary["exact_bias"].get<double>();
  EXPECT_GT(exact, 0.9);
  for (std::size_t k = 0; k < r.rows.size(); ++k) EXPECT_NEAR(r.number(k, "bias"), exact, 0.05) << k;
}

TEST(Braid, SignSymmetry) {
  auto r = run_experiment(
      cfg(R"({"experiment": "braid", "flavor": "both", "noise": "none", "shots": 0, "sweep": {"values": [0]}})"));
  for (std::size_t k = 0; k < r.rows.size(); k += 2) {
    ASSERT_EQ(r.text(k, "start"), "1");
    EXPECT_NEAR(r.number(k, "p_plus"), r.number(k + 1, "p_minus"), 1e-9);
    EXPECT_NEAR(r.number(k, "p_minus"), r.number(k + 1, "p_plus"), 1e-9);
  }
}

TEST(Braid, SampledSignSymmetryWithinShotNoise) {
  auto r = run_experiment(
      cfg(R"({"experiment": "braid", "noise": "none", "shots": 8192, "trials": 4, "sweep": {"values": [0]}})"));
  EXPECT_NEAR(r.number(0, "p_plus"), r.number(1, "p_minus"), 0.02);
  EXPECT_NEAR(r.number(0, "p_minus"), r.number(1, "p_plus"), 0.02);
  EXPECT_GT(r.number(0, "p_minus_sd"), 0.0);
}

TEST(Braid, DelayErasesBias) {
  auto r = run_experiment(cfg(R"({"experiment": "braid", "shots": 0, "sweep": {"values": [0, 100, 300]}})"));
  EXPECT_GT(r.number(0, "bias"), 0.5);
  EXPECT_LT(r.number(2, "bias"), r.number(0, "bias"));
  EXPECT_LT(std::abs(r.number(4, "bias")), 0.05);
}

// ---------------------------------------------------------------------------
// Track

TEST(Track, NoiselessDistributionsAreNormalized) {
  auto r = run_experiment(cfg(R"({"experiment": "track", "noise": "none", "shots": 0})"));
  ASSERT_EQ(r.rows.size(), 18u);
  for (std::size_t k = 0; k < r.rows.size(); ++k) {
    double s = 0;
    for (int b = 0; b < 8; ++b) s += r.number(k, "p_" + bits(b));
    EXPECT_NEAR(s, 1.0, 1e-9);
  }
}

TEST(Track, SignsStaySeparated) {
  auto r = run_experiment(cfg(R"({"experiment": "track", "noise": "none", "shots": 0})"));
  for (std::string f : {"exact", "basis", "scaled"})
    for (int step = 1; step <= 3; ++step) {
      std::string plus, minus;
      for (std::size_t k = 0; k < r.rows.size(); ++k)
        if (r.text(k, "flavor") == f && r.text(k, "step") == std::to_string(step))
          (r.text(k, "start") == "1" ? plus : minus) = r.text(k, "dominant");
      EXPECT_NE(plus, minus) << f << " step " << step;
    }
}

TEST(Track, ScaledDominantBinsFollowExactOracle) {
  auto r = run_experiment(cfg(R"({"experiment": "track", "flavor": "scaled", "noise": "none", "shots": 0})"));
  for (std::size_t k = 0; k < r.rows.size(); k += 2) {
    ASSERT_EQ(r.text(k, "flavor"), "exact");
    EXPECT_EQ(r.text(k + 1, "dominant"), r.text(k, "dominant")) << "row " << k;
  }
}

TEST(Track, ExactStepOneLabels) {
  // Step 1 ends with the zero mode moved; unwinding leaves the + start mostly on 011.
  auto r = run_experiment(cfg(R"({"experiment": "track", "flavor": "basis", "noise": "none", "shots": 0,
                                  "sweep": {"values": [1]}})"));
  EXPECT_EQ(r.text(0, "dominant"), "011");
  EXPECT_EQ(r.text(2, "dominant"), "100");
}

// ---------------------------------------------------------------------------
// Protect

TEST(Protect, OptimizedPointIsThePeak) {
  auto r = run_experiment(cfg(R"({"experiment": "protect", "taus": [3.3], "alpha_grid": [0.1, 0.2, 0.3],
                                  "sweep": {"values": [-0.1, -0.05, 0, 0.05, 0.1]}, "max_dt": 0.05})"));
  ASSERT_EQ(r.rows.size(), 5u);
  const double alpha = r.number(0, "alpha");
  EXPECT_DOUBLE_EQ(alpha, r.summary["curves"][0]["alpha"].get<double>());
  for (std::size_t k = 0; k < 5; ++k) EXPECT_LE(r.number(k, "p_minus"), r.number(2, "p_minus") + 1e-12);
  EXPECT_NEAR(r.number(2, "p_minus"), r.summary["curves"][0]["fidelity_at_optimum"].get<double>(), 1e-12);
}

TEST(Protect, EigenCombinationsSpanTheLowBand) {
  TriJunctionParams p;
  QuantumState a = eigen_pm(p, 1), b = eigen_pm(p, -1);
  EXPECT_NEAR(std::abs(a.vector().dot(b.vector())), 0.0, 1e-12);
  EXPECT_NEAR(a.vector().norm(), 1.0, 1e-12);
  Mat h = pauli_to_dense(build_qubit_hamiltonian(p, CouplingSchedule::of(p)(0.0)), 3);
  Eigen::SelfAdjointEigenSolver<Mat> es(h);
  for (const auto* s : {&a, &b}) {
    const double e = s->vector().dot(h * s->vector()).real();
    EXPECT_NEAR(e, 0.5 * (es.eigenvalues()(0) + es.eigenvalues()(1)), 1e-10);
  }
  EXPECT_GT(state_fidelity(a, prepare(init_pm(1))), 0.5);
}

// ---------------------------------------------------------------------------
// Error sweep

TEST(ErrorSweep, TrendsWithCnotError) {
  auto r = run_experiment(cfg(R"({"experiment": "errorsweep"})"));
  for (std::string f : {"basis", "scaled"}) {
    auto idx = rows_where(r, "flavor", f);
    ASSERT_EQ(idx.size(), 15u);
    for (std::size_t k = 1; k < idx.size(); ++k)
      EXPECT_LT(r.number(idx[k], "bias"), r.number(idx[k - 1], "bias")) << f << " " << k;
  }
  auto sc = rows_where(r, "flavor", "scaled");
  for (std::size_t k = 1; k < sc.size(); ++k)
    EXPECT_LT(r.number(sc[k], "subspace"), r.number(sc[k - 1], "subspace"));
}

TEST(ErrorSweep, ZeroCnotErrorDiffersOnlyThroughSingleQubitGates) {
  auto r = run_experiment(cfg(R"({"experiment": "errorsweep", "sweep": {"values": [0]}})"));
  auto q = cfg(R"({"experiment": "errorsweep", "noise": "none", "sweep": {"values": [0]}})");
  auto clean = run_experiment(q);
  for (std::size_t k = 0; k < 2; ++k) {
    EXPECT_NE(r.number(k, "bias"), clean.number(k, "bias"));
    EXPECT_NEAR(r.number(k, "bias"), clean.number(k, "bias"), 0.05);
  }
}

TEST(ErrorSweep, DeviceRangeMarked) {
  auto r = run_experiment(cfg(R"({"experiment": "errorsweep"})"));
  int marked = 0;
  for (std::size_t k = 0; k < r.rows.size(); ++k) {
    const double e = r.number(k, "eps_cnot");
    const bool in = e >= 6.9e-3 - 1e-12 && e <= 9.4e-3 + 1e-12;
    EXPECT_EQ(r.text(k, "device_range"), in ? "1" : "0");
    marked += in;
  }
  EXPECT_EQ(marked, 10);
}

// ---------------------------------------------------------------------------
// QPT and pulse compilation

TEST(QptExperiment, FifteenPointsAndOrdering) {
  auto r = run_experiment(cfg(R"({"experiment": "qpt", "shots": 0, "trials": 1})"));
  ASSERT_EQ(r.rows.size(), 15u);
  for (std::size_t k = 0; k < r.rows.size(); ++k) {
    if (r.number(k, "theta") <= kPi / 2 + 1e-12) EXPECT_GT(r.number(k, "f_scaled"), r.number(k, "f_double_cnot"));
    EXPECT_EQ(r.number(k, "f_scaled_sd"), 0.0);
  }
}

TEST(QptExperiment, SampledTrialsSpread) {
  auto r = run_experiment(cfg(R"({"experiment": "qpt", "sweep": {"values": [0.5]}})"));
  ASSERT_EQ(r.rows.size(), 1u);
  EXPECT_GT(r.number(0, "f_scaled_sd"), 0.0);
  EXPECT_NEAR(r.number(0, "f_scaled"), 1.0, 0.05);
}

TEST(PulseCompile, ScaledSlicesAreCheaper) {
  auto r = run_experiment(cfg(R"({"experiment": "pulse_compile"})"));
  ASSERT_EQ(r.rows.size(), 18u);
  for (std::size_t k = 0; k < r.rows.size(); ++k) {
    EXPECT_LT(r.number(k, "duration_ratio"), 1.0);
    EXPECT_LT(r.number(k, "cr_area_ratio"), 1.0);
    EXPECT_EQ(static_cast<long>(r.number(k, "basis_duration")) % kDurationQuantum, 0);
    EXPECT_EQ(static_cast<long>(r.number(k, "scaled_duration")) % kDurationQuantum, 0);
  }
  ASSERT_TRUE(r.artifacts.count("schedule_basis.txt"));
  EXPECT_EQ(r.artifacts.at("schedule_scaled.txt").rfind("duration ", 0), 0u);
}

TEST(PulseCompile, SliceParityFollowsThePlan) {
  TriJunctionParams p;
  Circuit whole = trotter_circuit(p, make_plan(p, Flavor::Basis, 0, 6 * p.tau), false);
  Circuit glued(3);
  for (int k = 0; k < 18; ++k) glued.append(trotter_circuit(p, {Flavor::Basis, 1, p.tau / 3, k * p.tau / 3}, false));
  ASSERT_EQ(glued.size(), whole.size());
  for (std::size_t k = 0; k < whole.size(); ++k) {
    EXPECT_EQ(glued.gates[k].kind, whole.gates[k].kind);
    EXPECT_EQ(glued.gates[k].q, whole.gates[k].q);
    EXPECT_NEAR(glued.gates[k].angle, whole.gates[k].angle, 1e-12);
  }
}

}  // namespace
}  // namespace mbsim
