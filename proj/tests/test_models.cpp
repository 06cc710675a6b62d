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

#include "mbsim/models.hpp"
#include "oracles.hpp"

namespace mbsim {
namespace {

void expect_same_spectrum(const Mat& a, const Mat& b, double tol) {
  auto ea = oracle::sorted_eigenvalues(a), eb = oracle::sorted_eigenvalues(b);
  ASSERT_EQ(ea.size(), eb.size());
  for (std::size_t k = 0; k < ea.size(); ++k) EXPECT_NEAR(ea[k], eb[k], tol) << k;
}

TEST(Schedule, Endpoints) {
  CouplingSchedule s = CouplingSchedule::of(TriJunctionParams::table());
  Couplings a = schedule_eval(s, 0.0), b = s(s.tau / 2), c = s(3 * s.tau);
  EXPECT_EQ(a, (Couplings{1, 0, 0}));
  EXPECT_NEAR(b[0], 0.5, 1e-15);
  EXPECT_NEAR(b[1], 0.5, 1e-15);
  EXPECT_EQ(b[2], 0.0);
  EXPECT_NEAR(c[0], 1.0, 1e-12);
  EXPECT_NEAR(c[1] + c[2], 0.0, 1e-12);
}

TEST(Schedule, StepBoundariesHaveOneActiveCoupling) {
  CouplingSchedule s{1.0, 2.0, 6};
  for (int k = 0; k <= 6; ++k) {
    Couplings j = s(k * s.tau);
    int on = 0;
    for (double x : j) {
      EXPECT_TRUE(std::abs(x) < 1e-12 || std::abs(x - 1.0) < 1e-12);
      on += std::abs(x - 1.0) < 1e-12;
    }
    EXPECT_EQ(on, 1) << k;
  }
  EXPECT_EQ(s(s.tau * 1.0)[1], 1.0);
  EXPECT_EQ(s(s.tau * 2.0)[2], 1.0);
}

TEST(Schedule, OutsideWindowThrows) {
  CouplingSchedule s{1.0, 3.3, 6};
  EXPECT_THROW(s(-0.1), ValidationError);
  EXPECT_THROW(s(6 * 3.3 + 0.1), ValidationError);
}

TEST(Schedule, LipschitzContinuous) {
  CouplingSchedule s{1.0, 3.3, 6};
  const double eps = 1e-3;
  for (double t = 0; t + eps <= s.duration(); t += 0.0371) {
    Couplings a = s(t), b = s(t + eps);
    for (int k = 0; k < 3; ++k) {
      EXPECT_LE(std::abs(a[k] - b[k]), s.j_max / s.tau * eps + 1e-12);
      EXPECT_GE(a[k], 0.0);
      EXPECT_LE(a[k], s.j_max);
    }
  }
}

TEST(QubitHamiltonian, CommutingZSpectrum) {
  auto ev = oracle::sorted_eigenvalues(pauli_to_dense(build_qubit_hamiltonian(TriJunctionParams::uniform(1.0), {0, 0, 0}), 3));
  std::vector<double> want{-3, -1, -1, -1, 1, 1, 1, 3};
  for (int k = 0; k < 8; ++k) EXPECT_NEAR(ev[k], want[k], 1e-12);
}

TEST(QubitHamiltonian, MatchesFermionForm) {
  TriJunctionParams p = TriJunctionParams::table();
  expect_same_spectrum(pauli_to_dense(build_qubit_hamiltonian(p, {1, 0, 0}), 3), build_fermion_hamiltonian(p, {1, 0, 0}),
                       1e-10);
}

TEST(QubitHamiltonian, LowGapPositive) {
  auto ev = oracle::sorted_eigenvalues(pauli_to_dense(build_qubit_hamiltonian(TriJunctionParams::table(), {1, 0, 0}), 3));
  EXPECT_GT(ev[1] - ev[0], 1e-6);
  // alpha = 3: ground -3 - sqrt(37), first excited -4.
  EXPECT_NEAR(ev[0], -3 - std::sqrt(37.0), 1e-12);
  EXPECT_NEAR(ev[1], -4.0, 1e-12);
}

TEST(QubitHamiltonian, LowGapSmallForWeakArmCoupling) {
  auto ev = oracle::sorted_eigenvalues(pauli_to_dense(build_qubit_hamiltonian(TriJunctionParams(), {1, 0, 0}), 3));
  const double low = ev[1] - ev[0], next = ev[2] - ev[1];
  EXPECT_NEAR(low, std::sqrt(1.16) - 1.0, 1e-12);
  EXPECT_GT(low, 0.0);
  EXPECT_LT(low, 0.3 * next);
}

TEST(QubitHamiltonian, HermitianAndParityEven) {
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> u(-2, 2);
  Mat par = pauli_to_dense(total_parity(), 3);
  for (int rep = 0; rep < 10; ++rep) {
    TriJunctionParams p;
    p.alpha = {u(rng), u(rng), u(rng)};
    Couplings j{u(rng), u(rng), u(rng)};
    PauliSum h = build_qubit_hamiltonian(p, j);
    EXPECT_TRUE(h.is_hermitian());
    Mat d = pauli_to_dense(h, 3);
    EXPECT_LT((d * par - par * d).cwiseAbs().maxCoeff(), 1e-12);
    EXPECT_TRUE(build_rotated_hamiltonian(p, j).is_hermitian());
    Mat f = build_fermion_hamiltonian(p, j);
    EXPECT_LT((f - f.adjoint()).cwiseAbs().maxCoeff(), 1e-12);
  }
}

TEST(Majorana, Anticommutation) {
  Majoranas m = majorana_operators();
  std::vector<Mat> g;
  for (int a = 0; a < 3; ++a) g.push_back(m.gx[a]), g.push_back(m.gy[a]);
  for (std::size_t r = 0; r < g.size(); ++r)
    for (std::size_t s = 0; s < g.size(); ++s) {
      Mat ac = g[r] * g[s] + g[s] * g[r];
      Mat want = r == s ? Mat(2.0 * Mat::Identity(8, 8)) : Mat(Mat::Zero(8, 8));
      EXPECT_LT((ac - want).cwiseAbs().maxCoeff(), 1e-12) << r << "," << s;
    }
  for (int a = 0; a < 3; ++a) EXPECT_LT((m.gx[a] * m.gx[a] - Mat::Identity(8, 8)).norm(), 1e-12);
}

TEST(ThreeForms, SpectraAgreeOnRandomDraws) {
  std::mt19937_64 rng(77);
  std::uniform_real_distribution<double> u(-3, 3);
  for (int rep = 0; rep < 20; ++rep) {
    TriJunctionParams p;
    p.alpha = {u(rng), u(rng), u(rng)};
    Couplings j{u(rng), u(rng), u(rng)};
    Mat q = pauli_to_dense(build_qubit_hamiltonian(p, j), 3);
    expect_same_spectrum(q, build_fermion_hamiltonian(p, j), 1e-10);
    expect_same_spectrum(q, pauli_to_dense(build_rotated_hamiltonian(p, j), 3), 1e-10);
  }
}

TEST(Rotated, WeightAtMostTwo) {
  PauliSum h = build_rotated_hamiltonian(TriJunctionParams::table(), {0.3, 0.5, 0.7});
  for (auto& t : h.terms) EXPECT_LE(t.weight(), 2);
}

TEST(Rotated, IsDenseConjugation) {
  std::mt19937_64 rng(12);
  std::uniform_real_distribution<double> u(-2, 2);
  Mat U = pauli_to_dense(rotation_generator(), 3);
  EXPECT_TRUE(is_unitary(U));
  EXPECT_LT((U - U.adjoint()).norm(), 1e-14);
  for (int rep = 0; rep < 5; ++rep) {
    TriJunctionParams p;
    p.alpha = {u(rng), u(rng), u(rng)};
    Couplings j{u(rng), u(rng), u(rng)};
    Mat want = U * pauli_to_dense(build_qubit_hamiltonian(p, j), 3) * U.adjoint();
    EXPECT_LT((pauli_to_dense(build_rotated_hamiltonian(p, j), 3) - want).cwiseAbs().maxCoeff(), 1e-10);
    EXPECT_LT((pauli_to_dense(conjugate_by_rotation(build_qubit_hamiltonian(p, j)), 3) - want).cwiseAbs().maxCoeff(),
              1e-10);
  }
}

TEST(Params, Validation) {
  TriJunctionParams p;
  p.tau = 0;
  EXPECT_THROW(p.validate(), ValidationError);
  p = TriJunctionParams();
  p.trotter_steps_per_swap = 0;
  EXPECT_THROW(p.validate(), ValidationError);
  p = TriJunctionParams();
  p.j_max = -1;
  EXPECT_THROW(build_qubit_hamiltonian(p, {0, 0, 0}), ValidationError);
}

// Fermionic chain assembled from Majorana string operators with the
// auxiliary Pauli of each arm, independent of build_chain_hamiltonian.
Mat chain_fermion_oracle(const ChainModelParams& c) {
  const int n = c.register_size(), L = c.arm_length;
  auto gamma = [&](int a, int i, char last) {
    std::map<int, char> f{{0, "XYZ"[a]}};
    for (int k = 0; k < i; ++k) f[c.qubit(a, k)] = 'Z';
    f[c.qubit(a, i)] = last;
    return oracle::embed(n, f);
  };
  const cplx I(0, 1);
  const std::int64_t dim = std::int64_t{1} << n;
  Mat h = Mat::Zero(dim, dim);
  for (int a = 0; a < 3; ++a) {
    for (int i = 0; i < L; ++i) h += I * c.mu * gamma(a, i, 'Y') * gamma(a, i, 'X');
    for (int i = 0; i + 1 < L; ++i) h += I * c.delta * gamma(a, i, 'Y') * gamma(a, i + 1, 'X');
  }
  const int pairs[3][2] = {{0, 1}, {1, 2}, {2, 0}};
  for (int k = 0; k < 3; ++k) {
    auto [a, b] = pairs[k];
    const int cc = 3 - a - b;
    const double eps = (a + 1) % 3 == b ? 1.0 : -1.0;  // Levi-Civita of (a, b, cc)
    (void)cc;
    h += 0.5 * I * c.j[k] * eps * gamma(a, 0, 'X') * gamma(b, 0, 'X');
    h += 0.5 * I * c.j[k] * -eps * gamma(b, 0, 'X') * gamma(a, 0, 'X');
  }
  return h;
}

TEST(Chain, DecoupledBondsGroundEnergy) {
  ChainModelParams c;
  c.arm_length = 2;
  c.j = {0, 0, 0};
  auto ev = oracle::sorted_eigenvalues(pauli_to_dense(build_chain_hamiltonian(c), c.register_size()));
  EXPECT_NEAR(ev.front(), -3.0, 1e-12);
}

TEST(Chain, MatchesFermionOracle) {
  ChainModelParams c;
  c.arm_length = 2;
  c.j = {1, 0, 0};
  expect_same_spectrum(pauli_to_dense(build_chain_hamiltonian(c), 7), chain_fermion_oracle(c), 1e-9);
  std::mt19937_64 rng(31);
  std::uniform_real_distribution<double> u(-1.5, 1.5);
  for (int rep = 0; rep < 5; ++rep) {
    c.mu = u(rng);
    c.delta = u(rng);
    c.j = {u(rng), u(rng), u(rng)};
    expect_same_spectrum(pauli_to_dense(build_chain_hamiltonian(c), 7), chain_fermion_oracle(c), 1e-9);
  }
}

TEST(Chain, RegisterSizeAndCapacity) {
  ChainModelParams c;
  EXPECT_EQ(c.register_size(), 10);
  PauliSum h = build_chain_hamiltonian(c);
  EXPECT_TRUE(h.is_hermitian());
  EXPECT_LE(h.max_qubit(), 9);
  c.arm_length = 4;
  EXPECT_THROW(build_chain_hamiltonian(c), CapacityError);
  c.arm_length = 0;
  EXPECT_THROW(build_chain_hamiltonian(c), ValidationError);
}

}  // namespace
}  // namespace mbsim
