#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>

#include "oracles/oracles.hpp"
#include "qcar/simulation.hpp"

using namespace qcar;

namespace {

const StateSpace& plant() {
  static const StateSpace ss = assemble_state_space({});
  return ss;
}

const Eigen::RowVector4d& lqr_gain() {
  static const Eigen::RowVector4d K = design_nominal_lqr(ExperimentSetup::reference_defaults()).K;
  return K;
}

double peak_abs(const std::vector<double>& v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

ScenarioSpec step_spec(double dt = 1e-4, double horizon = 3.0) {
  ScenarioSpec s;
  s.dt = dt;
  s.horizon = horizon;
  return s;
}

}  // namespace

TEST(Simulate, FlatRoadStaysAtRest) {
  ScenarioSpec s = step_spec(1e-3);
  s.road.step_amplitude = 0.0;
  for (const Controller& c : {Controller{PassiveController{}},
                              Controller{ExperimentSetup::reference_defaults().pid.make_controller()},
                              Controller{LqrController{lqr_gain()}}}) {
    const Trajectory tr = simulate(plant(), c, s);
    for (std::size_t k = 0; k < tr.size(); ++k) {
      EXPECT_EQ(tr.x[k], StateVector::Zero());
      EXPECT_EQ(tr.f_a[k], 0.0);
      for (Channel ch : kAllChannels) EXPECT_EQ(tr.outputs[k][ch], 0.0);
    }
  }
}

TEST(Simulate, TrajectoryShape) {
  const Trajectory tr = simulate(plant(), PassiveController{}, step_spec(1e-3));
  ASSERT_EQ(tr.size(), 3001u);
  EXPECT_EQ(tr.x.size(), tr.size());
  EXPECT_EQ(tr.f_a.size(), tr.size());
  EXPECT_EQ(tr.z_r.size(), tr.size());
  EXPECT_EQ(tr.outputs.size(), tr.size());
  for (std::size_t k = 1; k < tr.size(); ++k) EXPECT_NEAR(tr.t[k] - tr.t[k - 1], 1e-3, 1e-12);
  EXPECT_EQ(peak_abs(tr.f_a), 0.0);
  EXPECT_EQ(tr.variant, "passive");
  EXPECT_EQ(tr.z_r[999], 0.0);
  EXPECT_EQ(tr.z_r[1000], 0.08);
}

TEST(Simulate, StateJumpAtStep) {
  const Trajectory tr = simulate(plant(), PassiveController{}, step_spec(1e-3));
  EXPECT_EQ(tr.x[999], StateVector::Zero());
  EXPECT_EQ(tr.x[1000], StateVector(0, 0, -0.08, 0));
  // Body has not moved yet at the jump instant.
  EXPECT_NEAR(tr.outputs[1000].sprung_mass_motion, 0.0, 1e-17);
}

TEST(Simulate, PassiveStepMatchesMatrixExponential) {
  const Trajectory tr = simulate(plant(), PassiveController{}, step_spec(1e-4));
  const StateVector jump = plant().road_column() * 0.08;
  double scale = 0.0;
  for (const auto& x : tr.x) scale = std::max(scale, x.cwiseAbs().maxCoeff());
  double worst = 0.0;
  for (std::size_t k = 10000; k < tr.size(); k += 7) {
    const StateVector exact = oracle::expm(plant().A * (tr.t[k] - 1.0)) * jump;
    worst = std::max(worst, (tr.x[k] - exact).cwiseAbs().maxCoeff() / scale);
  }
  EXPECT_LT(worst, 1e-8);
}

TEST(Simulate, LqrEqualsPrecomposedClosedLoop) {
  const ScenarioSpec s = step_spec(1e-4);
  const Trajectory lqr = simulate(plant(), LqrController{lqr_gain()}, s);
  StateSpace closed = plant();
  closed.A = plant().A - plant().force_column() * lqr_gain();
  const Trajectory pre = simulate(closed, PassiveController{}, s);
  for (std::size_t k = 0; k < lqr.size(); ++k) {
    EXPECT_LT((lqr.x[k] - pre.x[k]).cwiseAbs().maxCoeff(), 1e-10);
    EXPECT_NEAR(lqr.f_a[k], -(lqr_gain() * pre.x[k])(0), 1e-10 * (1 + std::abs(lqr.f_a[k])));
  }
}

TEST(Simulate, ZeroGainPidIsPassive) {
  const ScenarioSpec s = step_spec(1e-3);
  const Trajectory passive = simulate(plant(), PassiveController{}, s);
  const Trajectory pid = simulate(plant(), make_dual_loop({}, {}), s);
  for (std::size_t k = 0; k < passive.size(); ++k) {
    EXPECT_EQ(pid.x[k], passive.x[k]);
    EXPECT_EQ(pid.f_a[k], 0.0);
  }
  const Trajectory lqr0 = simulate(plant(), LqrController{}, s);
  for (std::size_t k = 0; k < passive.size(); ++k) EXPECT_EQ(lqr0.x[k], passive.x[k]);
}

TEST(Simulate, UndampedPlantConservesEnergy) {
  SuspensionParams p;
  p.b_s = p.b_us = 0.0;
  const StateSpace ss = assemble_state_space(p);
  ScenarioSpec s = step_spec(1e-4, 1.0);
  s.road.step_time = 0.0;
  const Trajectory tr = simulate(ss, PassiveController{}, s);
  auto energy = [&](const StateVector& x) {
    return 0.5 * (p.m_s * x[1] * x[1] + p.m_us * x[3] * x[3] + p.k_s * x[0] * x[0] + p.k_us * x[2] * x[2]);
  };
  const double e0 = energy(tr.x.front());
  EXPECT_GT(e0, 0.0);
  for (const auto& x : tr.x) EXPECT_NEAR(energy(x), e0, 1e-6 * e0);
}

TEST(Simulate, GridRefinementPassiveAndLqr) {
  for (const Controller& c : {Controller{PassiveController{}}, Controller{LqrController{lqr_gain()}}}) {
    const Trajectory coarse = simulate(plant(), c, step_spec(1e-4));
    const Trajectory fine = simulate(plant(), c, step_spec(5e-5));
    for (Channel ch : kAllChannels) {
      const double a = peak_abs(coarse.channel(ch));
      const double b = peak_abs(fine.channel(ch));
      EXPECT_LT(std::abs(a - b) / b, 1e-4) << coarse.variant << " " << to_string(ch);
    }
  }
}

TEST(Simulate, PidDiscretizationConsistency) {
  const DualLoopPid ctl = ExperimentSetup::reference_defaults().pid.make_controller();
  const Trajectory coarse = simulate(plant(), ctl, step_spec(1e-4));
  const Trajectory fine = simulate(plant(), ctl, step_spec(5e-5));
  for (Channel ch : kAllChannels) {
    const double a = peak_abs(coarse.channel(ch));
    const double b = peak_abs(fine.channel(ch));
    EXPECT_LT(std::abs(a - b) / b, 5e-3) << to_string(ch) << " " << a << " vs " << b;
  }
}

TEST(Simulate, Misalignment) {
  ScenarioSpec s = step_spec(3e-4);
  EXPECT_THROW(simulate(plant(), PassiveController{}, s), std::invalid_argument);
  s = step_spec(1e-3);
  s.horizon = 2.0005;
  EXPECT_THROW(simulate(plant(), PassiveController{}, s), std::invalid_argument);
}

TEST(Simulate, DivergenceReported) {
  const Eigen::RowVector4d K(-1e5, 0, 0, 0);
  try {
    simulate(plant(), LqrController{K}, step_spec(1e-3));
    FAIL() << "expected divergence";
  } catch (const SimulationDiverged& e) {
    EXPECT_GT(e.last_finite_index(), 1000u);
    EXPECT_LT(e.last_finite_index(), 3000u);
    EXPECT_NE(std::string(e.what()).find("lqr"), std::string::npos);
  }
}

TEST(RunMatrix, CardinalityAndLabels) {
  auto scenarios = default_scenarios();
  for (auto& s : scenarios) {
    s.dt = 1e-4;
    s.horizon = 2.0;
  }
  const std::vector<Variant> variants(kAllVariants.begin(), kAllVariants.end());
  const auto trajs = run_matrix(ExperimentSetup::reference_defaults(), scenarios, variants);
  ASSERT_EQ(trajs.size(), 9u);
  for (std::size_t i = 0; i < trajs.size(); ++i) {
    EXPECT_EQ(trajs[i].scenario, scenarios[i / 3].name);
    EXPECT_EQ(trajs[i].variant, to_string(variants[i % 3]));
  }
  // Shared noise realization across variants.
  EXPECT_EQ(trajs[6].z_r, trajs[7].z_r);
  EXPECT_EQ(trajs[7].z_r, trajs[8].z_r);
  EXPECT_NE(trajs[6].z_r, trajs[0].z_r);
}

TEST(RunMatrix, UncertaintyUsesNominalGain) {
  const ExperimentSetup setup = ExperimentSetup::reference_defaults();
  ScenarioSpec s = step_spec(1e-4, 2.0);
  s.name = "uncertainty";
  s.sprung_mass_scale = 1.2;
  const auto trajs = run_matrix(setup, {s}, {Variant::kLqr});
  const StateSpace heavy = assemble_state_space(apply_uncertainty(setup.params, s));
  const Trajectory direct = simulate(heavy, LqrController{lqr_gain()}, s);
  ASSERT_EQ(trajs.size(), 1u);
  for (std::size_t k = 0; k < direct.size(); ++k) EXPECT_EQ(trajs[0].x[k], direct.x[k]);
}

TEST(RunMatrix, ErrorsCarryContext) {
  ScenarioSpec s = step_spec(3e-4);
  s.name = "misaligned";
  try {
    run_matrix(ExperimentSetup::reference_defaults(), {s}, {Variant::kPassive});
    FAIL();
  } catch (const std::runtime_error& e) {
    const std::string msg = e.what();
    EXPECT_NE(msg.find("passive"), std::string::npos);
    EXPECT_NE(msg.find("misaligned"), std::string::npos);
  }
  EXPECT_THROW(run_matrix(ExperimentSetup::reference_defaults(), {}, {Variant::kPassive}), std::invalid_argument);
}

TEST(Variant, Names) {
  for (Variant v : kAllVariants) EXPECT_EQ(variant_from_string(to_string(v)), v);
  EXPECT_THROW(variant_from_string("mpc"), std::invalid_argument);
}
