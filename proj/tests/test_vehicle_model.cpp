#include <gtest/gtest.h>

#include "qcar/vehicle_model.hpp"

using namespace qcar;

TEST(VehicleModel, DefaultsAreReferenceCar) {
  const SuspensionParams p;
  EXPECT_EQ(p.b_s, 1544.0);
  EXPECT_EQ(p.b_us, 0.0);
  EXPECT_EQ(p.k_s, 26000.0);
  EXPECT_EQ(p.k_us, 100000.0);
  EXPECT_EQ(p.m_s, 234.0);
  EXPECT_EQ(p.m_us, 43.0);
  EXPECT_EQ(p, SuspensionParams::reference());
}

TEST(VehicleModel, StiffnessEntries) {
  const StateSpace ss = assemble_state_space({});
  EXPECT_NEAR(ss.A(1, 0), -26000.0 / 234.0, 1e-9 * 111.1111);
  EXPECT_NEAR(ss.A(3, 2), -100000.0 / 43.0, 1e-9 * 2325.5814);
  EXPECT_NEAR(ss.A(1, 0), -111.1111, 1e-4);
  EXPECT_NEAR(ss.A(3, 2), -2325.5814, 1e-4);
}

TEST(VehicleModel, FullMatricesFromHandDerivation) {
  const SuspensionParams p;
  const StateSpace ss = assemble_state_space(p);
  Eigen::Matrix4d A;
  A << 0, 1, 0, -1,
      -p.k_s / p.m_s, -p.b_s / p.m_s, 0, p.b_s / p.m_s,
      0, 0, 0, 1,
      p.k_s / p.m_us, p.b_s / p.m_us, -p.k_us / p.m_us, -(p.b_s + p.b_us) / p.m_us;
  EXPECT_TRUE(ss.A.isApprox(A, 1e-15));

  Eigen::Matrix<double, 4, 2> B;
  B << 0, 0,
      0, 1 / p.m_s,
      -1, 0,
      p.b_us / p.m_us, -1 / p.m_us;
  EXPECT_TRUE(ss.B.isApprox(B, 1e-15));
  EXPECT_EQ(ss.road_column(), B.col(0));
  EXPECT_EQ(ss.force_column(), B.col(1));

  // travel, acceleration (row 2 of A plus F/m_s), relative motion x1 + x3
  EXPECT_EQ(ss.C.row(0), Eigen::RowVector4d(1, 0, 0, 0));
  EXPECT_TRUE(ss.C.row(1).isApprox(A.row(1), 1e-15));
  EXPECT_EQ(ss.C.row(2), Eigen::RowVector4d(1, 0, 1, 0));
  EXPECT_EQ(ss.D(1, 1), 1 / p.m_s);
  EXPECT_EQ(ss.D(0, 0), 0.0);
  EXPECT_EQ(ss.D(2, 1), 0.0);
}

TEST(VehicleModel, DecoupledLimit) {
  SuspensionParams p{0, 0, 0, 0, 1, 1};
  const StateSpace ss = assemble_state_space(p);
  Eigen::Matrix4d A;
  A << 0, 1, 0, -1, 0, 0, 0, 0, 0, 0, 0, 1, 0, 0, 0, 0;
  EXPECT_EQ(ss.A, A);
}

TEST(VehicleModel, ValidationRejectsNonPhysical) {
  SuspensionParams p;
  p.m_s = 0;
  EXPECT_THROW(p.validate(), std::invalid_argument);
  EXPECT_THROW(assemble_state_space(p), std::invalid_argument);
  p = {};
  p.k_us = -1;
  EXPECT_THROW(p.validate(), std::invalid_argument);
  p = {};
  p.b_s = std::nan("");
  EXPECT_THROW(p.validate(), std::invalid_argument);
  p = {};
  p.m_us = -43;
  try {
    p.validate();
    FAIL();
  } catch (const std::invalid_argument& e) {
    EXPECT_NE(std::string(e.what()).find("m_us"), std::string::npos);
  }
}

TEST(VehicleModel, Outputs) {
  const StateSpace ss = assemble_state_space({});
  const auto zero = evaluate_outputs(ss, StateVector::Zero(), Eigen::Vector2d::Zero(), 0.0);
  EXPECT_EQ(zero.suspension_travel, 0.0);
  EXPECT_EQ(zero.sprung_mass_acceleration, 0.0);
  EXPECT_EQ(zero.sprung_mass_motion, 0.0);

  const auto travel = evaluate_outputs(ss, StateVector(0.01, 0, 0, 0), Eigen::Vector2d::Zero(), 0.0);
  EXPECT_NEAR(travel.sprung_mass_acceleration, -26000.0 * 0.01 / 234.0, 1e-12);
  EXPECT_NEAR(travel.sprung_mass_acceleration, -1.1111, 1e-4);
  EXPECT_EQ(travel[Channel::kSuspensionTravel], 0.01);

  const auto motion = evaluate_outputs(ss, StateVector(0.02, 0, 0.03, 0), Eigen::Vector2d::Zero(), 0.08);
  EXPECT_NEAR(motion.sprung_mass_motion, 0.13, 1e-15);
  EXPECT_EQ(motion[Channel::kSprungMassMotion], motion.sprung_mass_motion);

  const auto force = evaluate_outputs(ss, StateVector::Zero(), Eigen::Vector2d(0, 234.0), 0.0);
  EXPECT_NEAR(force.sprung_mass_acceleration, 1.0, 1e-15);
}

TEST(VehicleModel, ChannelNamesRoundTrip) {
  for (Channel c : kAllChannels) EXPECT_EQ(channel_from_string(to_string(c)), c);
  EXPECT_THROW(channel_from_string("wheel_hop"), std::invalid_argument);
}

// Static equilibrium: with the road raised by h, x = 0 is an equilibrium
// because all states are relative displacements or velocities.
TEST(VehicleModel, RelativeStatesMakeRaisedRoadAnEquilibrium) {
  const StateSpace ss = assemble_state_space({});
  EXPECT_TRUE((ss.A * StateVector::Zero()).isZero());
  const auto y = evaluate_outputs(ss, StateVector::Zero(), Eigen::Vector2d::Zero(), 0.08);
  EXPECT_EQ(y.sprung_mass_motion, 0.08);
  EXPECT_EQ(y.suspension_travel, 0.0);
}
