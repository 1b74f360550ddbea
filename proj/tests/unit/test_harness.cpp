#include <gtest/gtest.h>

#include <fstream>

#include "darwinlab/harness.hpp"

using namespace darwinlab;

namespace {

ExperimentConfig small_box(ExperimentConfig c, double length = 16.0, int points = 32) {
  c.grid = {false, length, points};
  c.waive_no_wrap = true;
  return c;
}

ErrorKind kind_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  return ErrorKind::internal_invariant;
}

}  // namespace

TEST(Config, RoundTrip) {
  ExperimentConfig c = two_body_config(0.137);
  c.horizon = 2.5;
  c.particles[1].charge = -0.3;
  c.particles[0].velocity = Vec3(0.1, 1.0 / 3.0, -0.2);
  c.profile = ProfileKind::polynomial_bump;
  c.grid = {false, 48.5, 96};
  c.radiation = RadiationReaction::substituted;
  c.adjustment = Adjustment::unadjusted;
  c.ceilings.max_speed = 3.0;
  c.limits.max_steps = 5000;
  c.output_dir = "out/run";
  EXPECT_EQ(parse_config(serialize_config(c)), c);
  EXPECT_EQ(parse_config(serialize_config(two_body_config(0.1))), two_body_config(0.1));
}

TEST(Config, RejectsUnknownKeysAndBadValues) {
  EXPECT_EQ(kind_of([] { parse_config(R"({"epsilon": 0.1, "particles": [], "colour": 1})"); }), ErrorKind::configuration);
  EXPECT_EQ(kind_of([] { parse_config(R"({"epsilon": -1, "particles": [{"position": [1,0,0]}]})"); }),
            ErrorKind::configuration);
  EXPECT_EQ(kind_of([] { parse_config("{not json"); }), ErrorKind::configuration);
  EXPECT_EQ(kind_of([] { parse_config(R"({"particles": [{"position": [1,0]}]})"); }), ErrorKind::configuration);
  EXPECT_EQ(kind_of([] { parse_config(R"({"particles": [{}], "radiation_reaction": "on"})"); }),
            ErrorKind::configuration);
}

TEST(Config, FileRoundTrip) {
  const auto path = std::filesystem::temp_directory_path() / "darwinlab_config_test.json";
  const ExperimentConfig c = two_body_config(0.25);
  save_config(c, path);
  EXPECT_EQ(load_config(path), c);
  std::filesystem::remove(path);
}

TEST(Setup, ScaledInitialData) {
  const ExperimentSetup s = setup_scaled_experiment(small_box(two_body_config(0.1), 32.0, 32));
  EXPECT_LT((s.particles[0].position - Vec3(5, 0, 0)).norm(), 1e-14);
  EXPECT_LT((s.particles[1].position - Vec3(-5, 0, 0)).norm(), 1e-14);
  EXPECT_NEAR(s.particles[0].velocity.y(), 0.1581, 1e-4);
  EXPECT_NEAR(s.particles[1].velocity.y(), -0.5 * std::sqrt(0.1), 1e-16);
  EXPECT_DOUBLE_EQ(s.c_star, 1.0);
  EXPECT_NEAR(s.slip_time, 44.0, 1e-12);
  EXPECT_NEAR(slip_time(0.1, 1.0, 1.0), 44.0, 1e-12);
  EXPECT_LE(s.field.diagnostics(s.particles).gauss_residual, 1e-10);
  EXPECT_EQ(s.warnings.size(), 1u);
}

TEST(Setup, AutoGridFollowsNoWrapRule) {
  ExperimentConfig c;
  c.epsilon = 0.5;
  c.horizon = 0.5;
  c.particles = {{1.0, 1.0, Vec3::Zero(), Vec3(0.1, 0, 0)}};
  const double length = no_wrap_length(c);
  EXPECT_NEAR(length, 2.0 * (0.5 / std::pow(0.5, 1.5) + 0.0 + 2.0), 1e-12);
  const ExperimentSetup s = setup_scaled_experiment(c);
  EXPECT_DOUBLE_EQ(s.box.length, length);
  EXPECT_EQ(s.box.grid, minimal_grid(length, 1.0));
}

TEST(Setup, InfeasibleAutoGridIsAConfigurationError) {
  ExperimentConfig c = two_body_config(0.1);
  c.horizon = 2.0;
  try {
    setup_scaled_experiment(c);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::configuration);
    EXPECT_NE(std::string(e.what()).find("grid of at least"), std::string::npos);
  }
}

TEST(Setup, ExplicitBoxBelowNoWrapNeedsWaiver) {
  ExperimentConfig c = two_body_config(0.2);
  c.grid = {false, 16.0, 32};
  EXPECT_EQ(kind_of([&] { setup_scaled_experiment(c); }), ErrorKind::configuration);
}

TEST(Setup, ResourceGuard) {
  ExperimentConfig c = small_box(two_body_config(0.2));
  c.limits.max_steps = 10;
  EXPECT_EQ(kind_of([&] { setup_scaled_experiment(c); }), ErrorKind::resource_guard);
  c = small_box(two_body_config(0.2), 16.0, 64);
  c.limits.max_grid = 32;
  EXPECT_EQ(kind_of([&] { setup_scaled_experiment(c); }), ErrorKind::resource_guard);
}

TEST(Fit, ExactPowerLaw) {
  const std::vector<double> eps{0.05, 0.1, 0.2, 0.4};
  std::vector<double> err;
  for (double e : eps) err.push_back(2.0 * e * e);
  const PowerLawFit fit = fit_power_law(eps, err);
  EXPECT_NEAR(fit.slope, 2.0, 1e-12);
  EXPECT_NEAR(std::exp(fit.intercept), 2.0, 1e-12);
  EXPECT_NEAR(fit.ci_low, 2.0, 1e-12);
  EXPECT_NEAR(fit.ci_high, 2.0, 1e-12);
}

TEST(Fit, ConfidenceIntervalCoversNoisySlope) {
  const std::vector<double> x{1, 2, 4, 8, 16};
  const std::vector<double> y{1.0, 2.2, 3.7, 8.5, 15.1};
  const PowerLawFit fit = fit_power_law(x, y);
  EXPECT_LT(fit.ci_low, fit.slope);
  EXPECT_GT(fit.ci_high, fit.slope);
  EXPECT_GT(fit.slope_stderr, 0.0);
  EXPECT_LT(fit.ci_low, 1.0);
  EXPECT_GT(fit.ci_high, 1.0);
}

TEST(Fit, NeedsThreePoints) {
  const std::vector<double> x{0.1, 0.2}, y{1, 2};
  EXPECT_EQ(kind_of([&] { fit_power_law(x, y); }), ErrorKind::invalid_parameter);
  EXPECT_EQ(kind_of([&] { sweep_and_fit(two_body_config(0.1), x, ErrorMetric::position); }),
            ErrorKind::invalid_parameter);
}

TEST(Monitor, StaticPairIsConstant) {
  BoundMonitor m(0.1, {});
  const std::vector<Vec3> q{Vec3(5, 0, 0), Vec3(-5, 0, 0)}, zero(2, Vec3::Zero());
  for (int i = 0; i < 5; ++i) m.observe(i, q, zero, zero);
  for (const MonitorSample& s : m.report().series) EXPECT_DOUBLE_EQ(s.separation, 1.0);
  EXPECT_FALSE(m.report().first_violation);
}

TEST(Monitor, HeadOnCollapseCrossesSeparationFloor) {
  DarwinState s;
  s.position = {Vec3(5, 0, 0), Vec3(-5, 0, 0)};
  s.velocity = {Vec3::Zero(), Vec3::Zero()};
  DarwinSystem sys;
  sys.charge = {1.0, -1.0};
  sys.mass = {1.0, 1.0};
  sys.mass_star = {1.0, 1.0};
  MonitorCeilings ceilings;
  ceilings.min_separation = 0.5;
  BoundMonitor m(0.1, ceilings);
  try {
    for (int i = 0; i < 200; ++i) {
      const auto acc = accelerations_solve(s, sys).acceleration;
      m.observe(s.time, s.position, s.velocity, acc);
      s = step_darwin(s, sys, 0.5);
    }
  } catch (const SentinelError&) {
  }
  ASSERT_TRUE(m.report().first_violation.has_value());
  EXPECT_EQ(m.report().violated, "min_separation");
  EXPECT_GT(*m.report().first_violation, 0.0);
}

TEST(Comparison, SingleChargeTravelsFreelyInBothModels) {
  ExperimentConfig c;
  c.epsilon = 0.2;
  c.horizon = 1.0;
  c.samples = 20;
  c.particles = {{1.0, 1.0, Vec3(0.1, 0, 0), Vec3(0.3, 0.2, 0)}};
  const ComparisonReport r = run_comparison(small_box(c));
  ASSERT_FALSE(r.aborted);
  EXPECT_EQ(r.errors.size(), 20u);
  EXPECT_LT(r.max_position_error, 1e-9);
  EXPECT_LT(r.max_velocity_error, 1e-10);
}

TEST(Comparison, ErrorsVanishAtTheSlipTimeAndRunsAreDeterministic) {
  ExperimentConfig c = small_box(two_body_config(0.25), 24.0, 48);
  c.horizon = 3.0;
  c.samples = 10;
  const ComparisonReport first = run_comparison(c);
  ASSERT_FALSE(first.aborted);
  EXPECT_NEAR(first.errors.front().time, first.slip_time * std::pow(0.25, 1.5), 1e-12);
  EXPECT_EQ(first.errors.front().position, 0.0);
  EXPECT_EQ(first.errors.front().velocity, 0.0);
  EXPECT_GT(first.max_position_error, 0.0);
  EXPECT_LE(first.max_gauss_residual, 1e-10);

  const ComparisonReport second = run_comparison(c);
  ASSERT_EQ(first.errors.size(), second.errors.size());
  for (std::size_t i = 0; i < first.errors.size(); ++i) {
    EXPECT_EQ(first.errors[i].position, second.errors[i].position);
    EXPECT_EQ(first.errors[i].velocity, second.errors[i].velocity);
  }
  EXPECT_EQ(comparison_json(first), comparison_json(second));
}

TEST(Comparison, SentinelAbortStillReportsMonitors) {
  ExperimentConfig c;
  c.epsilon = 0.25;
  c.horizon = 4.0;
  c.samples = 10;
  c.particles = {{1.0, 1.0, Vec3(0.75, 0, 0), Vec3(-1.0, 0, 0)}, {-1.0, 1.0, Vec3(-0.75, 0, 0), Vec3(1.0, 0, 0)}};
  const ComparisonReport r = run_comparison(small_box(c, 24.0, 48));
  EXPECT_TRUE(r.aborted);
  EXPECT_EQ(r.abort_reason.find("collid") != std::string::npos || r.abort_reason.find("overlap") != std::string::npos,
            true);
  EXPECT_FALSE(r.monitors.series.empty());
  EXPECT_GT(r.abort_time, 0.0);
}

TEST(Outputs, CsvAndJsonFiles) {
  ExperimentConfig c = small_box(two_body_config(0.25), 24.0, 48);
  c.horizon = 3.0;
  c.samples = 4;
  c.output_dir = (std::filesystem::temp_directory_path() / "darwinlab_outputs_test").string();
  std::filesystem::remove_all(c.output_dir);
  run_comparison(c);
  for (const char* name : {"abraham_trajectory.csv", "darwin_trajectory.csv", "coulomb_trajectory.csv", "energy.csv",
                           "errors.csv", "monitors.csv", "report.json"})
    EXPECT_TRUE(std::filesystem::exists(std::filesystem::path(c.output_dir) / name)) << name;
  std::ifstream darwin(std::filesystem::path(c.output_dir) / "darwin_trajectory.csv");
  std::string header, first;
  std::getline(darwin, header);
  std::getline(darwin, first);
  EXPECT_EQ(header, "t,alpha,qx,qy,qz,vx,vy,vz,frame");
  EXPECT_NE(first.find(",physical"), std::string::npos);
  std::filesystem::remove_all(c.output_dir);
}

TEST(Simulate, DarwinFramesAgree) {
  ExperimentConfig c = two_body_config(0.1);
  c.samples = 5;
  const DarwinRun physical = simulate_darwin(c, Frame::physical);
  const DarwinRun rescaled = simulate_darwin(c, Frame::rescaled);
  ASSERT_EQ(physical.trajectory.size(), rescaled.trajectory.size());
  for (std::size_t i = 0; i < physical.trajectory.size(); ++i) {
    EXPECT_LT((0.1 * physical.trajectory[i].position - rescaled.trajectory[i].position).norm(), 1e-8);
    EXPECT_NEAR(physical.trajectory[i].time * std::pow(0.1, 1.5), rescaled.trajectory[i].time, 1e-12);
  }
}

TEST(Simulate, AbrahamRecordsEnergyAndMonitors) {
  ExperimentConfig c = small_box(two_body_config(0.25), 24.0, 48);
  c.horizon = 0.5;
  c.samples = 5;
  const AbrahamRun run = simulate_abraham(c);
  EXPECT_EQ(run.trajectory.size(), 10u);
  EXPECT_EQ(run.energy.size(), 5u);
  for (const EnergyRow& e : run.energy) EXPECT_NEAR(e.total, run.energy.front().total, 1e-6 * run.energy.front().total);
  EXPECT_GT(run.monitors.series.size(), 5u);
  EXPECT_NEAR(run.monitors.min_separation, 1.0, 0.05);
}
