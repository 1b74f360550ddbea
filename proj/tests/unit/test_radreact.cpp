#include <gtest/gtest.h>

#include "darwinlab/darwin.hpp"
#include "darwinlab/radreact.hpp"

using namespace darwinlab;

TEST(RadiationRaw, ZeroJerksGiveZero) {
  const std::vector<double> charges{1.0, -2.0, 0.5};
  const std::vector<Vec3> jerks(3, Vec3::Zero());
  for (const Vec3& f : rr_force_raw(charges, jerks)) EXPECT_EQ(f, Vec3::Zero());
}

TEST(RadiationRaw, SingleChargeSubstitution) {
  const std::vector<double> charges{1.0};
  const std::vector<Vec3> jerks{Vec3(0.7, 0, 0)};
  EXPECT_LT((rr_force_raw(charges, jerks)[0] - Vec3(0.7, 0, 0) / (6.0 * pi)).norm(), 1e-17);
}

TEST(RadiationRaw, NeutralPairWithEqualJerksCancels) {
  const std::vector<double> charges{1.3, -1.3};
  const std::vector<Vec3> jerks{Vec3(0.2, -0.1, 0.4), Vec3(0.2, -0.1, 0.4)};
  for (const Vec3& f : rr_force_raw(charges, jerks)) EXPECT_EQ(f.norm(), 0.0);
}

TEST(RadiationSubstituted, EqualChargeToMassRatiosCancelExactly) {
  const std::vector<Vec3> q{Vec3(0, 0, 0), Vec3(3, 1, 0), Vec3(-1, 2, 2), Vec3(0.5, -2, 1)};
  const std::vector<Vec3> u{Vec3(0.1, 0, 0), Vec3(0, -0.2, 0.1), Vec3(0.05, 0.05, 0.05), Vec3(-0.1, 0, 0.2)};
  const std::vector<double> charges{0.3, 0.6, -1.2, 0.15};
  const std::vector<double> masses{0.7, 1.4, -2.8, 0.35};
  for (const Vec3& f : rr_force_substituted(q, u, charges, masses)) EXPECT_LE(f.norm(), 1e-14);
}

TEST(RadiationSubstituted, SingleParticleIsZero) {
  const std::vector<Vec3> q{Vec3(1, 2, 3)}, u{Vec3(0.3, 0, 0)};
  const std::vector<double> e{1.0}, m{1.0};
  EXPECT_EQ(rr_force_substituted(q, u, e, m)[0], Vec3::Zero());
}

TEST(RadiationSubstituted, TransverseRelativeVelocity) {
  const std::vector<Vec3> q{Vec3::Zero(), Vec3(2, 0, 0)};
  const std::vector<Vec3> u{Vec3(0, 0.1, 0), Vec3(0, -0.1, 0.05)};
  const std::vector<double> e{1.0, 2.0}, m{1.0, 1.0};
  const auto f = rr_force_substituted(q, u, e, m);
  // With n perpendicular to u1 - u2 only the first bracket term survives.
  const double ratio_gap = 1.0 / 1.0 - 2.0 / 1.0;
  const double coefficient = ratio_gap * (1.0 * 2.0) / (4.0 * pi * 8.0);
  const Vec3 rel = u[0] - u[1];
  EXPECT_LT((f[0] - 1.0 / (6.0 * pi) * coefficient * rel).norm(), 1e-18);
  EXPECT_LT((f[1] - 2.0 / (6.0 * pi) * coefficient * rel).norm(), 1e-18);
}

TEST(RadiationSubstituted, ScalesAsEpsilonToThreeHalvesRelativeToCoulomb) {
  // Physical two-body configurations built from fixed scaled data r = +-0.5 x, u = (0, +-0.5, 0.1).
  std::vector<double> log_eps, log_ratio;
  for (double eps : {0.02, 0.05, 0.1, 0.2}) {
    const std::vector<Vec3> q{Vec3(0.5 / eps, 0, 0), Vec3(-0.5 / eps, 0, 0)};
    const std::vector<Vec3> u{std::sqrt(eps) * Vec3(0, 0.5, 0.1), std::sqrt(eps) * Vec3(0, -0.5, 0)};
    const std::vector<double> e{1.0, -1.0}, m{1.0, 2.0};
    const double rr = rr_force_substituted(q, u, e, m)[0].norm();
    const double coulomb = 1.0 / (4.0 * pi * (q[0] - q[1]).squaredNorm());
    log_eps.push_back(std::log(eps));
    log_ratio.push_back(std::log(rr / coulomb));
  }
  for (std::size_t i = 1; i < log_eps.size(); ++i)
    EXPECT_NEAR((log_ratio[i] - log_ratio[0]) / (log_eps[i] - log_eps[0]), 1.5, 1e-10);
}

TEST(RadiationInDarwin, SubstitutedModeAddsTheCorrection) {
  DarwinState s;
  s.position = {Vec3(3, 0, 0), Vec3(-3, 0, 0)};
  s.velocity = {Vec3(0, 0.1, 0), Vec3(0, -0.1, 0.02)};
  DarwinSystem sys;
  sys.charge = {1.0, -1.0};
  sys.mass = {1.0, 3.0};
  sys.mass_star = {1.0, 3.0};
  const auto plain = accelerations_solve(s, sys).acceleration;
  sys.radiation = RadiationReaction::substituted;
  const auto damped = accelerations_solve(s, sys).acceleration;
  const auto rr = rr_force_substituted(s.position, s.velocity, sys.charge, sys.mass);
  // The correction is tiny, so the coupling between accelerations only perturbs it at relative O(1/(4 pi d m)).
  for (std::size_t a = 0; a < 2; ++a) {
    const Vec3 expected = mass_matrix_M(s.velocity[a], sys.mass[a], sys.mass_star[a]).inverse * rr[a];
    EXPECT_LT(((damped[a] - plain[a]) - expected).norm(), 0.05 * expected.norm()) << a;
  }
}

TEST(RadiationInDarwin, RawModeAgreesWithSubstitutedForCoulombJerks) {
  DarwinState s;
  s.position = {Vec3(4, 0, 0), Vec3(-4, 0, 0)};
  s.velocity = {Vec3(0, 0.05, 0), Vec3(0, -0.05, 0.01)};
  DarwinSystem sys;
  sys.charge = {1.0, -1.0};
  sys.mass = {1.0, 3.0};
  sys.mass_star = {1.0, 3.0};
  sys.coulomb_only = true;
  const auto plain = accelerations_solve(s, sys).acceleration;
  sys.radiation = RadiationReaction::raw;
  const auto raw = accelerations_solve(s, sys).acceleration;
  sys.radiation = RadiationReaction::substituted;
  const auto substituted = accelerations_solve(s, sys).acceleration;
  for (std::size_t a = 0; a < 2; ++a)
    EXPECT_LT(((raw[a] - plain[a]) - (substituted[a] - plain[a])).norm(), 1e-6 * (substituted[a] - plain[a]).norm());
}

TEST(RadiationMode, ParsesNames) {
  EXPECT_EQ(parse_radiation_reaction("raw"), RadiationReaction::raw);
  EXPECT_EQ(to_string(parse_radiation_reaction("substituted")), "substituted");
  EXPECT_THROW(parse_radiation_reaction("on"), Error);
}
