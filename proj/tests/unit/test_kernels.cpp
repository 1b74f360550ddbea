#include <gtest/gtest.h>

#include "darwinlab/kernels.hpp"

using namespace darwinlab;

namespace {

const Autocorrelation& shared_autocorrelation() {
  static const Autocorrelation ac(build_form_factor(1.0));
  return ac;
}

// Point-limit assembly of the mutual force from derivatives of 1/r and r (independent of the closed form).
Vec3 point_limit_assembly(const Vec3& xi, const Vec3& va, const Vec3& vb, const Vec3& ab) {
  const double r = xi.norm();
  const Vec3 n = xi / r;
  const double k = 1.0 / four_pi;
  const Vec3 grad_A0 = -k * n / (r * r);
  const double B1 = -k / r;
  const double vb_grad_B1 = k * vb.dot(n) / (r * r);
  const Mat3 hess_r = (Mat3::Identity() - n * n.transpose()) / r;
  const double vn = vb.dot(n);
  const Vec3 third_r = -(2.0 * vn * vb + vb.squaredNorm() * n - 3.0 * vn * vn * n) / (r * r);
  const double va_grad_A0 = va.dot(grad_A0);
  return -vb * vb_grad_B1 + ab * B1 - grad_A0 + 0.5 * k * hess_r * ab - 0.5 * k * third_r +
         va.dot(vb) * grad_A0 - vb * va_grad_A0;
}

ScaledTrajectory::Shape first_shape() {
  ScaledTrajectory::Shape s;
  s.r0 = Vec3(0.5, 0.0, 0.0);
  s.u0 = Vec3(0.1, 0.5, 0.0);
  s.amplitude = Vec3(0.05, 0.1, 0.03);
  s.frequency = 2.0;
  s.phase = 0.3;
  return s;
}

ScaledTrajectory::Shape second_shape() {
  ScaledTrajectory::Shape s;
  s.r0 = Vec3(-0.5, 0.1, 0.0);
  s.u0 = Vec3(-0.2, -0.4, 0.1);
  s.amplitude = Vec3(-0.1, 0.05, 0.08);
  s.frequency = 1.5;
  s.phase = 1.1;
  return s;
}

}  // namespace

TEST(Autocorrelation, NormalizedAndSupported) {
  const auto& ac = shared_autocorrelation();
  const double total = integrate_composite([&](double s) { return 4.0 * pi * s * s * ac.value(s); }, 0.0, 2.0, 64, 16);
  EXPECT_NEAR(total, 1.0, 1e-10);
  EXPECT_EQ(ac.value(2.0), 0.0);
  EXPECT_EQ(ac.value(3.5), 0.0);
  EXPECT_EQ(ac.odd_slope(2.5), 0.0);
}

TEST(Autocorrelation, ValueAtZeroIsSquareIntegral) {
  const auto& ac = shared_autocorrelation();
  const auto& ff = ac.form_factor();
  const double sq = 4.0 * pi * integrate_composite([&](double r) { return r * r * ff.profile(r) * ff.profile(r); }, 0.0, 1.0, 128, 16);
  EXPECT_NEAR(ac.value(0.0), sq, 1e-12 * sq);
}

TEST(Autocorrelation, FitMatchesDirectQuadrature) {
  const auto& ac = shared_autocorrelation();
  const double scale = ac.value(0.0);
  for (double s : {0.013, 0.21, 0.5, 0.99, 1.01, 1.37, 1.8, 1.97}) {
    EXPECT_NEAR(ac.value(s), ac.direct(s), 1e-12 * scale) << s;
    const double h = 1e-5;
    EXPECT_NEAR(ac.slope(s), (ac.direct(s + h) - ac.direct(s - h)) / (2 * h), 1e-8 * scale) << s;
  }
}

TEST(Autocorrelation, ParsevalWithElectromagneticMass) {
  const auto& ac = shared_autocorrelation();
  const double from_c = integrate_composite([&](double s) { return 0.5 * s * ac.value(s); }, 0.0, 2.0, 64, 16);
  EXPECT_NEAR(from_c / electromagnetic_mass(ac.form_factor()).value, 1.0, 1e-6);
}

TEST(Kernels, A1IsConstant) {
  const auto& ac = shared_autocorrelation();
  for (double d : {0.0, 0.7, 3.0, 11.0, 50.0}) {
    const auto a = kernel_A(ac, {1, Vec3(d, 0.0, 0.0)});
    EXPECT_NEAR(a.value * four_pi, 1.0, 1e-10) << d;
  }
}

TEST(Kernels, PointLimitsOutsideSupport) {
  const auto& ac = shared_autocorrelation();
  const double second = 2.0 * ac.form_factor().second_moment();  // int c(z) z^2 d^3z
  for (double d : {2.5, 5.0, 20.0}) {
    const Vec3 xi(0.0, d, 0.0);
    // Shell theorem: A_0 is exactly Coulombic once the smeared charges do not overlap.
    EXPECT_NEAR(kernel_A(ac, {0, xi}).value * four_pi * d, 1.0, 1e-11);
    EXPECT_NEAR(kernel_A(ac, {2, xi}).value * four_pi, d + second / (3.0 * d), 1e-11 * d);
    const double a2_rel = std::abs(kernel_A(ac, {2, xi}).value * four_pi / d - 1.0);
    EXPECT_LT(a2_rel, 1.0 / (d * d));
  }
}

TEST(Kernels, BIdentities) {
  const auto& ac = shared_autocorrelation();
  const Vec3 xi(3.0, 1.0, -2.0);
  EXPECT_EQ(kernel_B(ac, {0, xi}).value, 0.0);
  EXPECT_DOUBLE_EQ(kernel_B(ac, {1, xi}).value, -kernel_A(ac, {0, xi}).value);
  EXPECT_DOUBLE_EQ(kernel_B(ac, {3, xi}).value, -3.0 * kernel_A(ac, {2, xi}).value);
  EXPECT_THROW(kernel_A(ac, {4, xi}), Error);
}

TEST(Kernels, GradientSymmetry) {
  const auto& ac = shared_autocorrelation();
  const auto plus = grad_A0_residual(ac, Vec3(10.0, 0.0, 0.0));
  const auto minus = grad_A0_residual(ac, Vec3(-10.0, 0.0, 0.0));
  const double g = plus.gradient.norm();
  EXPECT_LT(std::abs(plus.gradient.y()) + std::abs(plus.gradient.z()), 1e-14 * g);
  EXPECT_LT(std::abs(plus.residual.y()) + std::abs(plus.residual.z()), 1e-14 * g);
  EXPECT_LT((plus.gradient + minus.gradient).norm(), 1e-14 * g);
  EXPECT_NEAR(plus.gradient.x(), -1.0 / (four_pi * 100.0), 1e-12 * g);
  EXPECT_THROW(grad_A0_residual(ac, Vec3(1.0, 0.0, 0.0)), Error);
}

TEST(ClosedForms, MutualForceTermSelection) {
  const Vec3 xi(2.0, 0.0, 0.0);
  const Vec3 zero = Vec3::Zero();
  const Vec3 coulomb = xi / (four_pi * 8.0);
  EXPECT_LT((mutual_force_closed(xi, zero, zero, zero) - coulomb).norm(), 1e-17);
  const Vec3 vb(0.0, 0.3, 0.1);
  const Vec3 expected = coulomb + vb.squaredNorm() * xi / (8.0 * pi * 8.0);
  EXPECT_LT((mutual_force_closed(xi, zero, vb, zero) - expected).norm(), 1e-17);
  EXPECT_THROW(mutual_force_closed(zero, zero, zero, zero), Error);
}

TEST(ClosedForms, MutualForceMatchesPointLimitAssembly) {
  const Vec3 xi(3.1, -1.2, 0.7), va(0.11, -0.05, 0.2), vb(-0.13, 0.07, 0.09), ab(0.01, 0.02, -0.015);
  const Vec3 closed = mutual_force_closed(xi, va, vb, ab);
  const Vec3 assembled = point_limit_assembly(xi, va, vb, ab);
  EXPECT_LT((closed - assembled).norm(), 1e-15 * closed.norm());
}

TEST(ClosedForms, CoulombOrderIsAntisymmetric) {
  const Vec3 xi(1.0, 2.0, -0.5), zero = Vec3::Zero();
  EXPECT_LT((mutual_force_closed(xi, zero, zero, zero) + mutual_force_closed(-xi, zero, zero, zero)).norm(), 1e-18);
}

TEST(ClosedForms, SelfForce) {
  const double me = 0.5;
  const Vec3 a(0.0, 0.02, 0.0);
  EXPECT_LT((self_force_closed(Vec3::Zero(), a, me) + 4.0 / 3.0 * me * a).norm(), 1e-17);
  const Vec3 v_perp(0.1, 0.0, 0.0);
  const Vec3 f_perp = self_force_closed(v_perp, a, me);
  EXPECT_EQ(f_perp.x(), 0.0);
  EXPECT_NEAR(f_perp.y(), -(4.0 / 3.0 + 8.0 * 0.01 / 15.0) * me * a.y(), 1e-17);
  const Vec3 v_par(0.0, 0.1, 0.0);
  EXPECT_NEAR(self_force_closed(v_par, a, me).y(), -(4.0 / 3.0 + 0.016) * me * a.y(), 1e-17);
}

TEST(Trajectories, ScaledDerivativesAndDisplacement) {
  const double eps = 0.05;
  ScaledTrajectory traj(first_shape(), eps);
  const double t = 40.0, h = 1e-3;
  const Vec3 v_fd = (traj.position(t + h) - traj.position(t - h)) / (2 * h);
  EXPECT_LT((v_fd - traj.velocity(t)).norm(), 1e-8 * traj.velocity(t).norm());
  const Vec3 a_fd = (traj.velocity(t + h) - traj.velocity(t - h)) / (2 * h);
  EXPECT_LT((a_fd - traj.acceleration(t)).norm(), 1e-7 * traj.acceleration(t).norm());
  const Vec3 j_fd = (traj.acceleration(t + h) - traj.acceleration(t - h)) / (2 * h);
  EXPECT_LT((j_fd - traj.jerk(t)).norm(), 1e-6 * traj.jerk(t).norm());
  for (double tau : {0.0, 1e-6, 0.5, 30.0}) {
    const Vec3 direct = traj.position(t) - traj.position(t - tau);
    EXPECT_LT((traj.displacement(t, tau) - direct).norm(), 1e-12 * (1.0 + direct.norm())) << tau;
  }
  EXPECT_NEAR(traj.velocity(0.0).norm() / std::sqrt(eps), (first_shape().u0 + first_shape().amplitude * 2.0 * std::cos(0.3)).norm(), 1e-14);
}

TEST(Trajectories, SampledReproducesCubic) {
  auto q = [](double s) { return Vec3(1.0 + 0.5 * s - 0.1 * s * s * s, 2.0 * s * s, -s); };
  auto v = [](double s) { return Vec3(0.5 - 0.3 * s * s, 4.0 * s, -1.0); };
  std::vector<double> ts{0.0, 0.7, 1.5, 3.0};
  std::vector<Vec3> qs, vs;
  for (double s : ts) {
    qs.push_back(q(s));
    vs.push_back(v(s));
  }
  SampledTrajectory traj(ts, qs, vs);
  for (double s : {0.1, 0.7, 1.2, 2.9}) {
    EXPECT_LT((traj.position(s) - q(s)).norm(), 1e-13);
    EXPECT_LT((traj.velocity(s) - v(s)).norm(), 1e-12);
    EXPECT_LT((traj.acceleration(s) - Vec3(-0.6 * s, 4.0, 0.0)).norm(), 1e-11);
    EXPECT_LT((traj.jerk(s) - Vec3(-0.6, 0.0, 0.0)).norm(), 1e-10);
  }
  EXPECT_THROW(SampledTrajectory({0.0}, {Vec3::Zero()}, {Vec3::Zero()}), Error);
}

TEST(RetardedForce, StaticPairIsCoulomb) {
  const auto& ac = shared_autocorrelation();
  ScaledTrajectory::Shape a, b;
  a.r0 = Vec3(0.5, 0.2, 0.0);
  b.r0 = Vec3(-0.5, 0.0, 0.1);
  ScaledTrajectory ta(a, 0.1), tb(b, 0.1);
  const Vec3 xi = ta.position(0.0) - tb.position(0.0);
  const double t = 4.0 * (1.0 + xi.norm());
  const auto f = retarded_force_direct(ac, ta, tb, false, t);
  const Vec3 coulomb = xi / (four_pi * std::pow(xi.norm(), 3));
  EXPECT_LT((f.value - coulomb).norm(), 1e-10 * coulomb.norm());
}

TEST(RetardedForce, WindowNotYetReachedGivesZero) {
  const auto& ac = shared_autocorrelation();
  ScaledTrajectory::Shape a, b;
  a.r0 = Vec3(1.0, 0.0, 0.0);
  ScaledTrajectory ta(a, 0.1), tb(b, 0.1);
  EXPECT_EQ(retarded_force_direct(ac, ta, tb, false, 5.0).value.norm(), 0.0);
}

TEST(RetardedForce, FreeSolitonHasNoSelfForce) {
  const auto& ac = shared_autocorrelation();
  const double me = electromagnetic_mass(ac.form_factor()).value;
  for (const Vec3& u : {Vec3(0.3, 0.2, 0.0), Vec3(0.0, 0.0, 1.5)}) {
    ScaledTrajectory::Shape s;
    s.u0 = u;
    ScaledTrajectory traj(s, 0.1);
    const auto f = retarded_force_direct(ac, traj, traj, true, 30.0);
    EXPECT_LT(f.value.norm(), 1e-12 * me * traj.velocity(30.0).norm());
  }
}

TEST(RetardedForce, SelfForceRenormalizesMass) {
  const auto& ac = shared_autocorrelation();
  const double me = electromagnetic_mass(ac.form_factor()).value;
  ScaledTrajectory::Shape s;
  s.a0 = Vec3(0.0, 1.0, 0.0);
  const double eps = 0.02;
  ScaledTrajectory traj(s, eps);
  const double t = 1.0 / std::pow(eps, 1.5);
  const auto f = retarded_force_direct(ac, traj, traj, true, t);
  const Vec3 closed = self_force_closed(traj.velocity(t), traj.acceleration(t), me);
  EXPECT_LT((f.value - closed).norm(), 1e-2 * closed.norm());
}

TEST(RetardedForce, MutualResidualIsRadiationReaction) {
  const auto& ac = shared_autocorrelation();
  const double eps = 0.02;
  ScaledTrajectory ta(first_shape(), eps), tb(second_shape(), eps);
  const double t = 2.0 / std::pow(eps, 1.5);
  const auto f = retarded_force_direct(ac, ta, tb, false, t);
  const Vec3 closed = mutual_force_closed(ta.position(t) - tb.position(t), ta.velocity(t), tb.velocity(t), tb.acceleration(t));
  const Vec3 residual = f.value - closed;
  EXPECT_LT(residual.norm(), 1e-2 * f.value.norm());
  // The leading remainder is the mutual radiation-reaction term jerk / (6 pi).
  EXPECT_LT((residual - tb.jerk(t) / (6.0 * pi)).norm(), 0.2 * residual.norm());
}
