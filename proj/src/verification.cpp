#include "darwinlab/verification.hpp"

#include <nlohmann/json.hpp>

#include "darwinlab/solitons.hpp"

namespace darwinlab {

namespace {

using nlohmann::json;

ScaledTrajectory::Shape leading_shape() {
  ScaledTrajectory::Shape s;
  s.r0 = Vec3(0.5, 0.0, 0.0);
  s.u0 = Vec3(0.1, 0.5, 0.0);
  s.amplitude = Vec3(0.05, 0.1, 0.03);
  s.frequency = 2.0;
  s.phase = 0.3;
  return s;
}

ScaledTrajectory::Shape trailing_shape() {
  ScaledTrajectory::Shape s;
  s.r0 = Vec3(-0.5, 0.1, 0.0);
  s.u0 = Vec3(-0.2, -0.4, 0.1);
  s.amplitude = Vec3(-0.1, 0.05, 0.08);
  s.frequency = 1.5;
  s.phase = 1.1;
  return s;
}

ScaledTrajectory::Shape accelerated_shape() {
  ScaledTrajectory::Shape s;
  s.u0 = Vec3(0.6, 0.2, 0.0);
  s.a0 = Vec3(-0.5, 0.7, 0.1);
  return s;
}

constexpr double window_start = 1.5;
constexpr double window_end = 3.0;
constexpr int window_points = 7;

template <class Residual>
double window_sup(double eps, Residual&& residual) {
  double sup = 0.0;
  for (int i = 0; i < window_points; ++i) {
    const double rescaled = window_start + (window_end - window_start) * i / (window_points - 1);
    sup = std::max(sup, residual(rescaled / std::pow(eps, 1.5)));
  }
  return sup;
}

json sweep_json(const ForceSweep& s) {
  return {{"epsilons", s.epsilons},
          {"residuals", s.residuals},
          {"slope", s.fit.slope},
          {"ci_low", s.fit.ci_low},
          {"ci_high", s.fit.ci_high}};
}

}  // namespace

KernelReport verify_kernels(const Autocorrelation& ac, std::span<const double> a1_separations,
                            std::span<const double> gradient_separations) {
  KernelReport r;
  const Vec3 direction = Vec3(1.0, 2.0, -0.5).normalized();
  for (double d : a1_separations) {
    const double a1 = kernel_A(ac, {1, d * direction}).value;
    r.a1_separations.push_back(d);
    r.a1_relative_errors.push_back(std::abs(a1 * four_pi - 1.0));
  }
  bool positive = true;
  std::vector<double> inverse;
  for (double d : gradient_separations) {
    const GradientResidual g = grad_A0_residual(ac, Vec3(d, 0.0, 0.0));
    r.gradient_separations.push_back(d);
    r.gradient_residuals.push_back(g.residual.norm());
    r.max_transverse_residual = std::max(r.max_transverse_residual, g.residual.tail<2>().norm());
    inverse.push_back(1.0 / d);
    positive = positive && g.residual.norm() > 0.0;
  }
  if (positive && gradient_separations.size() >= 3) r.gradient_fit = fit_power_law(inverse, r.gradient_residuals);
  return r;
}

ForceReport verify_forces(const Autocorrelation& ac, std::span<const double> epsilons) {
  const double me = electromagnetic_mass(ac.form_factor()).value;
  ForceReport r;
  for (double eps : epsilons) {
    const ScaledTrajectory a(leading_shape(), eps), b(trailing_shape(), eps), accelerated(accelerated_shape(), eps);
    const double mutual = window_sup(eps, [&](double t) {
      const Vec3 direct = retarded_force_direct(ac, a, b, false, t).value;
      const Vec3 closed =
          mutual_force_closed(a.position(t) - b.position(t), a.velocity(t), b.velocity(t), b.acceleration(t));
      return (direct - closed).norm();
    });
    const double self = window_sup(eps, [&](double t) {
      const Vec3 direct = retarded_force_direct(ac, accelerated, accelerated, true, t).value;
      return (direct - self_force_closed(accelerated.velocity(t), accelerated.acceleration(t), me)).norm();
    });
    r.mutual.epsilons.push_back(eps);
    r.mutual.residuals.push_back(mutual);
    r.self.epsilons.push_back(eps);
    r.self.residuals.push_back(self);
  }
  if (epsilons.size() >= 3) {
    r.mutual.fit = fit_power_law(r.mutual.epsilons, r.mutual.residuals);
    r.self.fit = fit_power_law(r.self.epsilons, r.self.residuals);
  }
  for (const Vec3& u : {Vec3(0.3, 0.2, 0.0), Vec3(0.0, 0.0, 1.5), Vec3(-0.9, 0.4, 0.7)}) {
    ScaledTrajectory::Shape s;
    s.u0 = u;
    const ScaledTrajectory free(s, 0.1);
    const double t = 30.0;
    const Vec3 f = retarded_force_direct(ac, free, free, true, t).value;
    r.free_self_force = std::max(r.free_self_force, f.norm() / (me * free.velocity(t).norm()));
  }
  return r;
}

EnergyBalance soliton_energy_balance(const FormFactor& ff, double epsilon, double box_factor, int grid) {
  const ExperimentConfig seed = two_body_config(epsilon);
  std::vector<Particle> both;
  for (const SeedParticle& p : seed.particles)
    both.push_back({p.charge, p.bare_mass, p.position / epsilon, std::sqrt(epsilon) * p.velocity});
  const BoxSpec box{box_factor / epsilon, grid};

  EnergyBalance out;
  out.epsilon = epsilon;
  const ParticleSet pair(both);
  out.field_energy = init_field_from_solitons(ff, pair, box).diagnostics(pair).energy;
  for (const Particle& p : both) {
    const ParticleSet alone({p});
    out.self_energy += init_field_from_solitons(ff, alone, box).diagnostics(alone).energy;
  }
  out.gap = out.field_energy - out.self_energy;
  const OverlapProfile overlap{Autocorrelation(ff)};
  out.continuum_pair = soliton_pair_energy(overlap, both[0].charge, both[0].velocity, both[1].charge, both[1].velocity,
                                           both[0].position - both[1].position)
                           .value;
  return out;
}

std::string kernel_report_json(const KernelReport& r) {
  json j{{"a1_separations", r.a1_separations},
         {"a1_relative_errors", r.a1_relative_errors},
         {"gradient_separations", r.gradient_separations},
         {"gradient_residuals", r.gradient_residuals},
         {"max_transverse_residual", r.max_transverse_residual}};
  j["gradient_slope"] = r.gradient_fit ? json(r.gradient_fit->slope) : json(nullptr);
  return j.dump(2);
}

std::string force_report_json(const ForceReport& r) {
  return json{{"mutual", sweep_json(r.mutual)}, {"self", sweep_json(r.self)}, {"free_self_force", r.free_self_force}}
      .dump(2);
}

}  // namespace darwinlab
