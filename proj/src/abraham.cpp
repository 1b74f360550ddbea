#include "darwinlab/abraham.hpp"

namespace darwinlab {

Vec3 lorentz_force(const SpectralField& field, const ParticleSet& particles, std::size_t index) {
  const Particle& p = particles[index];
  const SmearedField s = field.sample(p.position);
  return p.charge * (s.electric + p.velocity.cross(s.magnetic));
}

void boris_kick(Particle& particle, const SmearedField& field, double duration) {
  const double m = particle.bare_mass;
  const double e = particle.charge;
  Vec3 p = momentum_from_velocity(m, particle.velocity);
  p += 0.5 * duration * e * field.electric;
  const double gamma = std::sqrt(1.0 + p.squaredNorm() / (m * m));
  const Vec3 t = 0.5 * duration * e * field.magnetic / (m * gamma);
  const Vec3 s = 2.0 * t / (1.0 + t.squaredNorm());
  const Vec3 half = p + p.cross(t);
  p += half.cross(s);
  p += 0.5 * duration * e * field.electric;
  const Vec3 v = velocity_from_momentum(m, p);
  if (!(v.squaredNorm() < 1.0)) fail(ErrorKind::internal_invariant, "momentum inversion produced |v| >= 1");
  particle.velocity = v;
}

void step_abraham(SpectralField& field, ParticleSet& particles, double dt) {
  require(dt > 0.0, "time step must be positive");
  auto kick = [&] {
    for (std::size_t a = 0; a < particles.size(); ++a) {
      Particle p = particles[a];
      boris_kick(p, field.sample(p.position), 0.5 * dt);
      particles.set_velocity(a, p.velocity);
    }
  };
  kick();
  field.advance(particles, dt);
  for (std::size_t a = 0; a < particles.size(); ++a)
    particles.set_position(a, particles[a].position + dt * particles[a].velocity);
  kick();
}

double total_energy(const SpectralField& field, const ParticleSet& particles) {
  double kinetic = 0.0;
  for (const Particle& p : particles) kinetic += p.bare_mass * lorentz_gamma(p.velocity);
  return kinetic + field.diagnostics(particles).energy;
}

}  // namespace darwinlab
