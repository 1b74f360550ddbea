#include "darwinlab/particles.hpp"

#include <string>

#include "darwinlab/error.hpp"

namespace darwinlab {

ParticleSet::ParticleSet(std::vector<Particle> particles) : particles_(std::move(particles)) {
  for (const auto& p : particles_) check(p);
}

void ParticleSet::add(const Particle& p) {
  check(p);
  particles_.push_back(p);
}

void ParticleSet::set_velocity(std::size_t i, const Vec3& v) {
  if (!(v.squaredNorm() < 1.0))
    fail(ErrorKind::internal_invariant, "particle " + std::to_string(i) + " reached |v| >= 1");
  particles_[i].velocity = v;
}

void ParticleSet::check(const Particle& p) {
  require(p.bare_mass > 0.0, "particle bare mass must be positive");
  require(p.position.allFinite() && p.velocity.allFinite(), "particle state must be finite");
  require(p.velocity.squaredNorm() < 1.0, "particle speed must be below 1");
}

}  // namespace darwinlab
