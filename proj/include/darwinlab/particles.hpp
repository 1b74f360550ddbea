#pragma once

#include <cstddef>
#include <vector>

#include "darwinlab/vec.hpp"

namespace darwinlab {

struct Particle {
  double charge = 0.0;
  double bare_mass = 1.0;
  Vec3 position = Vec3::Zero();
  Vec3 velocity = Vec3::Zero();
};

// Charges with |v| < 1 enforced on every mutation.
class ParticleSet {
 public:
  ParticleSet() = default;
  explicit ParticleSet(std::vector<Particle> particles);

  std::size_t size() const { return particles_.size(); }
  bool empty() const { return particles_.empty(); }
  const Particle& operator[](std::size_t i) const { return particles_[i]; }
  const std::vector<Particle>& all() const { return particles_; }

  void add(const Particle& p);
  void set_position(std::size_t i, const Vec3& q) { particles_[i].position = q; }
  void set_velocity(std::size_t i, const Vec3& v);

  auto begin() const { return particles_.begin(); }
  auto end() const { return particles_.end(); }

 private:
  static void check(const Particle& p);
  std::vector<Particle> particles_;
};

inline double lorentz_gamma(const Vec3& v) { return 1.0 / std::sqrt(1.0 - v.squaredNorm()); }

// p = m gamma v and its inverse v = p / sqrt(m^2 + p^2).
inline Vec3 momentum_from_velocity(double mass, const Vec3& v) { return mass * lorentz_gamma(v) * v; }
inline Vec3 velocity_from_momentum(double mass, const Vec3& p) {
  return p / std::sqrt(mass * mass + p.squaredNorm());
}

}  // namespace darwinlab
