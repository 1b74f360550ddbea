#pragma once

#include "darwinlab/maxwell.hpp"

namespace darwinlab {

// Smeared Lorentz force e (E + v ^ B) averaged over the charge profile of particle `index`.
Vec3 lorentz_force(const SpectralField& field, const ParticleSet& particles, std::size_t index);

// Relativistic Boris update of the momentum m_b gamma v over `duration` in fixed smeared fields.
void boris_kick(Particle& particle, const SmearedField& field, double duration);

// Strang step: half kick, exact field drift with straight-line sources, half kick.
void step_abraham(SpectralField& field, ParticleSet& particles, double dt);

// H = sum m_b gamma + H_F.
double total_energy(const SpectralField& field, const ParticleSet& particles);

}  // namespace darwinlab
