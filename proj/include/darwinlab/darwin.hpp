#pragma once

#include <Eigen/Dense>
#include <limits>
#include <span>
#include <vector>

#include "darwinlab/formfactor.hpp"
#include "darwinlab/radreact.hpp"

namespace darwinlab {

enum class Frame { physical, rescaled };

const char* to_string(Frame frame) noexcept;

// Phase point of the effective dynamics. In the rescaled frame r = eps q, u = v / sqrt(eps) and
// time runs eps^{3/2} faster than physical time.
struct DarwinState {
  Frame frame = Frame::physical;
  double epsilon = 1.0;
  double time = 0.0;
  std::vector<Vec3> position;
  std::vector<Vec3> velocity;

  std::size_t size() const { return position.size(); }
};

// Charges and renormalized masses driving the effective dynamics.
struct DarwinSystem {
  std::vector<double> charge;
  std::vector<double> mass;
  std::vector<double> mass_star;
  bool coulomb_only = false;
  RadiationReaction radiation = RadiationReaction::off;

  std::size_t size() const { return charge.size(); }
};

DarwinSystem make_darwin_system(const ParticleSet& particles, const MassConstants& masses);

// Integrator controls. Distances are in the units of the state's frame.
struct DarwinOptions {
  double tolerance = 1e-10;  // local error per unit time
  double collision_distance = 2.0;
  double escape_radius = std::numeric_limits<double>::infinity();
  int max_halvings = 40;
};

// Strength of the velocity-dependent corrections: 1 physical, eps rescaled, 0 for Coulomb-only runs.
double correction_weight(const DarwinState& state, const DarwinSystem& system);

// Interparticle force of the effective dynamics for given trial accelerations.
std::vector<Vec3> darwin_force_G(const DarwinState& state, std::span<const Vec3> accelerations,
                                 const DarwinSystem& system);

struct MassMatrix {
  Mat3 matrix;
  Mat3 inverse;
};

// M z = (m + w m* v^2 / 2) z + w m* (v.z) v, with the rank-one closed-form inverse.
MassMatrix mass_matrix_M(const Vec3& velocity, double mass, double mass_star, double weight = 1.0);

// The acceleration-linear system [M_a delta_ab - L_ab] vdot = g.
struct DarwinSystemMatrices {
  Eigen::MatrixXd matrix;
  Eigen::VectorXd rhs;
};

DarwinSystemMatrices assemble_darwin_system(const DarwinState& state, const DarwinSystem& system);

struct AccelerationSolution {
  std::vector<Vec3> acceleration;
  double relative_residual = 0.0;  // |M vdot - G(vdot)| / |G(vdot)|
};

AccelerationSolution accelerations_solve(const DarwinState& state, const DarwinSystem& system);

// Advances by dt with classical RK4, halving the substep until the step-doubling error estimate
// meets options.tolerance per unit time. Throws SentinelError on collision or escape.
DarwinState step_darwin(const DarwinState& state, const DarwinSystem& system, double dt,
                        const DarwinOptions& options = {});

// Conserved energy of the effective dynamics, including the velocity-dependent pair term.
double darwin_energy(const DarwinState& state, const DarwinSystem& system);

// Total canonical momentum sum_a dL/du_a.
Vec3 darwin_momentum(const DarwinState& state, const DarwinSystem& system);

// Converts between the physical frame and the rescaled frame of parameter epsilon.
DarwinState rescale_map(const DarwinState& state, double epsilon, Frame target);

double min_separation(std::span<const Vec3> positions);

}  // namespace darwinlab
