#include "darwinlab/darwin.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace darwinlab {

namespace {

// Step used to difference the acceleration along the flow when the raw radiation term needs jerks.
constexpr double jerk_step = 1e-3;

struct Pair {
  Vec3 sep;  // position of the first minus position of the second
  double dist;
};

Pair pair_geometry(const DarwinState& state, std::size_t a, std::size_t b) {
  const Vec3 sep = state.position[a] - state.position[b];
  const double dist = sep.norm();
  if (!(dist > 0.0))
    fail(ErrorKind::singularity, "particles " + std::to_string(a) + " and " + std::to_string(b) + " coincide");
  return {sep, dist};
}

void check_shapes(const DarwinState& state, const DarwinSystem& system) {
  require(state.velocity.size() == state.size(), "state has mismatched position and velocity counts");
  require(system.size() == state.size() && system.mass.size() == state.size() &&
              system.mass_star.size() == state.size(),
          "system parameters do not match the number of particles");
}

double radiation_weight(const DarwinState& state) {
  return state.frame == Frame::rescaled ? std::pow(state.epsilon, 1.5) : 1.0;
}

// The acceleration-independent part of G plus any additive force.
Eigen::VectorXd free_term(const DarwinState& state, const DarwinSystem& system, std::span<const Vec3> extra) {
  const std::vector<Vec3> zero(state.size(), Vec3::Zero());
  const std::vector<Vec3> g = darwin_force_G(state, zero, system);
  Eigen::VectorXd rhs(3 * state.size());
  for (std::size_t a = 0; a < state.size(); ++a) rhs.segment<3>(3 * a) = g[a] + (extra.empty() ? Vec3::Zero() : extra[a]);
  return rhs;
}

AccelerationSolution solve_with(const DarwinState& state, const DarwinSystem& system, std::span<const Vec3> extra) {
  const std::size_t n = state.size();
  DarwinSystemMatrices sys = assemble_darwin_system(state, system);
  sys.rhs = free_term(state, system, extra);

  const Eigen::PartialPivLU<Eigen::MatrixXd> lu(sys.matrix);
  const double rcond = n == 0 ? 1.0 : lu.rcond();
  if (!(rcond > 1e-14))
    fail(ErrorKind::numerical, "acceleration system is singular (reciprocal condition " + std::to_string(rcond) + ")");
  const Eigen::VectorXd x = lu.solve(sys.rhs);

  AccelerationSolution out;
  out.acceleration.resize(n);
  for (std::size_t a = 0; a < n; ++a) out.acceleration[a] = x.segment<3>(3 * a);

  // Residual against an independent evaluation of G at the solved accelerations.
  const std::vector<Vec3> g = darwin_force_G(state, out.acceleration, system);
  const double w = correction_weight(state, system);
  double mismatch = 0.0, scale = 0.0;
  for (std::size_t a = 0; a < n; ++a) {
    const MassMatrix m = mass_matrix_M(state.velocity[a], system.mass[a], system.mass_star[a], w);
    const Vec3 force = g[a] + (extra.empty() ? Vec3::Zero() : extra[a]);
    mismatch = std::max(mismatch, (m.matrix * out.acceleration[a] - force).norm());
    scale = std::max(scale, force.norm());
  }
  out.relative_residual = scale > 0.0 ? mismatch / scale : mismatch;
  if (!std::isfinite(out.relative_residual) || out.relative_residual > 1e-9)
    fail(ErrorKind::numerical, "acceleration solve residual " + std::to_string(out.relative_residual) + " too large");
  return out;
}

struct Phase {
  std::vector<Vec3> position;
  std::vector<Vec3> velocity;
};

Phase derivative(const DarwinState& at, const DarwinSystem& system) {
  return {at.velocity, accelerations_solve(at, system).acceleration};
}

DarwinState displaced(const DarwinState& base, const Phase& slope, double h) {
  DarwinState out = base;
  for (std::size_t a = 0; a < base.size(); ++a) {
    out.position[a] += h * slope.position[a];
    out.velocity[a] += h * slope.velocity[a];
  }
  return out;
}

DarwinState rk4(const DarwinState& y, const DarwinSystem& system, double h) {
  const Phase k1 = derivative(y, system);
  const Phase k2 = derivative(displaced(y, k1, 0.5 * h), system);
  const Phase k3 = derivative(displaced(y, k2, 0.5 * h), system);
  const Phase k4 = derivative(displaced(y, k3, h), system);
  DarwinState out = y;
  for (std::size_t a = 0; a < y.size(); ++a) {
    out.position[a] += h / 6.0 * (k1.position[a] + 2.0 * k2.position[a] + 2.0 * k3.position[a] + k4.position[a]);
    out.velocity[a] += h / 6.0 * (k1.velocity[a] + 2.0 * k2.velocity[a] + 2.0 * k3.velocity[a] + k4.velocity[a]);
  }
  out.time = y.time + h;
  return out;
}

double phase_distance(const DarwinState& x, const DarwinState& y) {
  double d = 0.0;
  for (std::size_t a = 0; a < x.size(); ++a) {
    d = std::max(d, (x.position[a] - y.position[a]).lpNorm<Eigen::Infinity>());
    d = std::max(d, (x.velocity[a] - y.velocity[a]).lpNorm<Eigen::Infinity>());
  }
  return d;
}

void check_sentinels(const DarwinState& state, const DarwinOptions& options) {
  for (std::size_t a = 0; a < state.size(); ++a) {
    for (std::size_t b = a + 1; b < state.size(); ++b) {
      const double d = (state.position[a] - state.position[b]).norm();
      if (d < options.collision_distance)
        throw SentinelError(ErrorKind::collision, state.time,
                            "particles " + std::to_string(a) + " and " + std::to_string(b) + " collided at t = " +
                                std::to_string(state.time) + " (separation " + std::to_string(d) + ")");
    }
    if (state.position[a].norm() > options.escape_radius)
      throw SentinelError(ErrorKind::escape, state.time,
                          "particle " + std::to_string(a) + " escaped the bounding ball at t = " + std::to_string(state.time));
    if (state.frame == Frame::physical && !(state.velocity[a].squaredNorm() < 1.0))
      fail(ErrorKind::numerical, "particle " + std::to_string(a) + " reached the speed of light");
  }
}

}  // namespace

const char* to_string(Frame frame) noexcept { return frame == Frame::physical ? "physical" : "rescaled"; }

DarwinSystem make_darwin_system(const ParticleSet& particles, const MassConstants& masses) {
  require(masses.mass.size() == particles.size(), "mass constants do not match the particle set");
  DarwinSystem sys;
  for (const Particle& p : particles) sys.charge.push_back(p.charge);
  sys.mass = masses.mass;
  sys.mass_star = masses.mass_star;
  return sys;
}

double correction_weight(const DarwinState& state, const DarwinSystem& system) {
  if (system.coulomb_only) return 0.0;
  return state.frame == Frame::rescaled ? state.epsilon : 1.0;
}

std::vector<Vec3> darwin_force_G(const DarwinState& state, std::span<const Vec3> accelerations,
                                 const DarwinSystem& system) {
  check_shapes(state, system);
  require(accelerations.size() == state.size(), "one acceleration per particle required");
  const double w = correction_weight(state, system);
  std::vector<Vec3> force(state.size(), Vec3::Zero());
  for (std::size_t a = 0; a < state.size(); ++a) {
    const Vec3& va = state.velocity[a];
    for (std::size_t b = 0; b < state.size(); ++b) {
      if (b == a) continue;
      const auto [xi, r] = pair_geometry(state, a, b);
      const Vec3& vb = state.velocity[b];
      const Vec3& ab = accelerations[b];
      const double r3 = r * r * r;
      const double vb_xi = vb.dot(xi);
      Vec3 term = xi / r3;
      if (w != 0.0) {
        const Vec3 correction = -ab / (2.0 * r) - ab.dot(xi) / (2.0 * r3) * xi + vb.squaredNorm() / (2.0 * r3) * xi -
                                3.0 * vb_xi * vb_xi / (2.0 * r3 * r * r) * xi - va.dot(vb) / r3 * xi +
                                va.dot(xi) / r3 * vb;
        term += w * correction;
      }
      force[a] += system.charge[a] * system.charge[b] / four_pi * term;
    }
  }
  return force;
}

MassMatrix mass_matrix_M(const Vec3& velocity, double mass, double mass_star, double weight) {
  const double v2 = velocity.squaredNorm();
  const double diag = mass + 0.5 * weight * mass_star * v2;
  const double rank_one = weight * mass_star;
  const Mat3 outer = velocity * velocity.transpose();
  MassMatrix m;
  m.matrix = diag * Mat3::Identity() + rank_one * outer;
  m.inverse = Mat3::Identity() / diag - rank_one / (diag * (diag + rank_one * v2)) * outer;
  return m;
}

DarwinSystemMatrices assemble_darwin_system(const DarwinState& state, const DarwinSystem& system) {
  check_shapes(state, system);
  const std::size_t n = state.size();
  const double w = correction_weight(state, system);
  DarwinSystemMatrices sys;
  sys.matrix = Eigen::MatrixXd::Zero(3 * n, 3 * n);
  for (std::size_t a = 0; a < n; ++a) {
    sys.matrix.block<3, 3>(3 * a, 3 * a) = mass_matrix_M(state.velocity[a], system.mass[a], system.mass_star[a], w).matrix;
    for (std::size_t b = 0; b < n; ++b) {
      if (b == a) continue;
      const auto [xi, r] = pair_geometry(state, a, b);
      const double coupling = w * system.charge[a] * system.charge[b] / four_pi;
      sys.matrix.block<3, 3>(3 * a, 3 * b) =
          coupling * (Mat3::Identity() / (2.0 * r) + xi * xi.transpose() / (2.0 * r * r * r));
    }
  }
  sys.rhs = free_term(state, system, {});
  return sys;
}

AccelerationSolution accelerations_solve(const DarwinState& state, const DarwinSystem& system) {
  const std::size_t n = state.size();
  switch (system.radiation) {
    case RadiationReaction::off: return solve_with(state, system, {});
    case RadiationReaction::substituted: {
      std::vector<Vec3> rr = rr_force_substituted(state.position, state.velocity, system.charge, system.mass);
      for (Vec3& f : rr) f *= radiation_weight(state);
      return solve_with(state, system, rr);
    }
    case RadiationReaction::raw: {
      // Jerks by central differencing the radiation-free acceleration along the local flow.
      const std::vector<Vec3> acc = solve_with(state, system, {}).acceleration;
      DarwinState ahead = state, behind = state;
      for (std::size_t a = 0; a < n; ++a) {
        ahead.position[a] += jerk_step * state.velocity[a];
        ahead.velocity[a] += jerk_step * acc[a];
        behind.position[a] -= jerk_step * state.velocity[a];
        behind.velocity[a] -= jerk_step * acc[a];
      }
      const std::vector<Vec3> acc_ahead = solve_with(ahead, system, {}).acceleration;
      const std::vector<Vec3> acc_behind = solve_with(behind, system, {}).acceleration;
      std::vector<Vec3> jerk(n);
      for (std::size_t a = 0; a < n; ++a) jerk[a] = (acc_ahead[a] - acc_behind[a]) / (2.0 * jerk_step);
      std::vector<Vec3> rr = rr_force_raw(system.charge, jerk);
      for (Vec3& f : rr) f *= radiation_weight(state);
      return solve_with(state, system, rr);
    }
  }
  return solve_with(state, system, {});
}

DarwinState step_darwin(const DarwinState& state, const DarwinSystem& system, double dt, const DarwinOptions& options) {
  require(dt > 0.0, "time step must be positive");
  require(options.tolerance > 0.0, "integrator tolerance must be positive");
  check_shapes(state, system);
  check_sentinels(state, options);

  const double end = state.time + dt;
  DarwinState y = state;
  double h = dt;
  while (end - y.time > 1e-12 * dt) {
    h = std::min(h, end - y.time);
    int halvings = 0;
    for (;;) {
      const DarwinState full = rk4(y, system, h);
      const DarwinState half = rk4(rk4(y, system, 0.5 * h), system, 0.5 * h);
      const double error = phase_distance(full, half) / 15.0;
      if (error <= options.tolerance * h) {
        y = half;
        if (error < options.tolerance * h / 64.0) h *= 2.0;
        break;
      }
      if (++halvings > options.max_halvings)
        fail(ErrorKind::numerical, "step size underflow at t = " + std::to_string(y.time) + " (error estimate " +
                                       std::to_string(error) + ")");
      h *= 0.5;
    }
    check_sentinels(y, options);
  }
  y.time = end;
  return y;
}

double darwin_energy(const DarwinState& state, const DarwinSystem& system) {
  check_shapes(state, system);
  const double w = correction_weight(state, system);
  double energy = 0.0;
  for (std::size_t a = 0; a < state.size(); ++a) {
    const double u2 = state.velocity[a].squaredNorm();
    energy += 0.5 * system.mass[a] * u2 + 0.375 * w * system.mass_star[a] * u2 * u2;
    for (std::size_t b = 0; b < state.size(); ++b) {
      if (b == a) continue;
      const auto [sep, r] = pair_geometry(state, a, b);
      const Vec3 n = sep / r;
      const Vec3& ua = state.velocity[a];
      const Vec3& ub = state.velocity[b];
      const double coulomb = system.charge[a] * system.charge[b] / (four_pi * r);
      energy += 0.5 * coulomb + 0.25 * w * coulomb * (ua.dot(ub) + ua.dot(n) * ub.dot(n));
    }
  }
  return energy;
}

Vec3 darwin_momentum(const DarwinState& state, const DarwinSystem& system) {
  check_shapes(state, system);
  const double w = correction_weight(state, system);
  Vec3 total = Vec3::Zero();
  for (std::size_t a = 0; a < state.size(); ++a) {
    const Vec3& ua = state.velocity[a];
    total += system.mass[a] * ua + 0.5 * w * system.mass_star[a] * ua.squaredNorm() * ua;
    for (std::size_t b = 0; b < state.size(); ++b) {
      if (b == a) continue;
      const auto [sep, r] = pair_geometry(state, a, b);
      const Vec3 n = sep / r;
      const Vec3& ub = state.velocity[b];
      total += 0.5 * w * system.charge[a] * system.charge[b] / (four_pi * r) * (ub + n.dot(ub) * n);
    }
  }
  return total;
}

DarwinState rescale_map(const DarwinState& state, double epsilon, Frame target) {
  require(epsilon > 0.0, "epsilon must be positive");
  if (state.frame == target) {
    require(target == Frame::physical || state.epsilon == epsilon, "state is rescaled with a different epsilon");
    return state;
  }
  DarwinState out = state;
  out.frame = target;
  if (target == Frame::rescaled) {
    const double speed_scale = 1.0 / std::sqrt(epsilon);
    out.epsilon = epsilon;
    out.time = state.time * epsilon * std::sqrt(epsilon);
    for (std::size_t a = 0; a < state.size(); ++a) {
      out.position[a] = epsilon * state.position[a];
      out.velocity[a] = speed_scale * state.velocity[a];
    }
  } else {
    require(state.epsilon == epsilon, "state is rescaled with a different epsilon");
    const double speed_scale = std::sqrt(epsilon);
    out.epsilon = 1.0;
    out.time = state.time / (epsilon * std::sqrt(epsilon));
    for (std::size_t a = 0; a < state.size(); ++a) {
      out.position[a] = state.position[a] / epsilon;
      out.velocity[a] = speed_scale * state.velocity[a];
    }
  }
  return out;
}

double min_separation(std::span<const Vec3> positions) {
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t a = 0; a < positions.size(); ++a)
    for (std::size_t b = a + 1; b < positions.size(); ++b) best = std::min(best, (positions[a] - positions[b]).norm());
  return best;
}

}  // namespace darwinlab
