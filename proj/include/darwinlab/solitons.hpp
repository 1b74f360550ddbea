#pragma once

#include <vector>

#include "darwinlab/kernels.hpp"

namespace darwinlab {

// zeta_v(x) = [(1 - v^2) x^2 + (x.v)^2]^{-1/2}, the far-field shape of a moving soliton potential.
class ZetaPotential {
 public:
  explicit ZetaPotential(const Vec3& velocity);
  double operator()(const Vec3& x) const;

 private:
  Vec3 v_;
};

struct SolitonFields {
  Vec3 electric;
  Vec3 magnetic;
};

// Real-space comoving potential of a charge moving with fixed velocity. In coordinates
// stretched by gamma along v the problem becomes electrostatic for a prolate charge cloud,
// solved by a Legendre multipole expansion on a 2D (radius, polar cosine) quadrature.
class SolitonPotential {
 public:
  SolitonPotential(const FormFactor& ff, double charge, const Vec3& velocity, int max_degree = 40);

  double potential(const Vec3& x) const;
  Vec3 gradient(const Vec3& x) const;
  // E = -grad phi + (v.grad phi) v, B = -v ^ grad phi.
  SolitonFields fields(const Vec3& x) const;

  const Vec3& velocity() const { return v_; }

 private:
  struct Local {
    double value;
    double d_radius;
    double d_cosine;
  };
  Local multipole(double r, double mu) const;
  void project(double radius, std::span<double> out) const;

  FormFactor ff_;
  double charge_;
  Vec3 v_;
  Vec3 axis_;
  double gamma_;
  double support_;  // gamma R along the axis
  int degree_;
  std::vector<double> exterior_moments_;  // int_0^support r^{l+2} rho_l dr / support^l
};

double soliton_potential(const FormFactor& ff, double charge, const Vec3& velocity, const Vec3& x);
SolitonFields soliton_fields(const FormFactor& ff, double charge, const Vec3& velocity, const Vec3& x);

// Direction-only part of the k-space soliton: for source amplitude s(k) (charge density mode)
// the fields are E(k) = -i s electric, B(k) = -i s magnetic.
struct SolitonModeShape {
  Vec3 electric;
  Vec3 magnetic;
};
SolitonModeShape soliton_mode_shape(const Vec3& k, const Vec3& velocity);

// psi(v) = v^{-1} log((1 + v)/(1 - v)) - 1, with psi(0) = 1.
double soliton_energy_factor(double speed);
// Field energy of one soliton: e^2 m_e psi(|v|).
double soliton_self_energy(double m_e, double charge, const Vec3& velocity);

// W(s) = int_0^inf |phi_hat(k)|^2 cos(k s) dk = (4 pi)^{-1} int_{|s|}^{2R} r c(r) dr.
class OverlapProfile {
 public:
  explicit OverlapProfile(const Autocorrelation& ac);
  double operator()(double s) const;
  double support() const { return support_; }

 private:
  double support_;
  PiecewiseChebyshev fit_;
};

// Cross term int (E_a.E_b + B_a.B_b) d^3x of two solitons at separation xi = q_a - q_b.
Estimate<double> soliton_pair_energy(const OverlapProfile& overlap, double charge_a, const Vec3& velocity_a,
                                     double charge_b, const Vec3& velocity_b, const Vec3& separation);

}  // namespace darwinlab
