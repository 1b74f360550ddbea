#pragma once

#include <memory>
#include <vector>

#include "darwinlab/formfactor.hpp"
#include "darwinlab/quadrature.hpp"

namespace darwinlab {

// Radial autocorrelation c(s) = int phi(x) phi(x + z) d^3x with |z| = s, supported on [0, 2R].
class Autocorrelation {
 public:
  explicit Autocorrelation(const FormFactor& ff);

  double support() const { return 2.0 * ff_.support_radius(); }
  double value(double s) const;
  double slope(double s) const;
  // Odd extension h(s) = s c(|s|) and its derivative, the shell-kernel building blocks.
  double odd(double s) const;
  double odd_slope(double s) const;

  // Direct 2D quadrature, independent of the interpolant.
  double direct(double s) const;

  const FormFactor& form_factor() const { return ff_; }

 private:
  FormFactor ff_;
  PiecewiseChebyshev fit_;
};

struct KernelQuery {
  int order = 0;
  Vec3 separation = Vec3::Zero();
};

// A_p = (4 pi)^{-1} int int phi(x) phi(y) |xi + x - y|^{p-1} dx dy.
Estimate<double> kernel_A(const Autocorrelation& ac, const KernelQuery& query);
// B_p = -p A_{p-1}.
Estimate<double> kernel_B(const Autocorrelation& ac, const KernelQuery& query);

struct GradientResidual {
  Vec3 gradient;  // grad_xi A_0
  Vec3 residual;  // gradient + xi / (4 pi |xi|^3)
  double error;   // quadrature estimate
};

GradientResidual grad_A0_residual(const Autocorrelation& ac, const Vec3& separation);

// Prescribed particle path, with closed-form derivatives for oracle use.
class Trajectory {
 public:
  virtual ~Trajectory() = default;
  virtual Vec3 position(double s) const = 0;
  virtual Vec3 velocity(double s) const = 0;
  virtual Vec3 acceleration(double s) const = 0;
  virtual Vec3 jerk(double s) const = 0;
  // q(t) - q(t - tau); overridden where a cancellation-free form exists.
  virtual Vec3 displacement(double t, double tau) const { return position(t) - position(t - tau); }
};

// q(s) = eps^{-1} P(eps^{3/2} s) with P(T) = r0 + u0 T + a0 T^2 / 2 + A sin(w T + phase),
// so that |v| ~ eps^{1/2}, |dv/dt| ~ eps^2 and the third derivative ~ eps^{7/2}.
class ScaledTrajectory final : public Trajectory {
 public:
  struct Shape {
    Vec3 r0 = Vec3::Zero();
    Vec3 u0 = Vec3::Zero();
    Vec3 a0 = Vec3::Zero();
    Vec3 amplitude = Vec3::Zero();
    double frequency = 0.0;
    double phase = 0.0;
  };
  ScaledTrajectory(const Shape& shape, double epsilon);

  Vec3 position(double s) const override;
  Vec3 velocity(double s) const override;
  Vec3 acceleration(double s) const override;
  Vec3 jerk(double s) const override;
  Vec3 displacement(double t, double tau) const override;

 private:
  Shape shape_;
  double eps_;
  double time_scale_;  // eps^{3/2}
};

// Cubic Hermite path through samples (t_i, q_i, v_i).
class SampledTrajectory final : public Trajectory {
 public:
  SampledTrajectory(std::vector<double> times, std::vector<Vec3> positions, std::vector<Vec3> velocities);

  Vec3 position(double s) const override;
  Vec3 velocity(double s) const override;
  Vec3 acceleration(double s) const override;
  Vec3 jerk(double s) const override;

 private:
  std::size_t segment(double s) const;
  std::vector<double> t_;
  std::vector<Vec3> q_, v_;
};

struct RetardedForceOptions {
  double rel_tol = 1e-12;
  double abs_floor = 1e-15;
};

// Retarded force on alpha from the field radiated by beta (alpha == beta gives the self-force),
// integrated over the spherical-shell kernel in real space. Unit charges; the caller
// multiplies by e_alpha e_beta.
Estimate<Vec3> retarded_force_direct(const Autocorrelation& ac, const Trajectory& alpha,
                                     const Trajectory& beta, bool self, double t,
                                     const RetardedForceOptions& options = {});

// Closed-form point-limit mutual force through third order, without charge weights.
Vec3 mutual_force_closed(const Vec3& separation, const Vec3& v_alpha, const Vec3& v_beta,
                         const Vec3& a_beta);

// Closed-form self-force: -(4/3 + 8 v^2/15) m_e a - (16/15) m_e (v.a) v.
Vec3 self_force_closed(const Vec3& v, const Vec3& a, double m_e);

}  // namespace darwinlab
