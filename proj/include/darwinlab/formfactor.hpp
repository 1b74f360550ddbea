#pragma once

#include <optional>
#include <string>
#include <vector>

#include "darwinlab/error.hpp"
#include "darwinlab/particles.hpp"
#include "darwinlab/quadrature.hpp"

namespace darwinlab {

enum class ProfileKind { smooth_bump, polynomial_bump };

ProfileKind parse_profile_kind(const std::string& name);
std::string to_string(ProfileKind kind);

// Radial smeared-charge profile with compact support and unit integral.
//
// smooth_bump is proportional to exp(-1/(1 - (r/R)^2)); polynomial_bump to (1 - (r/R)^2)^4,
// which is only C^3 at the rim but has a faster practical Fourier decay.
// The transform convention is phihat(k) = (2 pi)^{-3/2} int phi(x) exp(-i k.x) d^3x.
class FormFactor {
 public:
  double support_radius() const { return radius_; }
  ProfileKind kind() const { return kind_; }

  double profile(double r) const;
  double profile_slope(double r) const;
  double total_integral() const { return total_integral_; }

  // Tabulated transform; zero beyond fourier_cutoff().
  double fourier(double k) const;
  double fourier_slope(double k) const;
  double fourier_cutoff() const { return k_cutoff_; }

  // Transform by direct radial quadrature, bypassing the table.
  double fourier_direct(double k) const;

  // Second radial moment int r^2 phi d^3x.
  double second_moment() const { return second_moment_; }

 private:
  friend FormFactor build_form_factor(double support_radius, ProfileKind kind);
  double shape(double s) const;  // unnormalized profile in units of the radius
  double shape_slope(double s) const;

  double radius_ = 1.0;
  ProfileKind kind_ = ProfileKind::smooth_bump;
  double norm_ = 1.0;
  double total_integral_ = 0.0;
  double second_moment_ = 0.0;
  double k_cutoff_ = 40.0;
  HermiteTable table_;
};

FormFactor build_form_factor(double support_radius, ProfileKind kind = ProfileKind::smooth_bump);

double fourier_profile(const FormFactor& ff, double k);

// (2 pi)^{-3/2}: phihat(0) for a unit-integral profile.
inline double transform_constant() { return 1.0 / std::pow(2.0 * pi, 1.5); }

struct MassConstants {
  double m_e = 0.0;
  double m_e_error = 0.0;
  double electrostatic_energy = 0.0;
  std::vector<double> mass;       // m_b + (4/3) e^2 m_e
  std::vector<double> mass_star;  // m_b + (16/15) e^2 m_e
};

// m_e = 2 pi int_0^K |phihat|^2 dk with K the table cutoff, or the band limit when given.
Estimate<double> electromagnetic_mass(const FormFactor& ff, std::optional<double> band_limit = std::nullopt);

MassConstants mass_constants(const FormFactor& ff, const ParticleSet& particles,
                             std::optional<double> band_limit = std::nullopt);

MassConstants mass_constants_from(double m_e, const ParticleSet& particles);

}  // namespace darwinlab
