#include "darwinlab/formfactor.hpp"

#include <algorithm>

#include "darwinlab/error.hpp"

namespace darwinlab {

namespace {

constexpr int table_intervals = 4096;
constexpr double cutoff_in_radii = 40.0;

double sinc(double x) {
  if (std::abs(x) < 1e-4) return 1.0 - x * x / 6.0;
  return std::sin(x) / x;
}

double sinc_slope(double x) {
  if (std::abs(x) < 1e-4) return -x / 3.0 + x * x * x / 30.0;
  return (x * std::cos(x) - std::sin(x)) / (x * x);
}

// Radial integral int_0^R g(r) dr with enough panels to resolve oscillation at wavenumber k.
template <class G>
double radial_integral(G&& g, double radius, double k) {
  const int panels = std::max(16, static_cast<int>(std::ceil(k * radius)) + 16);
  return integrate_composite(g, 0.0, radius, panels, 16);
}

}  // namespace

ProfileKind parse_profile_kind(const std::string& name) {
  if (name == "smooth_bump") return ProfileKind::smooth_bump;
  if (name == "polynomial_bump") return ProfileKind::polynomial_bump;
  fail(ErrorKind::invalid_parameter, "unknown form-factor profile '" + name + "'");
}

std::string to_string(ProfileKind kind) {
  return kind == ProfileKind::smooth_bump ? "smooth_bump" : "polynomial_bump";
}

double FormFactor::shape(double s) const {
  if (s >= 1.0) return 0.0;
  const double w = 1.0 - s * s;
  if (kind_ == ProfileKind::smooth_bump) return std::exp(-1.0 / w);
  return w * w * w * w;
}

double FormFactor::shape_slope(double s) const {
  if (s >= 1.0) return 0.0;
  const double w = 1.0 - s * s;
  if (kind_ == ProfileKind::smooth_bump) return std::exp(-1.0 / w) * (-2.0 * s / (w * w));
  return -8.0 * s * w * w * w;
}

double FormFactor::profile(double r) const { return norm_ * shape(r / radius_); }

double FormFactor::profile_slope(double r) const { return norm_ * shape_slope(r / radius_) / radius_; }

double FormFactor::fourier_direct(double k) const {
  const double scale = std::sqrt(2.0 / pi);
  return scale * radial_integral([&](double r) { return r * r * profile(r) * sinc(k * r); }, radius_, k);
}

double FormFactor::fourier(double k) const {
  k = std::abs(k);
  if (k > k_cutoff_) return 0.0;
  return table_.value(k);
}

double FormFactor::fourier_slope(double k) const {
  const double sign = k < 0.0 ? -1.0 : 1.0;
  k = std::abs(k);
  if (k > k_cutoff_) return 0.0;
  return sign * table_.slope(k);
}

FormFactor build_form_factor(double support_radius, ProfileKind kind) {
  require(support_radius > 0.0 && std::isfinite(support_radius), "form factor radius must be positive");
  FormFactor ff;
  ff.radius_ = support_radius;
  ff.kind_ = kind;
  ff.k_cutoff_ = cutoff_in_radii / support_radius;

  const double shape_integral =
      integrate_composite([&](double s) { return s * s * ff.shape(s); }, 0.0, 1.0, 64, 32);
  ff.norm_ = 1.0 / (four_pi * shape_integral * std::pow(support_radius, 3));

  ff.total_integral_ = four_pi * integrate_composite([&](double r) { return r * r * ff.profile(r); }, 0.0,
                                                     support_radius, 256, 16);
  ff.second_moment_ = four_pi * integrate_composite(
                                    [&](double r) { return r * r * r * r * ff.profile(r); }, 0.0,
                                    support_radius, 256, 16);

  const double scale = std::sqrt(2.0 / pi);
  std::vector<double> values(table_intervals + 1), slopes(table_intervals + 1);
  for (int i = 0; i <= table_intervals; ++i) {
    const double k = ff.k_cutoff_ * i / table_intervals;
    values[i] = ff.fourier_direct(k);
    slopes[i] = scale * radial_integral(
                            [&](double r) { return r * r * r * ff.profile(r) * sinc_slope(k * r); },
                            support_radius, k);
  }
  ff.table_ = HermiteTable(0.0, ff.k_cutoff_, std::move(values), std::move(slopes));
  return ff;
}

double fourier_profile(const FormFactor& ff, double k) {
  require(k >= 0.0, "fourier_profile: |k| must be non-negative");
  return ff.fourier(k);
}

Estimate<double> electromagnetic_mass(const FormFactor& ff, std::optional<double> band_limit) {
  double upper = ff.fourier_cutoff();
  if (band_limit) {
    require(*band_limit > 0.0, "band limit must be positive");
    upper = std::min(upper, *band_limit);
  }
  auto integrand = [&](double k) {
    const double f = ff.fourier_direct(k);
    return 2.0 * pi * f * f;
  };
  auto est = integrate_refined(integrand, 0.0, upper, 1e-13, 16, 4, 1 << 10);
  if (!(est.error <= 1e-8 * std::abs(est.value)))
    fail(ErrorKind::numerical, "electromagnetic mass quadrature did not converge (estimate " +
                                   std::to_string(est.error / est.value) + " relative)");
  return est;
}

MassConstants mass_constants_from(double m_e, const ParticleSet& particles) {
  MassConstants mc;
  mc.m_e = m_e;
  double charge_sq = 0.0;
  for (const auto& p : particles) {
    const double e2 = p.charge * p.charge;
    charge_sq += e2;
    mc.mass.push_back(p.bare_mass + (4.0 / 3.0) * e2 * m_e);
    mc.mass_star.push_back(p.bare_mass + (16.0 / 15.0) * e2 * m_e);
  }
  mc.electrostatic_energy = m_e * charge_sq;
  return mc;
}

MassConstants mass_constants(const FormFactor& ff, const ParticleSet& particles,
                             std::optional<double> band_limit) {
  const auto est = electromagnetic_mass(ff, band_limit);
  MassConstants mc = mass_constants_from(est.value, particles);
  mc.m_e_error = est.error;
  return mc;
}

}  // namespace darwinlab
