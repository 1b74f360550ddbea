#include "darwinlab/solitons.hpp"

#include <algorithm>
#include <array>

namespace darwinlab {

namespace {

constexpr int radial_panels = 8;
constexpr int radial_order = 16;
constexpr int polar_panels = 8;
constexpr int polar_order = 16;

void check_speed(const Vec3& v) {
  if (!(v.squaredNorm() < 1.0)) fail(ErrorKind::invalid_parameter, "soliton velocity must satisfy |v| < 1");
}

// Unit vector along v, or z when v vanishes.
Vec3 axis_of(const Vec3& v) {
  const double s = v.norm();
  return s > 0.0 ? Vec3(v / s) : Vec3::UnitZ();
}

// Legendre values and derivatives P_l(mu), P_l'(mu) for l = 0..degree.
void legendre(double mu, int degree, std::span<double> p, std::span<double> dp) {
  p[0] = 1.0;
  dp[0] = 0.0;
  if (degree == 0) return;
  p[1] = mu;
  dp[1] = 1.0;
  for (int l = 1; l < degree; ++l) {
    p[l + 1] = ((2 * l + 1) * mu * p[l] - l * p[l - 1]) / (l + 1);
    dp[l + 1] = dp[l - 1] + (2 * l + 1) * p[l];
  }
}

}  // namespace

ZetaPotential::ZetaPotential(const Vec3& velocity) : v_(velocity) { check_speed(velocity); }

double ZetaPotential::operator()(const Vec3& x) const {
  const double xv = x.dot(v_);
  return 1.0 / std::sqrt((1.0 - v_.squaredNorm()) * x.squaredNorm() + xv * xv);
}

SolitonPotential::SolitonPotential(const FormFactor& ff, double charge, const Vec3& velocity, int max_degree)
    : ff_(ff), charge_(charge), v_(velocity), axis_(axis_of(velocity)), degree_(max_degree) {
  check_speed(velocity);
  require(max_degree >= 0 && max_degree % 2 == 0, "multipole degree must be even and nonnegative");
  gamma_ = lorentz_gamma(velocity);
  support_ = gamma_ * ff.support_radius();

  const int even_terms = degree_ / 2 + 1;
  exterior_moments_.assign(even_terms, 0.0);
  std::vector<double> rho(even_terms);
  const GaussRule& rule = gauss_legendre(radial_order);
  const double h = support_ / (4 * radial_panels);
  for (int p = 0; p < 4 * radial_panels; ++p) {
    for (int i = 0; i < radial_order; ++i) {
      const double r = h * (p + 0.5 + 0.5 * rule.nodes[i]);
      project(r, rho);
      const double t = r / support_;
      double power = 1.0;
      for (int j = 0; j < even_terms; ++j) {
        exterior_moments_[j] += 0.5 * h * rule.weights[i] * power * r * r * rho[j];
        power *= t * t;
      }
    }
  }
}

// rho_l(r) = (2l+1) int_0^1 rho(r, mu) P_l(mu) dmu for even l, rho the stretched unit charge.
void SolitonPotential::project(double radius, std::span<double> out) const {
  std::fill(out.begin(), out.end(), 0.0);
  const GaussRule& rule = gauss_legendre(polar_order);
  const double squeeze = 1.0 - 1.0 / (gamma_ * gamma_);
  const double h = 1.0 / polar_panels;
  std::vector<double> p(degree_ + 1), dp(degree_ + 1);
  for (int panel = 0; panel < polar_panels; ++panel) {
    for (int i = 0; i < polar_order; ++i) {
      const double mu = h * (panel + 0.5 + 0.5 * rule.nodes[i]);
      const double rho = ff_.profile(radius * std::sqrt(1.0 - mu * mu * squeeze)) / gamma_;
      if (rho == 0.0) continue;
      legendre(mu, degree_, p, dp);
      const double w = 0.5 * h * rule.weights[i] * rho;
      for (int l = 0; l <= degree_; l += 2) out[l / 2] += (2 * l + 1) * w * p[l];
    }
  }
}

SolitonPotential::Local SolitonPotential::multipole(double r, double mu) const {
  const int even_terms = degree_ / 2 + 1;
  std::vector<double> p(degree_ + 1), dp(degree_ + 1);
  legendre(mu, degree_, p, dp);
  Local out{0.0, 0.0, 0.0};

  if (r >= support_) {
    const double t = support_ / r;
    double power = 1.0;
    for (int j = 0; j < even_terms; ++j) {
      const int l = 2 * j;
      const double term = exterior_moments_[j] * power / r / (2 * l + 1);
      out.value += p[l] * term;
      out.d_radius -= (l + 1) * p[l] * term / r;
      out.d_cosine += dp[l] * term;
      power *= t * t;
    }
    return out;
  }

  std::vector<double> inner(even_terms, 0.0), outer(even_terms, 0.0), rho(even_terms);
  const GaussRule& rule = gauss_legendre(radial_order);
  auto accumulate = [&](double a, double b, bool is_inner) {
    const double h = (b - a) / radial_panels;
    for (int panel = 0; panel < radial_panels; ++panel) {
      for (int i = 0; i < radial_order; ++i) {
        const double rp = a + h * (panel + 0.5 + 0.5 * rule.nodes[i]);
        project(rp, rho);
        const double w = 0.5 * h * rule.weights[i];
        const double ratio = is_inner ? rp / r : r / rp;
        const double base = is_inner ? rp * rp / r : rp;
        double power = 1.0;
        for (int j = 0; j < even_terms; ++j) {
          (is_inner ? inner : outer)[j] += w * power * base * rho[j];
          power *= ratio * ratio;
        }
      }
    }
  };
  if (r > 0.0) accumulate(0.0, r, true);
  accumulate(r, support_, false);

  for (int j = 0; j < even_terms; ++j) {
    const int l = 2 * j;
    const double scale = 1.0 / (2 * l + 1);
    out.value += scale * p[l] * (inner[j] + outer[j]);
    if (r > 0.0) {
      out.d_radius += scale * p[l] * (-(l + 1) * inner[j] + l * outer[j]) / r;
      out.d_cosine += scale * dp[l] * (inner[j] + outer[j]);
    }
  }
  return out;
}

double SolitonPotential::potential(const Vec3& x) const {
  const double par = x.dot(axis_);
  const Vec3 stretched = x + (gamma_ - 1.0) * par * axis_;
  const double r = stretched.norm();
  const double mu = r > 0.0 ? gamma_ * par / r : 0.0;
  return gamma_ * charge_ * multipole(r, mu).value;
}

Vec3 SolitonPotential::gradient(const Vec3& x) const {
  const double par = x.dot(axis_);
  const Vec3 stretched = x + (gamma_ - 1.0) * par * axis_;
  const double r = stretched.norm();
  if (r == 0.0) return Vec3::Zero();
  const double mu = gamma_ * par / r;
  const Local local = multipole(r, mu);
  const Vec3 radial = stretched / r;
  const Vec3 g = local.d_radius * radial + local.d_cosine * (axis_ - mu * radial) / r;
  // Chain rule through the stretch: the axial component picks up one more factor gamma.
  const Vec3 chained = g + (gamma_ - 1.0) * g.dot(axis_) * axis_;
  return gamma_ * charge_ * chained;
}

SolitonFields SolitonPotential::fields(const Vec3& x) const {
  const Vec3 g = gradient(x);
  return {-g + v_.dot(g) * v_, -v_.cross(g)};
}

double soliton_potential(const FormFactor& ff, double charge, const Vec3& velocity, const Vec3& x) {
  return SolitonPotential(ff, charge, velocity).potential(x);
}

SolitonFields soliton_fields(const FormFactor& ff, double charge, const Vec3& velocity, const Vec3& x) {
  return SolitonPotential(ff, charge, velocity).fields(x);
}

SolitonModeShape soliton_mode_shape(const Vec3& k, const Vec3& velocity) {
  check_speed(velocity);
  const double kv = k.dot(velocity);
  const double denom = k.squaredNorm() - kv * kv;
  if (!(denom > 0.0)) fail(ErrorKind::singularity, "soliton mode requested at k = 0");
  return {(k - kv * velocity) / denom, velocity.cross(k) / denom};
}

double soliton_energy_factor(double speed) {
  require(speed >= 0.0 && speed < 1.0, "soliton speed must lie in [0, 1)");
  if (speed == 0.0) return 1.0;
  return 2.0 * std::atanh(speed) / speed - 1.0;
}

double soliton_self_energy(double m_e, double charge, const Vec3& velocity) {
  check_speed(velocity);
  return charge * charge * m_e * soliton_energy_factor(velocity.norm());
}

OverlapProfile::OverlapProfile(const Autocorrelation& ac)
    : support_(ac.support()),
      fit_(
          [&ac, top = ac.support()](double s) {
            return integrate_composite([&](double r) { return r * ac.value(r); }, s, top, 8, 16) / four_pi;
          },
          0.0, ac.support(), 16, 24) {}

double OverlapProfile::operator()(double s) const {
  const double a = std::abs(s);
  return a >= support_ ? 0.0 : fit_.value(a);
}

Estimate<double> soliton_pair_energy(const OverlapProfile& overlap, double charge_a, const Vec3& velocity_a,
                                     double charge_b, const Vec3& velocity_b, const Vec3& separation) {
  check_speed(velocity_a);
  check_speed(velocity_b);
  const double d = separation.norm();
  require(d > 0.0, "pair energy needs distinct centers");
  const Vec3 axis = separation / d;
  const Vec3 e1 = axis.unitOrthogonal();
  const Vec3 e2 = axis.cross(e1);
  const double mu_max = std::min(1.0, overlap.support() / d);
  constexpr int azimuths = 96;

  auto angular = [&](double mu) {
    const double w = overlap(d * mu);
    if (w == 0.0) return 0.0;
    const double sin_theta = std::sqrt(std::max(0.0, 1.0 - mu * mu));
    double sum = 0.0;
    for (int j = 0; j < azimuths; ++j) {
      const double angle = 2.0 * pi * j / azimuths;
      const Vec3 n = mu * axis + sin_theta * (std::cos(angle) * e1 + std::sin(angle) * e2);
      const double na = n.dot(velocity_a), nb = n.dot(velocity_b);
      const double num = (n - na * velocity_a).dot(n - nb * velocity_b) + velocity_a.dot(velocity_b) - na * nb;
      sum += num / ((1.0 - na * na) * (1.0 - nb * nb));
    }
    return w * sum * (2.0 * pi / azimuths);
  };
  auto result = integrate_refined(angular, -mu_max, mu_max, 1e-11, 16, 2, 1 << 10, 1e-300);
  result.value *= charge_a * charge_b;
  result.error *= std::abs(charge_a * charge_b);
  return result;
}

}  // namespace darwinlab
