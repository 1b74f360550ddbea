#include "darwinlab/kernels.hpp"

#include <algorithm>
#include <boost/math/tools/roots.hpp>

#include "darwinlab/error.hpp"

namespace darwinlab {

namespace {

constexpr int fit_panels = 16;
constexpr int fit_order = 24;

}  // namespace

Autocorrelation::Autocorrelation(const FormFactor& ff) : ff_(ff) {
  fit_ = PiecewiseChebyshev([this](double s) { return direct(s); }, 0.0, support(), fit_panels, fit_order);
}

double Autocorrelation::direct(double s) const {
  const double R = ff_.support_radius();
  s = std::abs(s);
  if (s >= 2.0 * R) return 0.0;
  auto shell = [&](double r) {
    const double phi_r = ff_.profile(r);
    if (phi_r == 0.0) return 0.0;
    if (r * s == 0.0) return r * r * phi_r * 2.0 * ff_.profile(std::max(r, s));
    const double mu_max = (R * R - r * r - s * s) / (2.0 * r * s);
    if (mu_max <= -1.0) return 0.0;
    const double upper = std::min(1.0, mu_max);
    const double inner = integrate_composite(
        [&](double mu) { return ff_.profile(std::sqrt(std::max(0.0, r * r + s * s + 2.0 * r * s * mu))); },
        -1.0, upper, 4, 16);
    return r * r * phi_r * inner;
  };
  const double lower = std::max(0.0, s - R);
  return 2.0 * pi * integrate_composite(shell, lower, R, 32, 16);
}

double Autocorrelation::value(double s) const {
  s = std::abs(s);
  if (s >= support()) return 0.0;
  return fit_.value(s);
}

double Autocorrelation::slope(double s) const {
  const double sign = s < 0.0 ? -1.0 : 1.0;
  s = std::abs(s);
  if (s >= support()) return 0.0;
  return sign * fit_.slope(s);
}

double Autocorrelation::odd(double s) const { return s * value(s); }

double Autocorrelation::odd_slope(double s) const {
  const double a = std::abs(s);
  if (a >= support()) return 0.0;
  return fit_.value(a) + a * fit_.slope(a);
}

namespace {

// Angular integral of |xi + z|^{p-1} over directions of z, |xi| = d, |z| = s, divided by 2 pi.
double angular_kernel(int p, double d, double s) {
  const double big = std::max(d, s), small = std::min(d, s);
  switch (p) {
    case 0: return 2.0 / big;
    case 1: return 2.0;
    case 2: return (2.0 / 3.0) * (3.0 * big * big + small * small) / big;
    case 3: return 2.0 * (d * d + s * s);
    default: break;
  }
  fail(ErrorKind::invalid_parameter, "kernel order must be in [0, 3]");
}

}  // namespace

Estimate<double> kernel_A(const Autocorrelation& ac, const KernelQuery& query) {
  require(query.order >= 0 && query.order <= 3, "kernel order must be in [0, 3]");
  const double d = query.separation.norm();
  const double top = ac.support();
  auto integrand = [&](double s) {
    if (s == 0.0 && query.order == 0 && d == 0.0) return 0.0;
    return 0.5 * s * s * ac.value(s) * angular_kernel(query.order, d, s);
  };
  Estimate<double> total{0.0, 0.0};
  auto add = [&](double lo, double hi) {
    if (hi <= lo) return;
    const auto part = integrate_refined(integrand, lo, hi, 1e-14, 16, 4, 1 << 12, 1e-300);
    total.value += part.value;
    total.error += part.error;
  };
  if (d > 0.0 && d < top) {
    add(0.0, d);
    add(d, top);
  } else {
    add(0.0, top);
  }
  if (total.error > 1e-8 * std::abs(total.value))
    fail(ErrorKind::numerical, "kernel_A quadrature estimate above 1e-8");
  return total;
}

Estimate<double> kernel_B(const Autocorrelation& ac, const KernelQuery& query) {
  require(query.order >= 0 && query.order <= 4, "kernel order must be in [0, 4]");
  if (query.order == 0) return {0.0, 0.0};
  const auto a = kernel_A(ac, KernelQuery{query.order - 1, query.separation});
  return {-query.order * a.value, query.order * a.error};
}

namespace {

Vec3 grad_A0_quadrature(const Autocorrelation& ac, const Vec3& xi, int radial_panels, int polar, int azimuthal) {
  const GaussRule& mu_rule = gauss_legendre(polar);
  auto shell = [&](double s) -> Vec3 {
    Vec3 sum = Vec3::Zero();
    for (int i = 0; i < polar; ++i) {
      const double mu = mu_rule.nodes[i];
      const double sin_theta = std::sqrt(1.0 - mu * mu);
      Vec3 ring = Vec3::Zero();
      for (int j = 0; j < azimuthal; ++j) {
        const double az = 2.0 * pi * j / azimuthal;
        const Vec3 z(s * sin_theta * std::cos(az), s * sin_theta * std::sin(az), s * mu);
        const Vec3 w = xi + z;
        const double r = w.norm();
        ring -= w / (r * r * r);
      }
      sum += mu_rule.weights[i] * (2.0 * pi / azimuthal) * ring;
    }
    return (s * s * ac.value(s) / four_pi) * sum;
  };
  return integrate_composite<Vec3>(shell, 0.0, ac.support(), radial_panels, 16, Vec3::Zero());
}

}  // namespace

GradientResidual grad_A0_residual(const Autocorrelation& ac, const Vec3& separation) {
  const double d = separation.norm();
  require(d > ac.support(), "grad_A0_residual requires |xi| > 2 R");
  const Vec3 fine = grad_A0_quadrature(ac, separation, 8, 48, 48);
  const Vec3 coarse = grad_A0_quadrature(ac, separation, 4, 32, 32);
  const Vec3 coulomb = separation / (four_pi * d * d * d);
  return {fine, fine + coulomb, (fine - coarse).norm()};
}

ScaledTrajectory::ScaledTrajectory(const Shape& shape, double epsilon)
    : shape_(shape), eps_(epsilon), time_scale_(std::pow(epsilon, 1.5)) {
  require(epsilon > 0.0, "trajectory epsilon must be positive");
}

Vec3 ScaledTrajectory::position(double s) const {
  const double T = time_scale_ * s;
  return (shape_.r0 + shape_.u0 * T + 0.5 * shape_.a0 * T * T +
          shape_.amplitude * std::sin(shape_.frequency * T + shape_.phase)) /
         eps_;
}

Vec3 ScaledTrajectory::velocity(double s) const {
  const double T = time_scale_ * s;
  const double w = shape_.frequency;
  const Vec3 dP = shape_.u0 + shape_.a0 * T + shape_.amplitude * w * std::cos(w * T + shape_.phase);
  return std::sqrt(eps_) * dP;
}

Vec3 ScaledTrajectory::acceleration(double s) const {
  const double T = time_scale_ * s;
  const double w = shape_.frequency;
  const Vec3 d2P = shape_.a0 - shape_.amplitude * w * w * std::sin(w * T + shape_.phase);
  return eps_ * eps_ * d2P;
}

Vec3 ScaledTrajectory::jerk(double s) const {
  const double T = time_scale_ * s;
  const double w = shape_.frequency;
  const Vec3 d3P = -shape_.amplitude * w * w * w * std::cos(w * T + shape_.phase);
  return std::pow(eps_, 3.5) * d3P;
}

Vec3 ScaledTrajectory::displacement(double t, double tau) const {
  const double T = time_scale_ * t;
  const double delta = time_scale_ * tau;
  const double w = shape_.frequency;
  const Vec3 diff = shape_.u0 * delta + shape_.a0 * (T * delta - 0.5 * delta * delta) +
                    2.0 * shape_.amplitude * std::cos(w * (T - 0.5 * delta) + shape_.phase) *
                        std::sin(0.5 * w * delta);
  return diff / eps_;
}

SampledTrajectory::SampledTrajectory(std::vector<double> times, std::vector<Vec3> positions,
                                     std::vector<Vec3> velocities)
    : t_(std::move(times)), q_(std::move(positions)), v_(std::move(velocities)) {
  require(t_.size() >= 2 && q_.size() == t_.size() && v_.size() == t_.size(),
          "sampled trajectory needs at least two matching samples");
  require(std::is_sorted(t_.begin(), t_.end()) &&
              std::adjacent_find(t_.begin(), t_.end()) == t_.end(),
          "sample times must be strictly increasing");
}

std::size_t SampledTrajectory::segment(double s) const {
  const auto it = std::upper_bound(t_.begin(), t_.end(), s);
  const auto i = static_cast<std::ptrdiff_t>(it - t_.begin()) - 1;
  return static_cast<std::size_t>(std::clamp<std::ptrdiff_t>(i, 0, static_cast<std::ptrdiff_t>(t_.size()) - 2));
}

Vec3 SampledTrajectory::position(double s) const {
  const auto i = segment(s);
  const double h = t_[i + 1] - t_[i], x = (s - t_[i]) / h;
  const double x2 = x * x, x3 = x2 * x;
  return (2 * x3 - 3 * x2 + 1) * q_[i] + (x3 - 2 * x2 + x) * h * v_[i] + (-2 * x3 + 3 * x2) * q_[i + 1] +
         (x3 - x2) * h * v_[i + 1];
}

Vec3 SampledTrajectory::velocity(double s) const {
  const auto i = segment(s);
  const double h = t_[i + 1] - t_[i], x = (s - t_[i]) / h;
  const double x2 = x * x;
  return ((6 * x2 - 6 * x) * (q_[i] - q_[i + 1])) / h + (3 * x2 - 4 * x + 1) * v_[i] + (3 * x2 - 2 * x) * v_[i + 1];
}

Vec3 SampledTrajectory::acceleration(double s) const {
  const auto i = segment(s);
  const double h = t_[i + 1] - t_[i], x = (s - t_[i]) / h;
  return ((12 * x - 6) * (q_[i] - q_[i + 1])) / (h * h) + ((6 * x - 4) * v_[i] + (6 * x - 2) * v_[i + 1]) / h;
}

Vec3 SampledTrajectory::jerk(double s) const {
  const auto i = segment(s);
  const double h = t_[i + 1] - t_[i];
  return (12.0 * (q_[i] - q_[i + 1])) / (h * h * h) + 6.0 * (v_[i] + v_[i + 1]) / (h * h);
}

namespace {

struct ShellDerivatives {
  double d_tau;          // dS/dtau
  double d_rho_over_rho; // (dS/drho) / rho
};

// S(rho, tau) = (1/2 rho) int_{tau-rho}^{tau+rho} h(s) ds with h(s) = s c(|s|).
ShellDerivatives shell_derivatives(const Autocorrelation& ac, double rho, double tau) {
  const double top = ac.support();
  if (rho == 0.0) return {ac.odd_slope(tau), 0.0};
  const double a = tau - rho, b = tau + rho;
  if (b <= -top || a >= top) return {0.0, 0.0};
  if (a >= -top && b <= top) {
    // Full interval: substitute s = tau + rho x and subtract h'(tau) to keep the odd moment clean.
    const double h0 = ac.odd_slope(tau);
    const int panels = 1 + static_cast<int>(2.0 * rho / (0.125 * top));
    const double mean = integrate_composite([&](double x) { return ac.odd_slope(tau + rho * x); }, -1.0, 1.0, panels, 16);
    const double moment = integrate_composite(
        [&](double x) { return x * (ac.odd_slope(tau + rho * x) - h0); }, -1.0, 1.0, panels, 16);
    return {0.5 * mean, moment / (2.0 * rho)};
  }
  const double lo = std::max(a, -top), hi = std::min(b, top);
  const int panels = 1 + static_cast<int>((hi - lo) / (0.125 * top));
  const double moment =
      integrate_composite([&](double s) { return (s - tau) * ac.odd_slope(s); }, lo, hi, panels, 16);
  return {(ac.odd(b) - ac.odd(a)) / (2.0 * rho), moment / (2.0 * rho * rho * rho)};
}

}  // namespace

Estimate<Vec3> retarded_force_direct(const Autocorrelation& ac, const Trajectory& alpha, const Trajectory& beta,
                                     bool self, double t, const RetardedForceOptions& options) {
  require(t > 0.0, "retarded force needs t > 0");
  const double top = ac.support();
  const Vec3 q_alpha = alpha.position(t);
  const Vec3 v_alpha = alpha.velocity(t);
  auto separation = [&](double tau) -> Vec3 {
    return self ? alpha.displacement(t, tau) : Vec3(q_alpha - beta.position(t - tau));
  };
  auto lag = [&](double tau) { return tau - separation(tau).norm(); };

  // The integrand lives where |tau - rho(tau)| < 2R; lag() is increasing since |v| < 1.
  boost::math::tools::eps_tolerance<double> tol(50);
  auto solve = [&](double target, double lo, double hi) {
    std::uintmax_t iterations = 200;
    const auto root = boost::math::tools::toms748_solve([&](double x) { return lag(x) - target; }, lo, hi, tol, iterations);
    return 0.5 * (root.first + root.second);
  };
  double window_lo = 0.0;
  if (lag(0.0) < -top) {
    if (lag(t) <= -top) return {Vec3::Zero(), 0.0};
    window_lo = solve(-top, 0.0, t);
  }
  double window_hi = t;
  if (lag(t) > top) window_hi = solve(top, window_lo, t);
  if (window_hi <= window_lo) return {Vec3::Zero(), 0.0};

  auto integrand = [&](double tau) -> Vec3 {
    const Vec3 z = separation(tau);
    const double rho = z.norm();
    const Vec3 v_beta = beta.velocity(t - tau);
    const auto d = shell_derivatives(ac, rho, tau);
    const Vec3 radial = z * d.d_rho_over_rho;
    return -v_beta * d.d_tau - radial + v_alpha.cross(radial.cross(v_beta));
  };
  const auto est = integrate_refined<Vec3>(integrand, window_lo, window_hi, options.rel_tol, Vec3::Zero(), 16, 4,
                                           1 << 12, options.abs_floor);
  if (est.error > std::max(1e-8 * est.value.norm(), options.abs_floor))
    fail(ErrorKind::numerical, "retarded force quadrature did not converge (estimate " + std::to_string(est.error) + ")");
  return est;
}

Vec3 mutual_force_closed(const Vec3& xi, const Vec3& v_alpha, const Vec3& v_beta, const Vec3& a_beta) {
  const double d = xi.norm();
  if (d == 0.0) fail(ErrorKind::singularity, "mutual_force_closed: coincident positions");
  const double d3 = d * d * d, d5 = d3 * d * d;
  const double vb_xi = v_beta.dot(xi);
  return xi / (four_pi * d3) - a_beta / (8.0 * pi * d) - a_beta.dot(xi) * xi / (8.0 * pi * d3) +
         v_beta.squaredNorm() * xi / (8.0 * pi * d3) - 3.0 * vb_xi * vb_xi * xi / (8.0 * pi * d5) -
         v_alpha.dot(v_beta) * xi / (four_pi * d3) + v_alpha.dot(xi) * v_beta / (four_pi * d3);
}

Vec3 self_force_closed(const Vec3& v, const Vec3& a, double m_e) {
  return -(4.0 / 3.0 + 8.0 / 15.0 * v.squaredNorm()) * m_e * a - (16.0 / 15.0) * m_e * v.dot(a) * v;
}

}  // namespace darwinlab
