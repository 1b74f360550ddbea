#pragma once

#include <cmath>
#include <span>
#include <vector>

#include "darwinlab/vec.hpp"

namespace darwinlab {

struct GaussRule {
  std::vector<double> nodes;    // on [-1, 1]
  std::vector<double> weights;
};

// Gauss-Legendre rule with n points; rules are built once and cached.
const GaussRule& gauss_legendre(int n);

template <class T>
struct Estimate {
  T value;
  double error;  // absolute estimate
};

inline double magnitude(double x) { return std::abs(x); }
inline double magnitude(const Vec3& x) { return x.norm(); }

// Composite Gauss-Legendre over [a, b] split into `panels` equal pieces.
template <class T, class F>
T integrate_composite(F&& f, double a, double b, int panels, int order, T zero) {
  const GaussRule& rule = gauss_legendre(order);
  const double h = (b - a) / panels;
  T sum = zero;
  for (int p = 0; p < panels; ++p) {
    const double mid = a + (p + 0.5) * h;
    T part = zero;
    for (int i = 0; i < order; ++i) part += rule.weights[i] * f(mid + 0.5 * h * rule.nodes[i]);
    sum += (0.5 * h) * part;
  }
  return sum;
}

inline double integrate_composite(auto&& f, double a, double b, int panels, int order) {
  return integrate_composite<double>(f, a, b, panels, order, 0.0);
}

// Doubles the panel count until two successive results agree to rel_tol (or abs_floor).
// The returned error is the last difference; callers decide whether it is acceptable.
template <class T, class F>
Estimate<T> integrate_refined(F&& f, double a, double b, double rel_tol, T zero, int order = 16,
                              int start_panels = 4, int max_panels = 1 << 14, double abs_floor = 0.0) {
  int panels = start_panels;
  T prev = integrate_composite<T>(f, a, b, panels, order, zero);
  double diff = 0.0;
  while (panels < max_panels) {
    panels *= 2;
    T next = integrate_composite<T>(f, a, b, panels, order, zero);
    diff = magnitude(T(next - prev));
    prev = next;
    if (diff <= rel_tol * magnitude(prev) || diff <= abs_floor) return {prev, diff};
  }
  return {prev, diff};
}

inline Estimate<double> integrate_refined(auto&& f, double a, double b, double rel_tol, int order = 16,
                                          int start_panels = 4, int max_panels = 1 << 14,
                                          double abs_floor = 0.0) {
  return integrate_refined<double>(f, a, b, rel_tol, 0.0, order, start_panels, max_panels, abs_floor);
}

// Cubic Hermite interpolation on a uniform grid with given values and slopes.
class HermiteTable {
 public:
  HermiteTable() = default;
  HermiteTable(double x0, double x1, std::vector<double> values, std::vector<double> slopes);

  double x_min() const { return x0_; }
  double x_max() const { return x1_; }
  // Outside [x0, x1] the caller must decide; here the value is clamped to the end interval.
  double value(double x) const;
  double slope(double x) const;

 private:
  double x0_ = 0.0, x1_ = 0.0, h_ = 1.0;
  std::vector<double> values_, slopes_;
};

}  // namespace darwinlab

namespace darwinlab {

// Piecewise Chebyshev interpolant of a smooth function on [a, b], with exact derivative.
class PiecewiseChebyshev {
 public:
  PiecewiseChebyshev() = default;
  template <class F>
  PiecewiseChebyshev(F&& f, double a, double b, int panels, int order);

  double value(double x) const;
  double slope(double x) const;
  double lower() const { return a_; }
  double upper() const { return b_; }

 private:
  void fit(std::span<const double> samples);
  int locate(double x, double& t) const;

  double a_ = 0.0, b_ = 1.0, width_ = 1.0;
  int panels_ = 0, order_ = 0;
  std::vector<double> coeffs_, dcoeffs_;
};

template <class F>
PiecewiseChebyshev::PiecewiseChebyshev(F&& f, double a, double b, int panels, int order)
    : a_(a), b_(b), width_((b - a) / panels), panels_(panels), order_(order) {
  std::vector<double> samples(static_cast<std::size_t>(panels) * order);
  for (int p = 0; p < panels; ++p) {
    const double mid = a + (p + 0.5) * width_;
    for (int k = 0; k < order; ++k) {
      const double x = std::cos(pi * (k + 0.5) / order);
      samples[static_cast<std::size_t>(p) * order + k] = f(mid + 0.5 * width_ * x);
    }
  }
  fit(samples);
}

}  // namespace darwinlab
