#include "darwinlab/quadrature.hpp"

#include <algorithm>
#include <map>
#include <memory>
#include <mutex>

#include "darwinlab/error.hpp"

namespace darwinlab {

namespace {

GaussRule build_rule(int n) {
  GaussRule rule;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double x = std::cos(pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    double p0 = 1.0, p1 = x;
    for (int k = 2; k <= n; ++k) {
      const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
      p0 = p1;
      p1 = p2;
    }
    dp = n * (x * p1 - p0) / (x * x - 1.0);
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    rule.nodes[i] = -x;
    rule.nodes[n - 1 - i] = x;
    rule.weights[i] = w;
    rule.weights[n - 1 - i] = w;
  }
  if (n % 2 == 1) rule.nodes[n / 2] = 0.0;
  return rule;
}

}  // namespace

const GaussRule& gauss_legendre(int n) {
  require(n >= 1 && n <= 4096, "gauss_legendre: order out of range");
  static std::mutex mutex;
  static std::map<int, std::unique_ptr<GaussRule>> cache;
  std::lock_guard lock(mutex);
  auto& slot = cache[n];
  if (!slot) slot = std::make_unique<GaussRule>(build_rule(n));
  return *slot;
}

HermiteTable::HermiteTable(double x0, double x1, std::vector<double> values, std::vector<double> slopes)
    : x0_(x0), x1_(x1), values_(std::move(values)), slopes_(std::move(slopes)) {
  require(values_.size() >= 2 && values_.size() == slopes_.size() && x1 > x0, "HermiteTable: bad grid");
  h_ = (x1_ - x0_) / static_cast<double>(values_.size() - 1);
}

double HermiteTable::value(double x) const {
  const double s = (x - x0_) / h_;
  const auto last = static_cast<std::ptrdiff_t>(values_.size()) - 2;
  const auto i = std::clamp(static_cast<std::ptrdiff_t>(std::floor(s)), std::ptrdiff_t{0}, last);
  const double t = s - static_cast<double>(i);
  const double t2 = t * t, t3 = t2 * t;
  const double h00 = 2 * t3 - 3 * t2 + 1, h10 = t3 - 2 * t2 + t;
  const double h01 = -2 * t3 + 3 * t2, h11 = t3 - t2;
  return h00 * values_[i] + h10 * h_ * slopes_[i] + h01 * values_[i + 1] + h11 * h_ * slopes_[i + 1];
}

double HermiteTable::slope(double x) const {
  const double s = (x - x0_) / h_;
  const auto last = static_cast<std::ptrdiff_t>(values_.size()) - 2;
  const auto i = std::clamp(static_cast<std::ptrdiff_t>(std::floor(s)), std::ptrdiff_t{0}, last);
  const double t = s - static_cast<double>(i);
  const double t2 = t * t;
  const double d00 = 6 * t2 - 6 * t, d10 = 3 * t2 - 4 * t + 1;
  const double d01 = -6 * t2 + 6 * t, d11 = 3 * t2 - 2 * t;
  return (d00 * values_[i] + d01 * values_[i + 1]) / h_ + d10 * slopes_[i] + d11 * slopes_[i + 1];
}

}  // namespace darwinlab

namespace darwinlab {

void PiecewiseChebyshev::fit(std::span<const double> samples) {
  const int n = order_;
  coeffs_.assign(samples.size(), 0.0);
  dcoeffs_.assign(samples.size(), 0.0);
  for (int p = 0; p < panels_; ++p) {
    const double* f = samples.data() + static_cast<std::size_t>(p) * n;
    double* c = coeffs_.data() + static_cast<std::size_t>(p) * n;
    double* d = dcoeffs_.data() + static_cast<std::size_t>(p) * n;
    for (int m = 0; m < n; ++m) {
      double sum = 0.0;
      for (int k = 0; k < n; ++k) sum += f[k] * std::cos(pi * m * (k + 0.5) / n);
      c[m] = (m == 0 ? 1.0 : 2.0) * sum / n;
    }
    // Derivative series in the local variable, then scaled to x.
    std::vector<double> dd(n + 2, 0.0);
    for (int m = n - 1; m >= 1; --m) dd[m - 1] = dd[m + 1] + 2.0 * m * c[m];
    dd[0] *= 0.5;
    for (int m = 0; m < n; ++m) d[m] = dd[m] * 2.0 / width_;
  }
}

int PiecewiseChebyshev::locate(double x, double& t) const {
  int p = static_cast<int>(std::floor((x - a_) / width_));
  p = std::clamp(p, 0, panels_ - 1);
  const double mid = a_ + (p + 0.5) * width_;
  t = 2.0 * (x - mid) / width_;
  return p;
}

namespace {
double clenshaw(const double* c, int n, double t) {
  double b1 = 0.0, b2 = 0.0;
  for (int m = n - 1; m >= 1; --m) {
    const double b0 = 2.0 * t * b1 - b2 + c[m];
    b2 = b1;
    b1 = b0;
  }
  return t * b1 - b2 + c[0];
}
}  // namespace

double PiecewiseChebyshev::value(double x) const {
  double t;
  const int p = locate(x, t);
  return clenshaw(coeffs_.data() + static_cast<std::size_t>(p) * order_, order_, t);
}

double PiecewiseChebyshev::slope(double x) const {
  double t;
  const int p = locate(x, t);
  return clenshaw(dcoeffs_.data() + static_cast<std::size_t>(p) * order_, order_, t);
}

}  // namespace darwinlab
