#include "bms/quadrature.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "bms/errors.hpp"

namespace bms {

namespace {

// Below 1/2: one plain panel on [0, e^-18], then 7 equal panels in
// s = -log u. Above 1/2: 8 equal panels in t = -log(1 - u) up to t = 48, so
// only mass e^-48 in the far tail is dropped.
constexpr std::size_t kLowerLogPanels = 7;
constexpr std::size_t kUpperLogPanels = 8;
constexpr std::size_t kPanels = 1 + kLowerLogPanels + kUpperLogPanels;
constexpr double kLowerEnd = 18.0;
constexpr double kUpperEnd = 48.0;

}  // namespace

QuadratureRule gauss_legendre(std::size_t n) {
  if (n == 0) throw Error(ErrorCode::InvalidArgument, "Gauss-Legendre rule needs at least one node");
  QuadratureRule rule{std::vector<double>(n), std::vector<double>(n), {}};
  // Newton iteration on P_n from the Chebyshev-like initial guess; roots are
  // symmetric so only half are computed.
  const std::size_t half = (n + 1) / 2;
  for (std::size_t i = 0; i < half; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0, p1 = 0.0;
      for (std::size_t k = 1; k <= n; ++k) {
        const double p2 = p1;
        p1 = p0;
        p0 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p2) / k;
      }
      dp = n * (x * p0 - p1) / (x * x - 1.0);
      const double dx = p0 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    // Recompute the derivative at the converged root for the weight.
    double p0 = 1.0, p1 = 0.0;
    for (std::size_t k = 1; k <= n; ++k) {
      const double p2 = p1;
      p1 = p0;
      p0 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p2) / k;
    }
    dp = n * (x * p0 - p1) / (x * x - 1.0);
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    rule.nodes[i] = -x;
    rule.nodes[n - 1 - i] = x;
    rule.weights[i] = w;
    rule.weights[n - 1 - i] = w;
  }
  if (n % 2 == 1) rule.nodes[n / 2] = 0.0;
  return rule;
}

std::size_t graded_panel_count() noexcept { return kPanels; }

QuadratureRule graded_unit_rule(std::size_t order) {
  if (order < kPanels) {
    throw Error(ErrorCode::InvalidArgument, "quadrature order must be at least " + std::to_string(kPanels));
  }
  const std::size_t per_panel = (order + kPanels - 1) / kPanels;
  const QuadratureRule base = gauss_legendre(per_panel);
  QuadratureRule rule;
  rule.nodes.reserve(per_panel * kPanels);
  rule.weights.reserve(per_panel * kPanels);
  rule.complements.reserve(per_panel * kPanels);
  const double cap = std::exp(-kLowerEnd);
  for (std::size_t k = 0; k < per_panel; ++k) {
    const double u = 0.5 * cap * (base.nodes[k] + 1.0);
    rule.nodes.push_back(u);
    rule.complements.push_back(1.0 - u);
    rule.weights.push_back(0.5 * cap * base.weights[k]);
  }
  // du = e^-s ds on either side; the small end e^-s is kept exactly and the
  // other end is formed by one subtraction, which is exact for e^-s <= 1/2.
  auto add_half = [&](std::size_t panels, double end, bool upper) {
    const double t0 = std::numbers::ln2;
    const double step = (end - t0) / static_cast<double>(panels);
    for (std::size_t p = 0; p < panels; ++p) {
      const double a = t0 + step * static_cast<double>(p);
      for (std::size_t k = 0; k < per_panel; ++k) {
        const double s = a + 0.5 * step * (base.nodes[k] + 1.0);
        const double small = std::exp(-s);
        rule.nodes.push_back(upper ? 1.0 - small : small);
        rule.complements.push_back(upper ? small : 1.0 - small);
        rule.weights.push_back(0.5 * step * base.weights[k] * small);
      }
    }
  };
  add_half(kLowerLogPanels, kLowerEnd, false);
  add_half(kUpperLogPanels, kUpperEnd, true);
  return rule;
}

}  // namespace bms
