#pragma once

#include <cstddef>
#include <vector>

namespace bms {

struct QuadratureRule {
  std::vector<double> nodes;
  std::vector<double> weights;
  /// 1 - nodes[k], carried exactly; only filled by graded_unit_rule.
  std::vector<double> complements;
};

/// n-point Gauss-Legendre rule on [-1, 1].
QuadratureRule gauss_legendre(std::size_t n);

/// Composite Gauss-Legendre rule on (0, 1) for integrals of g(Q(u)).
///
/// Quantile substitution turns an integral over an unbounded mixing law into
/// one over (0, 1) whose integrand grows like log(1 - u) at u -> 1, and like
/// u^(1/k) at u -> 0 for a gamma law of shape k; a single Gauss-Legendre panel
/// converges only algebraically on either. The rule instead uses equal panels
/// in -log u on the lower half (down to u = e^-18, below which one plain panel
/// suffices) and in -log(1 - u) on the upper half, so each piece spans a
/// bounded stretch of theta and the usual integrands converge spectrally
/// again. Only the mass beyond 1 - u = e^-48 is dropped.
/// `order` is the total node count and is rounded up to a multiple of the
/// panel count.
QuadratureRule graded_unit_rule(std::size_t order);

/// Number of panels used by graded_unit_rule.
std::size_t graded_panel_count() noexcept;

}  // namespace bms
