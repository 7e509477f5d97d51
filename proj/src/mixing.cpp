#include "bms/mixing.hpp"

#include <boost/math/distributions/gamma.hpp>
#include <cmath>
#include <string>

#include "bms/errors.hpp"

namespace bms {

MixingDistribution MixingDistribution::gamma_unit_mean(double shape) {
  if (!(shape > 0.0) || !std::isfinite(shape)) {
    throw Error(ErrorCode::InvalidArgument, "gamma mixing shape must be positive, got " + std::to_string(shape));
  }
  return MixingDistribution(GammaUnitMeanMixing{shape});
}

double MixingDistribution::quantile(double u) const {
  if (!(u > 0.0 && u < 1.0)) throw Error(ErrorCode::InvalidArgument, "mixing quantile needs u in (0, 1)");
  struct Visitor {
    double u;
    double operator()(const ExponentialUnitMixing&) const { return -std::log1p(-u); }
    double operator()(const GammaUnitMeanMixing& g) const {
      const boost::math::gamma_distribution<double> law(g.shape, 1.0 / g.shape);
      return boost::math::quantile(law, u);
    }
    double operator()(const DiracMixing&) const { return 1.0; }
  };
  return std::visit(Visitor{u}, kind_);
}

double MixingDistribution::upper_quantile(double v) const {
  if (!(v > 0.0 && v < 1.0)) throw Error(ErrorCode::InvalidArgument, "mixing upper quantile needs v in (0, 1)");
  struct Visitor {
    double v;
    double operator()(const ExponentialUnitMixing&) const { return -std::log(v); }
    double operator()(const GammaUnitMeanMixing& g) const {
      const boost::math::gamma_distribution<double> law(g.shape, 1.0 / g.shape);
      return boost::math::quantile(boost::math::complement(law, v));
    }
    double operator()(const DiracMixing&) const { return 1.0; }
  };
  return std::visit(Visitor{v}, kind_);
}

}  // namespace bms
