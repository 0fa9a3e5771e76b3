#include "geoage/params.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "geoage/error.hpp"

namespace geoage {

double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }

double dbm_to_watt(double dbm) { return std::pow(10.0, (dbm - 30.0) / 10.0); }

SystemParams::SystemParams(double lambda, double r, double alpha,
                           double threshold, double rho, double xi)
    : lambda_(lambda),
      r_(r),
      alpha_(alpha),
      threshold_(threshold),
      rho_(rho),
      xi_(xi) {
  auto require = [](bool ok, const std::string& what) {
    if (!ok) throw InvalidArgument("SystemParams: " + what);
  };
  require(std::isfinite(lambda) && lambda > 0.0, "lambda must be > 0");
  require(std::isfinite(r) && r > 0.0, "r must be > 0");
  require(std::isfinite(alpha) && alpha > 2.0, "alpha must be > 2");
  require(std::isfinite(threshold) && threshold > 0.0, "T must be > 0");
  require(rho > 0.0 && !std::isnan(rho), "rho must be > 0");
  require(xi >= 0.0 && xi <= 1.0, "xi must lie in [0, 1]");
  delta_ = 2.0 / alpha_;
  tr_alpha_ = threshold_ * std::pow(r_, alpha_);
  noise_success_ = std::isinf(rho_) ? 1.0 : std::exp(-tr_alpha_ / rho_);
}

SystemParams SystemParams::defaults() {
  return from_db(1e-4, 25.0, 3.8, 0.0, 23.7, -90.0, 0.3);
}

SystemParams SystemParams::from_db(double lambda, double r, double alpha,
                                   double threshold_db, double ptx_dbm,
                                   double noise_dbm, double xi) {
  const double rho = db_to_linear(ptx_dbm - noise_dbm);
  return SystemParams(lambda, r, alpha, db_to_linear(threshold_db), rho, xi);
}

double SystemParams::density_scale() const {
  return lambda_ * std::numbers::pi * r_ * r_ * std::pow(threshold_, delta_);
}

SystemParams SystemParams::with_lambda(double lambda) const {
  return SystemParams(lambda, r_, alpha_, threshold_, rho_, xi_);
}
SystemParams SystemParams::with_r(double r) const {
  return SystemParams(lambda_, r, alpha_, threshold_, rho_, xi_);
}
SystemParams SystemParams::with_xi(double xi) const {
  return SystemParams(lambda_, r_, alpha_, threshold_, rho_, xi);
}
SystemParams SystemParams::with_rho(double rho) const {
  return SystemParams(lambda_, r_, alpha_, threshold_, rho, xi_);
}
SystemParams SystemParams::with_alpha(double alpha) const {
  return SystemParams(lambda_, r_, alpha, threshold_, rho_, xi_);
}
SystemParams SystemParams::with_threshold(double threshold) const {
  return SystemParams(lambda_, r_, alpha_, threshold, rho_, xi_);
}

}  // namespace geoage
