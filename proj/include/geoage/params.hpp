#pragma once

namespace geoage {

double db_to_linear(double db);
double dbm_to_watt(double dbm);

// Physical and traffic constants of the bipolar network. All values linear.
class SystemParams {
 public:
  // Throws InvalidArgument when any invariant is violated.
  SystemParams(double lambda, double r, double alpha, double threshold,
               double rho, double xi);

  // Defaults used throughout the evaluation: alpha 3.8, xi 0.3, T = 0 dB,
  // P_tx = 23.7 dBm, noise = -90 dBm, lambda = 1e-4, r = 25.
  static SystemParams defaults();
  static SystemParams from_db(double lambda, double r, double alpha,
                              double threshold_db, double ptx_dbm,
                              double noise_dbm, double xi);

  double lambda() const { return lambda_; }
  double r() const { return r_; }
  double alpha() const { return alpha_; }
  double threshold() const { return threshold_; }
  double rho() const { return rho_; }
  double xi() const { return xi_; }
  double delta() const { return delta_; }

  // T r^alpha, the normalization of D.
  double tr_alpha() const { return tr_alpha_; }
  // exp(-T r^alpha / rho).
  double noise_success() const { return noise_success_; }
  // lambda pi r^2 T^delta.
  double density_scale() const;

  SystemParams with_lambda(double lambda) const;
  SystemParams with_r(double r) const;
  SystemParams with_xi(double xi) const;
  SystemParams with_rho(double rho) const;
  SystemParams with_alpha(double alpha) const;
  SystemParams with_threshold(double threshold) const;

 private:
  double lambda_;
  double r_;
  double alpha_;
  double threshold_;
  double rho_;
  double xi_;
  double delta_;
  double tr_alpha_;
  double noise_success_;
};

}  // namespace geoage
