#pragma once

#include <complex>
#include <cstddef>
#include <map>
#include <memory>
#include <mutex>
#include <vector>

#include "geoage/geometry.hpp"
#include "geoage/params.hpp"

namespace geoage {

struct Flagged {
  double value = 0.0;
  bool converged = true;
};

struct EtaSettings {
  double tol = 1e-4;           // inversion tolerance per probability
  double omega_cap = 2000.0;   // frequency cap for the U inversions
  double phase_step = 6.0;     // max phase change per 8-node quadrature panel
  double kappa_tol = 2e-5;     // refinement threshold of the kappa trapezoid
  int kappa_initial = 33;      // initial uniform kappa nodes
  int kappa_max_depth = 8;
};

// kappa * tail_integral(R).
double V_term(double kappa, double radius, const SystemParams& params);

// E[exp(-s U(kappa))] for receivers of a PPP inside the disk of radius R:
// U = sum kappa T r^a / (|z|^a + (1 - kappa) T r^a).
std::complex<double> laplace_U(std::complex<double> s, double kappa,
                               double radius, const SystemParams& params);

// P(U(kappa) < 1 - V(kappa)) evaluated with the generic panel inversion of
// laplace_U. Slow; kept as an independent cross-check of EtaModel.
Flagged eta_ccdf_reference(double kappa, double radius,
                           const SystemParams& params, double tol = 1e-4);

struct EtaDistribution {
  std::vector<double> kappa_grid;
  std::vector<double> ccdf;
  std::vector<bool> converged;
  double atom_one = 1.0;
  double mean_eta = 1.0;
  bool all_converged = true;
};

// Access-probability law at a disk observation window of radius R. Per-kappa
// inversion tables are cached, so repeated queries are cheap.
class EtaModel {
 public:
  EtaModel(const SystemParams& params, double radius, EtaSettings settings = {});
  ~EtaModel();
  EtaModel(const EtaModel&) = delete;
  EtaModel& operator=(const EtaModel&) = delete;

  const SystemParams& params() const { return params_; }
  double radius() const { return radius_; }

  // P(eta > kappa), kappa in (0, 1).
  Flagged ccdf(double kappa) const;
  // P(eta = 1).
  Flagged atom_one() const;
  // Integral of the CCDF over (0, 1) on an adaptively refined kappa grid.
  Flagged mean() const;
  // Probability that an interferer at distance l from a receiver accesses
  // the channel.
  Flagged z(double distance) const;
  // Same, as a function of D = l^alpha / (T r^alpha). The receiver enters
  // the interferer's observation only when D <= radius_D(); beyond that Z
  // equals mean().
  Flagged z_of_D(double D) const;
  // D of the disk edge; negative for an empty window.
  double radius_D() const;

  EtaDistribution distribution(const std::vector<double>& kappa_grid) const;
  // The kappa nodes behind mean() and z().
  const std::vector<double>& kappa_nodes() const;

  struct Table;

 private:
  const Table& table(double kappa) const;
  void refine() const;
  double cdf_shifted(const Table& t, double shift) const;

  SystemParams params_;
  double radius_;
  double tail_;
  EtaSettings settings_;
  mutable std::mutex mu_;
  mutable std::map<double, std::unique_ptr<Table>> tables_;
  mutable std::vector<double> nodes_;
  mutable double mean_ = 0.0;
  mutable bool mean_converged_ = true;
};

Flagged eta_ccdf(double kappa, const StoppingSetSpec& spec,
                 const SystemParams& params);
Flagged eta_atom_one(const StoppingSetSpec& spec, const SystemParams& params);
Flagged mean_eta(const StoppingSetSpec& spec, const SystemParams& params);
Flagged z_function(double distance, const StoppingSetSpec& spec,
                   const SystemParams& params);

// Z tabulated on a logarithmic D grid and interpolated in log D.
class ZTable {
 public:
  ZTable() = default;
  explicit ZTable(const EtaModel& model, std::size_t points = 97);
  // Constant access probability (e.g. 1 for an unscheduled network).
  static ZTable constant(double value);
  double operator()(double D) const;
  double limit() const { return limit_; }
  bool converged() const { return converged_; }

 private:
  std::vector<double> log_d_;
  std::vector<double> z_;
  double limit_ = 1.0;
  double edge_ = 0.0;  // D of the disk edge
  bool converged_ = true;
};

struct SuccessSettings {
  double tol = 1e-4;
  int max_iter = 50;
  double damping = 1.0;
  double omega_cap = 4000.0;
  double inversion_tol = 1e-4;
  double phase_step = 6.0;
  int quantile_atoms = 32;
  std::size_t grid_points = 256;
};

struct SuccessCdf {
  std::vector<double> u_grid;
  std::vector<double> F;  // P(mu <= u)
  bool converged = false;
  int iterations = 0;
  double residual = 0.0;
  bool inversion_converged = true;
  double omega_max = 0.0;
  std::vector<double> residual_history;

  double mean() const;
  double at(double u) const;
};

// 256-point grid on [u_lo, 1] clustered at xi and at 1.
std::vector<double> success_grid(double xi, std::size_t points = 256);

// Fixed point of the conditional-success CDF under the mean-field activity
// min(Z, xi / mu) of each interferer.
SuccessCdf success_cdf_fixed_point(const SystemParams& params,
                                   const ZTable& z,
                                   const std::vector<double>& u_grid,
                                   const SuccessSettings& settings = {});
// Full-buffer system: every interferer accesses with probability Z. This is
// the initial iterate of the fixed point.
SuccessCdf success_cdf_dominant(const SystemParams& params, const ZTable& z,
                                const std::vector<double>& u_grid,
                                const SuccessSettings& settings = {});
SuccessCdf success_cdf_fixed_point(const SystemParams& params,
                                   const StoppingSetSpec& spec,
                                   const std::vector<double>& u_grid,
                                   double tol = 1e-4, int max_iter = 50);

struct MeanSuccess {
  double value = 0.0;
  bool converged = false;
  bool stable = true;  // value * mean_eta > xi
  int iterations = 0;
  double residual = 0.0;
};

MeanSuccess mean_success_probability(const SystemParams& params,
                                     const ZTable& z, double tol = 1e-10);
MeanSuccess mean_success_probability(const SystemParams& params,
                                     const StoppingSetSpec& spec,
                                     double tol = 1e-10);

// Largest xi with xi <= E[mu](xi) * E[eta].
double stability_max_arrival(const SystemParams& params, const ZTable& z);
double stability_max_arrival(const SystemParams& params,
                             const StoppingSetSpec& spec);

struct PeakAoiExact {
  double value = 0.0;        // restricted, unnormalized double sum
  double stable_mass = 0.0;  // P(u v > xi)
  double conditional = 0.0;  // 1/xi + E[(1-xi)/(uv-xi) | uv > xi]
  bool heavy_instability = false;
  bool convex_region = true;  // Jensen comparison meaningful
};

PeakAoiExact peak_aoi_exact(double xi, const SuccessCdf& mu,
                            const EtaDistribution& eta);
PeakAoiExact peak_aoi_exact(const SystemParams& params,
                            const StoppingSetSpec& spec);

// 1/xi + (1 - xi) / (E[eta] E[mu] - xi); throws InstabilityError when the
// denominator is not positive.
double peak_aoi_mean_approx(double xi, double mean_eta, double mean_mu);
double peak_aoi_mean_approx(const SystemParams& params,
                            const StoppingSetSpec& spec);

}  // namespace geoage
