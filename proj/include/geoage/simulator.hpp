#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <vector>

#include "geoage/geometry.hpp"
#include "geoage/params.hpp"
#include "geoage/policy.hpp"

namespace geoage {

// Max(2000, 20% of the horizon), kept below the horizon.
std::uint64_t default_warmup(std::uint64_t slots);

struct SimConfig {
  std::uint64_t slots = 20000;
  std::uint64_t warmup = 4000;
  bool dominant = false;
  std::uint64_t seed = 1;
  bool guard = false;
  // Draw every fade explicitly instead of sampling the success event from
  // its closed-form conditional probability given the active set.
  bool explicit_fading = false;
  bool keep_peak_samples = false;

  static SimConfig make(std::uint64_t slots, std::uint64_t seed);
  void validate() const;
};

struct LinkStats {
  double gamma = 1.0;
  std::uint64_t attempts = 0;
  std::uint64_t successes = 0;
  std::uint64_t busy_slots = 0;
  std::uint64_t arrivals = 0;
  std::uint64_t departures = 0;
  std::uint64_t queue_length = 0;  // at the end of the horizon
  double queue_area = 0.0;         // sum of post-warmup queue lengths
  double peak_sum = 0.0;
  std::uint64_t n_peaks = 0;
  double min_peak = 0.0;
  bool included = true;
  std::vector<double> peak_samples;

  // successes / attempts; NaN without attempts.
  double mu_hat() const;
  // Mean peak sample; NaN without deliveries.
  double peak_aoi_mean() const;
};

struct SimStats {
  std::vector<LinkStats> links;
  std::uint64_t measured_slots = 0;
  double xi = 0.0;

  double activity(std::size_t i) const;
  // gamma * mu_hat > xi.
  bool stable(std::size_t i) const;
  double unstable_fraction() const;
  void write_csv(std::ostream& os) const;
};

SimStats run_slotted(const NetworkRealization& net,
                     const PolicyAssignment& pol, const SystemParams& params,
                     const SimConfig& cfg);

enum class Inclusion { all, stable_only };

// Arithmetic mean over included links of each link's mean peak AoI. Throws
// EmptyStatisticsError when no included link has a delivery.
double measure_peak_aoi(const SimStats& stats, Inclusion inclusion);

struct NetworkSummary {
  double mean_peak_aoi = 0.0;
  double median_peak_aoi = 0.0;
  double unstable_fraction = 0.0;
  std::size_t links = 0;
  std::size_t included_links = 0;
  double mean_success = 0.0;
};
NetworkSummary summarize(const SimStats& stats, Inclusion inclusion);

// e^{-T r^alpha / rho} prod_{j != i} (1 - gamma_j / (1 + D_ji)).
double dominant_success_probability(const NetworkRealization& net,
                                    const PolicyAssignment& pol,
                                    const SystemParams& params,
                                    std::size_t i);

struct EmpiricalCurve {
  std::vector<double> x;
  std::vector<double> value;
  std::size_t samples = 0;
  std::size_t excluded = 0;
};

struct EmpiricalDistributions {
  EmpiricalCurve gamma_ccdf;   // P(gamma > kappa)
  EmpiricalCurve success_cdf;  // P(mu_hat <= u)
};

EmpiricalDistributions empirical_distributions(
    const std::vector<SimStats>& runs, const std::vector<double>& kappa_grid,
    const std::vector<double>& u_grid);

}  // namespace geoage
