#include "geoage/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <ostream>

#include "geoage/error.hpp"
#include "geoage/rng.hpp"
#include "geoage/stats.hpp"
#include "geoage/table.hpp"

namespace geoage {

std::uint64_t default_warmup(std::uint64_t slots) {
  const std::uint64_t w =
      std::max<std::uint64_t>(2000, static_cast<std::uint64_t>(0.2 * slots));
  return slots == 0 ? 0 : std::min(w, slots - 1);
}

SimConfig SimConfig::make(std::uint64_t slots, std::uint64_t seed) {
  SimConfig c;
  c.slots = slots;
  c.warmup = default_warmup(slots);
  c.seed = seed;
  return c;
}

void SimConfig::validate() const {
  if (slots < 1) throw InvalidArgument("slots must be >= 1");
  if (warmup >= slots) throw InvalidArgument("warmup must be < slots");
}

double LinkStats::mu_hat() const {
  if (attempts == 0) return std::numeric_limits<double>::quiet_NaN();
  return static_cast<double>(successes) / static_cast<double>(attempts);
}

double LinkStats::peak_aoi_mean() const {
  if (n_peaks == 0) return std::numeric_limits<double>::quiet_NaN();
  return peak_sum / static_cast<double>(n_peaks);
}

double SimStats::activity(std::size_t i) const {
  if (measured_slots == 0) return 0.0;
  return static_cast<double>(links[i].busy_slots) /
         static_cast<double>(measured_slots);
}

bool SimStats::stable(std::size_t i) const {
  const LinkStats& l = links[i];
  if (l.attempts == 0) return false;
  return l.gamma * l.mu_hat() > xi;
}

double SimStats::unstable_fraction() const {
  std::size_t counted = 0;
  std::size_t unstable = 0;
  for (std::size_t i = 0; i < links.size(); ++i) {
    if (!links[i].included || links[i].attempts == 0) continue;
    ++counted;
    if (!stable(i)) ++unstable;
  }
  return counted ? static_cast<double>(unstable) / counted : 0.0;
}

void SimStats::write_csv(std::ostream& os) const {
  os << "link_id,gamma,attempts,successes,mu_hat_emp,a_emp,peak_aoi_mean,"
        "n_peaks\n";
  for (std::size_t i = 0; i < links.size(); ++i) {
    const LinkStats& l = links[i];
    os << i << ',' << fmt_num(l.gamma) << ',' << l.attempts << ','
       << l.successes << ',' << fmt_num(l.mu_hat()) << ','
       << fmt_num(activity(i)) << ',' << fmt_num(l.peak_aoi_mean()) << ','
       << l.n_peaks << '\n';
  }
}

namespace {

// Stream identifiers for the counter-based generator.
constexpr std::uint64_t kArrival = 0;
constexpr std::uint64_t kAccess = 1;
constexpr std::uint64_t kSuccess = 2;
constexpr std::uint64_t kFadeBase = 1ULL << 40;

}  // namespace

SimStats run_slotted(const NetworkRealization& net,
                     const PolicyAssignment& pol, const SystemParams& params,
                     const SimConfig& cfg) {
  cfg.validate();
  const std::size_t n = net.size();
  if (pol.size() != n) throw InvalidArgument("policy size mismatch");

  // coupling[i * n + j]: effect of transmitter j on receiver i. In the
  // default mode it is log(1 + 1/D_ji), so the conditional success
  // probability given the active set A is exp(-T r^a / rho - sum_A coupling);
  // with explicit fading it is 1/D_ji and fades are drawn per pair.
  std::vector<double> coupling(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (i == j) continue;
      const double d =
          distance_measure(net.transmitter(j), net.receiver(i), net, params);
      coupling[i * n + j] =
          cfg.explicit_fading ? 1.0 / d : std::log1p(1.0 / d);
    }
  }
  const double noise_term = params.tr_alpha() / params.rho();
  const double xi = params.xi();

  SimStats stats;
  stats.xi = xi;
  stats.links.resize(n);
  const std::vector<bool> mask = (cfg.guard && net.wrap() == Boundary::open)
                                     ? net.guard_mask()
                                     : std::vector<bool>(n, true);
  std::vector<std::deque<std::uint64_t>> queues(n);
  std::vector<std::uint64_t> aoi(n, 1);
  for (std::size_t i = 0; i < n; ++i) {
    stats.links[i].gamma = pol.gamma[i];
    stats.links[i].included = mask[i];
  }

  std::vector<std::uint32_t> active;
  active.reserve(n);
  const std::uint64_t seed = cfg.seed;
  for (std::uint64_t t = 0; t < cfg.slots; ++t) {
    const bool measure = t >= cfg.warmup;
    active.clear();
    for (std::size_t i = 0; i < n; ++i) {
      LinkStats& l = stats.links[i];
      if (xi > 0.0 && counter_uniform(seed, 4 * i + kArrival, t) < xi) {
        queues[i].push_back(t);
        ++l.arrivals;
      }
      const bool backlogged = !queues[i].empty();
      if (measure) {
        if (backlogged) ++l.busy_slots;
        l.queue_area += static_cast<double>(queues[i].size());
      }
      if ((backlogged || cfg.dominant) &&
          counter_uniform(seed, 4 * i + kAccess, t) < pol.gamma[i]) {
        active.push_back(static_cast<std::uint32_t>(i));
      }
    }
    for (std::uint32_t i : active) {
      const double* row = &coupling[static_cast<std::size_t>(i) * n];
      bool success;
      if (cfg.explicit_fading) {
        double interference = noise_term;
        for (std::uint32_t j : active) {
          if (j == i) continue;
          interference +=
              row[j] * counter_exponential(seed, kFadeBase + i * n + j, t);
        }
        success =
            counter_exponential(seed, kFadeBase + i * n + i, t) > interference;
      } else {
        double s = noise_term;
        for (std::uint32_t j : active) s += row[j];
        success = counter_uniform(seed, 4 * i + kSuccess, t) < std::exp(-s);
      }
      LinkStats& l = stats.links[i];
      if (measure) {
        ++l.attempts;
        if (success) ++l.successes;
      }
      if (success && !queues[i].empty()) {
        const std::uint64_t generated = queues[i].front();
        queues[i].pop_front();
        ++l.departures;
        // Age at the end of the delivery slot, before the reset.
        const double sample = static_cast<double>(aoi[i] + 1);
        if (measure) {
          l.peak_sum += sample;
          if (l.n_peaks == 0 || sample < l.min_peak) l.min_peak = sample;
          ++l.n_peaks;
          if (cfg.keep_peak_samples) l.peak_samples.push_back(sample);
        }
        aoi[i] = t - generated;  // incremented below to t - G + 1
      }
    }
    for (std::size_t i = 0; i < n; ++i) ++aoi[i];
  }
  for (std::size_t i = 0; i < n; ++i) {
    stats.links[i].queue_length = queues[i].size();
  }
  stats.measured_slots = cfg.slots - cfg.warmup;
  return stats;
}

double measure_peak_aoi(const SimStats& stats, Inclusion inclusion) {
  double sum = 0.0;
  std::size_t count = 0;
  for (std::size_t i = 0; i < stats.links.size(); ++i) {
    const LinkStats& l = stats.links[i];
    if (!l.included || l.n_peaks == 0) continue;
    if (inclusion == Inclusion::stable_only && !stats.stable(i)) continue;
    sum += l.peak_aoi_mean();
    ++count;
  }
  if (count == 0) {
    throw EmptyStatisticsError("no included link delivered a packet");
  }
  return sum / static_cast<double>(count);
}

NetworkSummary summarize(const SimStats& stats, Inclusion inclusion) {
  NetworkSummary s;
  s.links = stats.links.size();
  std::vector<double> peaks;
  std::vector<double> mus;
  for (std::size_t i = 0; i < stats.links.size(); ++i) {
    const LinkStats& l = stats.links[i];
    if (!l.included) continue;
    if (l.attempts > 0) mus.push_back(l.mu_hat());
    if (l.n_peaks == 0) continue;
    if (inclusion == Inclusion::stable_only && !stats.stable(i)) continue;
    peaks.push_back(l.peak_aoi_mean());
  }
  s.included_links = peaks.size();
  s.mean_peak_aoi = mean(peaks);
  s.median_peak_aoi = median(peaks);
  s.unstable_fraction = stats.unstable_fraction();
  s.mean_success = mean(mus);
  return s;
}

double dominant_success_probability(const NetworkRealization& net,
                                    const PolicyAssignment& pol,
                                    const SystemParams& params,
                                    std::size_t i) {
  if (i >= net.size()) throw InvalidArgument("link index out of range");
  double p = params.noise_success();
  for (std::size_t j = 0; j < net.size(); ++j) {
    if (j == i) continue;
    const double d =
        distance_measure(net.transmitter(j), net.receiver(i), net, params);
    p *= 1.0 - pol.gamma[j] / (1.0 + d);
  }
  return p;
}

EmpiricalDistributions empirical_distributions(
    const std::vector<SimStats>& runs, const std::vector<double>& kappa_grid,
    const std::vector<double>& u_grid) {
  if (runs.empty()) throw InvalidArgument("no realizations supplied");
  std::vector<double> gammas;
  std::vector<double> mus;
  std::size_t excluded = 0;
  for (const SimStats& s : runs) {
    for (const LinkStats& l : s.links) {
      if (!l.included) continue;
      gammas.push_back(l.gamma);
      if (l.attempts == 0) {
        ++excluded;
      } else {
        mus.push_back(l.mu_hat());
      }
    }
  }
  std::sort(gammas.begin(), gammas.end());
  std::sort(mus.begin(), mus.end());
  EmpiricalDistributions out;
  out.gamma_ccdf.x = kappa_grid;
  out.gamma_ccdf.samples = gammas.size();
  for (double k : kappa_grid) {
    out.gamma_ccdf.value.push_back(1.0 - ecdf(gammas, k));
  }
  out.success_cdf.x = u_grid;
  out.success_cdf.samples = mus.size();
  out.success_cdf.excluded = excluded;
  for (double u : u_grid) out.success_cdf.value.push_back(ecdf(mus, u));
  return out;
}

}  // namespace geoage
