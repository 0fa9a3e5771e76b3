#include <algorithm>
#include <cmath>
#include <limits>

#include "geoage/analysis.hpp"
#include "geoage/error.hpp"

namespace geoage {

namespace {

struct Cell {
  double at;
  double mass;
};

// Left-increment cells of the success CDF: the mass of (u_{j-1}, u_j] sits
// at u_{j-1}; mass below the first grid point sits at 0. Inversion noise is
// removed by taking the running maximum, so the cells sum to one.
std::vector<Cell> success_cells(const SuccessCdf& mu) {
  std::vector<Cell> out;
  if (mu.u_grid.empty()) return out;
  double prev = std::clamp(mu.F.front(), 0.0, 1.0);
  out.push_back({0.0, prev});
  for (std::size_t j = 1; j < mu.u_grid.size(); ++j) {
    const double f = std::clamp(mu.F[j], prev, 1.0);
    out.push_back({mu.u_grid[j - 1], f - prev});
    prev = f;
  }
  out.push_back({mu.u_grid.back(), 1.0 - prev});
  return out;
}

// Same for the access law, with the running minimum of the CCDF.
std::vector<Cell> eta_cells(const EtaDistribution& eta) {
  std::vector<Cell> out;
  const double atom = std::clamp(eta.atom_one, 0.0, 1.0);
  double prev_k = 0.0;
  double prev_c = 1.0;
  for (std::size_t i = 0; i < eta.kappa_grid.size(); ++i) {
    const double c = std::clamp(eta.ccdf[i], atom, prev_c);
    out.push_back({prev_k, prev_c - c});
    prev_k = eta.kappa_grid[i];
    prev_c = c;
  }
  out.push_back({prev_k, prev_c - atom});
  out.push_back({1.0, atom});
  return out;
}

}  // namespace

PeakAoiExact peak_aoi_exact(double xi, const SuccessCdf& mu,
                            const EtaDistribution& eta) {
  if (!(xi > 0.0 && xi <= 1.0)) throw InvalidArgument("xi must be in (0, 1]");
  if (mu.u_grid.size() != mu.F.size() || mu.u_grid.empty()) {
    throw InvalidArgument("success CDF is empty or malformed");
  }
  if (eta.kappa_grid.size() != eta.ccdf.size()) {
    throw InvalidArgument("eta distribution is malformed");
  }
  const auto cu = success_cells(mu);
  const auto cv = eta_cells(eta);
  double sum = 0.0;
  double stable = 0.0;
  for (const Cell& a : cu) {
    if (a.mass <= 0.0) continue;
    for (const Cell& b : cv) {
      if (b.mass <= 0.0) continue;
      const double s = a.at * b.at;
      if (s <= xi) continue;
      const double m = a.mass * b.mass;
      stable += m;
      sum += m * (1.0 - xi) / (s - xi);
    }
  }
  PeakAoiExact out;
  out.value = 1.0 / xi + sum;
  out.stable_mass = stable;
  out.conditional = stable > 0.0 ? 1.0 / xi + sum / stable
                                 : std::numeric_limits<double>::infinity();
  out.heavy_instability = stable < 0.5;
  out.convex_region = stable >= 1.0 - 1e-3;
  return out;
}

PeakAoiExact peak_aoi_exact(const SystemParams& params,
                            const StoppingSetSpec& spec) {
  const EtaModel model(params, spec.analysis_radius(params.lambda()));
  const ZTable z(model);
  const SuccessCdf mu =
      success_cdf_fixed_point(params, z, success_grid(params.xi()));
  std::vector<double> kappa;
  for (double k : model.kappa_nodes()) {
    if (k > 0.0 && k < 1.0) kappa.push_back(k);
  }
  return peak_aoi_exact(params.xi(), mu, model.distribution(kappa));
}

double peak_aoi_mean_approx(double xi, double mean_eta, double mean_mu) {
  if (!(xi > 0.0 && xi <= 1.0)) throw InvalidArgument("xi must be in (0, 1]");
  const double denom = mean_eta * mean_mu - xi;
  if (!(denom > 0.0)) {
    throw InstabilityError("E[eta] E[mu] <= xi: peak AoI is unbounded");
  }
  return 1.0 / xi + (1.0 - xi) / denom;
}

double peak_aoi_mean_approx(const SystemParams& params,
                            const StoppingSetSpec& spec) {
  const EtaModel model(params, spec.analysis_radius(params.lambda()));
  const ZTable z(model);
  const MeanSuccess m = mean_success_probability(params, z);
  return peak_aoi_mean_approx(params.xi(), model.mean().value, m.value);
}

}  // namespace geoage
