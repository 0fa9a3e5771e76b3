#include "geoage/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "geoage/error.hpp"

namespace geoage {

double ecdf(const std::vector<double>& sorted, double x) {
  if (sorted.empty()) return 0.0;
  const auto it = std::upper_bound(sorted.begin(), sorted.end(), x);
  return static_cast<double>(it - sorted.begin()) / sorted.size();
}

double ecdf_strict(const std::vector<double>& sorted, double x) {
  if (sorted.empty()) return 0.0;
  const auto it = std::lower_bound(sorted.begin(), sorted.end(), x);
  return static_cast<double>(it - sorted.begin()) / sorted.size();
}

double sup_distance(const std::vector<double>& a,
                    const std::vector<double>& b) {
  if (a.size() != b.size()) throw InvalidArgument("curve sizes differ");
  double d = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    d = std::max(d, std::fabs(a[i] - b[i]));
  }
  return d;
}

double ks_distance(std::vector<double> samples,
                   const std::function<double(double)>& cdf) {
  if (samples.empty()) throw InvalidArgument("no samples");
  std::sort(samples.begin(), samples.end());
  const double n = static_cast<double>(samples.size());
  double d = 0.0;
  // Tied samples form one jump of the empirical CDF.
  for (std::size_t i = 0; i < samples.size();) {
    std::size_t j = i + 1;
    while (j < samples.size() && samples[j] == samples[i]) ++j;
    const double f = cdf(samples[i]);
    d = std::max(d, std::fabs(f - i / n));
    d = std::max(d, std::fabs(f - j / n));
    i = j;
  }
  return d;
}

double interpolate(const std::vector<double>& x, const std::vector<double>& y,
                   double at) {
  if (x.empty() || x.size() != y.size()) {
    throw InvalidArgument("interpolation grid mismatch");
  }
  if (at <= x.front()) return y.front();
  if (at >= x.back()) return y.back();
  const auto it = std::upper_bound(x.begin(), x.end(), at);
  const std::size_t k = static_cast<std::size_t>(it - x.begin());
  const double t = (at - x[k - 1]) / (x[k] - x[k - 1]);
  return y[k - 1] + t * (y[k] - y[k - 1]);
}

double mean(const std::vector<double>& v) {
  if (v.empty()) return std::nan("");
  return std::accumulate(v.begin(), v.end(), 0.0) / v.size();
}

double median(std::vector<double> v) {
  if (v.empty()) return std::nan("");
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

std::vector<double> linspace(double a, double b, std::size_t n) {
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    out[i] = n == 1 ? a : a + (b - a) * static_cast<double>(i) / (n - 1);
  }
  return out;
}

}  // namespace geoage
