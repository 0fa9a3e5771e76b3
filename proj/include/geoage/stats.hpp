#pragma once

#include <functional>
#include <vector>

namespace geoage {

// Fraction of sorted samples <= x.
double ecdf(const std::vector<double>& sorted, double x);
// Fraction of sorted samples < x.
double ecdf_strict(const std::vector<double>& sorted, double x);

// Largest absolute difference between two curves sampled on the same grid.
double sup_distance(const std::vector<double>& a, const std::vector<double>& b);

// Kolmogorov-Smirnov distance between an empirical sample and a continuous
// CDF, checked at every sample jump.
double ks_distance(std::vector<double> samples,
                   const std::function<double(double)>& cdf);

// Linear interpolation on an ascending grid, clamped at the ends.
double interpolate(const std::vector<double>& x, const std::vector<double>& y,
                   double at);

double mean(const std::vector<double>& v);
double median(std::vector<double> v);

std::vector<double> linspace(double a, double b, std::size_t n);

}  // namespace geoage
