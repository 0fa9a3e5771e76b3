#include <algorithm>
#include <cmath>
#include <numbers>

#include "geoage/error.hpp"
#include "geoage/numerics.hpp"

namespace geoage::numerics {
namespace {

constexpr double kPi = std::numbers::pi;

void check_transform(const ComplexFn& fn) {
  if (!fn.fn) throw InvalidArgument("transform callable is empty");
  const cplx at0 = fn.fn(0.0);
  if (std::abs(at0 - 1.0) > 1e-9) {
    throw InvalidArgument("transform must equal 1 at the origin");
  }
  if (fn.conjugate_symmetric) {
    for (double w : {0.37, 1.9, 7.3}) {
      const cplx a = fn.fn(w);
      const cplx b = fn.fn(-w);
      if (std::abs(a - std::conj(b)) > 1e-8 * (1.0 + std::abs(a))) {
        throw InvalidArgument("transform is not conjugate-symmetric");
      }
    }
  }
}

}  // namespace

cplx indicator_kernel(double w, double c) {
  if (w == 0.0) return {c, 0.0};
  const double th = w * c;
  const double s = std::sin(0.5 * th);
  return {std::sin(th) / w, 2.0 * s * s / w};
}

namespace {

// Integrates g over [0, inf) in panels of length h until three consecutive
// panels contribute less than stop each.
template <typename G>
InversionResult panel_integral(const G& g, double h, double stop,
                               const InversionOptions& opt) {
  const GaussRule& rule = gauss_legendre(opt.nodes_per_panel);
  InversionResult res;
  double sum = 0.0;
  double prev = 0.0;
  int small = 0;
  for (int k = 0;; ++k) {
    const double a = k * h;
    double part = 0.0;
    for (std::size_t q = 0; q < rule.nodes.size(); ++q) {
      const double w = a + 0.5 * h * (rule.nodes[q] + 1.0);
      part += rule.weights[q] * g(w);
    }
    part *= 0.5 * h;
    prev = sum;
    sum += part;
    res.panels = k + 1;
    res.omega_max = a + h;
    small = std::fabs(part) < stop ? small + 1 : 0;
    if (small >= 3) {
      res.converged = true;
      res.value = sum;
      return res;
    }
    if (a + h >= opt.omega_cap) {
      // Averaging consecutive partial sums damps an oscillating remainder.
      res.value = 0.5 * (sum + prev);
      return res;
    }
  }
}

}  // namespace

InversionResult gil_pelaez_cdf(const ComplexFn& phi, double x, double tol,
                               const InversionOptions& opt) {
  check_transform(phi);
  const double p0 = phi.atom_at_zero;
  const double h = kPi / std::max(std::fabs(x), 1.0);
  auto psi = [&](double w) { return phi.fn(w) - p0; };
  InversionResult res;
  if (phi.conjugate_symmetric) {
    res = panel_integral(
        [&](double w) {
          return std::imag(std::exp(cplx(0.0, -w * x)) * psi(w)) / w;
        },
        h, tol * 0.01 * kPi, opt);
    res.value = -res.value / kPi;
  } else {
    res = panel_integral(
        [&](double w) {
          const cplx num = std::exp(cplx(0.0, w * x)) * psi(-w) -
                           std::exp(cplx(0.0, -w * x)) * psi(w);
          return std::real(num / cplx(0.0, w));
        },
        h, tol * 0.01 * 2.0 * kPi, opt);
    res.value /= 2.0 * kPi;
  }
  res.value += 0.5 * (1.0 - p0) + (x >= 0.0 ? p0 : 0.0);
  res.value = std::clamp(res.value, 0.0, 1.0);
  return res;
}

InversionResult plancherel_ccdf(const ComplexFn& laplace, double c,
                                double tol, const InversionOptions& opt) {
  check_transform(laplace);
  const double p0 = laplace.atom_at_zero;
  if (c <= 0.0) {
    InversionResult res;
    res.converged = true;
    return res;
  }
  const double h = kPi / std::max(std::fabs(c), 1.0);
  auto psi = [&](double w) { return laplace.fn(w) - p0; };
  InversionResult res;
  if (laplace.conjugate_symmetric) {
    res = panel_integral(
        [&](double w) { return std::real(psi(w) * indicator_kernel(w, c)); },
        h, tol * 0.01 * kPi, opt);
    res.value /= kPi;
  } else {
    res = panel_integral(
        [&](double w) {
          return std::real(psi(w) * indicator_kernel(w, c) +
                           psi(-w) * indicator_kernel(-w, c));
        },
        h, tol * 0.01 * 2.0 * kPi, opt);
    res.value /= 2.0 * kPi;
  }
  // A density f(0+) > 0 leaves psi(w) ~ f(0+) / (j w), so the integrand has
  // a non-oscillating f(0+) / w^2 part whose remainder beyond the last panel
  // is f(0+) / W.
  const double W = res.omega_max;
  const double f0 = 0.5 * (std::real(cplx(0.0, W) * psi(W)) +
                           std::real(cplx(0.0, -W) * psi(-W)));
  res.value += f0 / (W * kPi);
  res.value = std::clamp(res.value + p0, 0.0, 1.0);
  return res;
}

double plancherel_trapezoid(std::span<const cplx> laplace, double step,
                            double c) {
  if (laplace.empty() || c <= 0.0) return 0.0;
  double sum = 0.5 * std::real(laplace[0]) * c;
  for (std::size_t k = 1; k < laplace.size(); ++k) {
    sum += std::real(laplace[k] * indicator_kernel(k * step, c));
  }
  return sum * step / kPi;
}

double gil_pelaez_trapezoid(std::span<const cplx> phi, double step,
                            double mean, double x) {
  if (phi.empty()) return 0.0;
  double sum = 0.5 * (mean - x);
  for (std::size_t k = 1; k < phi.size(); ++k) {
    const double w = k * step;
    sum += std::imag(std::exp(cplx(0.0, -w * x)) * phi[k]) / w;
  }
  return -sum * step / kPi;
}

cplx binomial_ksum_closed(double omega, double x) {
  if (x < 0.0 || x > 1.0) throw InvalidArgument("k-sum requires x in [0, 1]");
  if (x >= 1.0) return {1.0, 0.0};
  return 1.0 - std::exp(cplx(0.0, omega * std::log1p(-x)));
}

cplx binomial_ksum_series(double omega, double x, int terms) {
  const cplx a(0.0, omega);
  cplx binom(1.0, 0.0);
  cplx sum(0.0, 0.0);
  double xk = 1.0;
  for (int k = 1; k <= terms; ++k) {
    binom *= (a - static_cast<double>(k - 1)) / static_cast<double>(k);
    xk *= x;
    sum += binom * xk * ((k % 2 == 1) ? 1.0 : -1.0);
  }
  return sum;
}

}  // namespace geoage::numerics
