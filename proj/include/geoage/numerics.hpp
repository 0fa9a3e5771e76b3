#pragma once

#include <complex>
#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace geoage::numerics {

using cplx = std::complex<double>;

// Bisection for a decreasing function with f(lo) > 0 > f(hi); f(lo) may be
// +infinity. Returns once |f(root)| < tol or the bracket is below 1e-15.
// Throws BracketError when the sign pattern is violated.
double find_root_monotone(const std::function<double(double)>& f, double lo,
                          double hi, double tol, int max_iter = 200);

struct QuadResult {
  double value = 0.0;
  double error = 0.0;
  int evaluations = 0;
};

// Globally adaptive Gauss-Kronrod (7/15). Converges when the error estimate
// is below max(tol * |I|, abs_tol). Throws ConvergenceError otherwise.
QuadResult integrate_adaptive(const std::function<double(double)>& f,
                              double a, double b, double tol,
                              double abs_tol = 0.0, int max_intervals = 4000);

struct ComplexQuadResult {
  cplx value;
  double error = 0.0;
  int evaluations = 0;
};

ComplexQuadResult integrate_adaptive_complex(
    const std::function<cplx(double)>& f, double a, double b, double tol,
    double abs_tol = 0.0, int max_intervals = 4000);

// Integral over [a, inf) of f with |f(v)| <= C v^-beta (beta > 1). The
// power-law tail beyond the last cutpoint is added and counted as error.
QuadResult integrate_semi_infinite(const std::function<double(double)>& f,
                                   double a, double tol, double beta,
                                   double abs_tol = 0.0);

// Gauss-Legendre rule on [-1, 1].
struct GaussRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};
const GaussRule& gauss_legendre(int n);

// Characteristic function (or Laplace transform at j omega) of a random
// variable, optionally with a known point mass at zero. The atom is removed
// before integration and added back analytically.
struct ComplexFn {
  std::function<cplx(double)> fn;
  bool conjugate_symmetric = true;
  double atom_at_zero = 0.0;
};

struct InversionOptions {
  double omega_cap = 1e4;
  int nodes_per_panel = 8;
};

struct InversionResult {
  double value = 0.0;
  bool converged = false;
  double omega_max = 0.0;
  int panels = 0;
};

// P(X <= x) from phi(w) = E[exp(j w X)].
InversionResult gil_pelaez_cdf(const ComplexFn& phi, double x, double tol,
                               const InversionOptions& opt = {});

// P(U < c) from laplace(w) = E[exp(-j w U)] of a non-negative U.
InversionResult plancherel_ccdf(const ComplexFn& laplace, double c,
                                double tol, const InversionOptions& opt = {});

// Trapezoid variants on a uniform grid w_k = k * step, k = 0..n-1, for
// integrands that are even in w (conjugate-symmetric transforms). The grid is
// supplied by the caller, who controls aliasing (2 pi / step must exceed the
// support width) and truncation.
//
// Continuous part P(0 < U < c) given samples of E[exp(-j w U)] minus atoms.
// (exp(j w c) - 1) / (j w), with the w -> 0 limit c.
cplx indicator_kernel(double w, double c);

double plancherel_trapezoid(std::span<const cplx> laplace, double step,
                            double c);
// P(X <= x) - 1/2 given samples of E[exp(j w X)] and the mean of X.
double gil_pelaez_trapezoid(std::span<const cplx> phi, double step,
                            double mean, double x);

// sum_{k>=1} binom(jw, k) (-1)^{k+1} x^k = 1 - (1 - x)^{jw}, x in [0, 1].
cplx binomial_ksum_closed(double omega, double x);
cplx binomial_ksum_series(double omega, double x, int terms);

}  // namespace geoage::numerics
