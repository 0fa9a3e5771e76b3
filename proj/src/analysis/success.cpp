#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "geoage/analysis.hpp"
#include "geoage/error.hpp"
#include "geoage/numerics.hpp"

namespace geoage {

using numerics::cplx;

namespace {

constexpr double kPi = std::numbers::pi;

// Pool-adjacent-violators projection onto non-decreasing sequences.
void isotonic(std::vector<double>& y) {
  std::vector<double> val;
  std::vector<std::size_t> len;
  for (double v : y) {
    val.push_back(v);
    len.push_back(1);
    while (val.size() > 1 && val[val.size() - 2] > val.back()) {
      const std::size_t n1 = len[len.size() - 2];
      const std::size_t n2 = len.back();
      const double merged =
          (val[val.size() - 2] * n1 + val.back() * n2) / (n1 + n2);
      val.pop_back();
      len.pop_back();
      val.back() = merged;
      len.back() = n1 + n2;
    }
  }
  std::size_t k = 0;
  for (std::size_t b = 0; b < val.size(); ++b) {
    for (std::size_t i = 0; i < len[b]; ++i) y[k++] = std::clamp(val[b], 0.0, 1.0);
  }
}

// Equal-mass atoms of the distribution described by F on the grid.
std::vector<double> quantile_atoms(const std::vector<double>& u,
                                   const std::vector<double>& F, int count) {
  std::vector<double> out;
  for (int k = 0; k < count; ++k) {
    const double p = (k + 0.5) / count;
    const auto it = std::lower_bound(F.begin(), F.end(), p);
    double mu;
    if (it == F.end()) {
      mu = u.back();
    } else if (it == F.begin()) {
      mu = F.front() > 0.0 ? u.front() * p / F.front() : u.front();
    } else {
      const std::size_t j = static_cast<std::size_t>(it - F.begin());
      const double span = F[j] - F[j - 1];
      const double t = span > 0.0 ? (p - F[j - 1]) / span : 1.0;
      mu = u[j - 1] + t * (u[j] - u[j - 1]);
    }
    out.push_back(std::max(mu, 1e-12));
  }
  std::sort(out.begin(), out.end());
  return out;
}

// Characteristic function of Y = log mu for the typical receiver, given the
// activity law of the interferers, sampled on a uniform frequency grid.
class SuccessOperator {
 public:
  SuccessOperator(const SystemParams& params, const ZTable& z,
                  const SuccessSettings& s, double log_u_min)
      : params_(params), z_(z), s_(s), log_u_min_(log_u_min) {
    a2_ = params.alpha() / 2.0;
    scale_ = params.density_scale();
    noise_ = params.tr_alpha() / params.rho();
    if (!std::isfinite(noise_)) noise_ = 0.0;
    // Z is non-decreasing, so q_hat bounds every activity probability.
    q_hat_ = std::min(1.0, std::max(z.limit(), z(0.0)));
    merge_ = 1e-3 / s.omega_cap;
    v_hi_ = std::max(10.0, std::pow(50.0 * s_.omega_cap, 1.0 / a2_));
    base_ = build_nodes(q_hat_);
    const double a2 = a2_;
    i1_ = numerics::integrate_semi_infinite(
              [a2](double v) { return 1.0 / (1.0 + std::pow(v, a2)); }, v_hi_,
              1e-10, a2)
              .value;
    i2_ = numerics::integrate_semi_infinite(
              [a2](double v) {
                const double d = 1.0 + std::pow(v, a2);
                return 1.0 / (d * d);
              },
              v_hi_, 1e-10, 2.0 * a2)
              .value;
  }

  // mu atoms sorted ascending, or empty for the saturated system where
  // every interferer is active with probability Z.
  std::vector<double> apply(const std::vector<double>& mu_atoms,
                            const std::vector<double>& u_grid,
                            bool& inversion_ok, double& omega_max) const {
    const double xi = params_.xi();
    const bool saturated = mu_atoms.empty();
    const double n_mu = saturated ? 1.0 : static_cast<double>(mu_atoms.size());

    // An interferer whose queue law gives activity q transmits with
    // probability min(q, Z(v)). Each activity class is integrated on nodes
    // fitted to its own q, since small q needs far fewer nodes.
    std::vector<double> ell;
    std::vector<double> mass;
    Merger merger(ell, mass, merge_);
    std::size_t full = 0;
    for (double mu : mu_atoms) full += xi / mu >= q_hat_ ? 1 : 0;
    const double base_mass = saturated ? 1.0 : full / n_mu;
    if (base_mass > 0.0) {
      for (std::size_t i = 0; i < base_.v.size(); ++i) {
        if (base_.zv[i] <= 0.0) {
          merger.flush();
          continue;
        }
        merger.add(std::log1p(-base_.zv[i] / base_.den[i]),
                   base_.w[i] * base_mass);
      }
      merger.flush();
    }
    for (std::size_t k = full; k < mu_atoms.size(); ++k) {
      const double q = xi / mu_atoms[k];
      if (!(q > 0.0)) continue;
      const Nodes nodes = build_nodes(q);
      for (std::size_t i = 0; i < nodes.v.size(); ++i) {
        const double qe = std::min(q, nodes.zv[i]);
        if (qe <= 0.0) {
          merger.flush();
          continue;
        }
        merger.add(std::log1p(-qe / nodes.den[i]), nodes.w[i] / n_mu);
      }
      merger.flush();
    }
    // Far field beyond v_hi: second-order expansion in q / (1 + v^a2).
    double q1 = 0.0;
    double q2 = 0.0;
    const double zinf = z_.limit();
    if (saturated) {
      q1 = zinf;
      q2 = zinf * zinf;
    } else {
      for (double mu : mu_atoms) {
        const double q = std::min(zinf, xi / mu);
        q1 += q / n_mu;
        q2 += q * q / n_mu;
      }
    }
    const double tail_l1 = q1 * i1_ + 0.5 * q2 * i2_;  // -int log(1 - x)
    const double tail_l2 = q2 * i2_;                   // int log(1 - x)^2

    double mean = 0.0;
    double var = 0.0;
    for (std::size_t a = 0; a < ell.size(); ++a) {
      mean += mass[a] * ell[a];
      var += mass[a] * ell[a] * ell[a];
    }
    const double ey = -noise_ + scale_ * (mean - tail_l1);
    const double vy = scale_ * (var + tail_l2);
    const double period =
        std::fabs(ey) + 10.0 * std::sqrt(vy) + std::fabs(log_u_min_) + 2.0;
    const double step = 2.0 * kPi / period;

    const std::size_t n = ell.size();
    std::vector<cplx> z(n, cplx(1.0, 0.0));
    std::vector<cplx> rot(n);
    double total_mass = 0.0;
    for (std::size_t a = 0; a < n; ++a) {
      rot[a] = std::exp(cplx(0.0, step * ell[a]));
      total_mass += mass[a];
    }
    const double h = kPi / std::max(std::fabs(log_u_min_), 1.0);
    const std::size_t per_panel =
        static_cast<std::size_t>(std::max(1.0, std::ceil(h / step)));
    const double stop = s_.inversion_tol * 0.01;
    std::vector<cplx> phi;
    int small = 0;
    double bound = 0.0;
    inversion_ok = false;
    for (std::size_t k = 0;; ++k) {
      const double w = k * step;
      if (k > 0 && k % 128 == 0) {
        for (std::size_t a = 0; a < n; ++a) {
          z[a] = std::exp(cplx(0.0, w * ell[a]));
        }
      }
      cplx sum = 0.0;
      for (std::size_t a = 0; a < n; ++a) {
        sum += mass[a] * z[a];
        z[a] *= rot[a];
      }
      // -log M = j w noise + scale * [sum_a m_a (1 - e^{j w l_a}) + far field]
      const cplx far(0.5 * w * w * tail_l2, w * tail_l1);
      const cplx expo = cplx(0.0, -w * noise_) -
                        scale_ * (cplx(total_mass, 0.0) - sum + far);
      const cplx m = std::exp(expo);
      phi.push_back(m);
      if (k > 0) bound += step / kPi * std::abs(m) / w;
      if (k > 0 && k % per_panel == 0) {
        small = bound < stop ? small + 1 : 0;
        bound = 0.0;
        if (small >= 3) {
          inversion_ok = true;
          break;
        }
      }
      if (w >= s_.omega_cap) break;
    }
    omega_max = (phi.size() - 1) * step;
    std::vector<double> F(u_grid.size());
    for (std::size_t i = 0; i < u_grid.size(); ++i) {
      F[i] = std::clamp(
          0.5 + numerics::gil_pelaez_trapezoid(phi, step, ey,
                                               std::log(u_grid[i])),
          0.0, 1.0);
    }
    isotonic(F);
    return F;
  }

 private:
  struct Nodes {
    std::vector<double> v;
    std::vector<double> w;
    std::vector<double> den;
    std::vector<double> zv;
  };

  // Consecutive terms whose log factors differ by less than tol are lumped
  // at their mass-weighted mean; the phase error stays below omega_cap * tol.
  class Merger {
   public:
    Merger(std::vector<double>& ell, std::vector<double>& mass, double tol)
        : ell_(ell), mass_(mass), tol_(tol) {}
    void add(double l, double m) {
      if (m_ > 0.0 && std::fabs(l - start_) > tol_) flush();
      if (m_ == 0.0) start_ = l;
      m_ += m;
      sum_ += m * l;
    }
    void flush() {
      if (m_ > 0.0) {
        ell_.push_back(sum_ / m_);
        mass_.push_back(m_);
      }
      m_ = 0.0;
      sum_ = 0.0;
    }

   private:
    std::vector<double>& ell_;
    std::vector<double>& mass_;
    double tol_;
    double m_ = 0.0;
    double sum_ = 0.0;
    double start_ = 0.0;
  };

  // Gauss-Legendre panels on [0, v_hi] small enough that log(1 - q / (1 +
  // v^a2)) changes by at most phase_step / omega_cap per panel.
  Nodes build_nodes(double q) const {
    const auto& rule = numerics::gauss_legendre(8);
    Nodes out;
    const double v_lo = q > 0.999 ? 1e-7 : 0.0;
    const double dl = s_.phase_step / s_.omega_cap;
    auto ell = [&](double v) {
      return std::log1p(-q / (1.0 + std::pow(v, a2_)));
    };
    double a = v_lo;
    while (a < v_hi_) {
      double b = v_hi_;
      if (q > 0.0) {
        const double target = ell(a) + dl;
        if (target < 0.0) {
          const double x = -std::expm1(target);
          const double base = q / x - 1.0;
          b = base > 0.0 ? std::pow(base, 1.0 / a2_) : 0.0;
        }
      }
      if (a > 0.0) {
        b = std::min(b, 1.5 * a);
        b = std::max(b, a * 1.01);  // bounded panel count near singularities
      } else {
        b = std::min(b, 0.25);
      }
      b = std::min(b, v_hi_);
      for (std::size_t k = 0; k < rule.nodes.size(); ++k) {
        const double v = a + 0.5 * (b - a) * (rule.nodes[k] + 1.0);
        const double d = std::pow(v, a2_);
        out.v.push_back(v);
        out.w.push_back(0.5 * (b - a) * rule.weights[k]);
        out.den.push_back(1.0 + d);
        out.zv.push_back(z_(d));
      }
      a = b;
    }
    return out;
  }

  const SystemParams& params_;
  const ZTable& z_;
  SuccessSettings s_;
  double log_u_min_;
  double a2_ = 0.0;
  double scale_ = 0.0;
  double noise_ = 0.0;
  double q_hat_ = 1.0;
  double merge_ = 0.0;
  double v_hi_ = 0.0;
  double i1_ = 0.0;
  double i2_ = 0.0;
  Nodes base_;
};

}  // namespace

std::vector<double> success_grid(double xi, std::size_t points) {
  if (points < 8) throw InvalidArgument("success grid needs >= 8 points");
  const double u_lo = std::min(0.01, std::max(xi / 4.0, 1e-3));
  std::vector<double> u;
  if (xi > 2.0 * u_lo && xi < 0.95) {
    const std::size_t na = points / 5;
    const std::size_t nb = points - na;
    for (std::size_t i = 0; i < na; ++i) {
      u.push_back(xi - (xi - u_lo) * std::pow(1e-3, static_cast<double>(i) / na));
    }
    for (std::size_t j = 0; j < nb; ++j) {
      const double t = static_cast<double>(j) / (nb - 1);
      u.push_back(xi + (1.0 - xi) * 0.5 * (1.0 - std::cos(kPi * t)));
    }
  } else {
    for (std::size_t j = 0; j < points; ++j) {
      const double t = static_cast<double>(j) / (points - 1);
      u.push_back(u_lo + (1.0 - u_lo) * 0.5 * (1.0 - std::cos(kPi * t)));
    }
  }
  return u;
}

double SuccessCdf::mean() const {
  if (u_grid.empty()) return std::nan("");
  double area = u_grid.front() * (1.0 - 0.5 * F.front());
  for (std::size_t i = 1; i < u_grid.size(); ++i) {
    area += (u_grid[i] - u_grid[i - 1]) * (1.0 - 0.5 * (F[i] + F[i - 1]));
  }
  return area;
}

double SuccessCdf::at(double u) const {
  if (u_grid.empty()) return std::nan("");
  if (u < u_grid.front()) {
    return u <= 0.0 ? 0.0 : F.front() * u / u_grid.front();
  }
  if (u >= u_grid.back()) return F.back();
  const auto it = std::upper_bound(u_grid.begin(), u_grid.end(), u);
  const std::size_t k = static_cast<std::size_t>(it - u_grid.begin());
  const double t = (u - u_grid[k - 1]) / (u_grid[k] - u_grid[k - 1]);
  return F[k - 1] + t * (F[k] - F[k - 1]);
}

namespace {
void check_grid(const std::vector<double>& u_grid) {
  if (u_grid.empty() || !std::is_sorted(u_grid.begin(), u_grid.end()) ||
      u_grid.front() <= 0.0 || u_grid.back() > 1.0) {
    throw InvalidArgument("u grid must be ascending within (0, 1]");
  }
}
}  // namespace

SuccessCdf success_cdf_dominant(const SystemParams& params, const ZTable& z,
                                const std::vector<double>& u_grid,
                                const SuccessSettings& settings) {
  check_grid(u_grid);
  SuccessOperator op(params, z, settings, std::log(u_grid.front()));
  SuccessCdf out;
  out.u_grid = u_grid;
  bool ok = true;
  double omega = 0.0;
  out.F = op.apply({}, u_grid, ok, omega);
  out.inversion_converged = ok;
  out.omega_max = omega;
  out.converged = true;
  return out;
}

SuccessCdf success_cdf_fixed_point(const SystemParams& params,
                                   const ZTable& z,
                                   const std::vector<double>& u_grid,
                                   const SuccessSettings& settings) {
  check_grid(u_grid);
  SuccessOperator op(params, z, settings, std::log(u_grid.front()));
  SuccessCdf out;
  out.u_grid = u_grid;
  bool ok = true;
  double omega = 0.0;
  out.F = op.apply({}, u_grid, ok, omega);
  out.inversion_converged = ok;
  out.omega_max = omega;
  for (int it = 1; it <= settings.max_iter; ++it) {
    const auto atoms = quantile_atoms(u_grid, out.F, settings.quantile_atoms);
    std::vector<double> next = op.apply(atoms, u_grid, ok, omega);
    double res = 0.0;
    for (std::size_t i = 0; i < next.size(); ++i) {
      res = std::max(res, std::fabs(next[i] - out.F[i]));
    }
    out.residual = res;
    out.residual_history.push_back(res);
    out.iterations = it;
    out.inversion_converged = ok;
    out.omega_max = omega;
    for (std::size_t i = 0; i < next.size(); ++i) {
      out.F[i] = (1.0 - settings.damping) * out.F[i] + settings.damping * next[i];
    }
    isotonic(out.F);
    if (res < settings.tol) {
      out.converged = true;
      break;
    }
  }
  return out;
}

SuccessCdf success_cdf_fixed_point(const SystemParams& params,
                                   const StoppingSetSpec& spec,
                                   const std::vector<double>& u_grid,
                                   double tol, int max_iter) {
  const EtaModel model(params, spec.analysis_radius(params.lambda()));
  const ZTable z(model);
  SuccessSettings s;
  s.tol = tol;
  s.max_iter = max_iter;
  return success_cdf_fixed_point(params, z, u_grid, s);
}

MeanSuccess mean_success_probability(const SystemParams& params,
                                     const ZTable& z, double tol) {
  if (!(tol > 0.0)) throw InvalidArgument("tolerance must be > 0");
  const double a2 = params.alpha() / 2.0;
  const double scale = params.density_scale();
  const double xi = params.xi();
  const double base = params.noise_success();
  auto rhs = [&](double x) {
    if (xi == 0.0) return base;
    const auto res = numerics::integrate_semi_infinite(
        [&](double u) {
          const double d = std::pow(u, a2);
          return std::min(xi / x, z(d)) / (1.0 + d);
        },
        0.0, 1e-9, a2);
    return base * std::exp(-scale * res.value);
  };
  MeanSuccess out;
  double x = base;
  double best_x = x;
  double best_res = std::numeric_limits<double>::infinity();
  for (int it = 1; it <= 500; ++it) {
    const double r = rhs(x);
    const double res = std::fabs(r - x);
    out.iterations = it;
    if (res < best_res) {
      best_res = res;
      best_x = x;
    }
    if (res < tol) {
      out.converged = true;
      best_x = x;
      best_res = res;
      break;
    }
    x = 0.5 * x + 0.5 * r;
  }
  out.value = best_x;
  out.residual = best_res;
  out.stable = out.value * z.limit() > xi;
  return out;
}

MeanSuccess mean_success_probability(const SystemParams& params,
                                     const StoppingSetSpec& spec, double tol) {
  const EtaModel model(params, spec.analysis_radius(params.lambda()));
  return mean_success_probability(params, ZTable(model), tol);
}

double stability_max_arrival(const SystemParams& params, const ZTable& z) {
  const double eta = z.limit();
  auto h = [&](double xi) {
    const SystemParams p = params.with_xi(xi);
    return mean_success_probability(p, z, 1e-10).value * eta - xi;
  };
  if (h(1.0) >= 0.0) return 1.0;
  return numerics::find_root_monotone(h, 0.0, 1.0, 1e-9);
}

double stability_max_arrival(const SystemParams& params,
                             const StoppingSetSpec& spec) {
  const EtaModel model(params, spec.analysis_radius(params.lambda()));
  return stability_max_arrival(params, ZTable(model));
}

}  // namespace geoage
