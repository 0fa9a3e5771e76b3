#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>

#include "geoage/analysis.hpp"
#include "geoage/error.hpp"
#include "geoage/numerics.hpp"
#include "geoage/policy.hpp"

namespace geoage {

using numerics::cplx;

namespace {
constexpr double kPi = std::numbers::pi;

// Mark of a receiver at distance v in U(kappa).
struct Mark {
  double kappa;
  double c;  // T r^alpha
  double alpha;
  double operator()(double v) const {
    return kappa * c / (std::pow(v, alpha) + (1.0 - kappa) * c);
  }
  // Distance at which the mark equals w (> 0).
  double inverse(double w) const {
    const double base = kappa * c / w - (1.0 - kappa) * c;
    return base <= 0.0 ? 0.0 : std::pow(base, 1.0 / alpha);
  }
  double at_zero() const {
    return kappa >= 1.0 ? std::numeric_limits<double>::infinity()
                        : kappa / (1.0 - kappa);
  }
};

}  // namespace

double V_term(double kappa, double radius, const SystemParams& params) {
  return kappa * tail_integral(radius, params);
}

std::complex<double> laplace_U(std::complex<double> s, double kappa,
                               double radius, const SystemParams& params) {
  if (radius < 0.0) throw InvalidArgument("radius must be >= 0");
  if (radius == 0.0 || s == 0.0 || kappa == 0.0) return {1.0, 0.0};
  const Mark g{kappa, params.tr_alpha(), params.alpha()};
  const double lam = params.lambda();
  auto integrand = [&](double v) -> cplx {
    return 2.0 * kPi * lam * v * (1.0 - std::exp(-s * g(v)));
  };
  // Where |s| g(v) exceeds kFast the exponential term averages out to
  // O(1 / (|s| g)); that core contributes its bare area.
  constexpr double kFast = 1e4;
  double lo = 0.0;
  cplx total = 0.0;
  if (std::abs(s) * g.at_zero() > kFast) {
    lo = std::min(radius, g.inverse(kFast / std::abs(s)));
    total += kPi * lam * lo * lo;
  }
  // Split where the mark crosses 1 so the oscillating core is isolated.
  const double knee = std::clamp(g.inverse(1.0), lo, radius);
  const double abs_tol = 1e-12;
  if (knee > lo) {
    total += numerics::integrate_adaptive_complex(integrand, lo, knee, 1e-10,
                                                  abs_tol, 20000)
                 .value;
  }
  if (knee < radius) {
    total += numerics::integrate_adaptive_complex(integrand, knee, radius,
                                                  1e-10, abs_tol, 20000)
                 .value;
  }
  return std::exp(-total);
}

Flagged eta_ccdf_reference(double kappa, double radius,
                           const SystemParams& params, double tol) {
  const double c = 1.0 - V_term(kappa, radius, params);
  numerics::ComplexFn fn;
  fn.fn = [&](double w) { return laplace_U({0.0, w}, kappa, radius, params); };
  fn.atom_at_zero =
      std::exp(-params.lambda() * kPi * radius * radius);
  numerics::InversionOptions opt;
  opt.omega_cap = 4000.0;
  const auto res = numerics::plancherel_ccdf(fn, c, tol, opt);
  return {res.value, res.converged};
}

struct EtaModel::Table {
  enum class Kind { regular, zero, point_mass };
  Kind kind = Kind::regular;
  double kappa = 0.0;
  double c_max = 0.0;  // 1 - V(kappa)
  double pre = 1.0;    // probability that no mark reaches c_max
  double p0 = 1.0;     // atom of the truncated U at zero
  double step = 0.0;
  std::vector<cplx> psi;  // L(j w_k) - p0
  bool converged = true;
};

EtaModel::EtaModel(const SystemParams& params, double radius,
                   EtaSettings settings)
    : params_(params),
      radius_(radius),
      tail_(tail_integral(radius, params)),
      settings_(settings) {
  if (radius < 0.0) throw InvalidArgument("radius must be >= 0");
}

EtaModel::~EtaModel() = default;

const EtaModel::Table& EtaModel::table(double kappa) const {
  {
    std::lock_guard<std::mutex> lock(mu_);
    auto it = tables_.find(kappa);
    if (it != tables_.end()) return *it->second;
  }
  auto t = std::make_unique<Table>();
  t->kappa = kappa;
  t->c_max = 1.0 - kappa * tail_;
  const double lam = params_.lambda();
  const double R = radius_;
  const Mark g{kappa, params_.tr_alpha(), params_.alpha()};
  if (t->c_max <= 0.0) {
    t->kind = Table::Kind::zero;
  } else if (R == 0.0 || kappa == 0.0) {
    t->kind = Table::Kind::point_mass;
  } else {
    // A single receiver whose mark reaches c_max already forces U >= c_max,
    // so P(U < c) = P(no such receiver) P(U_rest < c) for every c <= c_max.
    const double vc =
        g.at_zero() <= t->c_max ? 0.0 : std::min(R, g.inverse(t->c_max));
    t->pre = std::exp(-lam * kPi * vc * vc);
    if (vc >= R) {
      t->kind = Table::Kind::point_mass;
    } else {
      const auto build = [&] {
        const auto& rule = numerics::gauss_legendre(8);
        std::vector<double> w;
        std::vector<double> m;
        const double dw = settings_.phase_step / settings_.omega_cap;
        const double w_end = g(R);
        double a = vc;
        while (a < R) {
          const double target = g(a) - dw;
          double b = target <= w_end ? R : g.inverse(target);
          if (a > 0.0) b = std::min(b, 1.5 * a);
          b = std::min(std::max(b, a + 1e-9 * R), R);
          for (std::size_t q = 0; q < rule.nodes.size(); ++q) {
            const double v = a + 0.5 * (b - a) * (rule.nodes[q] + 1.0);
            w.push_back(g(v));
            m.push_back(2.0 * kPi * lam * v * 0.5 * (b - a) * rule.weights[q]);
          }
          a = b;
        }
        double mass = 0.0;
        double mean = 0.0;
        double var = 0.0;
        for (std::size_t i = 0; i < w.size(); ++i) {
          mass += m[i];
          mean += m[i] * w[i];
          var += m[i] * w[i] * w[i];
        }
        t->p0 = std::exp(-mass);
        // Chernoff bound on P(U_rest >= c_max): when negligible the law below
        // c_max is the bare prefactor.
        // Shifted queries reach down to c_max - kappa / (1 - kappa).
        const double c_lo = t->c_max - g.at_zero();
        double log_bound = 0.0;
        for (double sc = 1.0; sc <= 1024.0 && c_lo > 0.0; sc *= 2.0) {
          double lg = -sc * c_lo;
          for (std::size_t i = 0; i < w.size(); ++i) {
            lg += m[i] * std::expm1(sc * w[i]);
          }
          log_bound = std::min(log_bound, lg);
        }
        if (log_bound < std::log(settings_.tol * 0.1)) {
          t->kind = Table::Kind::point_mass;
          t->converged = true;
          return;
        }
        const double period =
            std::max(mean + 12.0 * std::sqrt(var) + 1.0, 2.0) + t->c_max;
        t->step = 2.0 * kPi / period;
        const std::size_t n = w.size();
        std::vector<cplx> z(n, cplx(1.0, 0.0));
        std::vector<cplx> rot(n);
        for (std::size_t i = 0; i < n; ++i) {
          rot[i] = std::exp(cplx(0.0, -t->step * w[i]));
        }
        const std::size_t per_panel = static_cast<std::size_t>(
            std::max(1.0, std::ceil(kPi / t->step)));
        const double stop = settings_.tol * 0.01;
        const double probes[3] = {t->c_max, 0.5 * t->c_max, 0.25 * t->c_max};
        double panel[3] = {0.0, 0.0, 0.0};
        int small = 0;
        t->converged = false;
        for (std::size_t k = 0;; ++k) {
          const double omega = k * t->step;
          if (k > 0 && k % 128 == 0) {
            for (std::size_t i = 0; i < n; ++i) {
              z[i] = std::exp(cplx(0.0, -omega * w[i]));
            }
          }
          cplx s = 0.0;
          for (std::size_t i = 0; i < n; ++i) {
            s += m[i] * z[i];
            z[i] *= rot[i];
          }
          const cplx psi = std::exp(s - mass) - t->p0;
          t->psi.push_back(psi);
          for (int p = 0; k > 0 && p < 3; ++p) {
            const cplx kernel = numerics::indicator_kernel(omega, probes[p]);
            panel[p] += t->step / kPi * std::real(psi * kernel);
          }
          if (k > 0 && k % per_panel == 0) {
            const double worst = std::max({std::fabs(panel[0]),
                                           std::fabs(panel[1]),
                                           std::fabs(panel[2])});
            small = worst < stop ? small + 1 : 0;
            panel[0] = panel[1] = panel[2] = 0.0;
            if (small >= 3) {
              t->converged = true;
              break;
            }
          }
          if (omega >= settings_.omega_cap) break;
        }
      };
      build();
    }
  }
  std::lock_guard<std::mutex> lock(mu_);
  auto [it, inserted] = tables_.emplace(kappa, std::move(t));
  return *it->second;
}

double EtaModel::cdf_shifted(const Table& t, double shift) const {
  const double c = t.c_max - shift;
  if (c <= 0.0) return 0.0;
  switch (t.kind) {
    case Table::Kind::zero:
      return 0.0;
    case Table::Kind::point_mass:
      return t.pre;
    case Table::Kind::regular:
      break;
  }
  const double cont = numerics::plancherel_trapezoid(t.psi, t.step, c);
  return std::clamp(t.pre * (t.p0 + cont), 0.0, t.pre);
}

Flagged EtaModel::ccdf(double kappa) const {
  if (kappa <= 0.0) return {1.0, true};
  if (kappa > 1.0) return {0.0, true};
  const Table& t = table(kappa);
  return {cdf_shifted(t, 0.0), t.converged};
}

Flagged EtaModel::atom_one() const { return ccdf(1.0); }

void EtaModel::refine() const {
  {
    std::lock_guard<std::mutex> lock(mu_);
    if (!nodes_.empty()) return;
  }
  const double end = tail_ > 1.0 ? 1.0 / tail_ : 1.0;
  std::vector<std::pair<double, double>> pts;
  bool ok = true;
  auto f = [&](double k) {
    if (k <= 0.0) return 1.0;
    const Flagged v = ccdf(k);
    ok = ok && v.converged;
    return v.value;
  };
  const int n0 = std::max(2, settings_.kappa_initial);
  std::function<void(double, double, double, double, int)> split =
      [&](double a, double fa, double b, double fb, int depth) {
        const double m = 0.5 * (a + b);
        const double fm = f(m);
        const double diff = std::fabs(fa + fb - 2.0 * fm) * (b - a) / 4.0;
        if (diff > settings_.kappa_tol && depth < settings_.kappa_max_depth) {
          split(a, fa, m, fm, depth + 1);
          split(m, fm, b, fb, depth + 1);
        } else {
          pts.emplace_back(m, fm);
          pts.emplace_back(b, fb);
        }
      };
  double a = 0.0;
  double fa = 1.0;
  pts.emplace_back(a, fa);
  for (int i = 1; i < n0; ++i) {
    const double b = end * i / (n0 - 1);
    const double fb = f(b);
    split(a, fa, b, fb, 0);
    a = b;
    fa = fb;
  }
  std::sort(pts.begin(), pts.end());
  double area = 0.0;
  std::vector<double> nodes;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    nodes.push_back(pts[i].first);
    if (i > 0) {
      area += 0.5 * (pts[i].second + pts[i - 1].second) *
              (pts[i].first - pts[i - 1].first);
    }
  }
  std::lock_guard<std::mutex> lock(mu_);
  nodes_ = std::move(nodes);
  mean_ = area;
  mean_converged_ = ok;
}

const std::vector<double>& EtaModel::kappa_nodes() const {
  refine();
  return nodes_;
}

Flagged EtaModel::mean() const {
  refine();
  return {mean_, mean_converged_};
}

Flagged EtaModel::z_of_D(double D) const {
  refine();
  if (D < 0.0) throw InvalidArgument("D must be >= 0");
  // A receiver outside the interferer's disk is not observed by it, so its
  // access law is the unconditional one.
  if (D > radius_D()) return mean();
  bool ok = true;
  double area = 0.0;
  double prev_k = 0.0;
  double prev_f = 1.0;
  for (std::size_t i = 1; i < nodes_.size(); ++i) {
    const double k = nodes_[i];
    const Table& t = table(k);
    ok = ok && t.converged;
    const double denom = 1.0 - k + D;
    const double shift =
        denom > 0.0 ? k / denom : std::numeric_limits<double>::infinity();
    const double f = cdf_shifted(t, shift);
    area += 0.5 * (f + prev_f) * (k - prev_k);
    prev_k = k;
    prev_f = f;
  }
  return {std::clamp(area, 0.0, 1.0), ok};
}

double EtaModel::radius_D() const {
  if (radius_ == 0.0) return -1.0;
  return std::pow(radius_, params_.alpha()) / params_.tr_alpha();
}

Flagged EtaModel::z(double distance) const {
  if (distance < 0.0) throw InvalidArgument("distance must be >= 0");
  return z_of_D(std::pow(distance, params_.alpha()) / params_.tr_alpha());
}

EtaDistribution EtaModel::distribution(
    const std::vector<double>& kappa_grid) const {
  EtaDistribution d;
  d.kappa_grid = kappa_grid;
  for (double k : kappa_grid) {
    const Flagged v = ccdf(k);
    d.ccdf.push_back(v.value);
    d.converged.push_back(v.converged);
    d.all_converged = d.all_converged && v.converged;
  }
  const Flagged atom = atom_one();
  const Flagged m = mean();
  d.atom_one = atom.value;
  d.mean_eta = m.value;
  d.all_converged = d.all_converged && atom.converged && m.converged;
  return d;
}

namespace {
double spec_radius(const StoppingSetSpec& spec, const SystemParams& params) {
  return spec.analysis_radius(params.lambda());
}
}  // namespace

Flagged eta_ccdf(double kappa, const StoppingSetSpec& spec,
                 const SystemParams& params) {
  return EtaModel(params, spec_radius(spec, params)).ccdf(kappa);
}

Flagged eta_atom_one(const StoppingSetSpec& spec, const SystemParams& params) {
  return EtaModel(params, spec_radius(spec, params)).atom_one();
}

Flagged mean_eta(const StoppingSetSpec& spec, const SystemParams& params) {
  return EtaModel(params, spec_radius(spec, params)).mean();
}

Flagged z_function(double distance, const StoppingSetSpec& spec,
                   const SystemParams& params) {
  return EtaModel(params, spec_radius(spec, params)).z(distance);
}

ZTable::ZTable(const EtaModel& model, std::size_t points) {
  const Flagged m = model.mean();
  limit_ = m.value;
  converged_ = m.converged;
  const double d_radius = model.radius_D();
  if (d_radius <= 0.0) return;
  // Z is tabulated up to the disk edge and equals the limit beyond it.
  const double lo = std::log(1e-6);
  const double hi = std::log(std::min(d_radius, 1e8));
  edge_ = d_radius;
  if (hi <= lo) {
    log_d_ = {lo};
    z_ = {model.z_of_D(d_radius).value};
    return;
  }
  for (std::size_t i = 0; i < points; ++i) {
    const double ld = lo + (hi - lo) * i / (points - 1);
    const Flagged v = model.z_of_D(std::exp(ld));
    log_d_.push_back(ld);
    z_.push_back(v.value);
    converged_ = converged_ && v.converged;
  }
  // Enforce monotonicity against small inversion noise.
  for (std::size_t i = 1; i < z_.size(); ++i) z_[i] = std::max(z_[i], z_[i - 1]);
}

ZTable ZTable::constant(double value) {
  ZTable t;
  t.log_d_ = {0.0, 1.0};
  t.z_ = {value, value};
  t.limit_ = value;
  return t;
}

double ZTable::operator()(double D) const {
  if (z_.empty() || D > edge_) return limit_;
  if (D <= 0.0) return z_.front();
  const double ld = std::log(D);
  if (ld <= log_d_.front()) return z_.front();
  if (ld >= log_d_.back()) return z_.back();
  const auto it = std::upper_bound(log_d_.begin(), log_d_.end(), ld);
  const std::size_t k = static_cast<std::size_t>(it - log_d_.begin());
  const double t = (ld - log_d_[k - 1]) / (log_d_[k] - log_d_[k - 1]);
  return z_[k - 1] + t * (z_[k] - z_[k - 1]);
}

}  // namespace geoage
