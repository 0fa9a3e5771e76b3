#include "geoage/policy.hpp"

#include <cmath>
#include <limits>
#include <map>
#include <numbers>
#include <ostream>

#include "geoage/error.hpp"
#include "geoage/numerics.hpp"
#include "geoage/table.hpp"

namespace geoage {

namespace {
constexpr double kPi = std::numbers::pi;
}

double tail_integral(double radius, double lambda, double tr_alpha,
                     double alpha) {
  if (!(alpha > 2.0)) {
    throw DivergentIntegralError("tail integral diverges for alpha <= 2");
  }
  if (radius < 0.0) throw InvalidArgument("observation radius must be >= 0");
  const double delta = 2.0 / alpha;
  const double full = lambda * kPi * std::pow(tr_alpha, delta) * kPi * delta /
                      std::sin(kPi * delta);
  if (radius == 0.0) return full;
  if (std::isinf(radius)) return 0.0;
  // With v = s (T r^alpha)^(1/alpha) the integrand is s / (1 + s^alpha).
  const double scale = std::pow(tr_alpha, 1.0 / alpha);
  const double s0 = radius / scale;
  const double pref = 2.0 * kPi * lambda * scale * scale;
  auto g = [alpha](double s) { return s / (1.0 + std::pow(s, alpha)); };
  if (s0 <= 1.0) {
    const auto inner = numerics::integrate_adaptive(g, 0.0, s0, 1e-13);
    return full - pref * inner.value;
  }
  const auto outer =
      numerics::integrate_semi_infinite(g, s0, 1e-12, alpha - 1.0);
  return pref * outer.value;
}

double tail_integral(double radius, const SystemParams& params) {
  return tail_integral(radius, params.lambda(), params.tr_alpha(),
                       params.alpha());
}

double full_plane_tail(const SystemParams& params) {
  return tail_integral(0.0, params);
}

void PolicyInputs::validate() const {
  for (double d : neighbor_D) {
    if (!(d > 0.0)) throw InvalidArgument("neighbor D must be > 0");
  }
  if (!(tail >= 0.0)) throw InvalidArgument("tail must be >= 0");
}

bool access_condition(const PolicyInputs& in) {
  double s = in.tail;
  for (double d : in.neighbor_D) s += 1.0 / d;
  return s > 1.0;
}

double access_residual(const PolicyInputs& in, double eta) {
  double f = 1.0 / eta - in.tail;
  for (double d : in.neighbor_D) f -= 1.0 / (1.0 + d - eta);
  return f;
}

double solve_access_probability(const PolicyInputs& in, double tol) {
  in.validate();
  if (!access_condition(in)) return 1.0;
  return numerics::find_root_monotone(
      [&](double eta) {
        return eta == 0.0 ? std::numeric_limits<double>::infinity()
                          : access_residual(in, eta);
      },
      0.0, 1.0, tol);
}

double closed_form_nearest(double y, const SystemParams& params) {
  if (!(y > 0.0)) throw InvalidArgument("receiver distance must be > 0");
  const double m = tail_integral(y, params);
  const double d = std::pow(y, params.alpha()) / params.tr_alpha();
  if (!(1.0 / d + m > 1.0)) return 1.0;
  // Smaller root of m eta^2 - (m (1 + D) + 2) eta + (1 + D) = 0, written as
  // 1/M + (1 + D)/2 - sqrt((1 + D)^2 / 4 + 1/M^2) in cancellation-free form.
  const double a = 0.5 * (1.0 + d);
  return (1.0 + d) / (1.0 + a * m + std::sqrt(a * a * m * m + 1.0));
}

PolicyAssignment assign_policies(const NetworkRealization& net,
                                 const StoppingSetSpec& spec,
                                 const SystemParams& params) {
  const std::size_t n = net.size();
  PolicyAssignment out;
  out.gamma.resize(n);
  out.condition_met.resize(n);
  out.n_observed.resize(n);
  out.observation_radius.resize(n);
  if (const auto* d = std::get_if<DiskSet>(&spec.value())) {
    if (net.wrap() == Boundary::torus && d->radius > 0.5 * net.window()) {
      throw InvalidArgument("disk radius exceeds half the torus window");
    }
  }
  const ReceiverIndex index(net);
  std::map<double, double> tails;
  auto tail_at = [&](double radius) {
    auto it = tails.find(radius);
    if (it != tails.end()) return it->second;
    const double t = tail_integral(radius, params);
    tails.emplace(radius, t);
    return t;
  };
  PolicyInputs in;
  for (std::size_t i = 0; i < n; ++i) {
    const Observation obs = index.observe(i, spec);
    in.neighbor_D.clear();
    for (const auto& m : obs.members) {
      in.neighbor_D.push_back(std::pow(m.distance, params.alpha()) /
                              params.tr_alpha());
    }
    in.tail = spec.is_nearest() ? tail_integral(obs.radius, params)
                                : tail_at(obs.radius);
    const bool cond = access_condition(in);
    out.condition_met[i] = cond;
    out.gamma[i] = cond ? solve_access_probability(in) : 1.0;
    out.n_observed[i] = obs.members.size();
    out.observation_radius[i] = obs.radius;
  }
  return out;
}

void PolicyAssignment::write_csv(std::ostream& os) const {
  os << "link_id,gamma,condition_met,n_observed,R_obs\n";
  for (std::size_t i = 0; i < size(); ++i) {
    os << i << ',' << fmt_num(gamma[i]) << ',' << (condition_met[i] ? 1 : 0)
       << ',' << n_observed[i] << ',' << fmt_num(observation_radius[i])
       << '\n';
  }
}

}  // namespace geoage
