#include <algorithm>
#include <cmath>
#include <limits>
#include <mutex>
#include <queue>

#include "geoage/error.hpp"
#include "geoage/numerics.hpp"

namespace geoage::numerics {
namespace {

constexpr double kXgk[8] = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.0};
constexpr double kWgk[8] = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
constexpr double kWg[4] = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

template <typename T>
struct Segment {
  double a;
  double b;
  T value;
  double error;
  double abs_value;
  bool operator<(const Segment& o) const { return error < o.error; }
};

template <typename T, typename F>
Segment<T> kronrod(const F& f, double a, double b) {
  const double c = 0.5 * (a + b);
  const double h = 0.5 * (b - a);
  const T fc = f(c);
  T kron = fc * kWgk[7];
  T gauss = fc * kWg[3];
  double absv = std::abs(fc) * kWgk[7];
  for (int k = 0; k < 7; ++k) {
    const double dx = h * kXgk[k];
    const T f1 = f(c - dx);
    const T f2 = f(c + dx);
    kron += (f1 + f2) * kWgk[k];
    absv += (std::abs(f1) + std::abs(f2)) * kWgk[k];
    if (k % 2 == 1) gauss += (f1 + f2) * kWg[k / 2];
  }
  Segment<T> s{a, b, kron * h, std::abs((kron - gauss) * h), absv * std::fabs(h)};
  return s;
}

template <typename T, typename F>
std::pair<T, double> adaptive(const F& f, double a, double b, double tol,
                              double abs_tol, int max_intervals, int& evals) {
  if (!(a < b)) {
    if (a == b) return {T{}, 0.0};
    throw InvalidArgument("integration requires a < b");
  }
  std::priority_queue<Segment<T>> heap;
  Segment<T> first = kronrod<T>(f, a, b);
  evals = 15;
  T total = first.value;
  double err = first.error;
  double absv = first.abs_value;
  heap.push(first);
  const double eps = std::numeric_limits<double>::epsilon();
  int intervals = 1;
  while (true) {
    const double target = std::max(tol * std::abs(total), abs_tol);
    if (err <= target) break;
    if (err <= 50.0 * eps * absv) break;
    if (intervals >= max_intervals) {
      throw ConvergenceError("adaptive quadrature hit the interval limit");
    }
    Segment<T> worst = heap.top();
    heap.pop();
    const double mid = 0.5 * (worst.a + worst.b);
    if (!(mid > worst.a && mid < worst.b)) {
      throw ConvergenceError("adaptive quadrature reached machine resolution");
    }
    Segment<T> l = kronrod<T>(f, worst.a, mid);
    Segment<T> r = kronrod<T>(f, mid, worst.b);
    evals += 30;
    total += l.value + r.value - worst.value;
    err += l.error + r.error - worst.error;
    absv += l.abs_value + r.abs_value - worst.abs_value;
    heap.push(l);
    heap.push(r);
    ++intervals;
    // Re-sum periodically to avoid drift in the running error.
    if (intervals % 64 == 0) {
      auto copy = heap;
      T t{};
      double e = 0.0;
      while (!copy.empty()) {
        t += copy.top().value;
        e += copy.top().error;
        copy.pop();
      }
      total = t;
      err = e;
    }
  }
  return {total, err};
}

}  // namespace

QuadResult integrate_adaptive(const std::function<double(double)>& f,
                              double a, double b, double tol, double abs_tol,
                              int max_intervals) {
  QuadResult out;
  auto [v, e] = adaptive<double>(f, a, b, tol, abs_tol, max_intervals,
                                 out.evaluations);
  out.value = v;
  out.error = e;
  return out;
}

ComplexQuadResult integrate_adaptive_complex(
    const std::function<cplx(double)>& f, double a, double b, double tol,
    double abs_tol, int max_intervals) {
  ComplexQuadResult out;
  auto [v, e] =
      adaptive<cplx>(f, a, b, tol, abs_tol, max_intervals, out.evaluations);
  out.value = v;
  out.error = e;
  return out;
}

QuadResult integrate_semi_infinite(const std::function<double(double)>& f,
                                   double a, double tol, double beta,
                                   double abs_tol) {
  if (!(beta > 1.0)) {
    throw DivergentIntegralError("tail exponent must exceed 1");
  }
  QuadResult out;
  double lo = a;
  double width = std::max(1.0, std::fabs(a));
  for (int stage = 0; stage < 400; ++stage) {
    const double hi = lo + width;
    const double seg_abs = std::max(abs_tol, 0.1 * tol * std::fabs(out.value));
    const QuadResult seg = integrate_adaptive(f, lo, hi, 0.5 * tol, seg_abs);
    out.value += seg.value;
    out.error += seg.error;
    out.evaluations += seg.evaluations + 1;
    const double fh = f(hi);
    if (hi > 0.0) {
      const double tail = fh * hi / (beta - 1.0);
      const double bound = std::fabs(tail);
      if (stage > 0 &&
          bound <= std::max(0.5 * tol * std::fabs(out.value), abs_tol)) {
        out.value += tail;
        out.error += bound;
        return out;
      }
    }
    lo = hi;
    width *= 2.0;
  }
  throw ConvergenceError("semi-infinite quadrature did not reach its tail");
}

const GaussRule& gauss_legendre(int n) {
  static std::mutex mu;
  static std::vector<GaussRule> cache(129);
  if (n < 1 || n > 128) throw InvalidArgument("Gauss-Legendre order 1..128");
  std::lock_guard<std::mutex> lock(mu);
  GaussRule& rule = cache[static_cast<std::size_t>(n)];
  if (!rule.nodes.empty()) return rule;
  rule.nodes.resize(static_cast<std::size_t>(n));
  rule.weights.resize(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    double x = std::cos(M_PI * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0;
      double p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::fabs(dx) < 1e-16) break;
    }
    rule.nodes[static_cast<std::size_t>(i)] = x;
    rule.weights[static_cast<std::size_t>(i)] = 2.0 / ((1.0 - x * x) * dp * dp);
  }
  return rule;
}

}  // namespace geoage::numerics
