#include <cmath>
#include <string>

#include "geoage/error.hpp"
#include "geoage/numerics.hpp"

namespace geoage::numerics {

double find_root_monotone(const std::function<double(double)>& f, double lo,
                          double hi, double tol, int max_iter) {
  if (!(tol > 0.0)) throw InvalidArgument("root tolerance must be > 0");
  if (!(lo < hi)) throw BracketError("root bracket requires lo < hi");
  const double flo = f(lo);
  const double fhi = f(hi);
  if (std::isnan(flo) || std::isnan(fhi) || !(flo > 0.0) || !(fhi < 0.0)) {
    throw BracketError("bracket violated: f(lo)=" + std::to_string(flo) +
                       ", f(hi)=" + std::to_string(fhi));
  }
  double mid = 0.5 * (lo + hi);
  for (int it = 0; it < max_iter; ++it) {
    mid = 0.5 * (lo + hi);
    const double fm = f(mid);
    if (std::fabs(fm) < tol || hi - lo < 1e-15) return mid;
    if (fm > 0.0) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return mid;
}

}  // namespace geoage::numerics
