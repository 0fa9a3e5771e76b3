#pragma once

#include <cstddef>
#include <iosfwd>
#include <vector>

#include "geoage/geometry.hpp"
#include "geoage/params.hpp"

namespace geoage {

// Mean number of receivers outside radius R weighted by 1/(1 + D):
// 2 pi lambda int_R^inf v dv / (1 + v^alpha / (T r^alpha)).
double tail_integral(double radius, const SystemParams& params);
// Same integral from raw constants; throws DivergentIntegralError when
// alpha <= 2.
double tail_integral(double radius, double lambda, double tr_alpha,
                     double alpha);
// Full-plane value lambda pi (T r^alpha)^delta pi delta / sin(pi delta).
double full_plane_tail(const SystemParams& params);

struct PolicyInputs {
  std::vector<double> neighbor_D;
  double tail = 0.0;

  void validate() const;
};

// sum_j 1/D_j + tail > 1.
bool access_condition(const PolicyInputs& in);

// f(eta) = 1/eta - sum_j 1/(1 + D_j - eta) - tail.
double access_residual(const PolicyInputs& in, double eta);

// Root of access_residual on (0, 1], or 1 when the access condition fails.
double solve_access_probability(const PolicyInputs& in, double tol = 1e-12);

// Closed-form access probability when the only observed receiver sits at
// distance y (the stopping set is the disk through that receiver).
double closed_form_nearest(double y, const SystemParams& params);

struct PolicyAssignment {
  std::vector<double> gamma;
  std::vector<bool> condition_met;
  std::vector<std::size_t> n_observed;
  std::vector<double> observation_radius;

  std::size_t size() const { return gamma.size(); }
  void write_csv(std::ostream& os) const;
};

PolicyAssignment assign_policies(const NetworkRealization& net,
                                 const StoppingSetSpec& spec,
                                 const SystemParams& params);

}  // namespace geoage
