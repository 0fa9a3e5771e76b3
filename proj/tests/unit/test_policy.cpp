#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include "geoage/error.hpp"
#include "geoage/geometry.hpp"
#include "geoage/params.hpp"
#include "geoage/policy.hpp"

using namespace geoage;

namespace {

constexpr double kPi = std::numbers::pi;

SystemParams fig_params(double lambda = 1e-4, double r = 25.0) {
  return SystemParams(lambda, r, 3.8, 1.0, 1e11, 0.3);
}

PolicyInputs random_inputs(std::mt19937_64& rng) {
  std::uniform_int_distribution<int> N(0, 8);
  std::uniform_real_distribution<double> logd(-3.0, 2.0), T(0.0, 1.5);
  PolicyInputs in;
  const int n = N(rng);
  for (int k = 0; k < n; ++k) in.neighbor_D.push_back(std::pow(10.0, logd(rng)));
  in.tail = T(rng);
  return in;
}

}  // namespace

TEST_CASE("tail integral reference values") {
  const SystemParams p4(1e-4, 25.0, 4.0, 1.0, 1e11, 0.3);
  CHECK(tail_integral(0.0, p4) == doctest::Approx(0.30843).epsilon(1e-4));
  const SystemParams p = fig_params();
  const double delta = 2.0 / 3.8;
  const double identity = 1e-4 * kPi * std::pow(std::pow(25.0, 3.8), delta) *
                          kPi * delta / std::sin(kPi * delta);
  CHECK(tail_integral(0.0, p) == doctest::Approx(identity).epsilon(1e-12));
  CHECK(tail_integral(0.0, p) == doctest::Approx(0.326).epsilon(2e-3));
  CHECK(full_plane_tail(p) == tail_integral(0.0, p));
  // Quadrature from zero agrees with the identity.
  const double tiny = tail_integral(1e-6, p);
  CHECK(tiny == doctest::Approx(identity).epsilon(1e-9));
  CHECK(tail_integral(1e7, p) < 1e-6);
  CHECK_THROWS_AS(tail_integral(10.0, 1e-4, 1e5, 2.0), DivergentIntegralError);
  CHECK_THROWS_AS(tail_integral(-1.0, p), InvalidArgument);
}

TEST_CASE("tail integral is strictly decreasing in the radius") {
  const SystemParams p = fig_params();
  double prev = tail_integral(0.0, p);
  for (double R = 5.0; R < 3000.0; R *= 1.3) {
    const double t = tail_integral(R, p);
    CHECK(t < prev);
    CHECK(t > 0.0);
    prev = t;
  }
}

TEST_CASE("access condition examples") {
  CHECK_FALSE(access_condition({{}, 0.326}));
  CHECK(access_condition({{1e-9}, 0.0}));
  CHECK(access_condition({{1.0}, 0.5}));
  // Ties fall on the side of eta = 1.
  CHECK_FALSE(access_condition({{}, 1.0}));
  CHECK_FALSE(access_condition({{2.0}, 0.5}));
}

TEST_CASE("solve_access_probability examples") {
  CHECK(solve_access_probability({{}, 0.5}) == 1.0);
  CHECK(solve_access_probability({{}, 2.0}) == doctest::Approx(0.5));
  CHECK(solve_access_probability({{}, 4.0}) == doctest::Approx(0.25));
  CHECK(solve_access_probability({{1e-12}, 0.0}) ==
        doctest::Approx(0.5).epsilon(1e-9));
  const PolicyInputs in{{1.0}, 0.5};
  const double eta = solve_access_probability(in);
  CHECK(std::fabs(access_residual(in, eta)) < 1e-9);
  CHECK_THROWS_AS(solve_access_probability({{0.0}, 0.1}), InvalidArgument);
  CHECK_THROWS_AS(solve_access_probability({{}, -0.1}), InvalidArgument);
}

TEST_CASE("fixed point residual on randomized inputs") {
  std::mt19937_64 rng(1);
  for (int t = 0; t < 1000; ++t) {
    const PolicyInputs in = random_inputs(rng);
    const double eta = solve_access_probability(in);
    if (access_condition(in)) {
      CHECK(eta > 0.0);
      CHECK(eta < 1.0);
      CHECK(std::fabs(access_residual(in, eta)) < 1e-9);
    } else {
      CHECK(eta == 1.0);
    }
  }
}

TEST_CASE("eta is monotone in the observation") {
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> logd(-3.0, 2.0), shrink(0.1, 0.99);
  for (int t = 0; t < 300; ++t) {
    PolicyInputs in = random_inputs(rng);
    const double eta = solve_access_probability(in);
    PolicyInputs more = in;
    more.neighbor_D.push_back(std::pow(10.0, logd(rng)));
    CHECK(solve_access_probability(more) <= eta + 1e-12);
    if (!in.neighbor_D.empty()) {
      PolicyInputs closer = in;
      closer.neighbor_D[0] *= shrink(rng);
      CHECK(solve_access_probability(closer) <= eta + 1e-12);
    }
  }
}

TEST_CASE("closed form for a single observed receiver") {
  const SystemParams p = fig_params();
  CHECK(closed_form_nearest(1e6, p) == 1.0);
  for (double y : {1.0, 5.0, 12.0, 20.0, 30.0, 45.0}) {
    PolicyInputs in;
    in.neighbor_D = {std::pow(y, 3.8) / p.tr_alpha()};
    in.tail = tail_integral(y, p);
    const double generic = solve_access_probability(in, 1e-14);
    const double closed = closed_form_nearest(y, p);
    CHECK(std::fabs(closed - generic) < 1e-8);
    if (access_condition(in)) {
      CHECK(closed > 0.0);
      CHECK(closed < 1.0);
    }
  }
  CHECK_THROWS_AS(closed_form_nearest(0.0, p), InvalidArgument);
}

TEST_CASE("empty spec gives eta = 1 at default parameters") {
  const SystemParams p = SystemParams::defaults();
  const auto net = sample_network(p, 1000.0, Boundary::torus, 1);
  const auto pol = assign_policies(net, StoppingSetSpec::empty(), p);
  for (std::size_t i = 0; i < pol.size(); ++i) {
    CHECK(pol.gamma[i] == 1.0);
    CHECK_FALSE(pol.condition_met[i]);
  }
}

TEST_CASE("empty spec with a tail above one follows the fixed point") {
  const SystemParams p = fig_params(1e-3);
  const double tail = full_plane_tail(p);
  REQUIRE(tail > 1.0);
  const auto net = sample_network(p, 500.0, Boundary::torus, 1);
  const auto pol = assign_policies(net, StoppingSetSpec::empty(), p);
  for (double g : pol.gamma) CHECK(g == doctest::Approx(1.0 / tail));
}

TEST_CASE("isolated link and symmetric pairs") {
  const SystemParams p = fig_params();
  const NetworkRealization single(1000.0, Boundary::open, {{500, 500}},
                                  {{525, 500}}, 0);
  for (double R : {50.0, 200.0}) {
    const auto pol = assign_policies(single, StoppingSetSpec::disk(R), p);
    CHECK((pol.gamma[0] == 1.0) == (tail_integral(R, p) <= 1.0));
  }
  // Mirror-image links: each receiver is 20 m from the other transmitter.
  const NetworkRealization pair(1000.0, Boundary::open,
                                {{480, 500}, {520, 500}},
                                {{500, 515}, {500, 485}}, 0);
  const auto pol = assign_policies(pair, StoppingSetSpec::disk(100.0), p);
  CHECK(pol.condition_met[0]);
  CHECK(pol.gamma[0] == doctest::Approx(pol.gamma[1]).epsilon(1e-12));
  CHECK(pol.gamma[0] < 1.0);
}

TEST_CASE("assignments satisfy the fixed point for nested disks") {
  const SystemParams p = fig_params(3e-4);
  const auto net = sample_network(p, 800.0, Boundary::torus, 4);
  for (double R : {50.0, 100.0, 200.0}) {
    const auto spec = StoppingSetSpec::disk(R);
    const auto pol = assign_policies(net, spec, p);
    for (std::size_t i = 0; i < net.size(); ++i) {
      const auto obs = observed_receivers(i, spec, net);
      PolicyInputs in;
      for (const auto& m : obs.members) {
        in.neighbor_D.push_back(std::pow(m.distance, 3.8) / p.tr_alpha());
      }
      in.tail = tail_integral(R, p);
      CHECK(pol.gamma[i] > 0.0);
      CHECK(pol.gamma[i] <= 1.0);
      CHECK(pol.condition_met[i] == access_condition(in));
      if (pol.condition_met[i]) {
        CHECK(std::fabs(access_residual(in, pol.gamma[i])) < 1e-9);
      } else {
        CHECK(pol.gamma[i] == 1.0);
      }
      CHECK(pol.n_observed[i] == obs.members.size());
    }
  }
}

TEST_CASE("nearest-receiver policy uses the realized radius") {
  const SystemParams p = fig_params(3e-4);
  const auto net = sample_network(p, 800.0, Boundary::torus, 8);
  const auto pol = assign_policies(net, StoppingSetSpec::nearest(1), p);
  for (std::size_t i = 0; i < net.size(); i += 5) {
    CHECK(pol.gamma[i] ==
          doctest::Approx(closed_form_nearest(pol.observation_radius[i], p))
              .epsilon(1e-8));
  }
}

TEST_CASE("translation invariance on the torus") {
  const SystemParams p = fig_params(3e-4);
  const auto net = sample_network(p, 800.0, Boundary::torus, 12);
  std::vector<Point> tx, rx;
  for (std::size_t i = 0; i < net.size(); ++i) {
    tx.push_back({std::fmod(net.transmitter(i).x + 123.4, 800.0),
                  std::fmod(net.transmitter(i).y + 321.0, 800.0)});
    rx.push_back({std::fmod(net.receiver(i).x + 123.4, 800.0),
                  std::fmod(net.receiver(i).y + 321.0, 800.0)});
  }
  const NetworkRealization moved(800.0, Boundary::torus, tx, rx, 12);
  for (const auto& spec : {StoppingSetSpec::disk(150.0),
                           StoppingSetSpec::nearest(3)}) {
    const auto a = assign_policies(net, spec, p);
    const auto b = assign_policies(moved, spec, p);
    for (std::size_t i = 0; i < net.size(); ++i) {
      CHECK(std::fabs(a.gamma[i] - b.gamma[i]) < 1e-12);
    }
  }
}

TEST_CASE("eta tends to one in sparse, small-window and short-link limits") {
  auto ones = [](const PolicyAssignment& pol) {
    std::size_t k = 0;
    for (double g : pol.gamma) k += g == 1.0;
    return pol.size() ? static_cast<double>(k) / pol.size() : 1.0;
  };
  const SystemParams sparse = fig_params(1e-7, 25.0);
  const auto net1 = sample_network(sparse, 20000.0, Boundary::torus, 1);
  CHECK(ones(assign_policies(net1, StoppingSetSpec::disk(200.0), sparse)) >=
        0.99);
  const SystemParams base = fig_params(1e-4, 25.0);
  const auto net2 = sample_network(base, 2000.0, Boundary::torus, 2);
  CHECK(ones(assign_policies(net2, StoppingSetSpec::disk(0.5), base)) >= 0.99);
  const SystemParams short_links = fig_params(1e-4, 0.5);
  const auto net3 = sample_network(short_links, 2000.0, Boundary::torus, 3);
  CHECK(ones(assign_policies(net3, StoppingSetSpec::disk(200.0),
                             short_links)) >= 0.99);
}

TEST_CASE("torus disks wider than half the window are rejected") {
  const SystemParams p = fig_params();
  const auto net = sample_network(p, 400.0, Boundary::torus, 1);
  CHECK_THROWS_AS(assign_policies(net, StoppingSetSpec::disk(250.0), p),
                  InvalidArgument);
}
