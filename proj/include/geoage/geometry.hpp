#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <variant>
#include <vector>

#include "geoage/params.hpp"

namespace geoage {

struct Point {
  double x = 0.0;
  double y = 0.0;
};

enum class Boundary { torus, open };

std::string to_string(Boundary b);
Boundary parse_boundary(const std::string& text);

// Transmitter/receiver pairs on a square window [0, L)^2.
class NetworkRealization {
 public:
  NetworkRealization(double window, Boundary wrap,
                     std::vector<Point> transmitters,
                     std::vector<Point> receivers, std::uint64_t seed);

  double window() const { return window_; }
  Boundary wrap() const { return wrap_; }
  std::uint64_t seed() const { return seed_; }
  std::size_t size() const { return transmitters_.size(); }
  const std::vector<Point>& transmitters() const { return transmitters_; }
  const std::vector<Point>& receivers() const { return receivers_; }
  const Point& transmitter(std::size_t i) const { return transmitters_[i]; }
  const Point& receiver(std::size_t i) const { return receivers_[i]; }

  // Euclidean distance, or the torus metric when wrap == torus.
  double distance(const Point& a, const Point& b) const;

  // Links whose endpoints both lie at least window/4 from every edge.
  std::vector<bool> guard_mask() const;

 private:
  double window_;
  Boundary wrap_;
  std::vector<Point> transmitters_;
  std::vector<Point> receivers_;
  std::uint64_t seed_;
};

double torus_distance(const Point& a, const Point& b, double window);

// Poisson(lambda L^2) transmitters, each with a receiver at distance r in a
// uniform direction. Throws DegenerateGeometryError when window < 4r.
NetworkRealization sample_network(const SystemParams& params, double window,
                                  Boundary wrap, std::uint64_t seed);

struct EmptySet {};
struct DiskSet {
  double radius;
};
struct NearestReceiversSet {
  int count;
};

class StoppingSetSpec {
 public:
  using Variant = std::variant<EmptySet, DiskSet, NearestReceiversSet>;

  static StoppingSetSpec empty();
  static StoppingSetSpec disk(double radius);
  static StoppingSetSpec nearest(int count);
  // Accepts "empty", "disk:<R>", "nearest:<p>".
  static StoppingSetSpec parse(const std::string& text);

  const Variant& value() const { return value_; }
  bool is_empty() const { return std::holds_alternative<EmptySet>(value_); }
  bool is_disk() const { return std::holds_alternative<DiskSet>(value_); }
  bool is_nearest() const {
    return std::holds_alternative<NearestReceiversSet>(value_);
  }
  std::string label() const;

  // Radius used by the analysis: R for disks, sqrt(p/(pi lambda)) for the
  // nearest-receiver rule, 0 for the empty set.
  double analysis_radius(double lambda) const;

 private:
  explicit StoppingSetSpec(Variant v) : value_(v) {}
  Variant value_;
};

struct ObservedReceiver {
  std::size_t link;
  double distance;
};

struct Observation {
  std::vector<ObservedReceiver> members;  // ascending distance
  double radius = 0.0;                    // realized observation radius R_i
};

// Foreign receivers seen by transmitter i. Brute force over all links.
Observation observed_receivers(std::size_t i, const StoppingSetSpec& spec,
                               const NetworkRealization& net);

// Cell-list index over receivers for repeated stopping-set queries.
class ReceiverIndex {
 public:
  explicit ReceiverIndex(const NetworkRealization& net, double cell = 0.0);
  Observation observe(std::size_t i, const StoppingSetSpec& spec) const;

 private:
  void within(const Point& p, double radius, std::size_t exclude,
              std::vector<ObservedReceiver>& out) const;
  void nearest(const Point& p, std::size_t count, std::size_t exclude,
               std::vector<ObservedReceiver>& out) const;
  int cell_coord(double v) const;

  const NetworkRealization& net_;
  double cell_;
  int cells_;
  std::vector<std::vector<std::size_t>> buckets_;
};

// D = |x - y|^alpha / (T r^alpha).
double distance_measure(const Point& x, const Point& y,
                        const NetworkRealization& net,
                        const SystemParams& params);

}  // namespace geoage
