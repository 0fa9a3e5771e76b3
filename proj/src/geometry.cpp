#include "geoage/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include "geoage/error.hpp"

namespace geoage {

std::string to_string(Boundary b) {
  return b == Boundary::torus ? "torus" : "open";
}

Boundary parse_boundary(const std::string& text) {
  if (text == "torus") return Boundary::torus;
  if (text == "open") return Boundary::open;
  throw InvalidArgument("unknown boundary rule '" + text + "'");
}

double torus_distance(const Point& a, const Point& b, double window) {
  double dx = std::fabs(a.x - b.x);
  double dy = std::fabs(a.y - b.y);
  dx = std::fmod(dx, window);
  dy = std::fmod(dy, window);
  dx = std::min(dx, window - dx);
  dy = std::min(dy, window - dy);
  return std::hypot(dx, dy);
}

NetworkRealization::NetworkRealization(double window, Boundary wrap,
                                       std::vector<Point> transmitters,
                                       std::vector<Point> receivers,
                                       std::uint64_t seed)
    : window_(window),
      wrap_(wrap),
      transmitters_(std::move(transmitters)),
      receivers_(std::move(receivers)),
      seed_(seed) {
  if (!(window_ > 0.0)) throw InvalidArgument("window must be > 0");
  if (transmitters_.size() != receivers_.size()) {
    throw InvalidArgument("transmitter and receiver counts differ");
  }
}

double NetworkRealization::distance(const Point& a, const Point& b) const {
  if (wrap_ == Boundary::torus) return torus_distance(a, b, window_);
  return std::hypot(a.x - b.x, a.y - b.y);
}

std::vector<bool> NetworkRealization::guard_mask() const {
  const double g = window_ / 4.0;
  auto inside = [&](const Point& p) {
    return p.x >= g && p.x <= window_ - g && p.y >= g && p.y <= window_ - g;
  };
  std::vector<bool> mask(size());
  for (std::size_t i = 0; i < size(); ++i) {
    mask[i] = inside(transmitters_[i]) && inside(receivers_[i]);
  }
  return mask;
}

NetworkRealization sample_network(const SystemParams& params, double window,
                                  Boundary wrap, std::uint64_t seed) {
  if (!(window > 0.0)) throw InvalidArgument("window must be > 0");
  if (window < 4.0 * params.r()) {
    throw DegenerateGeometryError(
        "window smaller than 4r: receiver displacement comparable to window");
  }
  std::mt19937_64 gen(seed);
  std::poisson_distribution<long long> count_dist(params.lambda() * window *
                                                  window);
  const auto n = static_cast<std::size_t>(count_dist(gen));
  std::uniform_real_distribution<double> pos(0.0, window);
  std::uniform_real_distribution<double> angle(0.0, 2.0 * std::numbers::pi);
  std::vector<Point> tx(n);
  std::vector<Point> rx(n);
  for (std::size_t i = 0; i < n; ++i) {
    tx[i].x = pos(gen);
    tx[i].y = pos(gen);
    const double th = angle(gen);
    Point y{tx[i].x + params.r() * std::cos(th),
            tx[i].y + params.r() * std::sin(th)};
    if (wrap == Boundary::torus) {
      y.x -= window * std::floor(y.x / window);
      y.y -= window * std::floor(y.y / window);
    }
    rx[i] = y;
  }
  return NetworkRealization(window, wrap, std::move(tx), std::move(rx), seed);
}

StoppingSetSpec StoppingSetSpec::empty() { return StoppingSetSpec(EmptySet{}); }

StoppingSetSpec StoppingSetSpec::disk(double radius) {
  if (!(radius > 0.0) || !std::isfinite(radius)) {
    throw InvalidArgument("disk radius must be > 0");
  }
  return StoppingSetSpec(DiskSet{radius});
}

StoppingSetSpec StoppingSetSpec::nearest(int count) {
  if (count < 1) throw InvalidArgument("nearest count must be >= 1");
  return StoppingSetSpec(NearestReceiversSet{count});
}

StoppingSetSpec StoppingSetSpec::parse(const std::string& text) {
  if (text == "empty") return empty();
  const auto colon = text.find(':');
  if (colon == std::string::npos) {
    throw InvalidArgument("cannot parse stopping set '" + text + "'");
  }
  const std::string kind = text.substr(0, colon);
  const std::string arg = text.substr(colon + 1);
  try {
    std::size_t used = 0;
    if (kind == "disk") {
      const double r = std::stod(arg, &used);
      if (used == arg.size()) return disk(r);
    } else if (kind == "nearest") {
      const int p = std::stoi(arg, &used);
      if (used == arg.size()) return nearest(p);
    }
  } catch (const std::logic_error&) {
  }
  throw InvalidArgument("cannot parse stopping set '" + text + "'");
}

std::string StoppingSetSpec::label() const {
  std::ostringstream os;
  if (const auto* d = std::get_if<DiskSet>(&value_)) {
    os << "disk:" << d->radius;
  } else if (const auto* n = std::get_if<NearestReceiversSet>(&value_)) {
    os << "nearest:" << n->count;
  } else {
    os << "empty";
  }
  return os.str();
}

double StoppingSetSpec::analysis_radius(double lambda) const {
  if (const auto* d = std::get_if<DiskSet>(&value_)) return d->radius;
  if (const auto* n = std::get_if<NearestReceiversSet>(&value_)) {
    return std::sqrt(n->count / (std::numbers::pi * lambda));
  }
  return 0.0;
}

namespace {

void sort_members(std::vector<ObservedReceiver>& m) {
  std::sort(m.begin(), m.end(),
            [](const ObservedReceiver& a, const ObservedReceiver& b) {
              if (a.distance != b.distance) return a.distance < b.distance;
              return a.link < b.link;
            });
}

}  // namespace

Observation observed_receivers(std::size_t i, const StoppingSetSpec& spec,
                               const NetworkRealization& net) {
  if (i >= net.size()) throw InvalidArgument("link index out of range");
  Observation obs;
  if (spec.is_empty()) return obs;
  const Point& x = net.transmitter(i);
  std::vector<ObservedReceiver> all;
  all.reserve(net.size());
  for (std::size_t j = 0; j < net.size(); ++j) {
    if (j == i) continue;
    all.push_back({j, net.distance(x, net.receiver(j))});
  }
  sort_members(all);
  if (const auto* d = std::get_if<DiskSet>(&spec.value())) {
    for (const auto& m : all) {
      if (m.distance > d->radius) break;
      obs.members.push_back(m);
    }
    obs.radius = d->radius;
  } else {
    const auto p = static_cast<std::size_t>(
        std::get<NearestReceiversSet>(spec.value()).count);
    if (all.size() > p) all.resize(p);
    obs.members = std::move(all);
    obs.radius = obs.members.empty() ? 0.0 : obs.members.back().distance;
  }
  return obs;
}

ReceiverIndex::ReceiverIndex(const NetworkRealization& net, double cell)
    : net_(net) {
  const double L = net.window();
  if (!(cell > 0.0)) {
    const double n = std::max<double>(1.0, static_cast<double>(net.size()));
    cell = 1.5 * L / std::sqrt(n);
  }
  cells_ = std::max(1, static_cast<int>(std::floor(L / cell)));
  cell_ = L / cells_;
  buckets_.assign(static_cast<std::size_t>(cells_) * cells_, {});
  for (std::size_t j = 0; j < net.size(); ++j) {
    const Point& p = net.receiver(j);
    const int cx = cell_coord(p.x);
    const int cy = cell_coord(p.y);
    buckets_[static_cast<std::size_t>(cy) * cells_ + cx].push_back(j);
  }
}

int ReceiverIndex::cell_coord(double v) const {
  if (net_.wrap() == Boundary::torus) {
    double w = v - net_.window() * std::floor(v / net_.window());
    return std::min(cells_ - 1, static_cast<int>(w / cell_));
  }
  // Open windows may hold receivers outside [0, L); clamp to the border.
  return std::clamp(static_cast<int>(std::floor(v / cell_)), 0, cells_ - 1);
}

void ReceiverIndex::within(const Point& p, double radius, std::size_t exclude,
                           std::vector<ObservedReceiver>& out) const {
  const int reach = static_cast<int>(std::ceil(radius / cell_)) + 1;
  const int cx = cell_coord(p.x);
  const int cy = cell_coord(p.y);
  auto scan = [&](int bx, int by) {
    for (std::size_t j : buckets_[static_cast<std::size_t>(by) * cells_ + bx]) {
      if (j == exclude) continue;
      const double d = net_.distance(p, net_.receiver(j));
      if (d <= radius) out.push_back({j, d});
    }
  };
  const bool torus = net_.wrap() == Boundary::torus;
  if (2 * reach + 1 >= cells_) {
    for (int by = 0; by < cells_; ++by)
      for (int bx = 0; bx < cells_; ++bx) scan(bx, by);
    return;
  }
  for (int dy = -reach; dy <= reach; ++dy) {
    for (int dx = -reach; dx <= reach; ++dx) {
      int bx = cx + dx;
      int by = cy + dy;
      if (torus) {
        bx = (bx % cells_ + cells_) % cells_;
        by = (by % cells_ + cells_) % cells_;
      } else if (bx < 0 || by < 0 || bx >= cells_ || by >= cells_) {
        continue;
      }
      scan(bx, by);
    }
  }
}

void ReceiverIndex::nearest(const Point& p, std::size_t count,
                            std::size_t exclude,
                            std::vector<ObservedReceiver>& out) const {
  const bool torus = net_.wrap() == Boundary::torus;
  const int cx = cell_coord(p.x);
  const int cy = cell_coord(p.y);
  std::vector<ObservedReceiver> cand;
  // Open windows clamp outliers into border cells, so ring bounds are only
  // trusted in torus mode; otherwise fall back to a full scan.
  for (int s = 0; torus && 2 * s + 1 <= cells_; ++s) {
    for (int dy = -s; dy <= s; ++dy) {
      for (int dx = -s; dx <= s; ++dx) {
        if (std::max(std::abs(dx), std::abs(dy)) != s) continue;
        const int bx = ((cx + dx) % cells_ + cells_) % cells_;
        const int by = ((cy + dy) % cells_ + cells_) % cells_;
        for (std::size_t j :
             buckets_[static_cast<std::size_t>(by) * cells_ + bx]) {
          if (j == exclude) continue;
          cand.push_back({j, net_.distance(p, net_.receiver(j))});
        }
      }
    }
    if (cand.size() >= count) {
      sort_members(cand);
      if (cand[count - 1].distance <= s * cell_) {
        cand.resize(count);
        out = std::move(cand);
        return;
      }
    }
  }
  cand.clear();
  for (std::size_t j = 0; j < net_.size(); ++j) {
    if (j == exclude) continue;
    cand.push_back({j, net_.distance(p, net_.receiver(j))});
  }
  sort_members(cand);
  if (cand.size() > count) cand.resize(count);
  out = std::move(cand);
}

Observation ReceiverIndex::observe(std::size_t i,
                                   const StoppingSetSpec& spec) const {
  if (i >= net_.size()) throw InvalidArgument("link index out of range");
  Observation obs;
  const Point& x = net_.transmitter(i);
  if (const auto* d = std::get_if<DiskSet>(&spec.value())) {
    within(x, d->radius, i, obs.members);
    sort_members(obs.members);
    obs.radius = d->radius;
  } else if (const auto* n = std::get_if<NearestReceiversSet>(&spec.value())) {
    nearest(x, static_cast<std::size_t>(n->count), i, obs.members);
    obs.radius = obs.members.empty() ? 0.0 : obs.members.back().distance;
  }
  return obs;
}

double distance_measure(const Point& x, const Point& y,
                        const NetworkRealization& net,
                        const SystemParams& params) {
  return std::pow(net.distance(x, y), params.alpha()) / params.tr_alpha();
}

}  // namespace geoage
