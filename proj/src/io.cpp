#include "geoage/io.hpp"

#include <openssl/sha.h>

#include <cmath>
#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>

#include "geoage/error.hpp"
#include "geoage/table.hpp"

namespace geoage {

namespace {

Json points_to_json(const std::vector<Point>& pts) {
  Json arr = Json::array();
  for (const Point& p : pts) arr.push_back({p.x, p.y});
  return arr;
}

std::vector<Point> points_from_json(const Json& arr) {
  if (!arr.is_array()) throw ConfigError("point list must be an array");
  std::vector<Point> out;
  for (const auto& p : arr) {
    if (!p.is_array() || p.size() != 2) {
      throw ConfigError("points must be [x, y] pairs");
    }
    out.push_back({p[0].get<double>(), p[1].get<double>()});
  }
  return out;
}

}  // namespace

Json realization_to_json(const NetworkRealization& net) {
  return Json{{"version", kRealizationVersion},
              {"window", net.window()},
              {"wrap", to_string(net.wrap())},
              {"seed", net.seed()},
              {"transmitters", points_to_json(net.transmitters())},
              {"receivers", points_to_json(net.receivers())}};
}

NetworkRealization realization_from_json(const Json& doc) {
  try {
    if (doc.at("version").get<int>() != kRealizationVersion) {
      throw ConfigError("unsupported realization version");
    }
    return NetworkRealization(doc.at("window").get<double>(),
                              parse_boundary(doc.at("wrap").get<std::string>()),
                              points_from_json(doc.at("transmitters")),
                              points_from_json(doc.at("receivers")),
                              doc.at("seed").get<std::uint64_t>());
  } catch (const Json::exception& e) {
    throw ConfigError(std::string("malformed realization: ") + e.what());
  }
}

Json params_to_json(const SystemParams& p) {
  Json j{{"lambda", p.lambda()},       {"r", p.r()},
         {"alpha", p.alpha()},         {"threshold", p.threshold()},
         {"xi", p.xi()}};
  j["rho"] = std::isfinite(p.rho()) ? Json(p.rho()) : Json("inf");
  return j;
}

std::string content_hash(const std::string& bytes) {
  const std::string data =
      "blob " + std::to_string(bytes.size()) + std::string(1, '\0') + bytes;
  unsigned char digest[SHA_DIGEST_LENGTH];
  SHA1(reinterpret_cast<const unsigned char*>(data.data()), data.size(),
       digest);
  std::string hex;
  char buf[3];
  for (unsigned char c : digest) {
    std::snprintf(buf, sizeof buf, "%02x", c);
    hex += buf;
  }
  return hex;
}

void write_json_header(std::ostream& os, const Json& header) {
  os << "# " << header.dump() << '\n';
}

void write_curve_csv(std::ostream& os, const Json& header,
                     const std::vector<CurvePoint>& points) {
  write_json_header(os, header);
  os << "quantity,x,value,converged\n";
  for (const CurvePoint& p : points) {
    os << p.quantity << ',' << fmt_num(p.x) << ',' << fmt_num(p.value) << ','
       << (p.converged ? 1 : 0) << '\n';
  }
}

std::vector<std::vector<std::string>> read_csv(std::istream& is) {
  std::vector<std::vector<std::string>> rows;
  std::string line;
  while (std::getline(is, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::vector<std::string> row;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) row.push_back(cell);
    if (!line.empty() && line.back() == ',') row.emplace_back();
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace geoage
