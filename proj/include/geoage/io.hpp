#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

#include "geoage/geometry.hpp"
#include "geoage/params.hpp"

namespace geoage {

using Json = nlohmann::json;

inline constexpr int kRealizationVersion = 1;

// {"version", "window", "wrap", "seed", "transmitters": [[x, y]...],
//  "receivers": [[x, y]...]}
Json realization_to_json(const NetworkRealization& net);
NetworkRealization realization_from_json(const Json& doc);

Json params_to_json(const SystemParams& params);

// SHA-1 of "blob <size>\0<bytes>", hex encoded (git object id).
std::string content_hash(const std::string& bytes);

// Writes "# <compact json>\n".
void write_json_header(std::ostream& os, const Json& header);

struct CurvePoint {
  std::string quantity;
  double x = 0.0;
  double value = 0.0;
  bool converged = true;
};

// CSV "quantity,x,value,converged" preceded by a JSON header line.
void write_curve_csv(std::ostream& os, const Json& header,
                     const std::vector<CurvePoint>& points);

// Splits a CSV body (comment lines starting with '#' skipped) into rows.
std::vector<std::vector<std::string>> read_csv(std::istream& is);

}  // namespace geoage
