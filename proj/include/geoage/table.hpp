#pragma once

#include <string>

namespace geoage {

// Fixed, locale-independent number formatting for CSV output.
std::string fmt_num(double v);

}  // namespace geoage
