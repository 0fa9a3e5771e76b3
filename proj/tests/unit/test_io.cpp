#include <doctest.h>

#include <cmath>
#include <limits>
#include <sstream>

#include "geoage/error.hpp"
#include "geoage/io.hpp"
#include "geoage/table.hpp"

using namespace geoage;

TEST_CASE("realization JSON round trip") {
  const SystemParams p = SystemParams::defaults();
  for (Boundary wrap : {Boundary::torus, Boundary::open}) {
    const NetworkRealization net = sample_network(p, 800.0, wrap, 17);
    const Json doc = realization_to_json(net);
    CHECK(doc["version"] == kRealizationVersion);
    // Through text, as written to disk.
    const NetworkRealization back =
        realization_from_json(Json::parse(doc.dump()));
    CHECK(back.window() == net.window());
    CHECK(back.wrap() == net.wrap());
    CHECK(back.seed() == net.seed());
    REQUIRE(back.size() == net.size());
    for (std::size_t i = 0; i < net.size(); ++i) {
      CHECK(back.transmitter(i).x == net.transmitter(i).x);
      CHECK(back.transmitter(i).y == net.transmitter(i).y);
      CHECK(back.receiver(i).x == net.receiver(i).x);
      CHECK(back.receiver(i).y == net.receiver(i).y);
    }
    CHECK(realization_to_json(back) == doc);
  }
}

TEST_CASE("malformed realizations are rejected") {
  const NetworkRealization net =
      sample_network(SystemParams::defaults(), 500.0, Boundary::torus, 3);
  Json doc = realization_to_json(net);
  Json bad = doc;
  bad["version"] = kRealizationVersion + 1;
  CHECK_THROWS_AS(realization_from_json(bad), ConfigError);
  bad = doc;
  bad.erase("receivers");
  CHECK_THROWS_AS(realization_from_json(bad), ConfigError);
  bad = doc;
  bad["transmitters"] = Json::array({Json::array({1.0})});
  CHECK_THROWS_AS(realization_from_json(bad), ConfigError);
  bad = doc;
  bad["wrap"] = "mobius";
  CHECK_THROWS(realization_from_json(bad));
}

TEST_CASE("params JSON") {
  const SystemParams p = SystemParams::defaults();
  const Json j = params_to_json(p);
  CHECK(j["lambda"] == p.lambda());
  CHECK(j["xi"] == p.xi());
  CHECK(j["rho"].get<double>() == p.rho());
  const SystemParams quiet(1e-4, 25.0, 3.8, 1.0,
                           std::numeric_limits<double>::infinity(), 0.3);
  CHECK(params_to_json(quiet)["rho"] == "inf");
}

TEST_CASE("content hash is the git blob id") {
  CHECK(content_hash("hello\n") == "ce013625030ba8dba906f756967f9e9ca394464a");
  CHECK(content_hash("") == "e69de29bb2d1d6434b8b29ae775ad8c2e48c5391");
  CHECK(content_hash("a") != content_hash("b"));
}

TEST_CASE("number formatting") {
  CHECK(fmt_num(0.5) == "0.5");
  CHECK(fmt_num(1e-7) == "1e-07");
  CHECK(fmt_num(std::numeric_limits<double>::infinity()) == "inf");
  CHECK(fmt_num(-std::numeric_limits<double>::infinity()) == "-inf");
  CHECK(fmt_num(std::nan("")) == "nan");
  CHECK(std::stod(fmt_num(M_PI)) == doctest::Approx(M_PI).epsilon(1e-10));
}

TEST_CASE("curve CSV with a JSON header") {
  const Json header{{"command", "analyze"}, {"seed", 4}};
  std::ostringstream os;
  write_curve_csv(os, header,
                  {{"mean_eta", 0.0, 0.75, true},
                   {"eta_ccdf", 0.25, 0.5, false},
                   {"peak_aoi", 0.3, std::numeric_limits<double>::infinity(),
                    true}});
  const std::string text = os.str();
  REQUIRE(text.rfind("# ", 0) == 0);
  const std::string first = text.substr(2, text.find('\n') - 2);
  CHECK(Json::parse(first) == header);

  std::istringstream is(text);
  const auto rows = read_csv(is);
  REQUIRE(rows.size() == 4);
  CHECK(rows[0] == std::vector<std::string>{"quantity", "x", "value",
                                            "converged"});
  CHECK(rows[1] == std::vector<std::string>{"mean_eta", "0", "0.75", "1"});
  CHECK(rows[2] == std::vector<std::string>{"eta_ccdf", "0.25", "0.5", "0"});
  CHECK(rows[3][2] == "inf");
}

TEST_CASE("CSV reader keeps empty trailing cells") {
  std::istringstream is("# {}\na,b,\n\n1,,3\n");
  const auto rows = read_csv(is);
  REQUIRE(rows.size() == 2);
  CHECK(rows[0] == std::vector<std::string>{"a", "b", ""});
  CHECK(rows[1] == std::vector<std::string>{"1", "", "3"});
}
