#include <doctest.h>

#include "fpsi/config.hpp"

using namespace fpsi;

TEST_CASE("empty arterial payload keeps the physical defaults") {
  RunConfig config = parse_config(R"({"arterial": {}})");
  CHECK(config.arterial.coefficients.mu_f == doctest::Approx(0.035));
  CHECK(config.arterial.coefficients.xi == doctest::Approx(5e7));
  CHECK(config.arterial.coefficients.rho_p == doctest::Approx(1.1));
  CHECK(config.arterial.coefficients.s0 == doctest::Approx(5e-6));
  CHECK(config.arterial.coefficients.K[1][1] == doctest::Approx(5e-9));
  CHECK(config.arterial.P_max == doctest::Approx(13334.0));
  CHECK(config.arterial.T_max == doctest::Approx(0.003));
}

TEST_CASE("invalid values are rejected with the offending key") {
  CHECK_THROWS_WITH_AS(parse_config(R"({"arterial": {"dt": -1}})"),
                       doctest::Contains("dt"), std::invalid_argument);
  CHECK_THROWS_WITH_AS(parse_config(R"({"bogus": 1})"), doctest::Contains("bogus"),
                       std::invalid_argument);
  CHECK_THROWS_WITH_AS(parse_config(R"({"converge": {"hmax": "1/8", "typo": 2}})"),
                       doctest::Contains("typo"), std::invalid_argument);
  CHECK_THROWS(parse_config("{not json"));
  CHECK_THROWS(parse_config(R"({"solve": {"sources": "nonsense"}})"));
}

TEST_CASE("round trip is the identity on the canonical form") {
  RunConfig config = parse_config(R"({
    "converge": {"family": "higher", "hmax": "1/16", "levels": 3, "dt": 1e-6, "T": 5e-4},
    "arterial": {"nx": 30, "coefficients": {"xi": 0.0}},
    "small_data": {"beta_p": 0.3},
    "solve": {"mesh": "m.mesh", "sources": "mms", "dt": 0.01, "T": 0.1}
  })");
  const std::string canonical = serialize_config(config);
  RunConfig reparsed = parse_config(canonical);
  CHECK(serialize_config(reparsed) == canonical);
  CHECK(reparsed.converge.family == ElementFamily::HigherOrder);
  CHECK(reparsed.converge.hmax == doctest::Approx(1.0 / 16));
  CHECK(reparsed.arterial.nx == 30);
  CHECK(reparsed.arterial.coefficients.xi == 0.0);
  CHECK(reparsed.small_data.beta_p == doctest::Approx(0.3));
  CHECK(reparsed.solve.sources == "mms");
}

TEST_CASE("grid spacing parser") {
  CHECK(parse_h("1/8") == doctest::Approx(0.125));
  CHECK(parse_h("0.25") == doctest::Approx(0.25));
  CHECK_THROWS(parse_h("zero"));
  CHECK_THROWS(parse_h("-1/8"));
}

TEST_CASE("family names") {
  CHECK(family_from_string("lower") == ElementFamily::LowerOrder);
  CHECK(family_from_string("higher") == ElementFamily::HigherOrder);
  CHECK_THROWS(family_from_string("best"));
}
