#include <doctest.h>

#include "pubdyn/error.hpp"
#include "pubdyn/kvconfig.hpp"

using namespace pubdyn;

TEST_CASE("flat key value parsing") {
  const auto kv = KeyValueConfig::parse("# comment\n seed = 7 \n\nname=a=b\nflag=yes\nr=85:160\nx=1.5e3\n");
  CHECK(kv.get_uint("seed") == 7u);
  CHECK(kv.get("name") == "a=b");
  CHECK(kv.get_bool("flag") == true);
  CHECK(kv.get_range("r") == std::pair<std::int64_t, std::int64_t>{85, 160});
  CHECK(kv.get_double("x") == 1500.0);
  CHECK(kv.get("missing") == std::nullopt);
}

TEST_CASE("later keys override earlier ones") {
  CHECK(KeyValueConfig::parse("a=1\na=2\n").get_int("a") == 2);
}

TEST_CASE("malformed values are config errors") {
  CHECK_THROWS_AS(KeyValueConfig::parse("novalue\n"), ConfigError);
  CHECK_THROWS_AS(KeyValueConfig::parse("=3\n"), ConfigError);
  const auto kv = KeyValueConfig::parse("i=1.5\nb=maybe\nr=9:1\nd=abc\nu=-1\n");
  CHECK_THROWS_AS(kv.get_int("i"), ConfigError);
  CHECK_THROWS_AS(kv.get_bool("b"), ConfigError);
  CHECK_THROWS_AS(kv.get_range("r"), ConfigError);
  CHECK_THROWS_AS(kv.get_double("d"), ConfigError);
  CHECK_THROWS_AS(kv.get_uint("u"), ConfigError);
  CHECK_THROWS_AS(kv.require_known({"i", "b"}), ConfigError);
  CHECK_NOTHROW(kv.require_known({"i", "b", "r", "d", "u"}));
  CHECK_THROWS_AS(parse_range("12"), ConfigError);
}
