#include "doctest.h"

#include "cotforge/text.hpp"

using namespace cotforge;

TEST_CASE("trim and split") {
  CHECK(trim("  a b \t\n") == "a b");
  CHECK(trim("") == "");
  CHECK(split("a,,b", ',') == std::vector<std::string>{"a", "", "b"});
  const auto lines = split_lines("x\ny\r\n\nz");
  REQUIRE(lines.size() == 4);
  CHECK(lines[1] == "y");
  CHECK(lines[3] == "z");
}

TEST_CASE("format_double is shortest round-trip") {
  CHECK(format_double(3.0) == "3");
  CHECK(format_double(-0.5) == "-0.5");
  CHECK(format_double(0.1) == "0.1");
  CHECK(std::stod(format_double(1.0 / 3.0)) == 1.0 / 3.0);
  CHECK(format_fixed(2.0 / 3.0, 4) == "0.6667");
}
