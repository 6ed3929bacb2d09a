#include <catch2/catch_amalgamated.hpp>
#include "goalmap/experiment.hpp"

TEST_CASE("placeholder") { REQUIRE(true); }
