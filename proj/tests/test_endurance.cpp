#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "flexquad/endurance.hpp"

using namespace flexquad;

TEST_CASE("flight time from capacity and mean current") {
  const BatterySpec battery{1800.0, 4, 14.8};
  CHECK_THAT(flight_time_min(battery, 6835.443038),
             Catch::Matchers::WithinAbs(15.8, 1e-6));
  CHECK_THAT(flight_time_min(battery, 1800.0),
             Catch::Matchers::WithinAbs(60.0, 1e-12));
  CHECK_THROWS_AS(flight_time_min(battery, 0.0), DomainError);

  // Higher consumption at rho = 4 shortens the flight.
  CHECK(flight_time_min(battery, 10093.457944) <
        flight_time_min(battery, 6835.443038));
}

TEST_CASE("inspection time is inverse in the holding torque") {
  const BatterySpec servo{1200.0, 2, 7.4};
  const double k = 1800.0; // mA per kg.cm
  double prev = 1e9;
  for (double torque : {3.93, 5.19, 8.24, 9.2}) {
    const double t = inspection_time_min(servo, torque, k);
    CHECK(t < prev);
    prev = t;
  }
  CHECK_THROWS_AS(inspection_time_min(servo, 0.0, k), DomainError);
}

TEST_CASE("times are linear in capacity and inverse-linear in consumption") {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> cap(400.0, 4000.0);
  std::uniform_real_distribution<double> cur(500.0, 12000.0);
  for (int i = 0; i < 200; ++i) {
    BatterySpec b{cap(rng), 4, 14.8};
    const double current = cur(rng);
    const double base = flight_time_min(b, current);
    BatterySpec doubled = b;
    doubled.capacity_mah *= 2.0;
    CHECK_THAT(flight_time_min(doubled, current),
               Catch::Matchers::WithinRel(2.0 * base, 1e-12));
    CHECK_THAT(flight_time_min(b, 2.0 * current),
               Catch::Matchers::WithinRel(0.5 * base, 1e-12));
    CHECK_THAT(inspection_time_min(b, 3.0, current / 3.0),
               Catch::Matchers::WithinRel(base, 1e-12));
  }
}

TEST_CASE("endurance sweep") {
  const BatterySpec flight{1800.0, 4, 14.8};
  const BatterySpec servo{1200.0, 2, 7.4};

  SECTION("empty input, empty report") {
    CHECK(endurance_sweep({}, flight, servo, 1800.0).empty());
  }

  SECTION("missing data is reported absent, not fabricated") {
    std::vector<EnduranceInput> in{{5.0, std::nullopt, std::nullopt, std::nullopt}};
    const auto out = endurance_sweep(in, flight, servo, 1800.0);
    REQUIRE(out.size() == 1);
    CHECK_FALSE(out[0].flight_time_min.has_value());
    CHECK_FALSE(out[0].inspection_time_min.has_value());
    CHECK(out[0].error.empty());
  }

  SECTION("sweep matches the standalone calls") {
    std::vector<EnduranceInput> in{
        {6.0, 6835.443038, 5.333, 2.3},
    };
    const double k = 1800.0;
    const auto out = endurance_sweep(in, flight, servo, k);
    REQUIRE(out.size() == 1);
    CHECK_THAT(*out[0].flight_time_min,
               Catch::Matchers::WithinRel(flight_time_min(flight, 6835.443038),
                                          1e-15));
    CHECK_THAT(*out[0].inspection_time_min,
               Catch::Matchers::WithinRel(inspection_time_min(servo, 5.333, k),
                                          1e-15));
    CHECK(out[0].specific_strength_knm_kg.has_value());
  }

  SECTION("calibrated table shape: flight peaks mid-range, inspection falls") {
    // Mean currents back-computed from the published flight times.
    std::vector<EnduranceInput> in{
        {4.0, 10093.457944, 2.394, 0.9},
        {6.0, 6835.443038, 5.333, 2.3},
        {8.0, 7346.938776, 6.25, 4.5},
        {10.0, 7659.574468, 16.0, 10.4},
    };
    const auto out = endurance_sweep(in, flight, servo, 1800.0);
    REQUIRE(out.size() == 4);
    // Interior maximum at rho = 6.
    CHECK(*out[1].flight_time_min > *out[0].flight_time_min);
    CHECK(*out[1].flight_time_min > *out[2].flight_time_min);
    CHECK(*out[2].flight_time_min > *out[3].flight_time_min);
    // Inspection time strictly decreasing for rho >= 6.
    CHECK(*out[1].inspection_time_min > *out[2].inspection_time_min);
    CHECK(*out[2].inspection_time_min > *out[3].inspection_time_min);
  }
}
