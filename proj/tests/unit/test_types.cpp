#include <doctest.h>

#include "perfwatt/error.hpp"
#include "perfwatt/types.hpp"

using namespace perfwatt;

TEST_CASE("domain tokens round-trip") {
  for (DomainKind kind : {DomainKind::CoreSubsystem, DomainKind::Package, DomainKind::Dram,
                          DomainKind::Soc, DomainKind::Pmd, DomainKind::WholeCard,
                          DomainKind::UncoreDerived}) {
    const PowerDomain domain(kind);
    const auto parsed = PowerDomain::from_token(domain.token());
    REQUIRE(parsed.has_value());
    CHECK(*parsed == domain);
  }
  CHECK(PowerDomain(DomainKind::Package).token() == "pkg");
  CHECK(PowerDomain(DomainKind::CoreSubsystem).token() == "pp0");
}

TEST_CASE("custom domain labels are validated") {
  const PowerDomain vccp = PowerDomain::custom("vccp");
  CHECK(vccp.token() == "vccp");
  CHECK(PowerDomain::from_token("vddg")->kind() == DomainKind::Custom);

  CHECK_THROWS_AS(PowerDomain::custom(""), Error);
  CHECK_THROWS_AS(PowerDomain::custom("UPPER"), Error);
  CHECK_THROWS_AS(PowerDomain::custom("pkg"), Error);  // shadows a reserved token
  CHECK_THROWS_AS(PowerDomain::custom(std::string(33, 'a')), Error);
  CHECK_THROWS_AS(PowerDomain::custom("has space"), Error);
}

TEST_CASE("sample kind tokens") {
  CHECK(to_token(SampleKind::EnergyCounterJoules) == "energy_j");
  CHECK(to_token(SampleKind::InstantPowerWatts) == "power_w");
  CHECK(sample_kind_from_token("energy_j") == SampleKind::EnergyCounterJoules);
  CHECK(!sample_kind_from_token("volts").has_value());
}

TEST_CASE("decimal formatting round-trips exactly") {
  for (double v : {0.0, 1.0, -1.5, 0.1, 1e-300, 1.7976931348623157e308, 37.000000000000007,
                   0.0078125}) {
    const auto parsed = parse_decimal(format_decimal(v));
    REQUIRE(parsed.has_value());
    CHECK(*parsed == v);
  }
  CHECK(!parse_decimal("1.5x").has_value());
  CHECK(!parse_decimal("").has_value());
  CHECK(parse_int64("-42") == -42);
  CHECK(!parse_int64("4.2").has_value());
}
