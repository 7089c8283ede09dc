#include "doctest.h"

#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>

#include "scfo/scenarios.hpp"

using namespace scfo;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("scfo_test_" + name);
  fs::remove_all(p);
  return p;
}

ErrorCode code_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  return ErrorCode::InvalidArgument;  // never the expected code below
}

std::string message_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.what();
  }
  return {};
}

}  // namespace

TEST_CASE("offset ladders for large arrays") {
  const OffsetPlan a = plan_offsets(2000, 1e4, 1e7, 1e3);
  CHECK(a.assignments.size() == 2000);
  CHECK(a.min_separation_hz() >= 1e4);
  CHECK(a.max_abs_hz() <= 1e7);
  CHECK(a.span_hz() == doctest::Approx(2e7).epsilon(0.001));

  const OffsetPlan b = plan_offsets(200, 1e4, 1e6, 1e2);
  CHECK(b.min_separation_hz() >= 1e4);
  CHECK(b.max_abs_hz() <= 1e6);
  for (const Rational& r : b.assignments) CHECK((r / Rational(100)).is_integer());

  // Pigeonhole: three slots of 10 kHz cannot fit in +/-10 kHz.
  CHECK(code_of([] { plan_offsets(3, 1e4, 1e4, 1e2); }) == ErrorCode::Infeasible);
  CHECK(message_of([] { plan_offsets(3, 1e4, 1e4, 1e2); }).find("range") != std::string::npos);

  CHECK(plan_offsets(2000, 1e4, 1e7, 1e3).assignments == a.assignments);
  CHECK(plan_offsets(1, 1e4, 0.0, 1.0).assignments.size() == 1);
  CHECK_THROWS_AS(plan_offsets(0, 1e4, 1e6, 1.0), Error);
  CHECK_THROWS_AS(plan_offsets(10, 0.0, 1e6, 1.0), Error);
}

TEST_CASE("prime ladder") {
  const OffsetPlan p = plan_offsets(100, 1e4, 1e6, 1.0, LadderKind::Prime);
  CHECK(p.assignments.size() == 100);
  CHECK(p.min_separation_hz() >= 1e4);
  CHECK(p.max_abs_hz() <= 1e6);
  for (const Rational& r : p.assignments) {
    REQUIRE(r.is_integer());
    const std::int64_t v = r.abs().num();
    bool prime = v >= 2;
    for (std::int64_t d = 2; d * d <= v && prime; ++d) prime = v % d != 0;
    CHECK(prime);
  }
  // 199 antennas fit +/-995 kHz on the symmetric ladder, but 100 positive
  // primes from 5 kHz at 10 kHz spacing reach past 995003 Hz.
  CHECK_NOTHROW(plan_offsets(199, 1e4, 995000.0, 1.0));
  CHECK(code_of([] { plan_offsets(199, 1e4, 995000.0, 1.0, LadderKind::Prime); }) == ErrorCode::Infeasible);
}

TEST_CASE("antenna validation") {
  AntennaChainSpec a;
  a.offset_hz = Rational(1000001);
  CHECK(code_of([&] { validate(a); }) == ErrorCode::ConfigInvalid);
  a.extended_offset = true;
  CHECK_NOTHROW(validate(a));
  a.extended_offset = false;
  a.band = BandId::B5stream;
  a.offset_hz = Rational(1500);
  CHECK(code_of([&] { validate(a); }) == ErrorCode::ConfigInvalid);
  a.offset_hz = Rational(2000);
  CHECK_NOTHROW(validate(a));
  a.band = BandId::B1;
  a.offset_hz = Rational(150);
  CHECK(code_of([&] { validate(a); }) == ErrorCode::ConfigInvalid);
  a = AntennaChainSpec{};
  a.noise_rms = -1.0;
  CHECK(code_of([&] { validate(a); }) == ErrorCode::ConfigInvalid);

  CHECK(parse_band("B3") == BandId::B3);
  CHECK(band_sample_rate_hz(BandId::B4) == 5.4e9);
  CHECK(code_of([] { parse_band("B9"); }) == ErrorCode::ConfigInvalid);
}

TEST_CASE("chain output frequency") {
  const RationalFreq fc(Rational(1000000));
  const RationalFreq fa(Rational(1001000));
  // Zone 1: the alias of rf on the f_a grid.
  CHECK(chain_output_frequency(Rational(250000), fa, fc, Zone::Zone1) == Rational(250000));
  CHECK(chain_output_frequency(Rational(1251000), fa, fc, Zone::Zone1) == Rational(250000));
  // Zone 2: conjugated, then shifted by f_a - f_c.
  CHECK(chain_output_frequency(Rational(250000), fa, fc, Zone::Zone2) == Rational(-249000));
  // A sky tone r in (f_a / 2, f_a) lands at f_a - f_c - (f_a - r) = r - f_c for every antenna.
  const RationalFreq fb(Rational(998000));
  const Rational r(700000);
  CHECK(chain_output_frequency(r, fa, fc, Zone::Zone2) == r - fc.hz());
  CHECK(chain_output_frequency(r, fb, fc, Zone::Zone2) == r - fc.hz());
}

TEST_CASE("scenario registry") {
  const auto& all = list_scenarios();
  CHECK(all.size() == 7);
  for (const ScenarioInfo& s : all) CHECK_FALSE(s.description.empty());
  ScenarioOptions o;
  o.out_dir = scratch("unknown");
  CHECK(code_of([&] { run_scenario("no-such-thing", o); }) == ErrorCode::UnknownScenario);
}

TEST_CASE("scenario config errors carry the field path") {
  ScenarioOptions o;
  o.out_dir = scratch("cfg");
  o.config_json = R"({"samples": 0})";
  CHECK(message_of([&] { run_scenario("scfo-off-control", o); }).find("$.samples") != std::string::npos);
  o.config_json = R"({"smaples": 10})";
  CHECK(message_of([&] { run_scenario("scfo-off-control", o); }).find("$.smaples") != std::string::npos);
  o.config_json = R"({"zone": "zone3"})";
  CHECK(code_of([&] { run_scenario("scfo-off-control", o); }) == ErrorCode::ConfigInvalid);
  o.config_json = R"({"cases": [{"n": 3, "ladder": "fibonacci"}]})";
  CHECK(message_of([&] { run_scenario("offset-plan", o); }).find("$.cases[0].ladder") != std::string::npos);
  o.config_json = "{not json";
  CHECK(code_of([&] { run_scenario("offset-plan", o); }) == ErrorCode::ConfigInvalid);
}

TEST_CASE("scenario output is deterministic") {
  ScenarioOptions o;
  o.seed = 7;
  o.jobs = 1;
  o.out_dir = scratch("det1");
  const ScenarioReport a = run_scenario("offset-plan", o);
  o.out_dir = scratch("det2");
  const ScenarioReport b = run_scenario("offset-plan", o);
  CHECK(a.passed());
  REQUIRE(a.files.size() == b.files.size());
  for (std::size_t i = 0; i < a.files.size(); ++i) {
    CHECK(a.files[i].filename() == b.files[i].filename());
    CHECK(slurp(a.files[i]) == slurp(b.files[i]));
  }
  const std::string summary = slurp(fs::path(o.out_dir) / "summary.txt");
  CHECK(summary.find("scenario offset-plan\nseed 7\n") == 0);
  CHECK(summary.find("RESULT PASS") != std::string::npos);
}

TEST_CASE("small SCFO-off run writes its report") {
  ScenarioOptions o;
  o.jobs = 1;
  o.out_dir = scratch("off");
  o.config_json = R"({"samples": 200000, "tolerance": 0.05})";
  const ScenarioReport r = run_scenario("scfo-off-control", o);
  CHECK(fs::exists(o.out_dir / "scfo_off.csv"));
  CHECK(fs::exists(o.out_dir / "summary.txt"));
  REQUIRE(r.checks.size() == 2);
  CHECK(r.passed());
  CHECK(slurp(o.out_dir / "scfo_off.csv").rfind("mode,rho,reference\n", 0) == 0);

  const ScenarioReport again = run_scenario("scfo-off-control", o);
  CHECK(again.checks[0].value == r.checks[0].value);
}
