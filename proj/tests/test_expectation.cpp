#include <doctest.h>

#include <cmath>
#include <random>

#include "pollinator/errors.hpp"
#include "pollinator/expectation.hpp"
#include "pollinator/trip_engine.hpp"
#include "support/test_landscapes.hpp"

using namespace pollinator;
using testsupport::make_s1;
using testsupport::make_s1_pool;
using testsupport::s1_start;

namespace {

PlatformWeights s1_weights() { return {{"B", 3.0}, {"C", 1.0}}; }

double relative_gap(double a, double b) {
  double scale = std::max({std::abs(a), std::abs(b), 1e-300});
  return std::abs(a - b) / scale;
}

}  // namespace

TEST_CASE("enumerate: cutoff 0 paths are the direct landings when nothing is hoppable") {
  Landscape ls = make_s1(0.0);
  for (auto& m : ls.personalities) {
    for (auto& [pid, w] : m.attraction) w = 0.0;
  }
  EnumerationResult result = enumerate_trips(ls, s1_start(), 0);
  REQUIRE(result.paths.size() == 2);
  CHECK(result.paths[0].steps.size() == 1);
  CHECK(result.paths[0].steps[0].platform == "B");
  CHECK(result.paths[0].probability == doctest::Approx(0.75).epsilon(1e-12));
  CHECK(result.paths[0].total_seconds == 100.0);
  CHECK(result.paths[1].steps[0].platform == "C");
  CHECK(result.paths[1].probability == doctest::Approx(0.25).epsilon(1e-12));
  CHECK(result.paths[1].total_seconds == 200.0);
  CHECK(result.total_probability == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(result.expectation.value_seconds == doctest::Approx(125.0).epsilon(1e-12));
}

TEST_CASE("enumerate: landing mass aggregates to the landing distribution") {
  EnumerationResult result = enumerate_trips(make_s1(0.0), s1_start(), 0);
  double mass_b = 0.0;
  double mass_c = 0.0;
  for (const auto& path : result.paths) {
    if (path.steps[0].platform == "B") mass_b += path.probability;
    if (path.steps[0].platform == "C") mass_c += path.probability;
  }
  CHECK(mass_b == doctest::Approx(0.75).epsilon(1e-12));
  CHECK(mass_c == doctest::Approx(0.25).epsilon(1e-12));
}

TEST_CASE("enumerate: total path probability is one on random instances") {
  std::mt19937_64 rng(20240605);
  EnumerationOptions options;
  options.collect_paths = false;
  for (int iter = 0; iter < 40; ++iter) {
    Landscape ls = testsupport::random_landscape(rng);
    auto start = testsupport::fuzz_start(ls);
    int cutoff = static_cast<int>(rng() % 4);
    EnumerationResult result = enumerate_trips(ls, start, cutoff, options);
    CHECK(result.total_probability == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("enumerate: instance guard") {
  EnumerationOptions tiny;
  tiny.max_paths = 3;
  try {
    enumerate_trips(make_s1(0.5), s1_start(), 3, tiny);
    FAIL("expected InstanceTooLarge");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::InstanceTooLarge);
  }
}

TEST_CASE("recursive: direct-only value is the landing-weighted dwell, exactly") {
  ExpectationResult result = expected_time_recursive(make_s1(0.0), s1_start(), 64);
  CHECK(result.value_seconds == 125.0);  // 0.75*100 + 0.25*200, all dyadic
  ExpectationResult cutoff0 = expected_time_recursive(make_s1(0.9), s1_start(), 0);
  CHECK(cutoff0.value_seconds == 125.0);  // cutoff 0 disables extensions
}

TEST_CASE("recursive equals enumeration exactly (S1, cutoff 3)") {
  Landscape ls = make_s1(0.5);
  ExpectationResult recursive = expected_time_recursive(ls, s1_start(), 3);
  EnumerationResult enumerated = enumerate_trips(ls, s1_start(), 3);
  CHECK(relative_gap(recursive.value_seconds, enumerated.expectation.value_seconds) < 1e-12);
  CHECK(recursive.value_seconds == doctest::Approx(125.0).epsilon(1e-12));
}

TEST_CASE("recursive equals enumeration on random small landscapes") {
  std::mt19937_64 rng(20240606);
  EnumerationOptions options;
  options.collect_paths = false;
  for (int iter = 0; iter < 30; ++iter) {
    testsupport::FuzzOptions fuzz;
    int cutoff = static_cast<int>(rng() % 5);
    if (cutoff == 4) {
      fuzz.max_platforms = 3;
      fuzz.max_personalities = 3;
    }
    Landscape ls = testsupport::random_landscape(rng, fuzz);
    auto start = testsupport::fuzz_start(ls);
    ExpectationResult recursive = expected_time_recursive(ls, start, cutoff);
    EnumerationResult enumerated = enumerate_trips(ls, start, cutoff, options);
    CHECK(relative_gap(recursive.value_seconds, enumerated.expectation.value_seconds) < 1e-12);
  }
}

TEST_CASE("recursive: monotone in cutoff with truncation-bounded steps") {
  std::mt19937_64 rng(20240607);
  for (int iter = 0; iter < 20; ++iter) {
    Landscape ls = testsupport::random_landscape(rng);
    auto start = testsupport::fuzz_start(ls);
    double prev = -1.0;
    double prev_bound = 0.0;
    for (int cutoff = 0; cutoff <= 8; ++cutoff) {
      ExpectationResult result = expected_time_recursive(ls, start, cutoff);
      if (cutoff > 0) {
        CHECK(result.value_seconds >= prev - 1e-12 * std::abs(prev));
        CHECK(result.value_seconds - prev <= prev_bound + 1e-12);
        CHECK(result.truncation_bound <= prev_bound + 1e-15);
      }
      prev = result.value_seconds;
      prev_bound = result.truncation_bound;
    }
  }
}

TEST_CASE("recursive matches a Monte Carlo batch (S1 with extensions)") {
  Landscape ls = make_s1(0.5);
  ExpectationResult expected = expected_time_recursive(ls, s1_start(), 6);
  McOptions options;
  options.depth_cutoff = 6;
  TrafficReport mc = run_monte_carlo(ls, s1_start(), 200000, 31337, options);
  CHECK(std::abs(mc.mean_trip_seconds - expected.value_seconds) < 3.0 * mc.standard_error);
}

TEST_CASE("collapsed: S1 direct-only evaluates the printed first term") {
  ExpectationResult result =
      expected_time_collapsed(make_s1(0.0), s1_weights(), AlphaSum::exact());
  CHECK(result.value_seconds == 62.5);  // 0.5*0.75*100 + 0.5*0.25*200
  CHECK(result.truncation_bound == 0.0);
  CHECK(!result.cutoff_used.has_value());
}

TEST_CASE("collapsed: vanishes when nothing is hoppable") {
  Landscape ls = make_s1(0.0);
  for (auto& m : ls.personalities) {
    for (auto& [pid, w] : m.attraction) w = 0.0;
  }
  ExpectationResult result = expected_time_collapsed(ls, s1_weights(), AlphaSum::exact());
  CHECK(result.value_seconds == 0.0);
}

TEST_CASE("collapsed: geometric half sums the alpha series to one") {
  // a/(1-a) = 1 at a = 0.5, so the quadratic term contributes exactly
  // sum_n sum_m p_mn^2 T_n = 0.25*(100 + 100 + 200) = 100.
  ExpectationResult exact =
      expected_time_collapsed(make_s1(0.5), s1_weights(), AlphaSum::exact());
  CHECK(exact.value_seconds == doctest::Approx(162.5).epsilon(1e-12));

  ExpectationResult truncated =
      expected_time_collapsed(make_s1(0.5), s1_weights(), AlphaSum::truncated(40));
  CHECK(truncated.value_seconds < exact.value_seconds);
  CHECK(exact.value_seconds - truncated.value_seconds <=
        truncated.truncation_bound + 1e-12);
  CHECK(truncated.cutoff_used.has_value());
}

TEST_CASE("evaluators are linear in dwell times") {
  std::mt19937_64 rng(20240608);
  for (int iter = 0; iter < 20; ++iter) {
    Landscape ls = testsupport::random_landscape(rng);
    auto start = testsupport::fuzz_start(ls);
    PlatformWeights weights;
    for (const auto& p : ls.platforms) weights.emplace_back(p.id, p.traffic_weight);

    Landscape doubled = ls;
    for (auto& p : doubled.platforms) p.dwell_seconds *= 2.0;

    double base_r = expected_time_recursive(ls, start, 6).value_seconds;
    double doubled_r = expected_time_recursive(doubled, start, 6).value_seconds;
    CHECK(doubled_r == 2.0 * base_r);  // power-of-two scaling is exact

    double base_c = expected_time_collapsed(ls, weights, AlphaSum::exact()).value_seconds;
    double doubled_c = expected_time_collapsed(doubled, weights, AlphaSum::exact()).value_seconds;
    CHECK(doubled_c == 2.0 * base_c);

    Landscape tripled = ls;
    for (auto& p : tripled.platforms) p.dwell_seconds *= 3.0;
    double tripled_r = expected_time_recursive(tripled, start, 6).value_seconds;
    CHECK(relative_gap(tripled_r, 3.0 * base_r) < 1e-12);
  }
}

TEST_CASE("sensitivity: S1 hand value for platform B") {
  SensitivityResult result =
      marginal_sensitivity(make_s1(0.0), s1_weights(), "B", AlphaSum::exact());
  CHECK(result.derivative == 0.375);  // p_B * p_QB = 0.75 * 0.5
  CHECK(result.method == "analytic");
  CHECK(result.positivity_precondition);
  CHECK(result.note.empty());

  SensitivityResult with_alpha =
      marginal_sensitivity(make_s1(0.5), s1_weights(), "B", AlphaSum::exact());
  CHECK(with_alpha.derivative == doctest::Approx(0.625).epsilon(1e-12));  // + 1 * 0.25
}

TEST_CASE("sensitivity: zero hop weights give zero with a diagnostic") {
  Landscape ls = make_s1(0.5);
  for (auto& m : ls.personalities) {
    for (auto& [pid, w] : m.attraction) w = 0.0;
  }
  SensitivityResult result = marginal_sensitivity(ls, s1_weights(), "B", AlphaSum::exact());
  CHECK(result.derivative == 0.0);
  CHECK(!result.positivity_precondition);
  CHECK(!result.note.empty());
}

TEST_CASE("sensitivity: unknown platform") {
  CHECK_THROWS_AS(marginal_sensitivity(make_s1(0.0), s1_weights(), "nope", AlphaSum::exact()),
                  Error);
}

TEST_CASE("finite differences: collapsed evaluator is step-size independent") {
  // Linearity makes the central difference independent of h; the only
  // deviation is subtractive rounding, which scales with E / (h * d). A
  // unit-scale landscape keeps it under 1e-9 across the whole h range.
  Landscape unit;
  unit.platforms = {{"U", "U", 1.0, 2.0}, {"V", "V", 1.0, 2.0}};
  unit.personalities = {
      {"P0", "P0", {"U", "V"}, {{"U", 0.5}, {"V", 0.5}}, {}},
      {"P1", "P1", {"U", "V"}, {{"U", 0.5}, {"V", 0.5}}, {}},
  };
  unit.return_weight = 1.0;
  unit.schedule = ContinuationSchedule::geometric(0.5);

  FdSpec spec;
  spec.evaluator = Evaluator::Collapsed;
  spec.start_platform_weights = {{"U", 1.0}, {"V", 1.0}};
  spec.alpha_sum = AlphaSum::exact();

  double reference =
      marginal_sensitivity(unit, spec.start_platform_weights, "U", AlphaSum::exact()).derivative;
  for (double h : {1e-6, 1e-4, 1e-2, 0.5, 1.0}) {
    spec.step_seconds = h;
    SensitivityResult fd = finite_difference_sensitivity(unit, "U", spec);
    CHECK(relative_gap(fd.derivative, reference) < 1e-9);
    CHECK(fd.method == "finite-difference");
  }

  // Same independence on S1 once h is large enough to clear the rounding
  // floor of its ~160 s expectation values.
  Landscape s1 = make_s1(0.5);
  spec.start_platform_weights = s1_weights();
  for (double h : {1e-2, 0.1, 1.0, 10.0}) {
    spec.step_seconds = h;
    SensitivityResult fd = finite_difference_sensitivity(s1, "B", spec);
    CHECK(relative_gap(fd.derivative, 0.625) < 1e-9);
  }
}

TEST_CASE("finite differences: recursive derivative differs from the printed formula") {
  // Direct-only, the recursive expectation is p_B T_B + p_C T_C, so the true
  // derivative in T_B is p_B = 0.75 while the printed form gives 0.375.
  FdSpec spec;
  spec.evaluator = Evaluator::Recursive;
  spec.start = s1_start();
  spec.depth_cutoff = 64;
  spec.step_seconds = 1.0;
  SensitivityResult fd = finite_difference_sensitivity(make_s1(0.0), "B", spec);
  CHECK(relative_gap(fd.derivative, 0.75) < 1e-9);
}

TEST_CASE("finite differences: step validation") {
  FdSpec spec;
  spec.evaluator = Evaluator::Collapsed;
  spec.start_platform_weights = s1_weights();
  spec.step_seconds = 0.0;
  CHECK_THROWS_AS(finite_difference_sensitivity(make_s1(0.0), "B", spec), Error);
  try {
    finite_difference_sensitivity(make_s1(0.0), "B", spec);
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::InvalidStep);
  }
  spec.step_seconds = 1000.0;  // would push T_B negative
  CHECK_THROWS_AS(finite_difference_sensitivity(make_s1(0.0), "B", spec), Error);
}

TEST_CASE("property: analytic sensitivity is positive and matches finite differences") {
  std::mt19937_64 rng(20240609);
  testsupport::FuzzOptions fuzz;
  fuzz.max_alpha_base = 0.8;
  for (int iter = 0; iter < 100; ++iter) {
    Landscape ls = testsupport::random_landscape(rng, fuzz);
    PlatformWeights weights;
    for (const auto& p : ls.platforms) weights.emplace_back(p.id, p.traffic_weight);

    for (const auto& platform : ls.platforms) {
      SensitivityResult analytic =
          marginal_sensitivity(ls, weights, platform.id, AlphaSum::exact());
      FdSpec spec;
      spec.evaluator = Evaluator::Collapsed;
      spec.start_platform_weights = weights;
      spec.alpha_sum = AlphaSum::exact();
      spec.step_seconds = platform.dwell_seconds / 2.0;
      SensitivityResult fd = finite_difference_sensitivity(ls, platform.id, spec);

      CHECK(relative_gap(analytic.derivative, fd.derivative) < 1e-9);
      if (analytic.positivity_precondition) {
        CHECK(analytic.derivative > 0.0);
      }
    }
  }
}

TEST_CASE("pooled landscapes: recursion's expected dwell factor matches enumeration") {
  std::mt19937_64 rng(20240610);
  EnumerationOptions options;
  options.collect_paths = false;
  for (int iter = 0; iter < 10; ++iter) {
    Landscape ls = make_s1_pool(0.25 + 0.5 * (iter / 10.0), 1.0 + iter * 0.2, 0.5);
    ExpectationResult recursive = expected_time_recursive(ls, s1_start(), 3);
    EnumerationResult enumerated = enumerate_trips(ls, s1_start(), 3, options);
    CHECK(relative_gap(recursive.value_seconds, enumerated.expectation.value_seconds) < 1e-12);
  }
  (void)rng;
}
