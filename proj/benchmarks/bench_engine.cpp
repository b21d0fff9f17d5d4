#include <benchmark/benchmark.h>

#include "pollinator/expectation.hpp"
#include "pollinator/revenue.hpp"
#include "pollinator/trip_engine.hpp"
#include "support/test_landscapes.hpp"

using namespace pollinator;

static void BM_SampleTrip(benchmark::State& state) {
  Landscape ls = testsupport::make_rich();
  std::uint64_t seed = 0;
  for (auto _ : state) {
    TripRecord record = sample_trip(ls, testsupport::rich_start(), seed++);
    benchmark::DoNotOptimize(record.total_seconds());
  }
}
BENCHMARK(BM_SampleTrip);

static void BM_MonteCarlo(benchmark::State& state) {
  Landscape ls = testsupport::make_rich();
  McOptions options;
  options.workers = static_cast<int>(state.range(0));
  for (auto _ : state) {
    TrafficReport report =
        run_monte_carlo(ls, testsupport::rich_start(), 100000, 42, options);
    benchmark::DoNotOptimize(report.mean_trip_seconds);
  }
}
BENCHMARK(BM_MonteCarlo)->Arg(1)->Arg(4)->Unit(benchmark::kMillisecond);

static void BM_RecursiveExpectation(benchmark::State& state) {
  Landscape ls = testsupport::make_rich();
  for (auto _ : state) {
    auto result =
        expected_time_recursive(ls, testsupport::rich_start(), static_cast<int>(state.range(0)));
    benchmark::DoNotOptimize(result.value_seconds);
  }
}
BENCHMARK(BM_RecursiveExpectation)->Arg(8)->Arg(64);

static void BM_EnumerateTrips(benchmark::State& state) {
  Landscape ls = testsupport::make_rich();
  EnumerationOptions options;
  options.collect_paths = false;
  for (auto _ : state) {
    auto result = enumerate_trips(ls, testsupport::rich_start(),
                                  static_cast<int>(state.range(0)), options);
    benchmark::DoNotOptimize(result.expectation.value_seconds);
  }
}
BENCHMARK(BM_EnumerateTrips)->Arg(2)->Arg(4);

static void BM_RevenueTable(benchmark::State& state) {
  std::vector<UsageRow> rows;
  for (int i = 0; i < 50; ++i) {
    rows.push_back({"P" + std::to_string(i), 1.0 + i, 1.0 + (i % 7)});
  }
  for (auto _ : state) {
    auto table = pollination_uplift(compute_revenue_table(rows, {}));
    benchmark::DoNotOptimize(table.back().d_mwri);
  }
}
BENCHMARK(BM_RevenueTable);

BENCHMARK_MAIN();
