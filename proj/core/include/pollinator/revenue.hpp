#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace pollinator {

/// One platform's observed usage: minutes per day and visits per week.
struct UsageRow {
  std::string platform;
  double time_min_per_day = 0.0;
  double freq_visits_per_week = 0.0;
};

struct RevenueParams {
  double cpc = 2.0;  // currency per click
  double cpm = 7.0;  // currency per thousand impressions
};

/// One derived revenue-index row:
///   ln_time = ln(60 * time)            natural log of seconds per day
///   pct_mt  = time / total time        share of total daily time, in [0, 1]
///   depth   = freq * ln_time           depth of engagement
///   cwri    = cpc * pct_mt * depth     CPC weekly revenue index
///   mwri    = cpm * freq * time / 100  CPM weekly revenue index
///   d_cwri  = pct_mt * cwri            CPC uplift per pollination event
///   d_mwri  = pct_mt * mwri            CPM uplift per pollination event
struct RevenueRow {
  std::string platform;
  double time_min_per_day = 0.0;
  double ln_time = 0.0;
  double pct_mt = 0.0;
  double freq_visits_per_week = 0.0;
  double depth = 0.0;
  double cwri = 0.0;
  double mwri = 0.0;
  double d_cwri = 0.0;
  double d_mwri = 0.0;
};

// CSV schema: header `platform,time_min_per_day,freq_visits_per_week`,
// UTF-8, comma separator, dot decimals. Blank lines and lines starting with
// '#' are skipped. Rejects duplicate platforms, non-positive or malformed
// numbers, and short/long rows, all with 1-based line numbers.
std::vector<UsageRow> ingest_usage_csv(const std::string& path);
std::vector<UsageRow> parse_usage_csv(std::istream& in, const std::string& origin);

// Fills every derived column except the uplifts; input order is preserved.
std::vector<RevenueRow> compute_revenue_table(const std::vector<UsageRow>& rows,
                                              const RevenueParams& params);

// Fills d_cwri / d_mwri.
std::vector<RevenueRow> pollination_uplift(std::vector<RevenueRow> table);

struct DepthPoint {
  std::string platform;
  double depth = 0.0;
};

/// (platform, depth) pairs sorted descending by depth; ties keep input order.
std::vector<DepthPoint> depth_chart_data(const std::vector<RevenueRow>& table);

struct DominanceFinding {
  std::string platform_a;
  std::string platform_b;
  std::string kind;  // "inversion": strict order flip; "tie": equal pct_mt split by uplift
};

/// Whether descending d_cwri order tracks descending pct_mt order.
/// Inversions are findings, not errors; `orders_agree` means no strict
/// inversion exists (ties broken by uplift are listed separately).
struct DominanceReport {
  bool orders_agree = true;
  std::vector<std::string> pct_mt_order;   // platform ids, descending pct_mt
  std::vector<std::string> d_cwri_order;   // platform ids, descending d_cwri
  std::vector<DominanceFinding> findings;
};

DominanceReport uplift_dominance_check(const std::vector<RevenueRow>& table);

}  // namespace pollinator
