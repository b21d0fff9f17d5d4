#include "pollinator/revenue.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <unordered_set>

#include "pollinator/errors.hpp"

namespace pollinator {

namespace {

std::string trim(const std::string& s) {
  size_t b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  size_t e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double parse_number(const std::string& field, int line) {
  std::string t = trim(field);
  double value = 0.0;
  auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), value);
  if (ec != std::errc{} || ptr != t.data() + t.size() || !std::isfinite(value)) {
    throw Error(ErrorCode::MalformedRow,
                "line " + std::to_string(line) + ": '" + t + "' is not a finite number");
  }
  return value;
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  std::stringstream ss(line);
  while (std::getline(ss, field, ',')) fields.push_back(field);
  if (!line.empty() && line.back() == ',') fields.push_back("");
  return fields;
}

}  // namespace

std::vector<UsageRow> parse_usage_csv(std::istream& in, const std::string& origin) {
  static const std::string kHeader = "platform,time_min_per_day,freq_visits_per_week";

  std::vector<UsageRow> rows;
  std::unordered_set<std::string> seen;
  std::string line;
  int line_no = 0;
  bool header_seen = false;
  while (std::getline(in, line)) {
    ++line_no;
    std::string t = trim(line);
    if (t.empty() || t.front() == '#') continue;
    if (!header_seen) {
      if (t != kHeader) {
        throw Error(ErrorCode::MalformedRow,
                    origin + " line " + std::to_string(line_no) + ": expected header '" +
                        kHeader + "'");
      }
      header_seen = true;
      continue;
    }
    auto fields = split_csv(t);
    if (fields.size() != 3) {
      throw Error(ErrorCode::MalformedRow,
                  origin + " line " + std::to_string(line_no) + ": expected 3 fields, got " +
                      std::to_string(fields.size()));
    }
    UsageRow row;
    row.platform = trim(fields[0]);
    if (row.platform.empty()) {
      throw Error(ErrorCode::MalformedRow,
                  origin + " line " + std::to_string(line_no) + ": empty platform name");
    }
    if (!seen.insert(row.platform).second) {
      throw Error(ErrorCode::DuplicatePlatform,
                  "duplicate platform '" + row.platform + "' at line " + std::to_string(line_no));
    }
    row.time_min_per_day = parse_number(fields[1], line_no);
    row.freq_visits_per_week = parse_number(fields[2], line_no);
    if (row.time_min_per_day <= 0.0 || row.freq_visits_per_week <= 0.0) {
      throw Error(ErrorCode::NonPositiveValue,
                  origin + " line " + std::to_string(line_no) + ": values must be > 0");
    }
    rows.push_back(std::move(row));
  }
  if (!header_seen) {
    throw Error(ErrorCode::MalformedRow, origin + ": missing header row");
  }
  return rows;
}

std::vector<UsageRow> ingest_usage_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw Error(ErrorCode::FileNotFound, "cannot open '" + path + "'");
  }
  return parse_usage_csv(in, path);
}

std::vector<RevenueRow> compute_revenue_table(const std::vector<UsageRow>& rows,
                                              const RevenueParams& params) {
  if (rows.empty()) {
    throw Error(ErrorCode::EmptyDataset, "usage dataset has no rows");
  }
  double total_time = 0.0;
  for (const auto& r : rows) total_time += r.time_min_per_day;

  std::vector<RevenueRow> table;
  table.reserve(rows.size());
  for (const auto& r : rows) {
    RevenueRow row;
    row.platform = r.platform;
    row.time_min_per_day = r.time_min_per_day;
    row.freq_visits_per_week = r.freq_visits_per_week;
    row.ln_time = std::log(60.0 * r.time_min_per_day);
    row.pct_mt = r.time_min_per_day / total_time;
    row.depth = r.freq_visits_per_week * row.ln_time;
    row.cwri = params.cpc * row.pct_mt * row.depth;
    row.mwri = params.cpm * r.freq_visits_per_week * r.time_min_per_day / 100.0;
    table.push_back(std::move(row));
  }
  return table;
}

std::vector<RevenueRow> pollination_uplift(std::vector<RevenueRow> table) {
  for (auto& row : table) {
    row.d_cwri = row.pct_mt * row.cwri;
    row.d_mwri = row.pct_mt * row.mwri;
  }
  return table;
}

std::vector<DepthPoint> depth_chart_data(const std::vector<RevenueRow>& table) {
  std::vector<DepthPoint> points;
  points.reserve(table.size());
  for (const auto& row : table) points.push_back({row.platform, row.depth});
  std::stable_sort(points.begin(), points.end(),
                   [](const DepthPoint& a, const DepthPoint& b) { return a.depth > b.depth; });
  return points;
}

DominanceReport uplift_dominance_check(const std::vector<RevenueRow>& table) {
  DominanceReport report;

  auto order_by = [&](auto key) {
    std::vector<size_t> idx(table.size());
    for (size_t i = 0; i < idx.size(); ++i) idx[i] = i;
    std::stable_sort(idx.begin(), idx.end(),
                     [&](size_t a, size_t b) { return key(table[a]) > key(table[b]); });
    std::vector<std::string> names;
    names.reserve(idx.size());
    for (size_t i : idx) names.push_back(table[i].platform);
    return names;
  };
  report.pct_mt_order = order_by([](const RevenueRow& r) { return r.pct_mt; });
  report.d_cwri_order = order_by([](const RevenueRow& r) { return r.d_cwri; });

  for (size_t a = 0; a < table.size(); ++a) {
    for (size_t b = a + 1; b < table.size(); ++b) {
      double dp = table[a].pct_mt - table[b].pct_mt;
      double du = table[a].d_cwri - table[b].d_cwri;
      if (dp == 0.0 && du != 0.0) {
        report.findings.push_back({table[a].platform, table[b].platform, "tie"});
      } else if ((dp > 0.0 && du < 0.0) || (dp < 0.0 && du > 0.0)) {
        report.findings.push_back({table[a].platform, table[b].platform, "inversion"});
        report.orders_agree = false;
      }
    }
  }
  return report;
}

}  // namespace pollinator
