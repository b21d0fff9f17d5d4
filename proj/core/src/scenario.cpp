#include "pollinator/scenario.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "pollinator/errors.hpp"

namespace pollinator {

using json = nlohmann::ordered_json;

namespace {

[[noreturn]] void config_error(const std::string& message) {
  throw Error(ErrorCode::ConfigError, message);
}

double get_number(const json& j, const char* key, std::optional<double> fallback = {}) {
  if (!j.contains(key)) {
    if (fallback) return *fallback;
    config_error(std::string("missing numeric field '") + key + "'");
  }
  if (!j.at(key).is_number()) {
    config_error(std::string("field '") + key + "' must be a number");
  }
  return j.at(key).get<double>();
}

std::string get_string(const json& j, const char* key, std::optional<std::string> fallback = {}) {
  if (!j.contains(key)) {
    if (fallback) return *fallback;
    config_error(std::string("missing string field '") + key + "'");
  }
  if (!j.at(key).is_string()) {
    config_error(std::string("field '") + key + "' must be a string");
  }
  return j.at(key).get<std::string>();
}

ContinuationSchedule parse_schedule(const json& j) {
  std::string kind = get_string(j, "kind");
  if (kind == "geometric") {
    return ContinuationSchedule::geometric(get_number(j, "base"));
  }
  if (kind == "explicit") {
    if (!j.contains("values") || !j.at("values").is_array()) {
      config_error("explicit schedule needs a 'values' array");
    }
    std::vector<double> values;
    for (const auto& v : j.at("values")) {
      if (!v.is_number()) config_error("schedule values must be numbers");
      values.push_back(v.get<double>());
    }
    return ContinuationSchedule::explicit_values(std::move(values));
  }
  config_error("schedule kind must be 'geometric' or 'explicit'");
}

Landscape parse_landscape(const json& j) {
  Landscape landscape;
  landscape.return_weight = get_number(j, "return_weight");
  if (!j.contains("schedule")) config_error("landscape needs a 'schedule'");
  landscape.schedule = parse_schedule(j.at("schedule"));

  if (!j.contains("platforms") || !j.at("platforms").is_array()) {
    config_error("landscape needs a 'platforms' array");
  }
  for (const auto& p : j.at("platforms")) {
    OsmPlatform platform;
    platform.id = get_string(p, "id");
    platform.name = get_string(p, "name", platform.id);
    platform.traffic_weight = get_number(p, "traffic_weight");
    platform.dwell_seconds = get_number(p, "dwell_seconds");
    landscape.platforms.push_back(std::move(platform));
  }

  if (!j.contains("personalities") || !j.at("personalities").is_array()) {
    config_error("landscape needs a 'personalities' array");
  }
  for (const auto& m : j.at("personalities")) {
    Personality personality;
    personality.id = get_string(m, "id");
    personality.name = get_string(m, "name", personality.id);
    if (!m.contains("presence") || !m.at("presence").is_array()) {
      config_error("personality '" + personality.id + "' needs a 'presence' array");
    }
    for (const auto& pid : m.at("presence")) {
      if (!pid.is_string()) config_error("presence entries must be platform ids");
      personality.presence.push_back(pid.get<std::string>());
    }
    if (m.contains("attraction")) {
      if (!m.at("attraction").is_object()) {
        config_error("personality '" + personality.id + "' attraction must be an object");
      }
      for (const auto& [pid, w] : m.at("attraction").items()) {
        if (!w.is_number()) config_error("attraction weights must be numbers");
        personality.attraction[pid] = w.get<double>();
      }
    }
    if (m.contains("pool")) {
      const auto& pj = m.at("pool");
      PoolConfig pool;
      pool.enabled = pj.contains("enabled") ? pj.at("enabled").get<bool>() : true;
      pool.pick_probability = get_number(pj, "pick_probability");
      pool.dwell_multiplier = get_number(pj, "dwell_multiplier");
      personality.pool = pool;
    }
    landscape.personalities.push_back(std::move(personality));
  }
  return landscape;
}

HeterogeneitySpec parse_heterogeneity(const json& j) {
  HeterogeneitySpec spec;
  if (!j.contains("profiles") || !j.at("profiles").is_array()) {
    config_error("heterogeneity needs a 'profiles' array");
  }
  for (const auto& p : j.at("profiles")) {
    EngagementProfile profile;
    profile.type_label = get_string(p, "type_label");
    profile.preferred_length = get_number(p, "preferred_length");
    profile.width = get_number(p, "width");
    spec.profiles.push_back(std::move(profile));
  }
  if (j.contains("pool_lengths")) {
    for (const auto& v : j.at("pool_lengths")) {
      if (!v.is_number()) config_error("pool_lengths must be numbers");
      spec.pool_lengths.push_back(v.get<double>());
    }
  }
  spec.learning_rate = get_number(j, "learning_rate", 0.5);
  spec.steps = static_cast<int>(get_number(j, "steps", 10));
  if (j.contains("search")) {
    const auto& s = j.at("search");
    spec.search_interval.lo = get_number(s, "lo");
    spec.search_interval.hi = get_number(s, "hi");
    spec.grid_resolution = get_number(s, "resolution", 0.01);
  }
  return spec;
}

}  // namespace

ScenarioConfig parse_scenario(const std::string& json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const nlohmann::json::exception& e) {
    config_error(std::string("invalid JSON: ") + e.what());
  }

  if (!j.contains("schema_version") || !j.at("schema_version").is_number_integer()) {
    config_error("missing integer 'schema_version'");
  }
  if (j.at("schema_version").get<int>() != kSchemaVersion) {
    config_error("unsupported schema_version " + j.at("schema_version").dump() +
                 " (expected " + std::to_string(kSchemaVersion) + ")");
  }

  ScenarioConfig config;
  if (!j.contains("landscape")) config_error("missing 'landscape'");
  config.landscape = parse_landscape(j.at("landscape"));

  if (!j.contains("start")) config_error("missing 'start'");
  config.start.personality = get_string(j.at("start"), "personality");
  config.start.platform = get_string(j.at("start"), "platform");

  if (j.contains("run")) {
    const auto& r = j.at("run");
    config.run.trips = static_cast<std::uint64_t>(get_number(r, "trips", 100000));
    config.run.master_seed = static_cast<std::uint64_t>(get_number(r, "master_seed", 1));
    config.run.depth_cutoff = static_cast<int>(get_number(r, "depth_cutoff", 64));
    config.run.workers = static_cast<int>(get_number(r, "workers", 0));
  }
  if (j.contains("revenue")) {
    config.revenue.cpc = get_number(j.at("revenue"), "cpc", 2.0);
    config.revenue.cpm = get_number(j.at("revenue"), "cpm", 7.0);
  }
  if (j.contains("heterogeneity")) {
    config.heterogeneity = parse_heterogeneity(j.at("heterogeneity"));
  }
  return config;
}

ScenarioConfig load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw Error(ErrorCode::FileNotFound, "cannot open '" + path + "'");
  }
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_scenario(buffer.str());
}

namespace {

json expectation_json(const ExpectationResult& result) {
  json j;
  j["value_seconds"] = result.value_seconds;
  if (result.cutoff_used) {
    j["cutoff"] = *result.cutoff_used;
  } else {
    j["cutoff"] = nullptr;
  }
  j["truncation_bound"] = result.truncation_bound;
  return j;
}

json traffic_json(const TrafficReport& report) {
  json j;
  j["schema_version"] = kSchemaVersion;
  j["trips"] = report.trips;
  j["mean_trip_seconds"] = report.mean_trip_seconds;
  j["standard_error"] = report.standard_error;
  json platforms = json::array();
  for (const auto& p : report.platforms) {
    json item;
    item["id"] = p.platform;
    item["landings"] = p.landings;
    item["total_seconds"] = p.total_seconds;
    item["share_of_landings"] = p.share_of_landings;
    platforms.push_back(std::move(item));
  }
  j["platforms"] = std::move(platforms);
  return j;
}

json sensitivity_json(const SensitivityResult& result) {
  json j;
  j["platform"] = result.platform;
  j["derivative"] = result.derivative;
  j["method"] = result.method;
  j["positivity_precondition"] = result.positivity_precondition;
  if (result.note.empty()) {
    j["note"] = nullptr;
  } else {
    j["note"] = result.note;
  }
  return j;
}

std::string dump(const json& j) { return j.dump(2) + "\n"; }

std::string format_fixed(double value, int decimals) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*f", decimals, value);
  return buf;
}

}  // namespace

std::string to_json_string(const TrafficReport& report) { return dump(traffic_json(report)); }

std::string to_json_line(const TripRecord& record) {
  json j;
  j["seed"] = record.seed;
  j["terminal"] = terminal_reason_name(record.terminal_reason);
  j["total_seconds"] = record.total_seconds();
  json stages = json::array();
  for (const auto& stage : record.stages) {
    json s;
    s["x"] = stage.stage_index;
    s["personality"] = stage.personality;
    s["platform"] = stage.platform;
    s["dwell_seconds"] = stage.dwell_seconds;
    s["via_pool"] = stage.via_pool;
    if (stage.hop_target) {
      s["hop_target"] = *stage.hop_target;
    } else {
      s["hop_target"] = nullptr;
    }
    stages.push_back(std::move(s));
  }
  j["stages"] = std::move(stages);
  return j.dump();
}

std::string trace_header_line() {
  json j;
  j["schema_version"] = kSchemaVersion;
  j["kind"] = "trip_trace";
  return j.dump();
}

std::string to_json_string(const ExpectationReport& report) {
  json j;
  j["schema_version"] = kSchemaVersion;
  j["recursive"] = expectation_json(report.recursive);
  j["collapsed"] = expectation_json(report.collapsed);
  j["divergence"] = report.divergence;
  if (!report.cutoff_sweep.empty()) {
    json sweep = json::array();
    for (const auto& r : report.cutoff_sweep) sweep.push_back(expectation_json(r));
    j["cutoff_sweep"] = std::move(sweep);
  }
  return dump(j);
}

std::string to_json_string(const SensitivityResult& analytic,
                           const SensitivityResult& fd_collapsed,
                           const SensitivityResult& fd_recursive) {
  json j;
  j["schema_version"] = kSchemaVersion;
  j["analytic"] = sensitivity_json(analytic);
  j["finite_difference_collapsed"] = sensitivity_json(fd_collapsed);
  j["finite_difference_recursive"] = sensitivity_json(fd_recursive);
  return dump(j);
}

std::string revenue_table_csv(const std::vector<RevenueRow>& table) {
  std::string out = "# schema_version=1\n";
  out +=
      "platform,time_min_per_day,ln_time,pct_mt,freq_visits_per_week,depth,"
      "cwri,mwri,d_cwri,d_mwri\n";
  for (const auto& r : table) {
    out += r.platform;
    out += ',' + format_fixed(r.time_min_per_day, 3);
    out += ',' + format_fixed(r.ln_time, 6);
    out += ',' + format_fixed(r.pct_mt, 6);
    out += ',' + format_fixed(r.freq_visits_per_week, 3);
    out += ',' + format_fixed(r.depth, 6);
    out += ',' + format_fixed(r.cwri, 3);
    out += ',' + format_fixed(r.mwri, 3);
    out += ',' + format_fixed(r.d_cwri, 3);
    out += ',' + format_fixed(r.d_mwri, 3);
    out += '\n';
  }
  return out;
}

std::string to_json_string(const std::vector<RevenueRow>& table, const RevenueParams& params,
                           const DominanceReport& dominance,
                           const std::vector<DepthPoint>& depth_chart) {
  json j;
  j["schema_version"] = kSchemaVersion;
  j["params"] = {{"cpc", params.cpc}, {"cpm", params.cpm}};
  json rows = json::array();
  for (const auto& r : table) {
    json row;
    row["platform"] = r.platform;
    row["time_min_per_day"] = r.time_min_per_day;
    row["ln_time"] = r.ln_time;
    row["pct_mt"] = r.pct_mt;
    row["freq_visits_per_week"] = r.freq_visits_per_week;
    row["depth"] = r.depth;
    row["cwri"] = r.cwri;
    row["mwri"] = r.mwri;
    row["d_cwri"] = r.d_cwri;
    row["d_mwri"] = r.d_mwri;
    rows.push_back(std::move(row));
  }
  j["rows"] = std::move(rows);

  json dom;
  dom["orders_agree"] = dominance.orders_agree;
  dom["pct_mt_order"] = dominance.pct_mt_order;
  dom["d_cwri_order"] = dominance.d_cwri_order;
  json findings = json::array();
  for (const auto& f : dominance.findings) {
    findings.push_back({{"platform_a", f.platform_a}, {"platform_b", f.platform_b}, {"kind", f.kind}});
  }
  dom["findings"] = std::move(findings);
  j["dominance"] = std::move(dom);

  json chart = json::array();
  for (const auto& point : depth_chart) {
    chart.push_back({{"platform", point.platform}, {"depth", point.depth}});
  }
  j["depth_chart"] = std::move(chart);
  return dump(j);
}

std::string trajectory_csv(const std::vector<TrajectoryPoint>& trajectory) {
  std::string out = "# schema_version=1\n";
  out += "step,mu_a,mu_b,gap\n";
  char buf[160];
  for (const auto& point : trajectory) {
    std::snprintf(buf, sizeof(buf), "%d,%.10g,%.10g,%.10g\n", point.step, point.mu_a,
                  point.mu_b, point.gap);
    out += buf;
  }
  return out;
}

std::string to_json_string(const MedianLengthResult& result) {
  json j;
  j["schema_version"] = kSchemaVersion;
  j["length"] = result.length;
  j["joint_engagement"] = result.joint_engagement;
  j["grid_resolution"] = result.grid_resolution;
  return dump(j);
}

std::string to_json_string(const PoolComparison& comparison) {
  json j;
  j["schema_version"] = kSchemaVersion;
  j["disabled"] = traffic_json(comparison.disabled);
  j["enabled"] = traffic_json(comparison.enabled);
  j["mean_ratio"] = comparison.disabled.mean_trip_seconds > 0.0
                        ? comparison.enabled.mean_trip_seconds /
                              comparison.disabled.mean_trip_seconds
                        : 0.0;
  double max_share_delta = 0.0;
  for (size_t i = 0; i < comparison.disabled.platforms.size() &&
                     i < comparison.enabled.platforms.size();
       ++i) {
    max_share_delta = std::max(max_share_delta,
                               std::abs(comparison.enabled.platforms[i].share_of_landings -
                                        comparison.disabled.platforms[i].share_of_landings));
  }
  j["max_share_delta"] = max_share_delta;
  return dump(j);
}

}  // namespace pollinator
