#pragma once

#include <charconv>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <fstream>
#include <istream>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include "json.hpp"
#include "lpa/bootstrap.hpp"
#include "lpa/count_core.hpp"
#include "lpa/engine.hpp"
#include "lpa/errors.hpp"
#include "lpa/forecast.hpp"
#include "lpa/scenario.hpp"

namespace lpa {

using json = nlohmann::json;

inline constexpr int schema_version = 1;

// ---------------------------------------------------------------------------
// Series files: header "period,count", then one "label,count" row per period.

namespace detail {

inline std::string_view trim(std::string_view s) {
  const auto is_space = [](char c) { return c == ' ' || c == '\t' || c == '\r' || c == '\n'; };
  while (!s.empty() && is_space(s.front())) {
    s.remove_prefix(1);
  }
  while (!s.empty() && is_space(s.back())) {
    s.remove_suffix(1);
  }
  return s;
}

inline CountSeries::value_type parse_count(std::string_view field, std::size_t line) {
  const std::string_view text = trim(field);
  CountSeries::value_type value = 0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec == std::errc{} && ptr == text.data() + text.size() && !text.empty()) {
    if (value < 0) {
      throw validation_error(line, "count '" + std::string(text) + "' is negative");
    }
    return value;
  }
  double real = 0.0;
  const auto [rptr, rec] = std::from_chars(text.data(), text.data() + text.size(), real);
  if (rec == std::errc{} && rptr == text.data() + text.size() && !text.empty()) {
    throw validation_error(line, "count '" + std::string(text) + "' is not a non-negative integer");
  }
  throw parse_error(line, "count field '" + std::string(text) + "' is not a number");
}

}  // namespace detail

inline CountSeries parse_series(std::istream& in) {
  std::string raw;
  std::size_t line = 0;
  bool header_seen = false;
  std::vector<CountSeries::value_type> values;
  std::vector<std::string> labels;
  std::size_t blank_run_start = 0;
  while (std::getline(in, raw)) {
    ++line;
    const std::string_view row = detail::trim(raw);
    if (!header_seen) {
      if (line == 1 && row.size() >= 3 && row.substr(0, 3) == "\xEF\xBB\xBF") {
        raw.erase(0, 3);
      }
      const std::string_view header = detail::trim(raw);
      const auto comma = header.find(',');
      if (comma == std::string_view::npos || detail::trim(header.substr(0, comma)) != "period" ||
          detail::trim(header.substr(comma + 1)) != "count") {
        throw parse_error(line, "expected header 'period,count'");
      }
      header_seen = true;
      continue;
    }
    if (row.empty()) {
      if (blank_run_start == 0) {
        blank_run_start = line;
      }
      continue;
    }
    if (blank_run_start != 0) {
      throw parse_error(blank_run_start, "blank row inside the data");
    }
    const auto comma = row.find(',');
    if (comma == std::string_view::npos || row.find(',', comma + 1) != std::string_view::npos) {
      throw parse_error(line, "expected exactly two comma-separated fields");
    }
    const std::string_view label = detail::trim(row.substr(0, comma));
    if (label.empty()) {
      throw parse_error(line, "empty period label");
    }
    values.push_back(detail::parse_count(row.substr(comma + 1), line));
    labels.emplace_back(label);
  }
  if (!header_seen) {
    throw parse_error(1, "missing header 'period,count'");
  }
  if (values.empty()) {
    throw parse_error(line, "series file contains no observations");
  }
  return CountSeries(std::move(values), std::move(labels));
}

inline CountSeries parse_series(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw io_error("cannot open series file '" + path + "'");
  }
  return parse_series(in);
}

inline void write_series(std::ostream& out, const CountSeries& series) {
  out << "period,count\n";
  for (std::size_t i = 0; i < series.size(); ++i) {
    if (series.labels()) {
      out << (*series.labels())[i];
    } else {
      out << i + 1;
    }
    out << ',' << series[i] << '\n';
  }
}

// ---------------------------------------------------------------------------
// Run configuration (provenance for every emitted file).

enum class OutputFormat { csv, json };

struct RunConfig {
  std::string command;  ///< fit | simulate | forecast | evaluate
  std::optional<std::string> input;
  std::optional<std::string> scenario;
  std::optional<std::string> spec_path;
  GridConfig grid;
  BootstrapConfig bootstrap;
  std::size_t horizon = 3;
  std::optional<std::int64_t> split;  ///< negative counts from the end
  std::vector<std::size_t> windows;   ///< extra fixed windows
  std::size_t runs = 100;
  Band band;
  std::optional<std::string> output;
  OutputFormat format = OutputFormat::csv;
};

NLOHMANN_JSON_SERIALIZE_ENUM(Rounding, {{Rounding::floor, "floor"}, {Rounding::ceiling, "ceiling"}})
NLOHMANN_JSON_SERIALIZE_ENUM(WeightFamily, {{WeightFamily::exponential, "exponential"},
                                            {WeightFamily::gaussian, "gaussian"}})
NLOHMANN_JSON_SERIALIZE_ENUM(Family, {{Family::constant, "constant"},
                                      {Family::poisson, "poisson"},
                                      {Family::exponential, "exponential"}})
NLOHMANN_JSON_SERIALIZE_ENUM(OutputFormat, {{OutputFormat::csv, "csv"}, {OutputFormat::json, "json"}})

NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE(GridConfig, n0, c, rounding, step)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE(BootstrapConfig, draws, alpha, weight_family, seed)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE(Band, low, high)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE(Segment, length, param)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE(ScenarioSpec, label, family, segments)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE(IntervalTest, k, length, span_length, candidates, max_statistic,
                                   tau, threshold, accepted, auto_accepted, redraws)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE(AdaptiveFit, anchor, history, window_length, mle,
                                   accepted_by_exhaustion, tested)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE(FitSet, fits, skipped)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE(TracePoint, anchor, window_mean, window_low, window_high,
                                   mle_mean, mle_low, mle_high)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE(MonteCarloTrace, label, runs, band, points)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE(MethodForecast, method, window, forecasts, mse)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE(ForecastReport, split, horizon, realized, lpa_window,
                                   mode_window, methods, skipped)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE(PointForecast, method, window, forecasts)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE(ForecastSet, split, horizon, lpa_window, methods, skipped)

inline void to_json(json& j, const RunConfig& c) {
  j = json{{"command", c.command},     {"grid", c.grid},         {"bootstrap", c.bootstrap},
           {"horizon", c.horizon},     {"windows", c.windows},   {"runs", c.runs},
           {"band", c.band},           {"format", c.format}};
  j["input"] = c.input ? json(*c.input) : json(nullptr);
  j["scenario"] = c.scenario ? json(*c.scenario) : json(nullptr);
  j["spec_path"] = c.spec_path ? json(*c.spec_path) : json(nullptr);
  j["split"] = c.split ? json(*c.split) : json(nullptr);
  j["output"] = c.output ? json(*c.output) : json(nullptr);
}

inline ScenarioSpec parse_scenario_spec(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw io_error("cannot open scenario spec '" + path + "'");
  }
  try {
    ScenarioSpec spec = json::parse(in).get<ScenarioSpec>();
    spec.validate();
    return spec;
  } catch (const json::exception& e) {
    throw parse_error(1, "scenario spec '" + path + "': " + e.what());
  }
}

// ---------------------------------------------------------------------------
// Emission.

/// Shortest round-trip decimal, always with a fractional part or exponent.
inline std::string format_real(double x) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, x);
  std::string s(buf, res.ptr);
  if (std::isfinite(x) && s.find_first_of(".e") == std::string::npos) {
    s += ".0";
  }
  return s;
}

template <class Result>
json document(const RunConfig& config, const Result& result) {
  return json{{"schema_version", schema_version},
              {"command", config.command},
              {"config", config},
              {"result", result}};
}

inline void write_csv(std::ostream& out, const FitSet& fits) {
  out << "anchor,window_length,mle\n";
  for (const auto& f : fits.fits) {
    out << f.anchor << ',' << f.window_length << ',' << format_real(f.mle) << '\n';
  }
}

inline void write_csv(std::ostream& out, const MonteCarloTrace& trace) {
  out << "anchor,window_mean,window_low,window_high,mle_mean,mle_low,mle_high\n";
  for (const auto& p : trace.points) {
    out << p.anchor << ',' << format_real(p.window_mean) << ',' << format_real(p.window_low) << ','
        << format_real(p.window_high) << ',' << format_real(p.mle_mean) << ','
        << format_real(p.mle_low) << ',' << format_real(p.mle_high) << '\n';
  }
}

inline void write_csv(std::ostream& out, const ForecastSet& set) {
  out << "method,step,forecast\n";
  for (const auto& m : set.methods) {
    for (std::size_t s = 0; s < m.forecasts.size(); ++s) {
      out << m.method << ',' << s + 1 << ',' << format_real(m.forecasts[s]) << '\n';
    }
  }
}

inline void write_csv(std::ostream& out, const ForecastReport& report) {
  out << "method,step,forecast,realized,mse\n";
  for (const auto& m : report.methods) {
    for (std::size_t s = 0; s < m.forecasts.size(); ++s) {
      out << m.method << ',' << s + 1 << ',' << format_real(m.forecasts[s]) << ','
          << format_real(report.realized[s]) << ',' << format_real(m.mse) << '\n';
    }
  }
}

inline std::string meta_path(const std::string& path) { return path + ".meta.json"; }

namespace detail {

inline void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) {
    throw io_error("cannot write '" + path + "'");
  }
  out << content;
  out.flush();
  if (!out) {
    throw io_error("failed writing '" + path + "'");
  }
}

}  // namespace detail

/// Writes `result` as CSV (plus a sibling .meta.json with the effective
/// configuration) or as a single JSON document. With no path, writes to
/// `fallback` and skips the sibling file.
template <class Result>
void emit_results(const RunConfig& config, const Result& result, std::ostream& fallback) {
  std::ostringstream body;
  if (config.format == OutputFormat::json) {
    body << document(config, result).dump(2) << '\n';
  } else {
    write_csv(body, result);
  }
  if (!config.output) {
    fallback << body.str();
    return;
  }
  detail::write_file(*config.output, body.str());
  if (config.format == OutputFormat::csv) {
    const json meta{{"schema_version", schema_version},
                    {"command", config.command},
                    {"config", config}};
    detail::write_file(meta_path(*config.output), meta.dump(2) + "\n");
  }
}

}  // namespace lpa
