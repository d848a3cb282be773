#include "starlab/record_io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include <json.hpp>

#include "starlab/errors.hpp"

namespace starlab::io {

namespace {

using nlohmann::json;
using harness::GridPoint;
using harness::MetricEstimate;
using harness::RunConfig;
using harness::RunRecord;

json number(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  return x;
}

double read_number(const json& j) {
  if (j.is_number()) return j.get<double>();
  if (j.is_string()) {
    const auto s = j.get<std::string>();
    if (s == "inf") return std::numeric_limits<double>::infinity();
    if (s == "-inf") return -std::numeric_limits<double>::infinity();
    if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
  }
  throw SchemaError("expected a number, got " + j.dump());
}

json number_array(const std::vector<double>& xs) {
  json out = json::array();
  for (double x : xs) out.push_back(number(x));
  return out;
}

std::vector<double> read_number_array(const json& j) {
  std::vector<double> out;
  for (const auto& x : j) out.push_back(read_number(x));
  return out;
}

std::string_view window_kind(graph::Window::Kind kind) {
  switch (kind) {
    case graph::Window::Kind::explicit_m: return "m";
    case graph::Window::Kind::gamma: return "gamma";
    case graph::Window::Kind::c: return "c";
  }
  return "m";
}

graph::Window::Kind window_kind_from(const std::string& s) {
  if (s == "m") return graph::Window::Kind::explicit_m;
  if (s == "gamma") return graph::Window::Kind::gamma;
  if (s == "c") return graph::Window::Kind::c;
  throw SchemaError("unknown window kind \"" + s + "\"");
}

json config_json(const RunConfig& cfg) {
  const auto& m = cfg.model;
  return json{
      {"experiment", std::string(harness::to_string(cfg.experiment))},
      {"model",
       {{"n", m.n},
        {"m", m.m},
        {"k", m.k},
        {"alpha", number(m.alpha)},
        {"window", {{"kind", std::string(window_kind(m.window.kind))}, {"value", number(m.window.value)}}},
        {"clamped", m.clamped}}},
      {"replicates", cfg.replicates},
      {"seed", cfg.seed},
      {"grid", number_array(cfg.grid)},
      {"threads", cfg.threads},
  };
}

RunConfig config_from(const json& j) {
  RunConfig cfg;
  cfg.experiment = harness::experiment_from_string(j.at("experiment").get<std::string>());
  const auto& m = j.at("model");
  cfg.model.n = m.at("n").get<int64_t>();
  cfg.model.m = m.at("m").get<int64_t>();
  cfg.model.k = m.at("k").get<int64_t>();
  cfg.model.alpha = read_number(m.at("alpha"));
  cfg.model.window.kind = window_kind_from(m.at("window").at("kind").get<std::string>());
  cfg.model.window.value = read_number(m.at("window").at("value"));
  cfg.model.clamped = m.at("clamped").get<bool>();
  cfg.replicates = j.at("replicates").get<int64_t>();
  cfg.seed = j.at("seed").get<uint64_t>();
  cfg.grid = read_number_array(j.at("grid"));
  cfg.threads = j.at("threads").get<int>();
  return cfg;
}

json point_json(const GridPoint& p) {
  json metrics = json::array();
  for (const auto& e : p.metrics) {
    metrics.push_back({{"metric", e.metric},
                       {"estimate", number(e.estimate)},
                       {"stderr", number(e.std_error)},
                       {"replicates", e.replicates}});
  }
  json values = json::object();
  for (const auto& [name, xs] : p.replicate_values) values[name] = number_array(xs);
  return {{"grid_value", number(p.grid_value)}, {"m", p.m}, {"metrics", metrics}, {"replicate_values", values}};
}

GridPoint point_from(const json& j) {
  GridPoint p;
  p.grid_value = read_number(j.at("grid_value"));
  p.m = j.at("m").get<int64_t>();
  for (const auto& e : j.at("metrics")) {
    p.metrics.push_back({e.at("metric").get<std::string>(), read_number(e.at("estimate")),
                         read_number(e.at("stderr")), e.at("replicates").get<int64_t>()});
  }
  for (const auto& [name, xs] : j.at("replicate_values").items()) p.replicate_values[name] = read_number_array(xs);
  return p;
}

std::string csv_field(std::string_view s) {
  if (s.find_first_of(",\"\n") == std::string_view::npos) return std::string(s);
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

}  // namespace

std::string format_number(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

std::string to_json(const RunRecord& record) {
  json points = json::array();
  for (const auto& p : record.per_point) points.push_back(point_json(p));
  const json j{
      {"schema_version", std::string(kSchemaVersion)},
      {"tool_version", record.tool_version},
      {"config", config_json(record.config)},
      {"grid_name", record.config.grid_name()},
      {"per_point", points},
      {"wall_time", number(record.wall_time)},
      {"warnings", record.warnings},
      {"out_of_regime", record.out_of_regime},
  };
  return j.dump(2) + "\n";
}

RunRecord from_json(std::string_view text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw SchemaError(std::string("record is not valid JSON: ") + e.what());
  }
  if (!j.is_object() || !j.contains("schema_version") || !j["schema_version"].is_string()) {
    throw SchemaError("record has no schema_version field");
  }
  const auto version = j["schema_version"].get<std::string>();
  if (version != kSchemaVersion) {
    throw SchemaError("unsupported schema version \"" + version + "\" (expected \"" + std::string(kSchemaVersion) +
                      "\")");
  }
  try {
    RunRecord rec;
    rec.tool_version = j.at("tool_version").get<std::string>();
    rec.config = config_from(j.at("config"));
    for (const auto& p : j.at("per_point")) rec.per_point.push_back(point_from(p));
    rec.wall_time = read_number(j.at("wall_time"));
    rec.warnings = j.at("warnings").get<std::vector<std::string>>();
    rec.out_of_regime = j.at("out_of_regime").get<bool>();
    return rec;
  } catch (const json::exception& e) {
    throw SchemaError(std::string("malformed v1 record: ") + e.what());
  } catch (const ParameterError& e) {
    throw SchemaError(std::string("malformed v1 record: ") + e.what());
  }
}

void persist(const RunRecord& record, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
  out << to_json(record);
  if (!out.flush()) throw std::runtime_error("failed writing " + path.string());
}

RunRecord load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return from_json(buf.str());
}

void write_csv(std::ostream& out, const RunRecord& record) {
  const auto& cfg = record.config;
  const std::string experiment(harness::to_string(cfg.experiment));
  const std::string grid_name = cfg.grid_name();
  out << kCsvHeader << '\n';
  for (const auto& p : record.per_point) {
    for (const auto& e : p.metrics) {
      out << experiment << ',' << cfg.model.n << ',' << p.m << ',' << cfg.model.k << ','
          << format_number(cfg.model.alpha) << ',' << grid_name << ',' << format_number(p.grid_value) << ','
          << csv_field(e.metric) << ',' << format_number(e.estimate) << ',' << format_number(e.std_error) << ','
          << e.replicates << ',' << cfg.seed << '\n';
    }
  }
}

std::string render_csv(const RunRecord& record) {
  std::ostringstream out;
  write_csv(out, record);
  return out.str();
}

std::map<std::string, std::string> read_key_values(std::istream& in) {
  auto trim = [](std::string s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string::npos) return std::string();
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
  };
  std::map<std::string, std::string> out;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ParameterError("config line " + std::to_string(line_no) + ": expected key = value");
    }
    auto key = trim(line.substr(0, eq));
    if (key.empty()) throw ParameterError("config line " + std::to_string(line_no) + ": empty key");
    out[key] = trim(line.substr(eq + 1));
  }
  return out;
}

std::map<std::string, std::string> read_key_values(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParameterError("cannot open config file " + path.string());
  return read_key_values(in);
}

}  // namespace starlab::io
