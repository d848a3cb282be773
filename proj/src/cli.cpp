#include "starlab/cli.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <numbers>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "starlab/errors.hpp"
#include "starlab/graph_models.hpp"
#include "starlab/lrt.hpp"
#include "starlab/record_io.hpp"
#include "starlab/special.hpp"

namespace starlab::cli {

namespace {

namespace fs = std::filesystem;
using harness::Experiment;
using harness::RunConfig;
using harness::RunRecord;

struct FlagSpec {
  std::string_view name;
  std::string_view help;
  bool is_switch = false;
};

constexpr FlagSpec kFlags[] = {
    {"n", "number of vertices"},
    {"m", "number of edges"},
    {"k", "star size"},
    {"alpha", "max-degree threshold parameter (default 2)"},
    {"gamma", "comma-separated scaling-window offsets"},
    {"c", "comma-separated density constants; fractions like 1/4 are accepted"},
    {"reps", "replicates per grid point and side (default 2000)"},
    {"seed", "64-bit seed (default 0)"},
    {"threads", "worker threads, 0 = all available (default 0)"},
    {"out", "output file (default: standard output)"},
    {"svg", "also write an SVG curve to this path"},
    {"format", "csv or json (default: from the --out extension, else csv)"},
    {"degrees", "single-column CSV of degrees with header \"degree\""},
    {"config", "flat key = value file; command-line flags take precedence"},
    {"null", "sample from the null model", true},
    {"planted", "sample from the planted model", true},
    {"edges", "emit the edge list instead of degrees", true},
};

struct SubcommandSpec {
  std::string_view name;
  std::string_view description;
  std::vector<std::string_view> flags;
};

const std::vector<SubcommandSpec>& subcommands() {
  static const std::vector<SubcommandSpec> specs = {
      {"sample", "draw one graph and print its degrees or edges",
       {"n", "m", "k", "seed", "null", "planted", "edges", "out", "format", "config"}},
      {"lr", "exact log-likelihood ratio of a degree sequence",
       {"degrees", "n", "m", "k", "alpha", "out", "format", "config"}},
      {"test", "max-degree test (and LR test when --k is set) on one sample or a degrees file",
       {"null", "planted", "degrees", "n", "m", "k", "alpha", "seed", "out", "format", "config"}},
      {"sweep", "TV estimates of the LR and max-degree tests across gamma",
       {"n", "m", "k", "alpha", "gamma", "reps", "seed", "threads", "out", "svg", "format", "config"}},
      {"null-phase", "null quantiles of Lambda and its REM form across c",
       {"n", "k", "alpha", "c", "reps", "seed", "threads", "out", "format", "config"}},
      {"agreement", "disagreement rate of the LR and max-degree tests",
       {"n", "m", "k", "alpha", "gamma", "reps", "seed", "threads", "out", "format", "config"}},
      {"recovery", "hub recovery rate of the max-degree vertex",
       {"n", "m", "k", "alpha", "gamma", "reps", "seed", "threads", "out", "svg", "format", "config"}},
      {"rem", "quantiles of Z/E[Z] for the random energy model with n levels; --k adds null-phase rows",
       {"n", "k", "alpha", "c", "reps", "seed", "threads", "out", "format", "config"}},
      {"enumerate", "exact TV and E0[Lambda] by enumerating all graphs (n <= 6)",
       {"n", "m", "k", "out", "format", "config"}},
  };
  return specs;
}

const FlagSpec& flag_spec(std::string_view name) {
  for (const auto& f : kFlags) {
    if (f.name == name) return f;
  }
  throw std::logic_error("unregistered flag " + std::string(name));
}

std::string footer() {
  return "Environment:\n  " + std::string(kResultsDirEnv) +
         "  directory for default outputs when --out is not given\n"
         "Exit codes: 0 success, 1 runtime failure, 2 usage error.";
}

// ---- flag values ----------------------------------------------------------

const std::string& raw(const Invocation& inv, std::string_view flag) {
  const auto it = inv.flags.find(std::string(flag));
  if (it == inv.flags.end()) {
    throw UsageError("missing required flag --" + std::string(flag) + " for " + inv.subcommand);
  }
  return it->second;
}

template <class T>
T parse_integer(std::string_view flag, const std::string& text) {
  T value{};
  const auto* end = text.data() + text.size();
  const auto res = std::from_chars(text.data(), end, value);
  if (res.ec != std::errc{} || res.ptr != end) {
    throw UsageError("--" + std::string(flag) + ": cannot parse \"" + text + "\" as an integer");
  }
  return value;
}

double parse_real(std::string_view flag, std::string text) {
  text.erase(std::remove(text.begin(), text.end(), ' '), text.end());
  auto whole = [&](std::string_view s) {
    double value = 0.0;
    const auto* end = s.data() + s.size();
    const auto res = std::from_chars(s.data(), end, value);
    if (s.empty() || res.ec != std::errc{} || res.ptr != end) {
      throw UsageError("--" + std::string(flag) + ": cannot parse \"" + text + "\" as a number");
    }
    return value;
  };
  if (const auto slash = text.find('/'); slash != std::string::npos) {
    return whole(std::string_view(text).substr(0, slash)) / whole(std::string_view(text).substr(slash + 1));
  }
  return whole(text);
}

int64_t int_flag(const Invocation& inv, std::string_view flag) { return parse_integer<int64_t>(flag, raw(inv, flag)); }

template <class T>
T int_flag_or(const Invocation& inv, std::string_view flag, T fallback) {
  return inv.has(flag) ? parse_integer<T>(flag, raw(inv, flag)) : fallback;
}

double real_flag_or(const Invocation& inv, std::string_view flag, double fallback) {
  return inv.has(flag) ? parse_real(flag, raw(inv, flag)) : fallback;
}

std::vector<double> list_flag(const Invocation& inv, std::string_view flag) {
  std::vector<double> out;
  std::stringstream ss(raw(inv, flag));
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(parse_real(flag, item));
  if (out.empty()) throw UsageError("--" + std::string(flag) + ": empty list");
  return out;
}

bool switch_flag(const Invocation& inv, std::string_view flag) {
  if (!inv.has(flag)) return false;
  const auto& v = raw(inv, flag);
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  throw UsageError("--" + std::string(flag) + ": expected true or false, got \"" + v + "\"");
}

// ---- outputs --------------------------------------------------------------

enum class Format { csv, json };

Format output_format(const Invocation& inv) {
  if (inv.has("format")) {
    const auto& f = raw(inv, "format");
    if (f == "csv") return Format::csv;
    if (f == "json") return Format::json;
    throw UsageError("--format: expected csv or json, got \"" + f + "\"");
  }
  if (inv.output && fs::path(*inv.output).extension() == ".json") return Format::json;
  return Format::csv;
}

std::string_view extension(Format f) { return f == Format::json ? ".json" : ".csv"; }

// Destination for the main output, or nullopt for standard output.
std::optional<fs::path> destination(const Invocation& inv, Format f) {
  if (inv.output) return fs::path(*inv.output);
  if (const char* dir = std::getenv(std::string(kResultsDirEnv).c_str()); dir != nullptr && *dir != '\0') {
    fs::create_directories(dir);
    return fs::path(dir) / (inv.subcommand + std::string(extension(f)));
  }
  return std::nullopt;
}

void write_file(const fs::path& path, std::string_view content) {
  std::ofstream file(path, std::ios::binary);
  if (!file) throw std::runtime_error("cannot open " + path.string() + " for writing");
  file << content;
  if (!file.flush()) throw std::runtime_error("failed writing " + path.string());
}

void emit(const std::optional<fs::path>& dest, std::string_view content, std::ostream& out) {
  if (dest) {
    write_file(*dest, content);
  } else {
    out << content;
  }
}

// Two-column quantity,value table used by the single-graph subcommands.
class Table {
 public:
  void add(std::string name, double value) { rows_.emplace_back(std::move(name), io::format_number(value)); }
  void add(std::string name, int64_t value) { rows_.emplace_back(std::move(name), std::to_string(value)); }
  void add(std::string name, std::string value) { rows_.emplace_back(std::move(name), std::move(value)); }

  std::string render(Format f) const {
    std::ostringstream s;
    if (f == Format::csv) {
      s << "quantity,value\n";
      for (const auto& [k, v] : rows_) s << k << ',' << v << '\n';
    } else {
      nlohmann::ordered_json j = nlohmann::ordered_json::object();
      for (const auto& [k, v] : rows_) j[k] = v;
      s << j.dump(2) << '\n';
    }
    return s.str();
  }

 private:
  std::vector<std::pair<std::string, std::string>> rows_;
};

std::string decision_name(lrt::Decision d) { return d == lrt::Decision::planted ? "planted" : "null"; }

// ---- subcommands ----------------------------------------------------------

graph::ModelParams single_model(const Invocation& inv, bool need_k) {
  const int64_t n = int_flag(inv, "n");
  const int64_t m = int_flag(inv, "m");
  const int64_t k = need_k ? int_flag(inv, "k") : int_flag_or<int64_t>(inv, "k", 1);
  auto params = graph::ModelParams::explicit_m(n, m, k, real_flag_or(inv, "alpha", 2.0));
  if (need_k || inv.has("k")) {
    params.validate();
  } else {
    params.validate_null();
  }
  return params;
}

enum class Side { null, planted };

Side pick_side(const Invocation& inv) {
  const bool null = switch_flag(inv, "null");
  const bool planted = switch_flag(inv, "planted");
  if (null && planted) throw UsageError("--null and --planted are mutually exclusive");
  return planted ? Side::planted : Side::null;
}

int cmd_sample(const Invocation& inv, std::ostream& out, std::ostream& err) {
  const Side side = pick_side(inv);
  const auto params = single_model(inv, side == Side::planted);
  const auto seed = int_flag_or<uint64_t>(inv, "seed", 0);
  Rng rng = make_stream(seed, "cli-sample", 0, 0);
  const Format f = output_format(inv);

  std::vector<graph::Edge> edges;
  std::optional<int64_t> hub;
  if (side == Side::planted) {
    const auto planted = graph::sample_planted_edges(params, rng);
    hub = planted.star.hub;
    for (auto code : planted.codes) edges.push_back(graph::decode_pair(code));
  } else {
    edges = graph::sample_null_edges(params, rng);
  }
  const auto degrees = graph::degrees_from_edges(params.n, edges, params.m).degrees;
  if (hub) err << "planted hub: " << *hub << '\n';

  std::ostringstream s;
  if (f == Format::json) {
    nlohmann::ordered_json j{{"n", params.n}, {"m", params.m}, {"model", side == Side::planted ? "planted" : "null"}};
    if (hub) j["hub"] = *hub;
    if (switch_flag(inv, "edges")) {
      auto list = nlohmann::ordered_json::array();
      for (const auto& e : edges) list.push_back({e.u, e.v});
      j["edges"] = list;
    } else {
      j["degrees"] = degrees;
    }
    s << j.dump(2) << '\n';
  } else if (switch_flag(inv, "edges")) {
    graph::write_edges_csv(s, edges);
  } else {
    graph::write_degrees_csv(s, degrees);
  }
  emit(destination(inv, f), s.str(), out);
  return kExitOk;
}

graph::DegreeVector read_degrees_flag(const Invocation& inv) {
  const fs::path path = raw(inv, "degrees");
  std::ifstream in(path);
  if (!in) throw UsageError("--degrees: cannot open " + path.string());
  graph::DegreeVector deg;
  deg.degrees = graph::read_degrees_csv(in);
  int64_t total = 0;
  for (auto d : deg.degrees) total += d;
  require(total % 2 == 0, "degree sum is odd");
  deg.m = total / 2;
  if (inv.has("n")) {
    require(int_flag(inv, "n") == deg.n(), "--n does not match the number of rows in the degrees file");
  }
  if (inv.has("m")) require(int_flag(inv, "m") == deg.m, "--m does not match half the degree sum");
  deg.validate();
  return deg;
}

int cmd_lr(const Invocation& inv, std::ostream& out, std::ostream&) {
  const auto deg = read_degrees_flag(inv);
  const auto params = graph::ModelParams::explicit_m(deg.n(), deg.m, int_flag(inv, "k"), real_flag_or(inv, "alpha", 2.0));
  params.validate();
  const auto outcome = lrt::decide_lr(deg, params);
  const auto rem_form = lrt::log_lr_rem_form(deg, params);
  Table t;
  t.add("n", params.n);
  t.add("m", params.m);
  t.add("k", params.k);
  t.add("log_lambda", outcome.statistic);
  t.add("lambda", std::exp(outcome.statistic));
  t.add("decision", decision_name(outcome.decision));
  t.add("log_rem_form", rem_form.log_lr.log());
  t.add("a_n", rem_form.a_n);
  const Format f = output_format(inv);
  emit(destination(inv, f), t.render(f), out);
  return kExitOk;
}

int cmd_test(const Invocation& inv, std::ostream& out, std::ostream&) {
  const bool from_file = inv.has("degrees");
  if (from_file && (switch_flag(inv, "null") || switch_flag(inv, "planted"))) {
    throw UsageError("--degrees cannot be combined with --null or --planted");
  }
  Table t;
  graph::DegreeVector deg;
  graph::ModelParams params;
  const bool with_k = inv.has("k");
  if (from_file) {
    deg = read_degrees_flag(inv);
    params = graph::ModelParams::explicit_m(deg.n(), deg.m, int_flag_or<int64_t>(inv, "k", 1),
                                            real_flag_or(inv, "alpha", 2.0));
    t.add("source", std::string("degrees"));
  } else {
    const Side side = pick_side(inv);
    params = single_model(inv, side == Side::planted);
    Rng rng = make_stream(int_flag_or<uint64_t>(inv, "seed", 0), "cli-test", 0, 0);
    t.add("source", std::string(side == Side::planted ? "planted" : "null"));
    if (side == Side::planted) {
      auto sample = graph::sample_planted(params, rng);
      t.add("hub", sample.hub);
      t.add("hub_estimate", lrt::hub_estimate(sample.degrees.degrees));
      deg = std::move(sample.degrees);
    } else {
      deg = graph::sample_null_degrees(params, rng);
    }
  }
  const auto md = lrt::decide_max_degree(deg, params);
  t.add("n", params.n);
  t.add("m", params.m);
  t.add("alpha", params.alpha);
  t.add("t_star", md.threshold);
  t.add("max_degree", static_cast<int64_t>(md.statistic));
  t.add("max_degree_decision", decision_name(md.decision));
  if (with_k) {
    params.validate();
    const auto lr = lrt::decide_lr(deg, params);
    t.add("k", params.k);
    t.add("log_lambda", lr.statistic);
    t.add("lr_decision", decision_name(lr.decision));
  }
  const Format f = output_format(inv);
  emit(destination(inv, f), t.render(f), out);
  return kExitOk;
}

int cmd_record(const Invocation& inv, std::ostream& out, std::ostream& err) {
  const RunConfig cfg = to_run_config(inv);
  const harness::Progress progress = [&err](std::string_view line) { err << "[starlab] " << line << '\n'; };
  const RunRecord rec = harness::run(cfg, progress);
  for (const auto& w : rec.warnings) err << "warning: " << w << '\n';

  std::optional<RunRecord> companion;
  if (cfg.experiment == Experiment::rem_phase && inv.has("k")) {
    RunConfig phase = cfg;
    phase.experiment = Experiment::null_phase;
    phase.model.alpha = real_flag_or(inv, "alpha", 2.0);
    companion = harness::run(phase, progress);
  }

  const Format f = output_format(inv);
  const auto dest = destination(inv, f);
  if (f == Format::csv) {
    std::string text = io::render_csv(rec);
    if (companion) {
      const std::string more = io::render_csv(*companion);
      text += more.substr(more.find('\n') + 1);
    }
    emit(dest, text, out);
  } else {
    emit(dest, io::to_json(rec), out);
    if (companion) {
      if (dest) {
        fs::path side = *dest;
        side.replace_filename(dest->stem().string() + ".null_phase" + dest->extension().string());
        write_file(side, io::to_json(*companion));
        err << "null-phase record written to " << side.string() << '\n';
      } else {
        out << io::to_json(*companion);
      }
    }
  }
  if (inv.has("svg")) {
    const auto metric = cfg.experiment == Experiment::recovery ? "recovery" : "tv_lr";
    write_file(raw(inv, "svg"), render_svg(rec, metric));
  }
  return kExitOk;
}

// ---- SVG ------------------------------------------------------------------

std::string svg_number(double x) {
  std::ostringstream s;
  s.setf(std::ios::fixed);
  s.precision(2);
  s << x;
  return s.str();
}

}  // namespace

std::string render_svg(const RunRecord& record, std::string_view metric) {
  constexpr double width = 640, height = 420, left = 60, right = 20, top = 30, bottom = 50;
  double x_lo = 0.0, x_hi = 1.0;
  if (!record.per_point.empty()) {
    x_lo = x_hi = record.per_point.front().grid_value;
    for (const auto& p : record.per_point) {
      x_lo = std::min(x_lo, p.grid_value);
      x_hi = std::max(x_hi, p.grid_value);
    }
  }
  if (x_hi - x_lo < 1e-9) {
    x_lo -= 1.0;
    x_hi += 1.0;
  }
  const double pad = 0.05 * (x_hi - x_lo);
  x_lo -= pad;
  x_hi += pad;
  auto px = [&](double x) { return left + (x - x_lo) / (x_hi - x_lo) * (width - left - right); };
  auto py = [&](double y) { return height - bottom - std::clamp(y, -0.05, 1.05) / 1.1 * (height - top - bottom) - 0.05 / 1.1 * (height - top - bottom); };

  std::ostringstream s;
  s << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
    << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  s << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  s << "<line x1=\"" << left << "\" y1=\"" << svg_number(py(0)) << "\" x2=\"" << width - right << "\" y2=\""
    << svg_number(py(0)) << "\" stroke=\"black\"/>\n";
  s << "<line x1=\"" << left << "\" y1=\"" << svg_number(py(0)) << "\" x2=\"" << left << "\" y2=\""
    << svg_number(py(1)) << "\" stroke=\"black\"/>\n";
  for (double y : {0.0, 0.25, 0.5, 0.75, 1.0}) {
    s << "<text x=\"" << left - 8 << "\" y=\"" << svg_number(py(y) + 4) << "\" text-anchor=\"end\">" << y
      << "</text>\n";
  }
  s << "<text x=\"" << (left + width - right) / 2 << "\" y=\"" << height - 12 << "\" text-anchor=\"middle\">"
    << record.config.grid_name() << "</text>\n";
  s << "<text x=\"" << left << "\" y=\"18\">" << metric << " (points, +-2 se) and target 1 - Phi(gamma/sqrt 2)</text>\n";

  // Analytic target.
  s << "<polyline fill=\"none\" stroke=\"#c03030\" stroke-width=\"1.5\" points=\"";
  constexpr int kSteps = 200;
  for (int i = 0; i <= kSteps; ++i) {
    const double x = x_lo + (x_hi - x_lo) * i / kSteps;
    s << svg_number(px(x)) << ',' << svg_number(py(special::normal_sf(x / std::numbers::sqrt2))) << ' ';
  }
  s << "\"/>\n";

  for (const auto& p : record.per_point) {
    const auto& e = p.metric(metric);
    const double x = px(p.grid_value);
    s << "<line x1=\"" << svg_number(x) << "\" y1=\"" << svg_number(py(e.estimate - 2 * e.std_error))
      << "\" x2=\"" << svg_number(x) << "\" y2=\"" << svg_number(py(e.estimate + 2 * e.std_error))
      << "\" stroke=\"#2050a0\" stroke-width=\"1.5\"/>\n";
    s << "<circle cx=\"" << svg_number(x) << "\" cy=\"" << svg_number(py(e.estimate))
      << "\" r=\"3.5\" fill=\"#2050a0\"/>\n";
    s << "<text x=\"" << svg_number(x) << "\" y=\"" << height - bottom + 16 << "\" text-anchor=\"middle\">"
      << io::format_number(p.grid_value) << "</text>\n";
  }
  s << "</svg>\n";
  return s.str();
}

Invocation parse(const std::vector<std::string>& args) {
  CLI::App app{"Planted k-star detection lab for G(n, m)", "starlab"};
  app.require_subcommand(1, 1);
  app.footer(footer());
  app.set_version_flag("--version", STARLAB_VERSION);

  std::map<std::string, std::map<std::string, std::string>> values;
  std::map<std::string, std::map<std::string, CLI::Option*>> options;
  for (const auto& spec : subcommands()) {
    auto* sub = app.add_subcommand(std::string(spec.name), std::string(spec.description));
    sub->footer(footer());
    auto& slot = values[std::string(spec.name)];
    for (auto name : spec.flags) {
      const auto& f = flag_spec(name);
      const std::string long_name = "--" + std::string(f.name);
      if (f.is_switch) {
        options[std::string(spec.name)][std::string(name)] = sub->add_flag(long_name)->description(std::string(f.help));
      } else {
        options[std::string(spec.name)][std::string(name)] =
            sub->add_option(long_name, slot[std::string(name)], std::string(f.help));
      }
    }
  }

  Invocation inv;
  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    for (const auto& a : args) {
      if (auto* sub = app.get_subcommand_no_throw(a)) {
        inv.help = sub->help();
        return inv;
      }
    }
    inv.help = app.help();
    return inv;
  } catch (const CLI::CallForVersion&) {
    inv.help = std::string(STARLAB_VERSION) + "\n";
    return inv;
  } catch (const CLI::ParseError& e) {
    throw UsageError(e.what());
  }

  const auto* sub = app.get_subcommands().front();
  inv.subcommand = sub->get_name();
  const auto& opts = options[inv.subcommand];
  const auto& slot = values[inv.subcommand];
  for (const auto& [name, opt] : opts) {
    if (opt->count() == 0) continue;
    inv.flags[name] = flag_spec(name).is_switch ? "true" : slot.at(name);
  }

  if (inv.has("config")) {
    std::map<std::string, std::string> file;
    try {
      file = io::read_key_values(fs::path(inv.flags.at("config")));
    } catch (const ParameterError& e) {
      throw UsageError(e.what());
    }
    for (const auto& [key, value] : file) {
      if (!opts.contains(key) || key == "config") {
        throw UsageError("config file: unknown key \"" + key + "\" for " + inv.subcommand);
      }
      inv.flags.try_emplace(key, value);
    }
  }
  if (inv.has("out")) inv.output = inv.flags.at("out");
  return inv;
}

RunConfig to_run_config(const Invocation& inv) {
  RunConfig cfg;
  const auto& sc = inv.subcommand;
  if (sc == "sweep") {
    cfg.experiment = Experiment::tv_sweep;
  } else if (sc == "agreement") {
    cfg.experiment = Experiment::agreement;
  } else if (sc == "recovery") {
    cfg.experiment = Experiment::recovery;
  } else if (sc == "null-phase") {
    cfg.experiment = Experiment::null_phase;
  } else if (sc == "rem") {
    cfg.experiment = Experiment::rem_phase;
  } else if (sc == "enumerate") {
    cfg.experiment = Experiment::enumerate;
  } else {
    throw UsageError(sc + " does not run an experiment");
  }

  auto& model = cfg.model;
  model.n = int_flag(inv, "n");
  model.alpha = real_flag_or(inv, "alpha", 2.0);
  cfg.replicates = int_flag_or<int64_t>(inv, "reps", harness::kDefaultReplicates);
  cfg.seed = int_flag_or<uint64_t>(inv, "seed", 0);
  cfg.threads = int_flag_or<int>(inv, "threads", 0);

  switch (cfg.experiment) {
    case Experiment::tv_sweep:
    case Experiment::agreement:
    case Experiment::recovery:
      model.k = int_flag(inv, "k");
      if (inv.has("gamma") && inv.has("m")) throw UsageError("--gamma and --m are mutually exclusive");
      if (inv.has("gamma")) {
        cfg.grid = list_flag(inv, "gamma");
      } else if (inv.has("m")) {
        model.m = int_flag(inv, "m");
      } else {
        throw UsageError("missing required flag --gamma (or --m) for " + sc);
      }
      break;
    case Experiment::null_phase:
      model.k = int_flag(inv, "k");
      cfg.grid = list_flag(inv, "c");
      break;
    case Experiment::rem_phase:
      model.k = int_flag_or<int64_t>(inv, "k", 1);
      cfg.grid = list_flag(inv, "c");
      break;
    case Experiment::enumerate:
      model.m = int_flag(inv, "m");
      model.k = int_flag(inv, "k");
      cfg.replicates = 1;
      break;
  }
  if (cfg.replicates < 1) throw UsageError("--reps must be at least 1");
  if (cfg.threads < 0) throw UsageError("--threads must be nonnegative");
  return cfg;
}

int dispatch(const Invocation& inv, std::ostream& out, std::ostream& err) {
  if (inv.help) {
    out << *inv.help;
    return kExitOk;
  }
  const auto& sc = inv.subcommand;
  if (sc == "sample") return cmd_sample(inv, out, err);
  if (sc == "lr") return cmd_lr(inv, out, err);
  if (sc == "test") return cmd_test(inv, out, err);
  return cmd_record(inv, out, err);
}

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  auto one_line = [](std::string s) {
    std::replace(s.begin(), s.end(), '\n', ' ');
    return s;
  };
  try {
    return dispatch(parse(args), out, err);
  } catch (const UsageError& e) {
    err << "error: " << one_line(e.what()) << '\n';
    return kExitUsage;
  } catch (const ParameterError& e) {
    err << "error: " << one_line(e.what()) << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << one_line(e.what()) << '\n';
    return kExitFailure;
  }
}

}  // namespace starlab::cli
