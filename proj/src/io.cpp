#include "epr/io.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <cmath>
#include <map>
#include <set>
#include <sstream>

#include "epr/error.hpp"

namespace epr {

namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// 1-based line of the first occurrence of "key" in the raw text, 0 if absent.
int line_of_key(const std::string& text, const std::string& key) {
  const auto pos = text.find('"' + key + '"');
  if (pos == std::string::npos) return 0;
  return 1 + static_cast<int>(std::count(text.begin(), text.begin() + pos, '\n'));
}

// Walks one JSON object, enforcing a closed key set and typed values.
class ObjectReader {
 public:
  ObjectReader(const json& j, std::string source, const std::string& text, std::string path)
      : j_(j), source_(std::move(source)), text_(text), path_(std::move(path)) {
    if (!j_.is_object()) fail(path_.empty() ? "<root>" : path_, "expected a JSON object");
  }

  void allow(std::initializer_list<const char*> keys) {
    std::set<std::string> allowed(keys.begin(), keys.end());
    for (const auto& [k, v] : j_.items())
      if (!allowed.count(k)) fail(k, "unknown key");
  }

  bool has(const std::string& key) const { return j_.contains(key); }
  const json& at(const std::string& key) const { return j_.at(key); }

  void number(const std::string& key, double& out) const {
    if (!has(key)) return;
    const auto& v = j_.at(key);
    if (!v.is_number()) fail(key, "expected a number");
    out = v.get<double>();
  }

  void integer(const std::string& key, std::int64_t& out) const {
    if (!has(key)) return;
    const auto& v = j_.at(key);
    if (!v.is_number_integer()) fail(key, "expected an integer");
    out = v.get<std::int64_t>();
  }

  void boolean(const std::string& key, bool& out) const {
    if (!has(key)) return;
    const auto& v = j_.at(key);
    if (!v.is_boolean()) fail(key, "expected true or false");
    out = v.get<bool>();
  }

  std::string string(const std::string& key) const {
    const auto& v = j_.at(key);
    if (!v.is_string()) fail(key, "expected a string");
    return v.get<std::string>();
  }

  std::vector<double> numbers(const std::string& key) const {
    const auto& v = j_.at(key);
    if (!v.is_array()) fail(key, "expected an array of numbers");
    std::vector<double> out;
    for (const auto& e : v) {
      if (!e.is_number()) fail(key, "expected an array of numbers");
      out.push_back(e.get<double>());
    }
    return out;
  }

  ObjectReader child(const std::string& key) const {
    return ObjectReader(j_.at(key), source_, text_, qualified(key));
  }

  [[noreturn]] void fail(const std::string& key, const std::string& what) const {
    throw ParseError(source_, line_of_key(text_, key), qualified(key), what);
  }

 private:
  std::string qualified(const std::string& key) const {
    return path_.empty() ? key : path_ + "." + key;
  }

  const json& j_;
  std::string source_;
  const std::string& text_;
  std::string path_;
};

void read_emission(const ObjectReader& r, EmissionConfig& e) {
  ObjectReader o = r;
  o.allow({"process", "mean_rate_per_s", "min_gap_ns", "cascade_lifetime_ns", "duration_s",
           "hidden_variable", "fixed_angle_rad"});
  if (o.has("process")) {
    const auto p = o.string("process");
    if (p == "poisson") e.process = EmissionProcess::poisson;
    else if (p == "min_separation") e.process = EmissionProcess::min_separation;
    else o.fail("process", "expected \"poisson\" or \"min_separation\"");
  }
  o.number("mean_rate_per_s", e.mean_rate);
  o.number("min_gap_ns", e.min_gap);
  o.number("cascade_lifetime_ns", e.cascade_lifetime_tau);
  o.number("duration_s", e.duration);
  if (o.has("hidden_variable")) {
    const auto h = o.string("hidden_variable");
    if (h == "uniform") e.hidden_variable = HiddenVariableMode::uniform;
    else if (h == "fixed") e.hidden_variable = HiddenVariableMode::fixed;
    else o.fail("hidden_variable", "expected \"uniform\" or \"fixed\"");
  }
  o.number("fixed_angle_rad", e.fixed_angle);
}

void read_detector(const ObjectReader& r, DetectorConfig& d) {
  ObjectReader o = r;
  o.allow({"model", "eta0", "efficiency", "modulation_depth", "enhancement_factor",
           "jitter_sigma_ns", "dead_time_ns", "wave_decay_tau_ns", "wave_gain_per_ns",
           "allow_multiple_detections", "dark_rate_per_s"});
  if (o.has("model")) {
    const auto m = o.string("model");
    if (m == "particle") d.model = DetectionModel::particle;
    else if (m == "wave") d.model = DetectionModel::wave;
    else o.fail("model", "expected \"particle\" or \"wave\"");
  }
  o.number("eta0", d.eta0);
  if (o.has("efficiency")) {
    const auto f = o.string("efficiency");
    if (f == "constant") d.efficiency_fn = EfficiencyFunction::constant;
    else if (f == "cosine_modulated") d.efficiency_fn = EfficiencyFunction::cosine_modulated;
    else o.fail("efficiency", "expected \"constant\" or \"cosine_modulated\"");
  }
  o.number("modulation_depth", d.modulation_depth);
  o.number("enhancement_factor", d.enhancement_factor);
  o.number("jitter_sigma_ns", d.jitter_sigma);
  o.number("dead_time_ns", d.dead_time);
  o.number("wave_decay_tau_ns", d.wave_decay_tau);
  o.number("wave_gain_per_ns", d.wave_gain);
  o.boolean("allow_multiple_detections", d.allow_multiple_detections);
  o.number("dark_rate_per_s", d.dark_rate);
}

void read_window(const ObjectReader& r, WindowConfig& w) {
  ObjectReader o = r;
  o.allow({"channel_delay_ns", "lo_ns", "hi_ns", "bin_width_ns", "accidental_offset_ns"});
  o.number("channel_delay_ns", w.channel_delay);
  o.number("lo_ns", w.window_lo);
  o.number("hi_ns", w.window_hi);
  o.number("bin_width_ns", w.bin_width);
  o.number("accidental_offset_ns", w.accidental_offset);
}

ScenarioConfig read_scenario(const ObjectReader& r) {
  ObjectReader o = r;
  o.allow({"preset", "seed", "repeats", "analyzer_a_rad", "insertion_delay_a_ns",
           "insertion_delay_b_ns", "visibility_angles_rad", "spectrum_range_ns", "subtraction",
           "emission", "detector", "detector_a", "detector_b", "window"});

  ScenarioConfig s;
  if (o.has("preset")) {
    const auto name = o.string("preset");
    try {
      s = preset(name);
    } catch (const ConfigError& e) {
      o.fail("preset", e.what());
    }
  }
  std::int64_t seed = static_cast<std::int64_t>(s.seed);
  o.integer("seed", seed);
  if (seed < 0) o.fail("seed", "must be nonnegative");
  s.seed = static_cast<std::uint64_t>(seed);
  std::int64_t repeats = s.repeats;
  o.integer("repeats", repeats);
  if (repeats < 1) o.fail("repeats", "must be >= 1");
  s.repeats = static_cast<int>(repeats);
  o.number("analyzer_a_rad", s.analyzer_a);
  o.number("insertion_delay_a_ns", s.insertion_delay_a);
  o.number("insertion_delay_b_ns", s.insertion_delay_b);
  if (o.has("visibility_angles_rad")) s.visibility_angles = o.numbers("visibility_angles_rad");
  if (o.has("spectrum_range_ns")) {
    const auto range = o.numbers("spectrum_range_ns");
    if (range.size() != 2) o.fail("spectrum_range_ns", "expected [lo, hi]");
    s.spectrum_lo = range[0];
    s.spectrum_hi = range[1];
  }
  if (o.has("subtraction")) {
    const auto m = o.string("subtraction");
    if (m == "delayed") s.subtraction = AccidentalMethod::delayed;
    else if (m == "product") s.subtraction = AccidentalMethod::product;
    else o.fail("subtraction", "expected \"delayed\" or \"product\"");
  }
  if (o.has("emission")) read_emission(o.child("emission"), s.emission);
  if (o.has("detector")) {
    read_detector(o.child("detector"), s.detector_a);
    read_detector(o.child("detector"), s.detector_b);
  }
  if (o.has("detector_a")) read_detector(o.child("detector_a"), s.detector_a);
  if (o.has("detector_b")) read_detector(o.child("detector_b"), s.detector_b);
  if (o.has("window")) read_window(o.child("window"), s.window);
  return s;
}

json parse_json_text(const std::string& text, const std::string& source) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    const auto upto = std::min<std::size_t>(e.byte, text.size());
    const int line = 1 + static_cast<int>(std::count(text.begin(), text.begin() + upto, '\n'));
    throw ParseError(source, line, "<syntax>", e.what());
  }
}

std::string trim(const std::string& s) {
  auto b = s.find_first_not_of(" \t\r");
  auto e = s.find_last_not_of(" \t\r");
  return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream ss(line);
  while (std::getline(ss, cell, ',')) out.push_back(trim(cell));
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

std::optional<double> parse_cell(const std::string& cell, const std::string& source, int line,
                                 const std::string& field) {
  if (cell.empty()) return std::nullopt;
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(cell, &used);
  } catch (const std::exception&) {
    throw ParseError(source, line, field, "'" + cell + "' is not a number");
  }
  if (used != cell.size()) throw ParseError(source, line, field, "'" + cell + "' is not a number");
  if (!std::isfinite(v) || v < 0.0) throw ParseError(source, line, field, "must be finite and >= 0");
  return v;
}

RunCounts parse_counts_csv(const std::string& text, const std::string& source) {
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  std::vector<std::string> header;
  int header_line = 0;

  struct Row {
    std::optional<double> raw, delayed, product;
    int line = 0;
  };
  std::map<std::string, Row> rows;

  while (std::getline(in, line)) {
    ++lineno;
    const auto t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    auto cells = split_csv(t);
    if (header.empty()) {
      header = cells;
      header_line = lineno;
      if (header.size() < 2 || header[0] != "config" || header[1] != "raw")
        throw ParseError(source, lineno, "header",
                         "expected 'config,raw[,accidental_delayed][,accidental_product]'");
      for (std::size_t k = 2; k < header.size(); ++k)
        if (header[k] != "accidental_delayed" && header[k] != "accidental_product")
          throw ParseError(source, lineno, header[k], "unknown column");
      continue;
    }
    if (cells.size() > header.size())
      throw ParseError(source, lineno, "row", "more cells than header columns");
    cells.resize(header.size());
    const auto& name = cells[0];
    if (name != "x" && name != "y" && name != "z" && name != "Z")
      throw ParseError(source, lineno, "config", "expected one of x, y, z, Z, got '" + name + "'");
    if (rows.count(name)) throw ParseError(source, lineno, "config", "duplicate row '" + name + "'");
    Row r;
    r.line = lineno;
    r.raw = parse_cell(cells[1], source, lineno, "raw");
    if (!r.raw) throw ParseError(source, lineno, "raw", "missing value");
    for (std::size_t k = 2; k < header.size(); ++k) {
      auto v = parse_cell(cells[k], source, lineno, header[k]);
      (header[k] == "accidental_delayed" ? r.delayed : r.product) = v;
    }
    rows[name] = r;
  }
  if (header.empty()) throw ParseError(source, std::max(lineno, 1), "header", "empty counts file");
  for (const char* name : {"x", "y", "z", "Z"})
    if (!rows.count(name))
      throw ParseError(source, lineno + 1, "config", std::string("missing row '") + name + "'");

  RunCounts c;
  c.x = *rows["x"].raw;
  c.y = *rows["y"].raw;
  c.z = *rows["z"].raw;
  c.Z = *rows["Z"].raw;

  // Pick one accidental column for all four rows.
  for (auto column : {&Row::delayed, &Row::product}) {
    int present = 0;
    for (auto& [name, r] : rows) present += (r.*column).has_value();
    if (present == 0) continue;
    if (present != 4) {
      for (auto& [name, r] : rows)
        if (!(r.*column))
          throw ParseError(source, r.line,
                           column == &Row::delayed ? "accidental_delayed" : "accidental_product",
                           "accidentals must be given for all four rows or none");
    }
    c.acc = Accidentals{*(rows["x"].*column), *(rows["y"].*column), *(rows["z"].*column),
                        *(rows["Z"].*column)};
    break;
  }
  (void)header_line;
  return c;
}

RunCounts parse_counts_json(const std::string& text, const std::string& source) {
  const json j = parse_json_text(text, source);
  ObjectReader o(j, source, text, "");
  o.allow({"x", "y", "z", "Z", "acc_x", "acc_y", "acc_z", "acc_Z", "duration_s"});
  RunCounts c;
  for (auto [key, field] : {std::pair{"x", &RunCounts::x}, std::pair{"y", &RunCounts::y},
                            std::pair{"z", &RunCounts::z}, std::pair{"Z", &RunCounts::Z}}) {
    if (!o.has(key)) o.fail(key, "missing required count");
    o.number(key, c.*field);
    if (c.*field < 0.0) o.fail(key, "must be >= 0");
  }
  o.number("duration_s", c.duration);
  const char* acc_keys[] = {"acc_x", "acc_y", "acc_z", "acc_Z"};
  int present = 0;
  for (auto* k : acc_keys) present += o.has(k);
  if (present != 0) {
    for (auto* k : acc_keys)
      if (!o.has(k)) o.fail(k, "accidentals must be given for all four counts or none");
    Accidentals a;
    o.number("acc_x", a.x);
    o.number("acc_y", a.y);
    o.number("acc_z", a.z);
    o.number("acc_Z", a.Z);
    for (auto* k : acc_keys)
      if (o.at(k).get<double>() < 0.0) o.fail(k, "must be >= 0");
    c.acc = a;
  }
  return c;
}

json optional_number(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

const char* model_name(DetectionModel m) { return m == DetectionModel::particle ? "particle" : "wave"; }

}  // namespace

ScenarioConfig scenario_from_json(const json& j, const std::string& source) {
  static const std::string no_text;
  auto s = read_scenario(ObjectReader(j, source, no_text, ""));
  s.validate();
  return s;
}

ScenarioConfig load_scenario_file(const std::string& path) {
  const auto text = read_file(path);
  const json j = parse_json_text(text, path);
  auto s = read_scenario(ObjectReader(j, path, text, ""));
  s.validate();
  return s;
}

namespace {

SweepSpec read_sweep(const json& j, const std::string& source, const std::string& text) {
  ObjectReader o(j, source, text, "");
  o.allow({"parameter", "values", "scenario"});
  if (!o.has("parameter")) o.fail("parameter", "missing");
  if (!o.has("values")) o.fail("values", "missing");
  SweepSpec spec;
  try {
    spec.parameter = sweep_parameter_from_string(o.string("parameter"));
  } catch (const ConfigError& e) {
    o.fail("parameter", e.what());
  }
  spec.values = o.numbers("values");
  if (spec.values.empty()) o.fail("values", "need at least one value");
  if (o.has("scenario")) spec.fixed = read_scenario(o.child("scenario"));
  spec.fixed.validate();
  return spec;
}

}  // namespace

SweepSpec sweep_from_json(const json& j, const std::string& source) {
  static const std::string no_text;
  return read_sweep(j, source, no_text);
}

SweepSpec load_sweep_file(const std::string& path) {
  const auto text = read_file(path);
  return read_sweep(parse_json_text(text, path), path, text);
}

RunCounts parse_counts(const std::string& text, const std::string& source) {
  const auto first = text.find_first_not_of(" \t\r\n");
  if (first != std::string::npos && text[first] == '{') return parse_counts_json(text, source);
  return parse_counts_csv(text, source);
}

RunCounts load_counts_file(const std::string& path) { return parse_counts(read_file(path), path); }

BellReport reanalyze_counts(const std::string& path) {
  return make_bell_report(load_counts_file(path));
}

json to_json(const Statistic& s) {
  return {{"value", optional_number(s.value)},
          {"sigma", optional_number(s.sigma)},
          {"limit", s.limit},
          {"violated", s.violated},
          {"defined", s.value.has_value()}};
}

json to_json(const BellStatistics& s) {
  return {{"s_std", to_json(s.standard)},
          {"s_chsh", to_json(s.chsh)},
          {"s_freedman", to_json(s.freedman)},
          {"has_negative_counts", s.has_negative_counts}};
}

json to_json(const BellReport& r) {
  json j;
  j["raw"] = to_json(r.raw);
  j["corrected"] = r.corrected ? to_json(*r.corrected) : json(nullptr);
  if (r.visibility) {
    j["visibility"] = {{"V", optional_number(r.visibility->visibility)},
                       {"s_vis", to_json(r.visibility->s_vis)}};
  } else {
    j["visibility"] = nullptr;
  }
  return j;
}

json to_json(const RunCounts& c) {
  json j = {{"x", c.x}, {"y", c.y}, {"z", c.z}, {"Z", c.Z}, {"duration_s", c.duration}};
  if (c.acc) {
    j["acc_x"] = c.acc->x;
    j["acc_y"] = c.acc->y;
    j["acc_z"] = c.acc->z;
    j["acc_Z"] = c.acc->Z;
  }
  return j;
}

json to_json(const ScenarioResult& r) {
  const auto& s = r.config;
  json configs = json::array();
  json tally = json::array();
  auto setting = [](const PolariserSetting& p) { return p.present ? json(p.angle) : json(nullptr); };
  for (const auto& c : r.configurations) {
    configs.push_back({{"config", c.configuration.name},
                       {"analyzer_a_rad", setting(c.configuration.a)},
                       {"analyzer_b_rad", setting(c.configuration.b)},
                       {"singles_a", c.singles_a},
                       {"singles_b", c.singles_b},
                       {"raw", c.raw},
                       {"accidental_delayed", c.accidental_delayed},
                       {"accidental_product", c.accidental_product}});
    tally.push_back({{"config", c.configuration.name},
                     {"true", c.truth.true_pairs},
                     {"accidental", c.truth.accidental_pairs},
                     {"all_pairs", c.truth.total()},
                     {"window_inclusion", optional_number(c.window_inclusion())}});
  }
  json curve = json::array();
  for (std::size_t i = 0; i < r.curve.size(); ++i)
    curve.push_back({{"phi_rad", s.visibility_angles[i]},
                     {"raw", r.curve[i].raw},
                     {"accidental_delayed", r.curve[i].accidental_delayed},
                     {"true", r.curve[i].truth.true_pairs}});

  return {{"preset", s.preset},
          {"model", model_name(s.detector_a.model)},
          {"emission_process",
           s.emission.process == EmissionProcess::poisson ? "poisson" : "min_separation"},
          {"seed", s.seed},
          {"repeats", s.repeats},
          {"subtraction", s.subtraction == AccidentalMethod::delayed ? "delayed" : "product"},
          {"no_data", r.no_data},
          {"configurations", configs},
          {"visibility_curve", curve},
          {"counts", to_json(r.counts)},
          {"report", to_json(r.report)},
          {"simulation_only",
           {{"note", "ground truth available only in simulation"},
            {"truth_tally", tally},
            {"truth_statistics", to_json(r.truth_statistics)}}}};
}

void write_counts_csv(std::ostream& out, const ScenarioResult& r) {
  out << "config,raw,accidental_delayed,accidental_product\n";
  out << std::setprecision(12);
  for (const auto& c : r.configurations)
    out << c.configuration.name << ',' << c.raw << ',' << c.accidental_delayed << ','
        << c.accidental_product << '\n';
}

void write_sweep_csv(std::ostream& out, const SweepSpec& spec,
                     const std::vector<ScenarioResult>& results) {
  out << "parameter,value,seed,raw_x,raw_y,raw_z,raw_Z,acc_x,acc_y,acc_z,acc_Z,"
         "true_pairs,accidental_pairs,accidental_true_ratio,"
         "s_std_raw,s_chsh_raw,s_freedman_raw,"
         "s_std_corrected,s_chsh_corrected,s_freedman_corrected,"
         "s_std_truth,s_chsh_truth,s_freedman_truth,visibility\n";
  out << std::setprecision(10);
  auto cell = [&](const std::optional<double>& v) {
    if (v) out << *v;
  };
  for (std::size_t i = 0; i < results.size(); ++i) {
    const auto& r = results[i];
    std::int64_t t = 0, a = 0;
    for (const auto& c : r.configurations) {
      t += c.truth.true_pairs;
      a += c.truth.accidental_pairs;
    }
    out << to_string(spec.parameter) << ',' << spec.values[i] << ',' << r.config.seed;
    out << ',' << r.counts.x << ',' << r.counts.y << ',' << r.counts.z << ',' << r.counts.Z;
    out << ',' << r.counts.acc->x << ',' << r.counts.acc->y << ',' << r.counts.acc->z << ','
        << r.counts.acc->Z;
    out << ',' << t << ',' << a << ',';
    if (t > 0) out << static_cast<double>(a) / static_cast<double>(t);
    for (const auto* st : {&r.report.raw, &*r.report.corrected, &r.truth_statistics}) {
      out << ',';
      cell(st->standard.value);
      out << ',';
      cell(st->chsh.value);
      out << ',';
      cell(st->freedman.value);
    }
    out << ',';
    if (r.report.visibility) cell(r.report.visibility->visibility);
    out << '\n';
  }
}

}  // namespace epr
