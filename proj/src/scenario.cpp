#include "nvrr/scenario.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <future>
#include <map>
#include <thread>

#include "nvrr/csv.hpp"

namespace nvrr {

namespace {

// ---------------------------------------------------------------------------
// Sectioned key-value parsing
// ---------------------------------------------------------------------------

struct Value {
  enum class Kind { number, string, boolean, array } kind = Kind::number;
  double number = 0.0;
  std::string text;
  bool flag = false;
  std::vector<double> array;
};

std::string trim(const std::string& s) {
  size_t a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  size_t b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

// Strips a trailing comment that is outside any quoted string.
std::string strip_comment(const std::string& line) {
  bool quoted = false;
  for (size_t i = 0; i < line.size(); ++i) {
    if (line[i] == '"') quoted = !quoted;
    if (line[i] == '#' && !quoted) return line.substr(0, i);
  }
  return line;
}

double parse_number_token(const std::string& token, const std::string& path) {
  char* end = nullptr;
  const double v = std::strtod(token.c_str(), &end);
  if (end == token.c_str() || *end != '\0')
    throw config_error(path, "expected a number, got '" + token + "'");
  return v;
}

Value parse_value(const std::string& raw, const std::string& path) {
  Value v;
  if (raw.empty()) throw config_error(path, "missing value");
  if (raw.front() == '"') {
    if (raw.size() < 2 || raw.back() != '"')
      throw config_error(path, "unterminated string");
    v.kind = Value::Kind::string;
    v.text = raw.substr(1, raw.size() - 2);
    if (v.text.find('"') != std::string::npos)
      throw config_error(path, "embedded quotes are not supported");
    return v;
  }
  if (raw == "true" || raw == "false") {
    v.kind = Value::Kind::boolean;
    v.flag = raw == "true";
    return v;
  }
  if (raw.front() == '[') {
    if (raw.back() != ']') throw config_error(path, "unterminated array");
    v.kind = Value::Kind::array;
    std::string body = raw.substr(1, raw.size() - 2);
    std::string token;
    for (char c : body + ",") {
      if (c == ',') {
        const std::string t = trim(token);
        if (!t.empty()) v.array.push_back(parse_number_token(t, path));
        token.clear();
      } else {
        token += c;
      }
    }
    return v;
  }
  v.kind = Value::Kind::number;
  v.number = parse_number_token(raw, path);
  return v;
}

using KeyValues = std::vector<std::pair<std::string, Value>>;

KeyValues tokenize_config(const std::string& text) {
  KeyValues out;
  std::string section;
  size_t pos = 0;
  int line_no = 0;
  while (pos <= text.size()) {
    size_t eol = text.find('\n', pos);
    if (eol == std::string::npos) eol = text.size();
    std::string line = trim(strip_comment(text.substr(pos, eol - pos)));
    pos = eol + 1;
    ++line_no;
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']')
        throw config_error("line " + std::to_string(line_no), "malformed section header");
      section = trim(line.substr(1, line.size() - 2));
      if (section.empty())
        throw config_error("line " + std::to_string(line_no), "empty section name");
      continue;
    }
    const size_t eq = line.find('=');
    if (eq == std::string::npos)
      throw config_error("line " + std::to_string(line_no), "expected key = value");
    const std::string key = trim(line.substr(0, eq));
    if (key.empty()) throw config_error("line " + std::to_string(line_no), "empty key");
    const std::string path = section.empty() ? key : section + "." + key;
    for (const auto& [existing, unused] : out)
      if (existing == path) throw config_error(path, "duplicate key");
    out.emplace_back(path, parse_value(trim(line.substr(eq + 1)), path));
  }
  return out;
}

double as_number(const Value& v, const std::string& path) {
  if (v.kind != Value::Kind::number) throw config_error(path, "expected a number");
  return v.number;
}

int as_int(const Value& v, const std::string& path) {
  const double d = as_number(v, path);
  if (d != std::floor(d) || std::abs(d) > 2e9) throw config_error(path, "expected an integer");
  return static_cast<int>(d);
}

std::uint64_t as_seed(const Value& v, const std::string& path) {
  const double d = as_number(v, path);
  if (d < 0 || d != std::floor(d) || d > 9.0e15)
    throw config_error(path, "expected a non-negative integer seed");
  return static_cast<std::uint64_t>(d);
}

std::string as_string(const Value& v, const std::string& path) {
  if (v.kind != Value::Kind::string) throw config_error(path, "expected a quoted string");
  return v.text;
}

using Setter = std::function<void(ScenarioConfig&, const Value&, const std::string&)>;

const std::map<std::string, Setter>& scenario_schema() {
  static const std::map<std::string, Setter> schema = {
      {"physics.d_es_ghz", [](ScenarioConfig& c, const Value& v, const std::string& p) { c.physics.d_es_ghz = as_number(v, p); }},
      {"physics.a_es_ghz", [](ScenarioConfig& c, const Value& v, const std::string& p) { c.physics.a_es_ghz = as_number(v, p); }},
      {"physics.gyromag_ghz_per_t", [](ScenarioConfig& c, const Value& v, const std::string& p) { c.physics.gyromag_ghz_per_t = as_number(v, p); }},
      {"physics.p_e0", [](ScenarioConfig& c, const Value& v, const std::string& p) { c.physics.p_e0 = as_number(v, p); }},
      {"physics.charge_fidelity", [](ScenarioConfig& c, const Value& v, const std::string& p) { c.physics.charge_fidelity = as_number(v, p); }},
      {"field.b0_mt", [](ScenarioConfig& c, const Value& v, const std::string& p) { c.b0_mt = as_number(v, p); }},
      {"readout.alpha0", [](ScenarioConfig& c, const Value& v, const std::string& p) { c.readout.alpha0 = as_number(v, p); }},
      {"readout.contrast", [](ScenarioConfig& c, const Value& v, const std::string& p) { c.readout.contrast = as_number(v, p); }},
      {"readout.kappa", [](ScenarioConfig& c, const Value& v, const std::string& p) { c.readout.kappa = as_number(v, p); }},
      {"readout.repump_prob", [](ScenarioConfig& c, const Value& v, const std::string& p) { c.readout.repump_prob = as_number(v, p); }},
      {"readout.background", [](ScenarioConfig& c, const Value& v, const std::string& p) { c.readout.background = as_number(v, p); }},
      {"readout.t_read_ns", [](ScenarioConfig& c, const Value& v, const std::string& p) { c.readout.t_read_ns = as_number(v, p); }},
      {"readout.t_init_ns", [](ScenarioConfig& c, const Value& v, const std::string& p) { c.readout.t_init_ns = as_number(v, p); }},
      {"gates.pi_fidelity", [](ScenarioConfig& c, const Value& v, const std::string& p) { c.gates.pi_fidelity = as_number(v, p); }},
      {"gates.crosstalk", [](ScenarioConfig& c, const Value& v, const std::string& p) { c.gates.crosstalk = as_number(v, p); }},
      {"timing.t_mw_ns", [](ScenarioConfig& c, const Value& v, const std::string& p) { c.timing.t_mw_ns = as_number(v, p); }},
      {"timing.t_rf_pulse_ns", [](ScenarioConfig& c, const Value& v, const std::string& p) { c.timing.t_rf_pulse_ns = as_number(v, p); }},
      {"timing.t_rf_ringdown_ns", [](ScenarioConfig& c, const Value& v, const std::string& p) { c.timing.t_rf_ringdown_ns = as_number(v, p); }},
      {"timing.t_readout_dead_ns", [](ScenarioConfig& c, const Value& v, const std::string& p) { c.timing.t_readout_dead_ns = as_number(v, p); }},
      {"init.nuclear_pi_minus1", [](ScenarioConfig& c, const Value& v, const std::string& p) { c.init_nuclear.pi_minus1 = as_number(v, p); }},
      {"init.nuclear_pi_0", [](ScenarioConfig& c, const Value& v, const std::string& p) { c.init_nuclear.pi_0 = as_number(v, p); }},
      {"init.nuclear_pi_plus1", [](ScenarioConfig& c, const Value& v, const std::string& p) { c.init_nuclear.pi_plus1 = as_number(v, p); }},
      {"protocol.kind",
       [](ScenarioConfig& c, const Value& v, const std::string& p) {
         const std::string s = as_string(v, p);
         if (s == "repetitive") c.protocol.kind = ProtocolKind::repetitive;
         else if (s == "error_corrected") c.protocol.kind = ProtocolKind::error_corrected;
         else throw config_error(p, "expected \"repetitive\" or \"error_corrected\"");
       }},
      {"protocol.n", [](ScenarioConfig& c, const Value& v, const std::string& p) { c.protocol.n = as_int(v, p); }},
      {"protocol.n_r", [](ScenarioConfig& c, const Value& v, const std::string& p) { c.protocol.n_r = as_int(v, p); }},
      {"protocol.prep",
       [](ScenarioConfig& c, const Value& v, const std::string& p) {
         const std::string s = as_string(v, p);
         if (s == "both") c.protocol.prep = PrepChoice::both;
         else if (s == "0") c.protocol.prep = PrepChoice::electron0;
         else if (s == "-1") c.protocol.prep = PrepChoice::electron_minus1;
         else throw config_error(p, "expected \"both\", \"0\" or \"-1\"");
       }},
      {"simulation.backend",
       [](ScenarioConfig& c, const Value& v, const std::string& p) {
         const std::string s = as_string(v, p);
         if (s == "expectation") c.simulation.backend = Backend::expectation;
         else if (s == "montecarlo") c.simulation.backend = Backend::montecarlo;
         else throw config_error(p, "expected \"expectation\" or \"montecarlo\"");
       }},
      {"simulation.n_shots", [](ScenarioConfig& c, const Value& v, const std::string& p) { c.simulation.n_shots = as_int(v, p); }},
      {"simulation.seed", [](ScenarioConfig& c, const Value& v, const std::string& p) { c.simulation.seed = as_seed(v, p); }},
      {"output.out_dir", [](ScenarioConfig& c, const Value& v, const std::string& p) { c.out_dir = as_string(v, p); }},
  };
  return schema;
}

// The laser pulse durations live in [readout]; mirror them into the timing
// budget so duration accounting has a single source.
void sync_timing(ScenarioConfig& config) {
  config.timing.t_read_ns = config.readout.t_read_ns;
  config.timing.t_init_ns = config.readout.t_init_ns;
}

void apply_scenario_keys(const KeyValues& kvs, ScenarioConfig& config) {
  const auto& schema = scenario_schema();
  for (const auto& [path, value] : kvs) {
    const auto it = schema.find(path);
    if (it == schema.end()) throw config_error(path, "unknown key");
    it->second(config, value, path);
  }
  sync_timing(config);
}

std::string fmt_full(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

// ---------------------------------------------------------------------------
// Worker pool used by sweeps: deterministic output order, shared index.
// ---------------------------------------------------------------------------

void parallel_for(int count, const std::function<void(int)>& body) {
  const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
  const int workers = static_cast<int>(std::min<int>(static_cast<int>(hw), std::min(count, 8)));
  if (workers <= 1) {
    for (int i = 0; i < count; ++i) body(i);
    return;
  }
  std::atomic<int> next{0};
  std::vector<std::future<void>> futures;
  for (int w = 0; w < workers; ++w)
    futures.push_back(std::async(std::launch::async, [&] {
      for (int i = next.fetch_add(1); i < count; i = next.fetch_add(1)) body(i);
    }));
  for (auto& f : futures) f.get();
}

}  // namespace

void ScenarioConfig::validate() const {
  try {
    physics.validate();
    readout.validate();
    gates.validate();
    timing.validate();
    field().validate();
    initial_condition().validate();
  } catch (const std::invalid_argument& e) {
    throw config_error("", e.what());
  }
  if (protocol.n < 1) throw config_error("protocol.n", "must be >= 1");
  if (protocol.kind == ProtocolKind::error_corrected && protocol.n_r < 1)
    throw config_error("protocol.n_r", "must be >= 1 for the error-corrected protocol");
  if (protocol.n_r < 0) throw config_error("protocol.n_r", "must be >= 0");
  if (simulation.n_shots < 1) throw config_error("simulation.n_shots", "must be >= 1");
}

ScenarioConfig parse_scenario(const std::string& text) {
  ScenarioConfig config;
  apply_scenario_keys(tokenize_config(text), config);
  config.validate();
  return config;
}

void merge_scenario_fragment(const std::string& text, ScenarioConfig& config) {
  apply_scenario_keys(tokenize_config(text), config);
  config.validate();
}

std::string serialize_scenario(const ScenarioConfig& c) {
  std::string out;
  auto kv = [&out](const char* key, const std::string& value) {
    out += key;
    out += " = ";
    out += value;
    out += '\n';
  };
  out += "[physics]\n";
  kv("d_es_ghz", fmt_full(c.physics.d_es_ghz));
  kv("a_es_ghz", fmt_full(c.physics.a_es_ghz));
  kv("gyromag_ghz_per_t", fmt_full(c.physics.gyromag_ghz_per_t));
  kv("p_e0", fmt_full(c.physics.p_e0));
  kv("charge_fidelity", fmt_full(c.physics.charge_fidelity));
  out += "\n[field]\n";
  kv("b0_mt", fmt_full(c.b0_mt));
  out += "\n[readout]\n";
  kv("alpha0", fmt_full(c.readout.alpha0));
  kv("contrast", fmt_full(c.readout.contrast));
  kv("kappa", fmt_full(c.readout.kappa));
  kv("repump_prob", fmt_full(c.readout.repump_prob));
  kv("background", fmt_full(c.readout.background));
  kv("t_read_ns", fmt_full(c.readout.t_read_ns));
  kv("t_init_ns", fmt_full(c.readout.t_init_ns));
  out += "\n[gates]\n";
  kv("pi_fidelity", fmt_full(c.gates.pi_fidelity));
  kv("crosstalk", fmt_full(c.gates.crosstalk));
  out += "\n[timing]\n";
  kv("t_mw_ns", fmt_full(c.timing.t_mw_ns));
  kv("t_rf_pulse_ns", fmt_full(c.timing.t_rf_pulse_ns));
  kv("t_rf_ringdown_ns", fmt_full(c.timing.t_rf_ringdown_ns));
  kv("t_readout_dead_ns", fmt_full(c.timing.t_readout_dead_ns));
  out += "\n[init]\n";
  kv("nuclear_pi_minus1", fmt_full(c.init_nuclear.pi_minus1));
  kv("nuclear_pi_0", fmt_full(c.init_nuclear.pi_0));
  kv("nuclear_pi_plus1", fmt_full(c.init_nuclear.pi_plus1));
  out += "\n[protocol]\n";
  kv("kind", c.protocol.kind == ProtocolKind::repetitive ? "\"repetitive\"" : "\"error_corrected\"");
  kv("n", std::to_string(c.protocol.n));
  kv("n_r", std::to_string(c.protocol.n_r));
  kv("prep", c.protocol.prep == PrepChoice::both ? "\"both\""
             : c.protocol.prep == PrepChoice::electron0 ? "\"0\"" : "\"-1\"");
  out += "\n[simulation]\n";
  kv("backend", c.simulation.backend == Backend::expectation ? "\"expectation\"" : "\"montecarlo\"");
  kv("n_shots", std::to_string(c.simulation.n_shots));
  kv("seed", std::to_string(c.simulation.seed));
  out += "\n[output]\n";
  kv("out_dir", "\"" + c.out_dir + "\"");
  return out;
}

namespace {

PulseSequence build_for(const ScenarioConfig& c, Prep prep) {
  if (c.protocol.kind == ProtocolKind::error_corrected)
    return build_error_corrected(prep, c.protocol.n, c.protocol.n_r);
  return build_repetitive_readout(prep, c.protocol.n);
}

ExpectedTrace trace_for(const ScenarioConfig& c, Prep prep, std::optional<ShotTraces>* shots_out) {
  const PulseSequence seq = build_for(c, prep);
  if (c.simulation.backend == Backend::expectation) {
    return propagate(seq, initial_state(c.initial_condition()), c.field(), c.physics, c.readout,
                     c.gates);
  }
  const std::uint64_t seed =
      prep == Prep::electron0 ? c.simulation.seed : c.simulation.seed ^ 0x517cc1b727220a95ULL;
  ShotTraces shots = sample(seq, c.initial_condition(), c.field(), c.physics, c.readout, c.gates,
                            c.simulation.n_shots, seed);
  ExpectedTrace trace;
  trace.counts.resize(shots.n_slots);
  for (int slot = 0; slot < shots.n_slots; ++slot) trace.counts[slot] = shots.slot_mean(slot);
  if (shots_out) *shots_out = std::move(shots);
  return trace;
}

}  // namespace

RunResult simulate_scenario(const ScenarioConfig& config) {
  config.validate();
  RunResult result;
  const bool want0 = config.protocol.prep != PrepChoice::electron_minus1;
  const bool want1 = config.protocol.prep != PrepChoice::electron0;
  if (want0) result.trace0 = trace_for(config, Prep::electron0, &result.shots0);
  if (want1) result.trace1 = trace_for(config, Prep::electron_minus1, &result.shots1);
  result.duration_us =
      sequence_duration_us(build_for(config, Prep::electron0), config.timing);
  if (want0 && want1) {
    result.curve = fidelity_vs_n(result.trace0.counts, result.trace1.counts);
    result.signal = cumulative_signal(result.trace0.counts, result.trace1.counts);
    const FidelityPeak peak = curve_peak(result.curve);
    result.f_max = peak.f_max;
    result.n_opt = peak.n_opt;
    if (result.signal.size() >= 3) {
      try {
        result.fit = fit_saturation(result.signal);
      } catch (const numeric_error&) {
        result.fit.reset();
      }
    }
  }
  return result;
}

namespace {

void write_shots_csv(const std::string& path, const ShotTraces& shots) {
  CsvTable table;
  table.header.push_back("shot");
  for (int slot = 1; slot <= shots.n_slots; ++slot)
    table.header.push_back("slot_" + std::to_string(slot));
  table.rows.reserve(shots.n_shots);
  for (int s = 0; s < shots.n_shots; ++s) {
    std::vector<std::string> row;
    row.reserve(shots.n_slots + 1);
    row.push_back(std::to_string(s));
    for (int slot = 0; slot < shots.n_slots; ++slot)
      row.push_back(std::to_string(shots.at(s, slot)));
    table.rows.push_back(std::move(row));
  }
  write_text_file(path, to_csv(table));
}

}  // namespace

RunResult run_scenario(const ScenarioConfig& config, const std::string& out_dir) {
  RunResult result = simulate_scenario(config);
  std::filesystem::create_directories(out_dir);
  const auto path = [&out_dir](const char* name) {
    return (std::filesystem::path(out_dir) / name).string();
  };

  const bool both = config.protocol.prep == PrepChoice::both;
  CsvTable trace;
  if (both) {
    trace.header = {"slot", "c0", "c1"};
    for (size_t i = 0; i < result.trace0.counts.size(); ++i)
      trace.rows.push_back({std::to_string(i + 1), format_double(result.trace0.counts[i]),
                            format_double(result.trace1.counts[i])});
  } else {
    const auto& counts = config.protocol.prep == PrepChoice::electron0 ? result.trace0.counts
                                                                       : result.trace1.counts;
    trace.header = {"slot", "c"};
    for (size_t i = 0; i < counts.size(); ++i)
      trace.rows.push_back({std::to_string(i + 1), format_double(counts[i])});
  }
  write_text_file(path("trace.csv"), to_csv(trace));

  if (both) {
    CsvTable fid;
    fid.header = {"n", "signal", "f"};
    for (size_t i = 0; i < result.curve.n.size(); ++i)
      fid.rows.push_back({format_double(result.curve.n[i]), format_double(result.signal[i]),
                          format_double(result.curve.f[i])});
    write_text_file(path("fidelity.csv"), to_csv(fid));
  }

  CsvTable summary;
  summary.header = {"protocol", "b0_mt",  "n",     "n_r",  "backend",
                    "seed",     "f_max",  "n_opt", "n_1e", "n_1e_low_confidence",
                    "duration_ms"};
  summary.rows.push_back(
      {config.protocol.kind == ProtocolKind::repetitive ? "repetitive" : "error_corrected",
       format_double(config.b0_mt), std::to_string(config.protocol.n),
       std::to_string(config.protocol.n_r),
       config.simulation.backend == Backend::expectation ? "expectation" : "montecarlo",
       std::to_string(config.simulation.seed), format_double(result.f_max),
       std::to_string(result.n_opt), result.fit ? format_double(result.fit->n_1e) : "nan",
       result.fit && result.fit->low_confidence ? "1" : "0",
       format_double(result.duration_us / 1000.0)});
  write_text_file(path("summary.csv"), to_csv(summary));

  if (result.shots0) write_shots_csv(path("shots_prep0.csv"), *result.shots0);
  if (result.shots1) write_shots_csv(path("shots_prep1.csv"), *result.shots1);
  return result;
}

SweepSpec parse_sweep(const std::string& text) {
  SweepSpec spec;
  KeyValues scenario_keys;
  bool have_axis = false;
  for (const auto& [path, value] : tokenize_config(text)) {
    if (path == "sweep.axis") {
      const std::string s = as_string(value, path);
      if (s == "b0_mt") spec.axis = SweepSpec::Axis::b0_mt;
      else if (s == "n_r") spec.axis = SweepSpec::Axis::n_r;
      else if (s == "n") spec.axis = SweepSpec::Axis::n;
      else throw config_error(path, "expected \"b0_mt\", \"n_r\" or \"n\"");
      have_axis = true;
    } else if (path == "sweep.values") {
      if (value.kind != Value::Kind::array) throw config_error(path, "expected an array");
      spec.values = value.array;
    } else {
      scenario_keys.emplace_back(path, value);
    }
  }
  if (!have_axis) throw config_error("sweep.axis", "missing");
  if (spec.values.empty()) throw config_error("sweep.values", "must be non-empty");
  apply_scenario_keys(scenario_keys, spec.base);
  spec.base.validate();
  return spec;
}

namespace {

ScenarioConfig with_axis_value(const SweepSpec& spec, double value) {
  ScenarioConfig c = spec.base;
  switch (spec.axis) {
    case SweepSpec::Axis::b0_mt:
      c.b0_mt = value;
      break;
    case SweepSpec::Axis::n_r:
      c.protocol.n_r = static_cast<int>(std::lround(value));
      c.protocol.kind = ProtocolKind::error_corrected;
      break;
    case SweepSpec::Axis::n:
      c.protocol.n = static_cast<int>(std::lround(value));
      break;
  }
  c.validate();
  return c;
}

}  // namespace

std::vector<SweepRow> run_sweep(const SweepSpec& spec) {
  const bool with_ec = spec.base.protocol.kind == ProtocolKind::error_corrected ||
                       spec.axis == SweepSpec::Axis::n_r;
  const int count = static_cast<int>(spec.values.size());
  std::vector<std::vector<SweepRow>> partial(count);

  parallel_for(count, [&](int i) {
    const double value = spec.values[i];
    ScenarioConfig ec_config = with_axis_value(spec, value);
    ScenarioConfig plain_config = ec_config;
    plain_config.protocol.kind = ProtocolKind::repetitive;

    const RunResult plain = simulate_scenario(plain_config);
    SweepRow plain_row;
    plain_row.value = value;
    plain_row.protocol = "repetitive";
    plain_row.f_max = plain.f_max;
    plain_row.n_opt = plain.n_opt;
    plain_row.n_1e = plain.fit ? plain.fit->n_1e : std::nan("");
    plain_row.ratio = 1.0;
    partial[i].push_back(plain_row);

    if (with_ec) {
      const RunResult ec = simulate_scenario(ec_config);
      SweepRow ec_row;
      ec_row.value = value;
      ec_row.protocol = "error_corrected";
      ec_row.f_max = ec.f_max;
      ec_row.n_opt = ec.n_opt;
      ec_row.n_1e = ec.fit ? ec.fit->n_1e : std::nan("");
      ec_row.ratio = plain.f_max > 0.0 ? ec.f_max / plain.f_max : 0.0;
      partial[i].push_back(ec_row);
    }
  });

  std::vector<SweepRow> rows;
  for (auto& group : partial)
    for (auto& row : group) rows.push_back(std::move(row));
  return rows;
}

void write_sweep_csv(const SweepSpec& spec, const std::vector<SweepRow>& rows,
                     const std::string& out_path) {
  const bool axis_is_n_r = spec.axis == SweepSpec::Axis::n_r;
  const char* axis_name = spec.axis == SweepSpec::Axis::b0_mt ? "b0_mt"
                          : axis_is_n_r                       ? "n_r"
                                                              : "n";
  CsvTable table;
  table.header = {axis_name, "protocol", "f_max", "n_opt", "n_1e", "improvement"};
  if (!axis_is_n_r) table.header.push_back("n_r");
  for (const auto& row : rows) {
    std::vector<std::string> cells = {format_double(row.value),  row.protocol,
                                      format_double(row.f_max),  std::to_string(row.n_opt),
                                      format_double(row.n_1e),   format_double(row.ratio)};
    if (!axis_is_n_r) cells.push_back(std::to_string(spec.base.protocol.n_r));
    table.rows.push_back(std::move(cells));
  }
  write_text_file(out_path, to_csv(table));
}

CalibrationRequest parse_calibration(const std::string& text) {
  CalibrationRequest req;
  KeyValues scenario_keys;
  for (const auto& [path, value] : tokenize_config(text)) {
    if (path.rfind("calibrate.", 0) != 0) {
      scenario_keys.emplace_back(path, value);
      continue;
    }
    const std::string key = path.substr(10);
    if (key == "target_n_1e") req.target_n_1e = as_number(value, path);
    else if (key == "b0_mt") req.n_1e_b0_mt = as_number(value, path);
    else if (key == "target_f_single") req.target_f_single = as_number(value, path);
    else if (key == "alpha0") req.alpha0 = as_number(value, path);
    else if (key == "contrast_mode") {
      const std::string s = as_string(value, path);
      if (s == "closed_form") req.protocol_contrast = false;
      else if (s == "protocol") req.protocol_contrast = true;
      else throw config_error(path, "expected \"closed_form\" or \"protocol\"");
    } else if (key == "target_f_plain") req.target_f_plain = as_number(value, path);
    else if (key == "f_plain_b0_mt") req.f_plain_b0_mt = as_number(value, path);
    else throw config_error(path, "unknown key");
  }
  apply_scenario_keys(scenario_keys, req.base);
  req.base.validate();
  if (!req.target_n_1e && !req.target_f_single)
    throw config_error("calibrate", "need target_n_1e and/or target_f_single");
  if (req.target_f_plain && !req.f_plain_b0_mt)
    throw config_error("calibrate.f_plain_b0_mt", "required with target_f_plain");
  return req;
}

std::string run_calibration(const CalibrationRequest& req) {
  std::string out;
  CalibrationScenario scenario;
  scenario.b0 = req.base.field();
  scenario.physics = req.base.physics;
  scenario.readout = req.base.readout;
  scenario.gates = req.base.gates;
  scenario.init = req.base.initial_condition();

  std::optional<double> contrast;
  if (req.target_f_single) {
    if (req.alpha0) scenario.readout.alpha0 = *req.alpha0;
    contrast = req.protocol_contrast
                   ? calibrate_contrast_protocol(*req.target_f_single, scenario)
                   : calibrate_contrast(*req.target_f_single, scenario.readout.alpha0);
    scenario.readout.contrast = *contrast;
  }

  std::optional<double> kappa;
  std::optional<double> a_es;
  if (req.target_n_1e) {
    CalibrationScenario high = scenario;
    if (req.n_1e_b0_mt) high.b0 = MagneticField{*req.n_1e_b0_mt / 1000.0};
    if (req.target_f_plain) {
      const MagneticField b_mid{*req.f_plain_b0_mt / 1000.0};
      const FieldModelFit fit =
          calibrate_field_model(*req.target_n_1e, high.b0, *req.target_f_plain, b_mid, high);
      kappa = fit.kappa;
      a_es = fit.a_es_ghz;
    } else {
      kappa = calibrate_kappa(*req.target_n_1e, high);
    }
  }

  if (a_es) out += "[physics]\na_es_ghz = " + fmt_full(*a_es) + "\n\n";
  if (kappa || contrast) {
    out += "[readout]\n";
    if (kappa) out += "kappa = " + fmt_full(*kappa) + "\n";
    if (contrast) out += "contrast = " + fmt_full(*contrast) + "\n";
  }
  return out;
}

}  // namespace nvrr
