#include "nvrr.h"

#include <cmath>
#include <cstring>
#include <filesystem>
#include <string>

#include "nvrr/csv.hpp"
#include "nvrr/scenario.hpp"
#include "nvrr/svg.hpp"

struct nvrr_scenario {
  nvrr::ScenarioConfig config;
};

namespace {

thread_local std::string g_last_error;

nvrr_status fail(nvrr_status code, const std::string& message) {
  g_last_error = message;
  return code;
}

// Runs `fn`, translating exceptions into status codes.
template <typename Fn>
nvrr_status guarded(Fn&& fn) {
  try {
    fn();
    return NVRR_OK;
  } catch (const nvrr::config_error& e) {
    return fail(NVRR_ERR_CONFIG, e.what());
  } catch (const nvrr::schema_mismatch& e) {
    return fail(NVRR_ERR_CONFIG, e.what());
  } catch (const nvrr::invalid_argument& e) {
    return fail(NVRR_ERR_CONFIG, e.what());
  } catch (const nvrr::numeric_error& e) {
    return fail(NVRR_ERR_NUMERIC, e.what());
  } catch (const std::exception& e) {
    return fail(NVRR_ERR, e.what());
  }
}

nvrr_status require(bool ok, const char* what) {
  return ok ? NVRR_OK : fail(NVRR_ERR_CONFIG, std::string("null argument: ") + what);
}

char* dup_string(const std::string& s) {
  char* out = new char[s.size() + 1];
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

}  // namespace

extern "C" {

const char* nvrr_version(void) { return "1.0.0"; }

const char* nvrr_last_error(void) { return g_last_error.c_str(); }

void nvrr_string_free(char* text) { delete[] text; }

nvrr_status nvrr_eslac_field(double d_es_ghz, double gyromag_ghz_per_t, double* out_tesla) {
  if (auto s = require(out_tesla, "out_tesla")) return s;
  return guarded([&] {
    nvrr::PhysicsParams phys;
    phys.d_es_ghz = d_es_ghz;
    phys.gyromag_ghz_per_t = gyromag_ghz_per_t;
    *out_tesla = nvrr::eslac_field(phys);
  });
}

nvrr_status nvrr_flip_flop_probs(double b0_tesla, double d_es_ghz, double a_es_ghz,
                                 double gyromag_ghz_per_t, double* out_p_plus,
                                 double* out_p_minus) {
  if (auto s = require(out_p_plus && out_p_minus, "out_p_plus/out_p_minus")) return s;
  return guarded([&] {
    nvrr::PhysicsParams phys;
    phys.d_es_ghz = d_es_ghz;
    phys.a_es_ghz = a_es_ghz;
    phys.gyromag_ghz_per_t = gyromag_ghz_per_t;
    const auto probs = nvrr::flip_flop_probabilities(nvrr::MagneticField{b0_tesla}, phys);
    *out_p_plus = probs.p_plus;
    *out_p_minus = probs.p_minus;
  });
}

nvrr_status nvrr_dnp_steady_state(double b0_tesla, double d_es_ghz, double a_es_ghz,
                                  double gyromag_ghz_per_t, double out_pi[3]) {
  if (auto s = require(out_pi, "out_pi")) return s;
  return guarded([&] {
    nvrr::PhysicsParams phys;
    phys.d_es_ghz = d_es_ghz;
    phys.a_es_ghz = a_es_ghz;
    phys.gyromag_ghz_per_t = gyromag_ghz_per_t;
    const auto pi = nvrr::dnp_steady_state(nvrr::MagneticField{b0_tesla}, phys);
    out_pi[0] = pi.pi_minus1;
    out_pi[1] = pi.pi_0;
    out_pi[2] = pi.pi_plus1;
  });
}

nvrr_status nvrr_readout_fidelity(double c0, double c1, double* out_f) {
  if (auto s = require(out_f, "out_f")) return s;
  return guarded([&] { *out_f = nvrr::readout_fidelity(c0, c1); });
}

nvrr_status nvrr_scenario_from_string(const char* text, nvrr_scenario** out) {
  if (auto s = require(text && out, "text/out")) return s;
  return guarded([&] { *out = new nvrr_scenario{nvrr::parse_scenario(text)}; });
}

nvrr_status nvrr_scenario_from_file(const char* path, nvrr_scenario** out) {
  if (auto s = require(path && out, "path/out")) return s;
  return guarded([&] { *out = new nvrr_scenario{nvrr::parse_scenario(nvrr::read_text_file(path))}; });
}

nvrr_status nvrr_scenario_from_preset(const char* name, nvrr_scenario** out) {
  if (auto s = require(name && out, "name/out")) return s;
  return guarded([&] { *out = new nvrr_scenario{nvrr::parse_scenario(nvrr::preset_text(name))}; });
}

nvrr_status nvrr_preset_names(char** out) {
  if (auto s = require(out, "out")) return s;
  return guarded([&] {
    std::string joined;
    for (const auto& name : nvrr::preset_names()) {
      if (!joined.empty()) joined += ",";
      joined += name;
    }
    *out = dup_string(joined);
  });
}

nvrr_status nvrr_scenario_override(nvrr_scenario* scenario, const char* dotted_key,
                                   const char* value) {
  if (auto s = require(scenario && dotted_key && value, "scenario/dotted_key/value")) return s;
  return guarded([&] {
    const std::string key = dotted_key;
    const size_t dot = key.find('.');
    if (dot == std::string::npos || dot == 0 || dot + 1 >= key.size())
      throw nvrr::config_error(key, "expected section.key");
    std::string rendered = value;
    // Convenience: quote bare words so callers can pass e.g. "montecarlo".
    if (!rendered.empty() && rendered.front() != '"' && rendered.front() != '[' &&
        rendered != "true" && rendered != "false") {
      char* end = nullptr;
      std::strtod(rendered.c_str(), &end);
      if (end == rendered.c_str() || *end != '\0') rendered = "\"" + rendered + "\"";
    }
    const std::string fragment =
        "[" + key.substr(0, dot) + "]\n" + key.substr(dot + 1) + " = " + rendered + "\n";
    nvrr::merge_scenario_fragment(fragment, scenario->config);
  });
}

nvrr_status nvrr_scenario_merge_file(nvrr_scenario* scenario, const char* params_path) {
  if (auto s = require(scenario && params_path, "scenario/params_path")) return s;
  return guarded([&] {
    nvrr::merge_scenario_fragment(nvrr::read_text_file(params_path), scenario->config);
  });
}

nvrr_status nvrr_scenario_serialize(const nvrr_scenario* scenario, char** out_text) {
  if (auto s = require(scenario && out_text, "scenario/out_text")) return s;
  return guarded([&] { *out_text = dup_string(nvrr::serialize_scenario(scenario->config)); });
}

void nvrr_scenario_free(nvrr_scenario* scenario) { delete scenario; }

nvrr_status nvrr_run(const nvrr_scenario* scenario, const char* out_dir, nvrr_summary* out) {
  if (auto s = require(scenario && out_dir, "scenario/out_dir")) return s;
  return guarded([&] {
    const nvrr::RunResult result = nvrr::run_scenario(scenario->config, out_dir);
    if (out) {
      out->f_max = result.f_max;
      out->n_opt = result.n_opt;
      out->n_1e = result.fit ? result.fit->n_1e : std::nan("");
      out->n_1e_low_confidence = result.fit && result.fit->low_confidence ? 1 : 0;
      out->duration_ms = result.duration_us / 1000.0;
    }
  });
}

namespace {

nvrr_status sweep_from_text(const std::string& text, const char* params_path,
                            const char* out_dir) {
  return guarded([&] {
    nvrr::SweepSpec spec = nvrr::parse_sweep(text);
    if (params_path)
      nvrr::merge_scenario_fragment(nvrr::read_text_file(params_path), spec.base);
    const auto rows = nvrr::run_sweep(spec);
    std::filesystem::create_directories(out_dir);
    nvrr::write_sweep_csv(spec, rows,
                          (std::filesystem::path(out_dir) / "sweep.csv").string());
  });
}

}  // namespace

nvrr_status nvrr_sweep_file(const char* sweep_path, const char* params_path, const char* out_dir) {
  if (auto s = require(sweep_path && out_dir, "sweep_path/out_dir")) return s;
  nvrr_status status = NVRR_OK;
  std::string text;
  status = guarded([&] { text = nvrr::read_text_file(sweep_path); });
  if (status != NVRR_OK) return status;
  return sweep_from_text(text, params_path, out_dir);
}

nvrr_status nvrr_sweep_preset(const char* name, const char* params_path, const char* out_dir) {
  if (auto s = require(name && out_dir, "name/out_dir")) return s;
  nvrr_status status = NVRR_OK;
  std::string text;
  status = guarded([&] { text = nvrr::preset_text(name); });
  if (status != NVRR_OK) return status;
  return sweep_from_text(text, params_path, out_dir);
}

nvrr_status nvrr_calibrate_file(const char* targets_path, const char* out_path) {
  if (auto s = require(targets_path && out_path, "targets_path/out_path")) return s;
  return guarded([&] {
    const auto request = nvrr::parse_calibration(nvrr::read_text_file(targets_path));
    nvrr::write_text_file(out_path, nvrr::run_calibration(request));
  });
}

nvrr_status nvrr_plot(const char* csv_path, const char* kind, const char* svg_path) {
  if (auto s = require(csv_path && kind && svg_path, "csv_path/kind/svg_path")) return s;
  return guarded([&] {
    nvrr::render_plot_file(nvrr::plot_kind_from_string(kind), csv_path, svg_path);
  });
}

}  // extern "C"
