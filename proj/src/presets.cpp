#include "nvrr/scenario.hpp"

namespace nvrr {

namespace {

// Shared parameter block. kappa comes from matching the high-field saturation
// scale (N_1e = 1700 at 244 mT); contrast from matching the conventional
// single-readout fidelity 0.03 through the simulator (see `nvrr calibrate`).
constexpr const char* kCommon = R"(
[physics]
p_e0 = 0.81
charge_fidelity = 0.75

[readout]
alpha0 = 0.02
contrast = 0.46572402173064131
kappa = 6.5230863112988251
)";

struct Preset {
  const char* name;
  const char* description;
  std::string text;
};

const std::vector<Preset>& presets() {
  static const std::vector<Preset> list = {
      {"highfield_repetitive", "244 mT plain repetitive readout, saturating fidelity curve",
       std::string(kCommon) + R"(
[field]
b0_mt = 244

[protocol]
kind = "repetitive"
n = 8000
)"},
      {"midfield_repetitive", "82 mT plain repetitive readout, strong backaction",
       std::string(kCommon) + R"(
[field]
b0_mt = 82

[protocol]
kind = "repetitive"
n = 1500
)"},
      {"midfield_ec", "82 mT error-corrected readout, correction every 5 readouts",
       std::string(kCommon) + R"(
[field]
b0_mt = 82

[protocol]
kind = "error_corrected"
n = 1500
n_r = 5
)"},
      {"ec_period_sweep", "sweep of the correction period at 82 mT",
       std::string(kCommon) + R"(
[sweep]
axis = "n_r"
values = [1, 2, 5, 10, 20]

[field]
b0_mt = 82

[protocol]
kind = "error_corrected"
n = 1500
n_r = 5
)"},
      {"field_sweep_nr1", "improvement vs field, correction every readout",
       std::string(kCommon) + R"(
[sweep]
axis = "b0_mt"
values = [15, 20, 25, 30, 35, 40, 45, 51, 55, 60, 70, 82, 100, 120, 140, 170, 200, 244]

[protocol]
kind = "error_corrected"
n = 8000
n_r = 1
)"},
      {"field_sweep_nr2", "improvement vs field, correction every 2 readouts",
       std::string(kCommon) + R"(
[sweep]
axis = "b0_mt"
values = [15, 20, 25, 30, 35, 40, 45, 51, 55, 60, 70, 82, 100, 120, 140, 170, 200, 244]

[protocol]
kind = "error_corrected"
n = 8000
n_r = 2
)"},
      {"field_sweep_nr5", "improvement vs field, correction every 5 readouts",
       std::string(kCommon) + R"(
[sweep]
axis = "b0_mt"
values = [15, 20, 25, 30, 35, 40, 45, 51, 55, 60, 70, 82, 100, 120, 140, 170, 200, 244]

[protocol]
kind = "error_corrected"
n = 8000
n_r = 5
)"},
      {"montecarlo_demo", "seeded Monte Carlo shots of the corrected protocol",
       std::string(kCommon) + R"(
[field]
b0_mt = 82

[protocol]
kind = "error_corrected"
n = 60
n_r = 5

[simulation]
backend = "montecarlo"
n_shots = 4000
seed = 1
)"},
  };
  return list;
}

}  // namespace

std::vector<std::string> preset_names() {
  std::vector<std::string> names;
  for (const auto& p : presets()) names.push_back(p.name);
  return names;
}

std::string preset_text(const std::string& name) {
  for (const auto& p : presets())
    if (name == p.name) return p.text;
  std::string known;
  for (const auto& p : presets()) {
    if (!known.empty()) known += ", ";
    known += p.name;
  }
  throw config_error("preset", "unknown preset '" + name + "' (available: " + known + ")");
}

}  // namespace nvrr
