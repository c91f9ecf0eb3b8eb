#pragma once

#include <string>

#include "nvrr/csv.hpp"

namespace nvrr {

// CSV columns do not match the declared plot schema.
class schema_mismatch : public invalid_argument {
 public:
  using invalid_argument::invalid_argument;
};

enum class PlotKind { fidelity_curve, signal, nr_sweep, field_sweep };

PlotKind plot_kind_from_string(const std::string& name);

// Renders a static SVG (fixed 640x480 canvas, no timestamps); output is a
// pure function of the table so repeated renders are byte-identical.
//
// Expected columns per kind:
//   fidelity_curve: n, f            (optional series column: protocol)
//   signal:         n, signal       (optional series column: protocol)
//   nr_sweep:       n_r, improvement
//   field_sweep:    b0_mt, improvement  (optional series column: n_r)
std::string render_plot(PlotKind kind, const CsvTable& table);

void render_plot_file(PlotKind kind, const std::string& csv_path, const std::string& svg_path);

}  // namespace nvrr
