#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "nvrr/svg.hpp"

using namespace nvrr;

namespace {

CsvTable fidelity_table() {
  CsvTable t;
  t.header = {"n", "signal", "f"};
  for (int n : {1, 10, 100, 1000, 5000})
    t.rows.push_back({std::to_string(n), std::to_string(0.001 * n), std::to_string(0.01 * n / 50.0)});
  return t;
}

}  // namespace

TEST_CASE("plot kinds parse from strings") {
  CHECK(plot_kind_from_string("fidelity_curve") == PlotKind::fidelity_curve);
  CHECK(plot_kind_from_string("field_sweep") == PlotKind::field_sweep);
  CHECK_THROWS_AS(plot_kind_from_string("pie"), invalid_argument);
}

TEST_CASE("rendering is deterministic") {
  const auto table = fidelity_table();
  const std::string a = render_plot(PlotKind::fidelity_curve, table);
  const std::string b = render_plot(PlotKind::fidelity_curve, table);
  CHECK(a == b);
  CHECK(a.rfind("<svg", 0) == 0);
  CHECK(a.find("</svg>") != std::string::npos);
  CHECK(a.find("polyline") != std::string::npos);
  // Log axis decade labels for the readout-number axis.
  CHECK(a.find(">100<") != std::string::npos);
  CHECK(a.find(">1000<") != std::string::npos);
}

TEST_CASE("series column groups polylines") {
  CsvTable t;
  t.header = {"b0_mt", "improvement", "n_r"};
  for (int nr : {1, 5})
    for (int b : {20, 50, 80, 120})
      t.rows.push_back({std::to_string(b), std::to_string(1.0 + 0.5 / nr), std::to_string(nr)});
  const std::string svg = render_plot(PlotKind::field_sweep, t);
  size_t count = 0;
  for (size_t pos = svg.find("<polyline"); pos != std::string::npos;
       pos = svg.find("<polyline", pos + 1))
    ++count;
  CHECK(count == 2);
  CHECK(svg.find("#1f77b4") != std::string::npos);
  CHECK(svg.find("#d62728") != std::string::npos);
}

TEST_CASE("schema violations are reported") {
  CsvTable empty;
  empty.header = {"n", "f"};
  CHECK_THROWS_AS(render_plot(PlotKind::fidelity_curve, empty), schema_mismatch);

  CsvTable wrong;
  wrong.header = {"x", "y"};
  wrong.rows.push_back({"1", "2"});
  CHECK_THROWS_AS(render_plot(PlotKind::fidelity_curve, wrong), schema_mismatch);

  CsvTable bad_value;
  bad_value.header = {"n_r", "improvement"};
  bad_value.rows.push_back({"1", "fast"});
  CHECK_THROWS_AS(render_plot(PlotKind::nr_sweep, bad_value), schema_mismatch);

  CsvTable log_zero;
  log_zero.header = {"n", "f"};
  log_zero.rows.push_back({"0", "0.1"});
  CHECK_THROWS_AS(render_plot(PlotKind::fidelity_curve, log_zero), schema_mismatch);
}
