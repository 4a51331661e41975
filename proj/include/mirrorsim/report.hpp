#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "mirrorsim/dynamics.hpp"

namespace mirrorsim {

/// Summary table with preformatted cells. Numbers use the shortest
/// round-trip decimal form; missing values are empty cells.
struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;

  void add_row(std::vector<std::string> cells);
};

std::string cell(double value);
std::string cell(long value);
std::string cell(int value);
std::string cell(bool value);
std::string cell(const std::optional<double>& value);

struct NamedTrace {
  std::string name;
  Trace trace;
};

struct ExperimentReport {
  std::string name;
  nlohmann::json config;    // resolved parameters the run used
  nlohmann::json metadata;  // thresholds, scale notes, derived quantities
  Table summary;
  std::vector<NamedTrace> traces;
  std::vector<std::string> warnings;
};

void write_table_csv(std::ostream& out, const Table& table);

struct PlotSeries {
  std::string label;
  std::vector<double> x;
  std::vector<double> y;
};

/// Line chart: one polyline per series, framed axes with min/max tick labels.
void write_svg_plot(std::ostream& out, const std::string& title, const std::string& x_label,
                    const std::string& y_label, const std::vector<PlotSeries>& series);

/// Writes `<name>_summary.csv`, one `<name>_<trace>.csv` per trace and, with
/// `plot`, matching `.svg` files, plus `resolved_config.json` and
/// `manifest.json`. Returns every path written, manifest last.
std::vector<std::filesystem::path> write_report(const ExperimentReport& report, const std::filesystem::path& dir,
                                                bool plot);

}  // namespace mirrorsim
