#include "mirrorsim/report.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <ostream>

#include <fmt/format.h>

#include "mirrorsim/constants.hpp"
#include "mirrorsim/errors.hpp"

namespace mirrorsim {

namespace fs = std::filesystem;

void Table::add_row(std::vector<std::string> cells) {
  if (cells.size() != columns.size()) {
    throw std::logic_error(fmt::format("table row has {} cells, expected {}", cells.size(), columns.size()));
  }
  rows.push_back(std::move(cells));
}

std::string cell(double value) { return fmt::format("{}", value); }
std::string cell(long value) { return fmt::format("{}", value); }
std::string cell(int value) { return fmt::format("{}", value); }
std::string cell(bool value) { return value ? "1" : "0"; }
std::string cell(const std::optional<double>& value) { return value ? cell(*value) : std::string(); }

void write_table_csv(std::ostream& out, const Table& table) {
  for (std::size_t i = 0; i < table.columns.size(); ++i) out << (i ? "," : "") << table.columns[i];
  out << '\n';
  for (const auto& row : table.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << row[i];
    out << '\n';
  }
}

namespace {

std::string escape_xml(const std::string& s) {
  std::string r;
  for (char c : s) {
    switch (c) {
      case '<': r += "&lt;"; break;
      case '>': r += "&gt;"; break;
      case '&': r += "&amp;"; break;
      case '"': r += "&quot;"; break;
      default: r += c;
    }
  }
  return r;
}

constexpr const char* kPalette[] = {"#1f4e9c", "#c0392b", "#2e8b57", "#8e44ad", "#d35400"};
constexpr std::size_t kMaxPoints = 4000;

void write_file(const fs::path& path, const std::function<void(std::ostream&)>& body) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ExperimentError(fmt::format("cannot write {}", path.string()));
  body(out);
  if (!out) throw ExperimentError(fmt::format("write failed: {}", path.string()));
}

// Numeric columns of the summary table plotted against the first one.
std::vector<PlotSeries> summary_series(const Table& table) {
  std::vector<PlotSeries> series;
  if (table.columns.size() < 2 || table.rows.empty()) return series;
  for (std::size_t c = 1; c < table.columns.size(); ++c) {
    PlotSeries s{table.columns[c], {}, {}};
    for (const auto& row : table.rows) {
      if (row[0].empty() || row[c].empty()) continue;
      s.x.push_back(std::stod(row[0]));
      s.y.push_back(std::stod(row[c]));
    }
    if (!s.x.empty()) series.push_back(std::move(s));
  }
  return series;
}

}  // namespace

void write_svg_plot(std::ostream& out, const std::string& title, const std::string& x_label,
                    const std::string& y_label, const std::vector<PlotSeries>& series) {
  constexpr double W = 720, H = 440, L = 90, R = 170, T = 40, B = 60;
  double x0 = INFINITY, x1 = -INFINITY, y0 = INFINITY, y1 = -INFINITY;
  for (const auto& s : series) {
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) continue;
      x0 = std::min(x0, s.x[i]);
      x1 = std::max(x1, s.x[i]);
      y0 = std::min(y0, s.y[i]);
      y1 = std::max(y1, s.y[i]);
    }
  }
  if (!(x0 <= x1)) x0 = 0, x1 = 1;
  if (!(y0 <= y1)) y0 = 0, y1 = 1;
  if (x1 == x0) x1 = x0 + 1;
  if (y1 == y0) y0 -= 0.5, y1 += 0.5;
  auto px = [&](double x) { return L + (x - x0) / (x1 - x0) * (W - L - R); };
  auto py = [&](double y) { return H - B - (y - y0) / (y1 - y0) * (H - T - B); };

  out << fmt::format(R"(<svg xmlns="http://www.w3.org/2000/svg" width="{}" height="{}" font-family="sans-serif" font-size="12">)",
                     W, H)
      << '\n';
  out << fmt::format(R"(<rect x="0" y="0" width="{}" height="{}" fill="white"/>)", W, H) << '\n';
  out << fmt::format(R"(<text x="{}" y="22" text-anchor="middle" font-size="14">{}</text>)", W / 2, escape_xml(title))
      << '\n';
  out << fmt::format(R"(<rect x="{}" y="{}" width="{}" height="{}" fill="none" stroke="black"/>)", L, T, W - L - R,
                     H - T - B)
      << '\n';
  out << fmt::format(R"(<text x="{}" y="{}" text-anchor="middle">{:.4g}</text>)", L, H - B + 16, x0) << '\n';
  out << fmt::format(R"(<text x="{}" y="{}" text-anchor="middle">{:.4g}</text>)", W - R, H - B + 16, x1) << '\n';
  out << fmt::format(R"(<text x="{}" y="{}" text-anchor="end">{:.4g}</text>)", L - 6, H - B, y0) << '\n';
  out << fmt::format(R"(<text x="{}" y="{}" text-anchor="end">{:.4g}</text>)", L - 6, T + 10, y1) << '\n';
  out << fmt::format(R"(<text x="{}" y="{}" text-anchor="middle">{}</text>)", L + (W - L - R) / 2, H - 20,
                     escape_xml(x_label))
      << '\n';
  out << fmt::format(R"svg(<text x="20" y="{}" text-anchor="middle" transform="rotate(-90 20 {})">{}</text>)svg",
                     T + (H - T - B) / 2, T + (H - T - B) / 2, escape_xml(y_label))
      << '\n';

  for (std::size_t k = 0; k < series.size(); ++k) {
    const auto& s = series[k];
    const char* color = kPalette[k % std::size(kPalette)];
    const std::size_t stride = std::max<std::size_t>(1, s.x.size() / kMaxPoints);
    out << fmt::format(R"(<polyline fill="none" stroke="{}" stroke-width="1.2" points=")", color);
    for (std::size_t i = 0; i < s.x.size(); i += stride) {
      if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) continue;
      out << fmt::format("{:.2f},{:.2f} ", px(s.x[i]), py(s.y[i]));
    }
    out << "\"/>\n";
    const double ly = T + 16 + 18 * static_cast<double>(k);
    out << fmt::format(R"(<line x1="{}" y1="{}" x2="{}" y2="{}" stroke="{}" stroke-width="2"/>)", W - R + 10, ly - 4,
                       W - R + 30, ly - 4, color)
        << '\n';
    out << fmt::format(R"(<text x="{}" y="{}">{}</text>)", W - R + 36, ly, escape_xml(s.label)) << '\n';
  }
  out << "</svg>\n";
}

std::vector<fs::path> write_report(const ExperimentReport& report, const fs::path& dir, bool plot) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw ExperimentError(fmt::format("cannot create {}: {}", dir.string(), ec.message()));

  std::vector<fs::path> written;
  const fs::path config_path = dir / "resolved_config.json";
  write_file(config_path, [&](std::ostream& o) { o << report.config.dump(2) << '\n'; });
  written.push_back(config_path);

  if (!report.summary.columns.empty()) {
    const fs::path p = dir / (report.name + "_summary.csv");
    write_file(p, [&](std::ostream& o) { write_table_csv(o, report.summary); });
    written.push_back(p);
    if (plot) {
      const fs::path svg = dir / (report.name + "_summary.svg");
      write_file(svg, [&](std::ostream& o) {
        write_svg_plot(o, report.name + " summary", report.summary.columns.front(), "value",
                       summary_series(report.summary));
      });
      written.push_back(svg);
    }
  }

  for (const auto& named : report.traces) {
    const std::string stem = report.name + "_" + named.name;
    const fs::path p = dir / (stem + ".csv");
    write_file(p, [&](std::ostream& o) { write_trace_csv(o, named.trace); });
    written.push_back(p);
    if (plot) {
      PlotSeries s{"theta (deg)", {}, {}};
      for (const auto& r : named.trace.rows) {
        s.x.push_back(r.t);
        s.y.push_back(rad_to_deg(r.theta));
      }
      const fs::path svg = dir / (stem + ".svg");
      write_file(svg, [&](std::ostream& o) { write_svg_plot(o, stem, "t (s)", "theta (deg)", {s}); });
      written.push_back(svg);
    }
  }

  nlohmann::json manifest{{"experiment", report.name},
                          {"config", report.config},
                          {"metadata", report.metadata},
                          {"warnings", report.warnings}};
  nlohmann::json outputs = nlohmann::json::array();
  for (const auto& p : written) outputs.push_back(p.filename().string());
  manifest["outputs"] = outputs;
  const fs::path manifest_path = dir / "manifest.json";
  write_file(manifest_path, [&](std::ostream& o) { o << manifest.dump(2) << '\n'; });
  written.push_back(manifest_path);
  return written;
}

}  // namespace mirrorsim
