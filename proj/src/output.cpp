#include "ridgeless/output.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>
#include <tuple>

#include "ridgeless/errors.hpp"
#include "ridgeless/format.hpp"

#ifndef RIDGELESS_GIT_DESCRIBE
#define RIDGELESS_GIT_DESCRIBE "unknown"
#endif

namespace ridgeless {
namespace {

constexpr double kWidth = 760.0;
constexpr double kHeight = 480.0;
constexpr double kLeft = 80.0;
constexpr double kRight = 200.0;
constexpr double kTop = 40.0;
constexpr double kBottom = 60.0;

const char* const kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd",
                                "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf"};

std::string escape(const std::string& text) {
  std::string out;
  for (char ch : text) {
    switch (ch) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += ch;
    }
  }
  return out;
}

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

std::string tick_label(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4g", v);
  return buf;
}

// Roughly five "nice" ticks covering [lo, hi].
std::vector<double> nice_ticks(double lo, double hi) {
  const double span = hi - lo;
  const double raw = span / 5.0;
  const double mag = std::pow(10.0, std::floor(std::log10(raw)));
  double step = mag;
  for (double m : {1.0, 2.0, 5.0, 10.0}) {
    step = m * mag;
    if (step >= raw) break;
  }
  std::vector<double> out;
  for (double t = std::ceil(lo / step) * step; t <= hi + 1e-9 * span; t += step) {
    out.push_back(std::abs(t) < 1e-12 * span ? 0.0 : t);
  }
  return out;
}

}  // namespace

void write_svg(const std::filesystem::path& path, const std::string& title,
               const std::string& x_label, const std::string& y_label,
               const std::vector<PlotSeries>& series) {
  double xmin = std::numeric_limits<double>::infinity(), xmax = -xmin;
  double ymin = xmin, ymax = -xmin;
  for (const PlotSeries& s : series) {
    for (const auto& [x, y] : s.points) {
      if (!std::isfinite(x) || !std::isfinite(y)) continue;
      xmin = std::min(xmin, x);
      xmax = std::max(xmax, x);
      ymin = std::min(ymin, y);
      ymax = std::max(ymax, y);
    }
  }
  if (!std::isfinite(xmin)) {
    xmin = 0.0, xmax = 1.0, ymin = 0.0, ymax = 1.0;
  }
  if (xmax <= xmin) xmax = xmin + 1.0;
  if (ymax <= ymin) {
    const double pad = ymin == 0.0 ? 1.0 : std::abs(ymin) * 0.1;
    ymin -= pad;
    ymax += pad;
  }
  ymin = std::min(ymin, 0.0);

  const double pw = kWidth - kLeft - kRight;
  const double ph = kHeight - kTop - kBottom;
  auto sx = [&](double x) { return kLeft + (x - xmin) / (xmax - xmin) * pw; };
  auto sy = [&](double y) { return kTop + (1.0 - (y - ymin) / (ymax - ymin)) * ph; };

  std::ostringstream os;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\""
     << kHeight << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  os << "<text x=\"" << num(kLeft + pw / 2) << "\" y=\"24\" text-anchor=\"middle\" font-size=\"15\">"
     << escape(title) << "</text>\n";
  os << "<rect x=\"" << num(kLeft) << "\" y=\"" << num(kTop) << "\" width=\"" << num(pw)
     << "\" height=\"" << num(ph) << "\" fill=\"none\" stroke=\"black\"/>\n";

  for (double t : nice_ticks(xmin, xmax)) {
    os << "<line x1=\"" << num(sx(t)) << "\" y1=\"" << num(kTop + ph) << "\" x2=\"" << num(sx(t))
       << "\" y2=\"" << num(kTop + ph + 5) << "\" stroke=\"black\"/>"
       << "<text x=\"" << num(sx(t)) << "\" y=\"" << num(kTop + ph + 18)
       << "\" text-anchor=\"middle\">" << tick_label(t) << "</text>\n";
  }
  for (double t : nice_ticks(ymin, ymax)) {
    os << "<line x1=\"" << num(kLeft - 5) << "\" y1=\"" << num(sy(t)) << "\" x2=\"" << num(kLeft)
       << "\" y2=\"" << num(sy(t)) << "\" stroke=\"black\"/>"
       << "<text x=\"" << num(kLeft - 8) << "\" y=\"" << num(sy(t) + 4)
       << "\" text-anchor=\"end\">" << tick_label(t) << "</text>\n";
  }
  os << "<text x=\"" << num(kLeft + pw / 2) << "\" y=\"" << num(kHeight - 15)
     << "\" text-anchor=\"middle\">" << escape(x_label) << "</text>\n";
  os << "<text transform=\"translate(18," << num(kTop + ph / 2)
     << ") rotate(-90)\" text-anchor=\"middle\">" << escape(y_label) << "</text>\n";

  for (std::size_t i = 0; i < series.size(); ++i) {
    const char* color = kPalette[i % std::size(kPalette)];
    std::string pts;
    for (const auto& [x, y] : series[i].points) {
      if (!std::isfinite(x) || !std::isfinite(y)) continue;
      pts += num(sx(x)) + "," + num(sy(y)) + " ";
      os << "<circle cx=\"" << num(sx(x)) << "\" cy=\"" << num(sy(y)) << "\" r=\"2.5\" fill=\""
         << color << "\"/>\n";
    }
    if (!pts.empty()) pts.pop_back();
    os << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\""
       << pts << "\"/>\n";
    const double ly = kTop + 10 + 18.0 * static_cast<double>(i);
    os << "<line x1=\"" << num(kLeft + pw + 12) << "\" y1=\"" << num(ly) << "\" x2=\""
       << num(kLeft + pw + 32) << "\" y2=\"" << num(ly) << "\" stroke=\"" << color
       << "\" stroke-width=\"2\"/>"
       << "<text x=\"" << num(kLeft + pw + 38) << "\" y=\"" << num(ly + 4) << "\">"
       << escape(series[i].label) << "</text>\n";
  }
  os << "</svg>\n";

  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write '" + path.string() + "'");
  out << os.str();
}

std::vector<PlotSeries> series_for_stat(const ResultTable& table, const std::string& stat,
                                        const std::string& label_prefix) {
  using Key = std::tuple<std::size_t, std::size_t, std::string, std::string, std::string,
                         std::string, std::string>;
  auto text = [](const std::optional<double>& v) { return v ? format_double(*v) : std::string(); };
  std::map<Key, std::size_t> index;
  std::vector<PlotSeries> out;
  for (const ResultRow& row : table) {
    if (row.stat != stat || !row.M) continue;
    const Key key{row.n, row.d, row.F ? std::to_string(*row.F) : "", text(row.rho2),
                  text(row.eps), text(row.alpha), text(row.snr)};
    auto [it, inserted] = index.emplace(key, out.size());
    if (inserted) {
      std::string label = label_prefix + "n=" + std::to_string(row.n) + " d=" + std::to_string(row.d);
      if (row.F) label += " F=" + std::to_string(*row.F);
      if (row.rho2) label += " rho2=" + format_double(*row.rho2);
      if (row.eps) label += " eps=" + format_double(*row.eps);
      out.push_back({label, {}});
    }
    out[it->second].points.emplace_back(static_cast<double>(*row.M), row.value);
  }
  return out;
}

std::filesystem::path output_stem(const std::filesystem::path& out) {
  std::filesystem::path stem = out;
  if (stem.extension() == ".csv") stem.replace_extension();
  return stem;
}

std::string git_describe() { return RIDGELESS_GIT_DESCRIBE; }

std::vector<std::filesystem::path> emit_outputs(const ResultTable& table,
                                                const std::filesystem::path& out, bool plot,
                                                const Provenance& provenance) {
  const std::filesystem::path stem = output_stem(out);
  if (stem.has_parent_path()) std::filesystem::create_directories(stem.parent_path());
  auto with_suffix = [&stem](const std::string& suffix) {
    return std::filesystem::path(stem.string() + suffix);
  };
  std::vector<std::filesystem::path> written;

  written.push_back(with_suffix(".csv"));
  write_csv(table, written.back());

  written.push_back(with_suffix(".provenance.txt"));
  {
    std::ofstream prov(written.back(), std::ios::binary);
    if (!prov) throw Error("cannot write '" + written.back().string() + "'");
    prov << "command=" << provenance.command << '\n'
         << "git_describe=" << git_describe() << '\n'
         << "config_hash=" << provenance.config_hash << '\n'
         << "constants=" << provenance.constants << '\n'
         << "threads=" << provenance.threads << '\n'
         << "wall_seconds=" << format_double(provenance.wall_seconds) << '\n'
         << "rows=" << table.size() << '\n'
         << "[config]\n"
         << provenance.config_canonical;
  }

  if (plot) {
    const std::string name = stem.filename().string();
    for (const char* stat : {"risk", "test_mse", "cond_risk"}) {
      const std::vector<PlotSeries> series = series_for_stat(table, stat);
      if (series.empty()) continue;
      written.push_back(with_suffix(".svg"));
      write_svg(written.back(), name + ": " + stat + " vs M", "M", stat, series);
      break;
    }
    std::vector<PlotSeries> bounds;
    for (const char* stat : {"total_bound", "lower_bound", "universal_lower"}) {
      for (PlotSeries& s : series_for_stat(table, stat, std::string(stat) + " ")) {
        bounds.push_back(std::move(s));
      }
    }
    if (!bounds.empty()) {
      written.push_back(with_suffix("_bounds.svg"));
      write_svg(written.back(), name + ": bounds vs M", "M", "bound", bounds);
    }
  }
  return written;
}

}  // namespace ridgeless
