#include "moranipd/svg_plot.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <sstream>

namespace moranipd {
namespace {

// Categorical palette (tab10), cycled per series.
constexpr const char* kPalette[] = {
    "#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd",
    "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf",
};
constexpr int kPaletteSize = 10;

std::string svg_escape(const std::string& text) {
  std::string out;
  out.reserve(text.size());
  for (char c : text) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c; break;
    }
  }
  return out;
}

std::string fmt_g(double v, int precision = 4) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*g", precision, v);
  return buf;
}

std::string fmt_f(double v, int decimals) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*f", decimals, v);
  return buf;
}

struct Range {
  double lo = 0.0;
  double hi = 1.0;
  void expand(double v) {
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
};

// Pads and un-degenerates a data range so the scale never divides by zero.
Range padded(double lo, double hi, double frac) {
  if (!(lo <= hi)) {
    lo = 0.0;
    hi = 1.0;
  }
  double span = hi - lo;
  if (span <= 0.0) {
    double bump = std::max(1.0, std::abs(lo)) * 0.5;
    return {lo - bump, hi + bump};
  }
  return {lo - span * frac, hi + span * frac};
}

// "Nice" tick positions covering [lo, hi] with roughly `target` steps.
std::vector<double> ticks_for(double lo, double hi, int target) {
  double span = hi - lo;
  double raw = span / std::max(1, target);
  double mag = std::pow(10.0, std::floor(std::log10(raw)));
  double step = mag;
  for (double m : {1.0, 2.0, 2.5, 5.0, 10.0}) {
    if (mag * m >= raw) {
      step = mag * m;
      break;
    }
  }
  std::vector<double> out;
  double first = std::ceil(lo / step) * step;
  for (double t = first; t <= hi + step * 1e-9; t += step) {
    // Snap near-zero ticks so "-0" never renders.
    out.push_back(std::abs(t) < step * 1e-9 ? 0.0 : t);
  }
  return out;
}

// Blue (-1) -> white (0) -> red (+1) for correlation cells.
std::string diverging_color(double v) {
  v = std::clamp(v, -1.0, 1.0);
  int r, g, b;
  if (v >= 0.0) {
    r = 215 + static_cast<int>(std::lround((255 - 215) * (1.0 - v)));
    g = 48 + static_cast<int>(std::lround((255 - 48) * (1.0 - v)));
    b = 39 + static_cast<int>(std::lround((255 - 39) * (1.0 - v)));
  } else {
    r = 69 + static_cast<int>(std::lround((255 - 69) * (1.0 + v)));
    g = 117 + static_cast<int>(std::lround((255 - 117) * (1.0 + v)));
    b = 180 + static_cast<int>(std::lround((255 - 180) * (1.0 + v)));
  }
  char buf[8];
  std::snprintf(buf, sizeof(buf), "#%02x%02x%02x", r, g, b);
  return buf;
}

}  // namespace

std::string line_chart_svg(const std::string& title, const std::string& x_label,
                           const std::string& y_label, const std::vector<SvgSeries>& series,
                           bool invert_y) {
  const double width = 860.0, height = 520.0;
  const double ml = 70.0, mr = 190.0, mt = 48.0, mb = 56.0;
  const double pw = width - ml - mr;   // plot width
  const double ph = height - mt - mb;  // plot height

  bool any = false;
  double xlo = 0.0, xhi = 1.0, ylo = 0.0, yhi = 1.0;
  for (const auto& s : series) {
    for (const auto& [x, y] : s.points) {
      if (!any) {
        xlo = xhi = x;
        ylo = yhi = y;
        any = true;
      } else {
        xlo = std::min(xlo, x);
        xhi = std::max(xhi, x);
        ylo = std::min(ylo, y);
        yhi = std::max(yhi, y);
      }
    }
  }
  Range xr = padded(xlo, xhi, 0.03);
  Range yr = padded(ylo, yhi, 0.06);

  auto px = [&](double x) { return ml + (x - xr.lo) / (xr.hi - xr.lo) * pw; };
  auto py = [&](double y) {
    double f = (y - yr.lo) / (yr.hi - yr.lo);
    if (invert_y) f = 1.0 - f;
    return mt + (1.0 - f) * ph;
  };

  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\""
      << height << "\" viewBox=\"0 0 " << width << " " << height << "\">\n";
  svg << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  svg << "<text x=\"" << ml + pw / 2 << "\" y=\"24\" text-anchor=\"middle\" "
      << "font-family=\"sans-serif\" font-size=\"16\" font-weight=\"bold\">"
      << svg_escape(title) << "</text>\n";

  // Gridlines + tick labels.
  for (double t : ticks_for(xr.lo, xr.hi, 8)) {
    double x = px(t);
    svg << "<line x1=\"" << x << "\" y1=\"" << mt << "\" x2=\"" << x << "\" y2=\"" << mt + ph
        << "\" stroke=\"#e0e0e0\"/>\n";
    svg << "<text x=\"" << x << "\" y=\"" << mt + ph + 18
        << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"11\">" << fmt_g(t)
        << "</text>\n";
  }
  for (double t : ticks_for(yr.lo, yr.hi, 6)) {
    double y = py(t);
    svg << "<line x1=\"" << ml << "\" y1=\"" << y << "\" x2=\"" << ml + pw << "\" y2=\"" << y
        << "\" stroke=\"#e0e0e0\"/>\n";
    svg << "<text x=\"" << ml - 8 << "\" y=\"" << y + 4
        << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">" << fmt_g(t)
        << "</text>\n";
  }
  svg << "<rect x=\"" << ml << "\" y=\"" << mt << "\" width=\"" << pw << "\" height=\"" << ph
      << "\" fill=\"none\" stroke=\"#404040\"/>\n";
  svg << "<text x=\"" << ml + pw / 2 << "\" y=\"" << height - 14
      << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\">"
      << svg_escape(x_label) << "</text>\n";
  svg << "<text x=\"20\" y=\"" << mt + ph / 2
      << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\" "
      << "transform=\"rotate(-90 20 " << mt + ph / 2 << ")\">" << svg_escape(y_label)
      << "</text>\n";

  // Series polylines, point markers, legend.
  for (std::size_t si = 0; si < series.size(); ++si) {
    const auto& s = series[si];
    const char* color = kPalette[si % kPaletteSize];
    if (s.points.size() > 1) {
      svg << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.8\" points=\"";
      for (const auto& [x, y] : s.points) svg << fmt_g(px(x), 6) << "," << fmt_g(py(y), 6) << " ";
      svg << "\"/>\n";
    }
    for (const auto& [x, y] : s.points) {
      svg << "<circle cx=\"" << fmt_g(px(x), 6) << "\" cy=\"" << fmt_g(py(y), 6)
          << "\" r=\"2.6\" fill=\"" << color << "\"/>\n";
    }
    double ly = mt + 10 + static_cast<double>(si) * 18;
    svg << "<rect x=\"" << ml + pw + 14 << "\" y=\"" << ly - 8
        << "\" width=\"12\" height=\"12\" fill=\"" << color << "\"/>\n";
    svg << "<text x=\"" << ml + pw + 32 << "\" y=\"" << ly + 3
        << "\" font-family=\"sans-serif\" font-size=\"11\">" << svg_escape(s.label)
        << "</text>\n";
  }
  svg << "</svg>\n";
  return svg.str();
}

std::string heatmap_svg(const std::string& title, const std::vector<int>& ns,
                        const std::vector<std::vector<double>>& values) {
  const int k = static_cast<int>(ns.size());
  const double cell = 46.0;
  const double ml = 70.0, mt = 56.0;
  const double width = ml + cell * k + 40.0;
  const double height = mt + cell * k + 50.0;

  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\""
      << height << "\" viewBox=\"0 0 " << width << " " << height << "\">\n";
  svg << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  svg << "<text x=\"" << ml + cell * k / 2 << "\" y=\"26\" text-anchor=\"middle\" "
      << "font-family=\"sans-serif\" font-size=\"15\" font-weight=\"bold\">" << svg_escape(title)
      << "</text>\n";
  for (int row = 0; row < k; ++row) {
    for (int col = 0; col < k; ++col) {
      double v = values[static_cast<std::size_t>(row)][static_cast<std::size_t>(col)];
      double x = ml + cell * col;
      double y = mt + cell * row;
      svg << "<rect x=\"" << x << "\" y=\"" << y << "\" width=\"" << cell << "\" height=\""
          << cell << "\" fill=\"" << diverging_color(v) << "\" stroke=\"#ffffff\"/>\n";
      // Dark text on light cells, light text on saturated ones.
      const char* text_color = std::abs(v) > 0.6 ? "#ffffff" : "#202020";
      svg << "<text x=\"" << x + cell / 2 << "\" y=\"" << y + cell / 2 + 4
          << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"11\" fill=\""
          << text_color << "\">" << fmt_f(v, 2) << "</text>\n";
    }
  }
  for (int idx = 0; idx < k; ++idx) {
    svg << "<text x=\"" << ml + cell * idx + cell / 2 << "\" y=\"" << mt + cell * k + 18
        << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\">N="
        << ns[static_cast<std::size_t>(idx)] << "</text>\n";
    svg << "<text x=\"" << ml - 8 << "\" y=\"" << mt + cell * idx + cell / 2 + 4
        << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"12\">N="
        << ns[static_cast<std::size_t>(idx)] << "</text>\n";
  }
  svg << "</svg>\n";
  return svg.str();
}

std::string rank_lines_svg(const std::vector<RankTable>& tables) {
  std::map<std::string, SvgSeries> by_name;
  std::string kind = tables.empty() ? "" : start_kind_name(tables.front().kind);
  for (const auto& table : tables) {
    for (const auto& row : table.rows) {
      auto& s = by_name[row.name];
      s.label = row.name;
      s.points.emplace_back(static_cast<double>(table.n), static_cast<double>(row.rank));
    }
  }
  std::vector<SvgSeries> series;
  series.reserve(by_name.size());
  for (auto& [name, s] : by_name) series.push_back(std::move(s));
  return line_chart_svg("Strategy rank vs population size (" + kind + ")", "population size N",
                        "rank (1 = best)", series, /*invert_y=*/true);
}

std::string correlation_heatmap_svg(const CorrelationMatrix& m) {
  return heatmap_svg(std::string("Rank correlation across population sizes (") +
                         start_kind_name(m.kind) + ")",
                     m.ns, m.rho);
}

std::string cooperation_rate_svg(const std::string& strategy_name,
                                 const std::vector<double>& rates) {
  SvgSeries s;
  s.label = strategy_name;
  for (std::size_t r = 0; r < rates.size(); ++r) {
    s.points.emplace_back(static_cast<double>(r + 1), rates[r]);
  }
  return line_chart_svg("Per-round cooperation rate: " + strategy_name, "round",
                        "cooperation rate", {std::move(s)});
}

}  // namespace moranipd
