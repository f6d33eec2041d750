#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <string>
#include <vector>

#include "moranipd/analysis.hpp"
#include "moranipd/svg_plot.hpp"

using namespace moranipd;

namespace {

std::size_t count_of(const std::string& text, const std::string& needle) {
  std::size_t count = 0;
  for (std::size_t pos = text.find(needle); pos != std::string::npos;
       pos = text.find(needle, pos + needle.size()))
    ++count;
  return count;
}

bool is_svg_document(const std::string& text) {
  return text.rfind("<svg", 0) == 0 && text.find("</svg>") != std::string::npos &&
         text.find("xmlns=\"http://www.w3.org/2000/svg\"") != std::string::npos;
}

}  // namespace

TEST_CASE("line charts carry title, axes, series and legend") {
  SvgSeries a{"alpha", {{0.0, 0.0}, {1.0, 0.5}, {2.0, 1.0}}};
  SvgSeries b{"beta", {{0.0, 1.0}, {1.0, 0.5}, {2.0, 0.0}}};
  const std::string svg = line_chart_svg("Fixation vs N", "population size", "x_1", {a, b});

  CHECK(is_svg_document(svg));
  CHECK(svg.find("Fixation vs N") != std::string::npos);
  CHECK(svg.find("population size") != std::string::npos);
  CHECK(svg.find("x_1") != std::string::npos);
  CHECK(svg.find("alpha") != std::string::npos);
  CHECK(svg.find("beta") != std::string::npos);
  CHECK(count_of(svg, "<polyline") == 2);
  // One marker per data point.
  CHECK(count_of(svg, "<circle") >= 6);
}

TEST_CASE("line charts survive degenerate inputs") {
  CHECK(is_svg_document(line_chart_svg("empty", "x", "y", {})));
  CHECK(is_svg_document(line_chart_svg("empty series", "x", "y", {SvgSeries{"none", {}}})));
  // A single point has zero x/y extent; the range guard must still produce
  // finite coordinates (no "nan" anywhere).
  const std::string one = line_chart_svg("dot", "x", "y", {SvgSeries{"p", {{1.0, 1.0}}}});
  CHECK(is_svg_document(one));
  CHECK(one.find("nan") == std::string::npos);
  CHECK(one.find("inf") == std::string::npos);
}

TEST_CASE("markup special characters are escaped") {
  const std::string svg =
      line_chart_svg("a < b & c > d", "x", "y", {SvgSeries{"\"quoted\"", {{0, 0}, {1, 1}}}});
  CHECK(svg.find("a &lt; b &amp; c &gt; d") != std::string::npos);
  CHECK(svg.find("&quot;quoted&quot;") != std::string::npos);
  CHECK(svg.find("a < b") == std::string::npos);
}

TEST_CASE("heatmaps draw one cell per matrix entry") {
  const std::vector<int> ns{2, 3, 4};
  const std::vector<std::vector<double>> values{
      {1.0, 0.5, -0.25}, {0.5, 1.0, 0.0}, {-0.25, 0.0, 1.0}};
  const std::string svg = heatmap_svg("rank agreement", ns, values);
  CHECK(is_svg_document(svg));
  CHECK(svg.find("rank agreement") != std::string::npos);
  CHECK(count_of(svg, "<rect") >= 9);  // at least the 3x3 cells
  // Axis labels appear for both rows and columns.
  CHECK(count_of(svg, ">N=2<") == 2);
  CHECK(count_of(svg, ">N=4<") == 2);
  // Every cell prints its value.
  CHECK(count_of(svg, ">1.00<") >= 3);
  CHECK(svg.find(">-0.25<") != std::string::npos);
}

TEST_CASE("rank trajectories draw one line per strategy") {
  RankTable t2;
  t2.n = 2;
  t2.kind = StartKind::Invade;
  t2.neutral = 0.5;
  t2.rows = {{"A", 0.8, 1}, {"B", 0.2, 2}};
  RankTable t4;
  t4.n = 4;
  t4.kind = StartKind::Invade;
  t4.neutral = 0.25;
  t4.rows = {{"B", 0.7, 1}, {"A", 0.3, 2}};

  const std::string svg = rank_lines_svg({t2, t4});
  CHECK(is_svg_document(svg));
  CHECK(svg.find("invade") != std::string::npos);
  CHECK(svg.find("A") != std::string::npos);
  CHECK(svg.find("B") != std::string::npos);
  CHECK(count_of(svg, "<polyline") == 2);
}

TEST_CASE("correlation heatmaps wrap the matrix") {
  CorrelationMatrix m;
  m.kind = StartKind::Coexist;
  m.ns = {2, 3};
  m.rho = {{1.0, -1.0}, {-1.0, 1.0}};
  const std::string svg = correlation_heatmap_svg(m);
  CHECK(is_svg_document(svg));
  CHECK(svg.find("coexist") != std::string::npos);
  CHECK(svg.find(">-1.00<") != std::string::npos);
}

TEST_CASE("cooperation-rate charts plot one point per round") {
  const std::string svg = cooperation_rate_svg("Tit For Tat", {1.0, 0.5, 0.25, 0.75});
  CHECK(is_svg_document(svg));
  CHECK(svg.find("Tit For Tat") != std::string::npos);
  CHECK(count_of(svg, "<circle") >= 4);
  CHECK(count_of(svg, "<polyline") == 1);
}
