#pragma once

#include <string>
#include <utility>
#include <vector>

#include "moranipd/analysis.hpp"

namespace moranipd {

// Hand-rolled standalone SVG charts. CSVs remain the source of truth; these
// exist so a run is inspectable without a plotting stack.
struct SvgSeries {
  std::string label;
  std::vector<std::pair<double, double>> points;
};

std::string line_chart_svg(const std::string& title, const std::string& x_label,
                           const std::string& y_label, const std::vector<SvgSeries>& series,
                           bool invert_y = false);

// ns label both axes; values expected in [-1, 1] (blue-white-red).
std::string heatmap_svg(const std::string& title, const std::vector<int>& ns,
                        const std::vector<std::vector<double>>& values);

// Rank-vs-N trajectories, one line per strategy (rank 1 on top).
std::string rank_lines_svg(const std::vector<RankTable>& tables);

std::string correlation_heatmap_svg(const CorrelationMatrix& m);

std::string cooperation_rate_svg(const std::string& strategy_name,
                                 const std::vector<double>& rates);

}  // namespace moranipd
