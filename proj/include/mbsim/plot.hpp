// Copyright 2026 The mbsim Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Static SVG line plots drawn from a RunRecord table.

#ifndef MBSIM_PLOT_HPP_
#define MBSIM_PLOT_HPP_

#include <limits>
#include <map>
#include <string>
#include <vector>

#include "mbsim/experiments.hpp"

namespace mbsim {

struct PlotSpec {
  std::string x;
  std::vector<std::string> y;
  std::vector<std::string> series;  // columns whose values split rows into lines
  std::string title;
};

inline std::string svg_plot(const RunRecord& r, const PlotSpec& spec) {
  std::map<std::string, std::vector<std::pair<double, double>>> lines;
  for (std::size_t k = 0; k < r.rows.size(); ++k)
    for (auto& y : spec.y) {
      std::string key = y;
      for (auto& s : spec.series) key += " " + s + "=" + r.text(k, s);
      lines[key].push_back({r.number(k, spec.x), r.number(k, y)});
    }
  double x0 = std::numeric_limits<double>::infinity(), x1 = -x0, y0 = x0, y1 = -x0;
  for (auto& [_, pts] : lines)
    for (auto [x, y] : pts) x0 = std::min(x0, x), x1 = std::max(x1, x), y0 = std::min(y0, y), y1 = std::max(y1, y);
  if (!(x1 > x0)) x1 = x0 + 1;
  if (!(y1 > y0)) y1 = y0 + 1;
  const double W = 640, H = 400, L = 60, R = 200, T = 30, B = 40;
  auto px = [&](double x) { return L + (x - x0) / (x1 - x0) * (W - L - R); };
  auto py = [&](double y) { return H - B - (y - y0) / (y1 - y0) * (H - T - B); };
  static const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#17becf"};
  std::ostringstream os;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H << "\">\n";
  os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  os << "<text x=\"" << L << "\" y=\"20\" font-size=\"14\">" << spec.title << "</text>\n";
  os << "<line x1=\"" << L << "\" y1=\"" << H - B << "\" x2=\"" << W - R << "\" y2=\"" << H - B
     << "\" stroke=\"black\"/>\n";
  os << "<line x1=\"" << L << "\" y1=\"" << T << "\" x2=\"" << L << "\" y2=\"" << H - B << "\" stroke=\"black\"/>\n";
  os << "<text x=\"" << L << "\" y=\"" << H - 10 << "\" font-size=\"11\">" << spec.x << " [" << fmt(x0) << ", "
     << fmt(x1) << "]</text>\n";
  os << "<text x=\"5\" y=\"" << T << "\" font-size=\"11\">" << fmt(y1) << "</text>\n";
  os << "<text x=\"5\" y=\"" << H - B << "\" font-size=\"11\">" << fmt(y0) << "</text>\n";
  int c = 0;
  for (auto& [name, pts] : lines) {
    const char* col = colors[c % 7];
    os << "<polyline fill=\"none\" stroke=\"" << col << "\" points=\"";
    for (auto [x, y] : pts) os << fmt(px(x)) << "," << fmt(py(y)) << " ";
    os << "\"/>\n";
    os << "<text x=\"" << W - R + 10 << "\" y=\"" << T + 15 * (c + 1) << "\" font-size=\"11\" fill=\"" << col
       << "\">" << name << "</text>\n";
    ++c;
  }
  os << "</svg>\n";
  return os.str();
}

// Default figure for each experiment; empty when the table has no natural x axis.
inline std::vector<PlotSpec> default_plots(const std::string& experiment) {
  if (experiment == "braid") return {{"delay_ns", {"bias"}, {"flavor", "start"}, "bias vs delay"}};
  if (experiment == "errorsweep")
    return {{"eps_cnot", {"bias"}, {"flavor"}, "bias vs CNOT error"},
            {"eps_cnot", {"subspace"}, {"flavor"}, "subspace population vs CNOT error"}};
  if (experiment == "protect") return {{"dalpha0", {"p_minus"}, {"tau"}, "P- vs local perturbation"}};
  if (experiment == "qpt") return {{"theta", {"f_double_cnot", "f_scaled"}, {}, "process fidelity"}};
  if (experiment == "pulse_compile")
    return {{"slice", {"duration_ratio", "cr_area_ratio"}, {}, "scaled / basis schedule ratios"}};
  return {};
}

}  // namespace mbsim

#endif  // MBSIM_PLOT_HPP_
