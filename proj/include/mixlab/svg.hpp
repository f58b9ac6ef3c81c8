#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace mixlab {

struct PlotSeries {
  std::string name;
  std::vector<double> x, y;
  std::string color = "#1f77b4";
};

/// Self-contained SVG line plot (no external assets). Output bytes depend
/// only on the inputs, so re-rendering a stored series is reproducible.
inline void write_svg_plot(const std::string& path, const std::string& title,
                           const std::vector<PlotSeries>& series, bool log_y = false) {
  const double width = 820, height = 500;
  const double ml = 70, mr = 20, mt = 40, mb = 50;  // margins
  auto fmt = [](double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.6g", v);
    return std::string(buf);
  };

  double xmin = 0, xmax = 1, ymin = 0, ymax = 1;
  bool first = true;
  for (const auto& s : series) {
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      const double yv = s.y[i];
      if (log_y && yv <= 0.0) continue;
      const double yy = log_y ? std::log10(yv) : yv;
      if (first) {
        xmin = xmax = s.x[i];
        ymin = ymax = yy;
        first = false;
      } else {
        xmin = std::min(xmin, s.x[i]);
        xmax = std::max(xmax, s.x[i]);
        ymin = std::min(ymin, yy);
        ymax = std::max(ymax, yy);
      }
    }
  }
  if (first) { xmin = 0; xmax = 1; ymin = 0; ymax = 1; }
  if (xmax - xmin < 1e-30) xmax = xmin + 1.0;
  if (ymax - ymin < 1e-30) ymax = ymin + 1.0;

  auto sx = [&](double x) { return ml + (x - xmin) / (xmax - xmin) * (width - ml - mr); };
  auto sy = [&](double yv) {
    const double yy = log_y ? std::log10(yv) : yv;
    return height - mb - (yy - ymin) / (ymax - ymin) * (height - mt - mb);
  };

  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\""
      << height << "\" viewBox=\"0 0 " << width << " " << height << "\">\n";
  out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  out << "<text x=\"" << width / 2 << "\" y=\"24\" text-anchor=\"middle\" "
      << "font-family=\"sans-serif\" font-size=\"16\">" << title
      << (log_y ? " (log scale)" : "") << "</text>\n";
  // axes
  out << "<line x1=\"" << ml << "\" y1=\"" << height - mb << "\" x2=\"" << width - mr
      << "\" y2=\"" << height - mb << "\" stroke=\"black\"/>\n";
  out << "<line x1=\"" << ml << "\" y1=\"" << mt << "\" x2=\"" << ml << "\" y2=\""
      << height - mb << "\" stroke=\"black\"/>\n";
  // ticks
  for (int k = 0; k <= 5; ++k) {
    const double fx = xmin + (xmax - xmin) * k / 5.0;
    const double px = sx(fx);
    out << "<line x1=\"" << fmt(px) << "\" y1=\"" << height - mb << "\" x2=\"" << fmt(px)
        << "\" y2=\"" << height - mb + 5 << "\" stroke=\"black\"/>\n";
    out << "<text x=\"" << fmt(px) << "\" y=\"" << height - mb + 20
        << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"11\">"
        << fmt(fx) << "</text>\n";
    const double fy = ymin + (ymax - ymin) * k / 5.0;
    const double py = height - mb - (fy - ymin) / (ymax - ymin) * (height - mt - mb);
    out << "<line x1=\"" << ml - 5 << "\" y1=\"" << fmt(py) << "\" x2=\"" << ml
        << "\" y2=\"" << fmt(py) << "\" stroke=\"black\"/>\n";
    out << "<text x=\"" << ml - 8 << "\" y=\"" << fmt(py + 4)
        << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">"
        << fmt(log_y ? std::pow(10.0, fy) : fy) << "</text>\n";
  }
  // series
  int legend_row = 0;
  for (const auto& s : series) {
    out << "<polyline fill=\"none\" stroke=\"" << s.color << "\" stroke-width=\"1.5\" points=\"";
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      if (log_y && s.y[i] <= 0.0) continue;
      out << fmt(sx(s.x[i])) << ',' << fmt(sy(s.y[i])) << ' ';
    }
    out << "\"/>\n";
    const double ly = mt + 16.0 * legend_row++;
    out << "<line x1=\"" << width - mr - 150 << "\" y1=\"" << fmt(ly) << "\" x2=\""
        << width - mr - 125 << "\" y2=\"" << fmt(ly) << "\" stroke=\"" << s.color
        << "\" stroke-width=\"2\"/>\n";
    out << "<text x=\"" << width - mr - 120 << "\" y=\"" << fmt(ly + 4)
        << "\" font-family=\"sans-serif\" font-size=\"12\">" << s.name << "</text>\n";
  }
  out << "</svg>\n";
}

}  // namespace mixlab
