#include "gpx/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>

namespace gpx::svg {

namespace {

struct Mapper {
  double t_min, t_max, y_min, y_max;
  double x0, x1, y0, y1;  // pixel frame (y grows downward)

  double px(double t) const {
    return x0 + (t - t_min) / (t_max - t_min) * (x1 - x0);
  }
  double py(double y) const {
    return y1 - (y - y_min) / (y_max - y_min) * (y1 - y0);
  }
};

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f", v);
  return buf;
}

std::string fmt_tick(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%g", v);
  return buf;
}

// Per-bucket min/max decimation keeps extremes visible at any zoom budget.
void decimated_polyline(std::ofstream& out, const std::vector<double>& t,
                        const std::vector<double>& y, const Mapper& map,
                        const std::string& stroke, int max_points) {
  out << "  <polyline fill=\"none\" stroke=\"" << stroke
      << "\" stroke-width=\"1\" points=\"";
  const std::size_t n = t.size();
  if (n <= static_cast<std::size_t>(max_points)) {
    for (std::size_t i = 0; i < n; ++i)
      out << fmt(map.px(t[i])) << ',' << fmt(map.py(y[i])) << ' ';
  } else {
    const std::size_t buckets = static_cast<std::size_t>(max_points) / 2;
    for (std::size_t b = 0; b < buckets; ++b) {
      const std::size_t lo = b * n / buckets;
      const std::size_t hi = std::max(lo + 1, (b + 1) * n / buckets);
      std::size_t imin = lo, imax = lo;
      for (std::size_t i = lo; i < hi; ++i) {
        if (y[i] < y[imin]) imin = i;
        if (y[i] > y[imax]) imax = i;
      }
      const std::size_t first = std::min(imin, imax), second = std::max(imin, imax);
      out << fmt(map.px(t[first])) << ',' << fmt(map.py(y[first])) << ' ';
      if (second != first)
        out << fmt(map.px(t[second])) << ',' << fmt(map.py(y[second])) << ' ';
    }
  }
  out << "\"/>\n";
}

}  // namespace

void write_crossing_plot(const std::vector<double>& t, const std::vector<double>& x,
                         const std::vector<double>& f, const std::vector<int>& crossed,
                         const std::string& path, const PlotOptions& opt) {
  if (t.size() != x.size() || t.size() != f.size() || t.size() != crossed.size())
    throw std::invalid_argument("write_crossing_plot: column length mismatch");
  std::ofstream out(path);
  if (!out) throw std::runtime_error("write_crossing_plot: cannot open " + path);

  const double w = opt.width, h = opt.height;
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << opt.width
      << "\" height=\"" << opt.height << "\" viewBox=\"0 0 " << opt.width << ' '
      << opt.height << "\">\n";
  out << "  <rect width=\"" << opt.width << "\" height=\"" << opt.height
      << "\" fill=\"white\"/>\n";
  out << "  <text x=\"" << w / 2 << "\" y=\"24\" text-anchor=\"middle\" "
      << "font-family=\"sans-serif\" font-size=\"15\">" << opt.title << "</text>\n";

  Mapper map{};
  map.x0 = 64;
  map.x1 = w - 20;
  map.y0 = 40;
  map.y1 = h - 46;
  if (t.empty()) {
    map.t_min = 0;
    map.t_max = 1;
    map.y_min = 0;
    map.y_max = 1;
  } else {
    map.t_min = *std::min_element(t.begin(), t.end());
    map.t_max = *std::max_element(t.begin(), t.end());
    double lo = x[0], hi = x[0];
    for (std::size_t i = 0; i < x.size(); ++i) {
      lo = std::min({lo, x[i], f[i]});
      hi = std::max({hi, x[i], f[i]});
    }
    const double pad = 0.05 * std::max(hi - lo, 1e-9);
    map.y_min = lo - pad;
    map.y_max = hi + pad;
    if (map.t_max == map.t_min) map.t_max = map.t_min + 1.0;
  }

  // frame + ticks
  out << "  <rect x=\"" << map.x0 << "\" y=\"" << map.y0 << "\" width=\""
      << map.x1 - map.x0 << "\" height=\"" << map.y1 - map.y0
      << "\" fill=\"none\" stroke=\"#444\"/>\n";
  for (int i = 0; i <= 5; ++i) {
    const double tv = map.t_min + (map.t_max - map.t_min) * i / 5.0;
    const double yv = map.y_min + (map.y_max - map.y_min) * i / 5.0;
    out << "  <line x1=\"" << fmt(map.px(tv)) << "\" y1=\"" << map.y1 << "\" x2=\""
        << fmt(map.px(tv)) << "\" y2=\"" << map.y1 + 5 << "\" stroke=\"#444\"/>\n";
    out << "  <text x=\"" << fmt(map.px(tv)) << "\" y=\"" << map.y1 + 20
        << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"11\">"
        << fmt_tick(tv) << "</text>\n";
    out << "  <line x1=\"" << map.x0 - 5 << "\" y1=\"" << fmt(map.py(yv)) << "\" x2=\""
        << map.x0 << "\" y2=\"" << fmt(map.py(yv)) << "\" stroke=\"#444\"/>\n";
    out << "  <text x=\"" << map.x0 - 9 << "\" y=\"" << fmt(map.py(yv) + 4)
        << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">"
        << fmt_tick(yv) << "</text>\n";
  }

  if (!t.empty()) {
    decimated_polyline(out, t, x, map, "#1f77b4", opt.max_points);
    decimated_polyline(out, t, f, map, "#d62728", opt.max_points);
    for (std::size_t i = 0; i < t.size(); ++i)
      if (crossed[i])
        out << "  <circle cx=\"" << fmt(map.px(t[i])) << "\" cy=\""
            << fmt(map.py(x[i])) << "\" r=\"2.5\" fill=\"#2ca02c\"/>\n";
  }

  out << "  <text x=\"" << map.x0 << "\" y=\"" << h - 12
      << "\" font-family=\"sans-serif\" font-size=\"12\" fill=\"#1f77b4\">process"
      << "</text>\n";
  out << "  <text x=\"" << map.x0 + 80 << "\" y=\"" << h - 12
      << "\" font-family=\"sans-serif\" font-size=\"12\" fill=\"#d62728\">threshold"
      << "</text>\n";
  out << "  <text x=\"" << map.x0 + 180 << "\" y=\"" << h - 12
      << "\" font-family=\"sans-serif\" font-size=\"12\" fill=\"#2ca02c\">crossings"
      << "</text>\n";
  out << "</svg>\n";
}

}  // namespace gpx::svg
