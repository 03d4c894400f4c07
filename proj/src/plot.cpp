#include "crossflow/plot.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace crossflow {

namespace {

constexpr double kWidth = 960.0;
constexpr double kHeight = 600.0;
constexpr double kLeft = 80.0;
constexpr double kRight = 880.0;
constexpr double kTop = 60.0;
constexpr double kBottom = 520.0;

const char* const kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e",
                                "#8c564b", "#e377c2", "#17becf", "#7f7f7f", "#bcbd22"};

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return std::string(buf) == "-0.00" ? "0.00" : buf;
}

std::string label_num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", std::abs(v) < 1e-12 ? 0.0 : v);
  return buf;
}

std::string escape(const std::string& text) {
  std::string out;
  for (char c : text) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

struct Range {
  double lo = 0.0;
  double hi = 1.0;
};

// Round step (1, 2 or 5 times a power of ten) giving about `target` ticks.
double nice_step(double span, int target) {
  const double raw = span / target;
  const double mag = std::pow(10.0, std::floor(std::log10(raw)));
  const double f = raw / mag;
  return (f < 1.5 ? 1.0 : f < 3.5 ? 2.0 : f < 7.5 ? 5.0 : 10.0) * mag;
}

Range padded(double lo, double hi) {
  if (!(lo <= hi)) return {0.0, 1.0};
  if (hi - lo < 1e-12) {
    const double pad = std::max(1.0, std::abs(lo) * 0.1);
    return {lo - pad, hi + pad};
  }
  const double step = nice_step(hi - lo, 5);
  return {std::floor(lo / step) * step, std::ceil(hi / step) * step};
}

class Canvas {
 public:
  Canvas(Range x, Range y) : x_(x), y_(y) {
    out_ << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
         << "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" << kWidth << "\" height=\""
         << kHeight << "\" viewBox=\"0 0 " << kWidth << ' ' << kHeight << "\">\n"
         << "<rect x=\"0\" y=\"0\" width=\"" << kWidth << "\" height=\"" << kHeight << "\" fill=\"white\"/>\n";
  }

  double px(double x) const { return kLeft + (x - x_.lo) / (x_.hi - x_.lo) * (kRight - kLeft); }
  double py(double y, const Range& r) const { return kBottom - (y - r.lo) / (r.hi - r.lo) * (kBottom - kTop); }
  double py(double y) const { return py(y, y_); }

  void text(double x, double y, const std::string& s, const char* anchor, int size = 14, double rotate = 0.0) {
    out_ << "<text x=\"" << num(x) << "\" y=\"" << num(y) << "\" font-family=\"sans-serif\" font-size=\"" << size
         << "\" text-anchor=\"" << anchor << '"';
    if (rotate != 0.0) out_ << " transform=\"rotate(" << num(rotate) << ' ' << num(x) << ' ' << num(y) << ")\"";
    out_ << '>' << escape(s) << "</text>\n";
  }

  void line(double x1, double y1, double x2, double y2, const char* stroke, double width, const char* dash = nullptr) {
    out_ << "<line x1=\"" << num(x1) << "\" y1=\"" << num(y1) << "\" x2=\"" << num(x2) << "\" y2=\"" << num(y2)
         << "\" stroke=\"" << stroke << "\" stroke-width=\"" << num(width) << '"';
    if (dash) out_ << " stroke-dasharray=\"" << dash << '"';
    out_ << "/>\n";
  }

  void polyline(const std::vector<std::pair<double, double>>& pts, const char* stroke, double width) {
    if (pts.size() < 2) {
      if (pts.size() == 1) {
        out_ << "<circle cx=\"" << num(pts[0].first) << "\" cy=\"" << num(pts[0].second) << "\" r=\"2\" fill=\""
             << stroke << "\"/>\n";
      }
      return;
    }
    out_ << "<polyline fill=\"none\" stroke=\"" << stroke << "\" stroke-width=\"" << num(width) << "\" points=\"";
    for (std::size_t i = 0; i < pts.size(); ++i) {
      if (i) out_ << ' ';
      out_ << num(pts[i].first) << ',' << num(pts[i].second);
    }
    out_ << "\"/>\n";
  }

  void marker(double x, double y, const char* fill) {
    out_ << "<circle cx=\"" << num(x) << "\" cy=\"" << num(y) << "\" r=\"3.5\" fill=\"" << fill << "\"/>\n";
  }

  void frame(const std::string& title, const std::string& x_label, const std::string& y_label) {
    out_ << "<rect x=\"" << num(kLeft) << "\" y=\"" << num(kTop) << "\" width=\"" << num(kRight - kLeft)
         << "\" height=\"" << num(kBottom - kTop) << "\" fill=\"none\" stroke=\"black\" stroke-width=\"1\"/>\n";
    const double step_x = nice_step(x_.hi - x_.lo, 8);
    for (double v = std::ceil(x_.lo / step_x - 1e-9) * step_x; v <= x_.hi + 1e-9 * step_x; v += step_x) {
      line(px(v), kBottom, px(v), kBottom + 5, "black", 1);
      text(px(v), kBottom + 20, label_num(v), "middle", 12);
    }
    left_ticks(y_);
    text((kLeft + kRight) / 2, 35, title, "middle", 18);
    text((kLeft + kRight) / 2, kBottom + 50, x_label, "middle");
    text(25, (kTop + kBottom) / 2, y_label, "middle", 14, -90.0);
  }

  void right_axis(const Range& r, const std::string& label) {
    const double step = nice_step(r.hi - r.lo, 6);
    for (double v = std::ceil(r.lo / step - 1e-9) * step; v <= r.hi + 1e-9 * step; v += step) {
      line(kRight, py(v, r), kRight + 5, py(v, r), "black", 1);
      text(kRight + 8, py(v, r) + 4, label_num(v), "start", 12);
    }
    text(kWidth - 20, (kTop + kBottom) / 2, label, "middle", 14, 90.0);
  }

  std::string finish() {
    out_ << "</svg>\n";
    return out_.str();
  }

 private:
  void left_ticks(const Range& r) {
    const double step = nice_step(r.hi - r.lo, 6);
    for (double v = std::ceil(r.lo / step - 1e-9) * step; v <= r.hi + 1e-9 * step; v += step) {
      line(kLeft - 5, py(v), kLeft, py(v), "black", 1);
      line(kLeft, py(v), kRight, py(v), "#e6e6e6", 1);
      text(kLeft - 8, py(v) + 4, label_num(v), "end", 12);
    }
  }

  Range x_, y_;
  std::ostringstream out_;
};

}  // namespace

std::string spacetime_svg(const TrajectoryLog& log, Lane lane) {
  const SimConfig& cfg = log.config;
  const Range x{0.0, std::max(cfg.dt, cfg.total_ticks() * cfg.dt)};
  const Range y{cfg.lane_start, cfg.lane_end};
  Canvas c(x, y);
  c.frame(std::string("Space-time diagram, ") + to_string(lane) + " lane, R = " + label_num(cfg.radius) +
              " m, s_dist = " + label_num(cfg.s_dist) + " m",
          "time [s]", "lane position [m]");
  c.line(kLeft, c.py(cfg.radius), kRight, c.py(cfg.radius), "#2ca02c", 1.5, "8,5");
  c.line(kLeft, c.py(-cfg.radius), kRight, c.py(-cfg.radius), "#2ca02c", 1.5, "8,5");
  c.line(kLeft, c.py(0.0), kRight, c.py(0.0), "#7f7f7f", 1.5, "8,5");
  int k = 0;
  for (const auto& agent : log.agents) {
    if (agent.lane != lane) continue;
    std::vector<std::pair<double, double>> pts;
    for (const auto& s : agent.trajectory) pts.emplace_back(c.px(s.t), c.py(lane_position(agent, s)));
    c.polyline(pts, kPalette[k++ % std::size(kPalette)], 1.0);
  }
  return c.finish();
}

std::string line_chart_svg(const LineChart& chart) {
  double xlo = std::numeric_limits<double>::infinity(), xhi = -xlo;
  double lo[2] = {xlo, xlo}, hi[2] = {-xlo, -xlo};
  for (const auto& s : chart.series) {
    if (s.x.size() != s.y.size()) throw std::invalid_argument("chart series '" + s.label + "' has mismatched x and y");
    const int axis = s.right_axis ? 1 : 0;
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      xlo = std::min(xlo, s.x[i]);
      xhi = std::max(xhi, s.x[i]);
      if (std::isnan(s.y[i])) continue;
      lo[axis] = std::min(lo[axis], s.y[i]);
      hi[axis] = std::max(hi[axis], s.y[i]);
    }
  }
  const Range x = padded(xlo, xhi);
  const Range left = padded(lo[0], hi[0]);
  const Range right = padded(lo[1], hi[1]);
  Canvas c(x, left);
  c.frame(chart.title, chart.x_label, chart.y_label);
  if (!chart.right_label.empty()) c.right_axis(right, chart.right_label);

  double legend_y = kTop + 20;
  int k = 0;
  for (const auto& s : chart.series) {
    const char* color = kPalette[k++ % std::size(kPalette)];
    const Range& r = s.right_axis ? right : left;
    std::vector<std::pair<double, double>> run;
    auto flush = [&] {
      if (run.size() > 1) c.polyline(run, color, 2.0);
      run.clear();
    };
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      if (std::isnan(s.y[i])) {
        flush();
        continue;
      }
      run.emplace_back(c.px(s.x[i]), c.py(s.y[i], r));
      c.marker(c.px(s.x[i]), c.py(s.y[i], r), color);
    }
    flush();
    c.line(kLeft + 15, legend_y, kLeft + 45, legend_y, color, 2.0);
    c.text(kLeft + 52, legend_y + 4, s.label, "start", 12);
    legend_y += 18;
  }
  return c.finish();
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write '" + path + "'");
  out << text;
  if (!out) throw std::runtime_error("write to '" + path + "' failed");
}

}  // namespace crossflow
