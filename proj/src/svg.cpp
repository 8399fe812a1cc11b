#include "nugap/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <sstream>

namespace nugap::svg {

namespace {

constexpr double kWidth = 720.0;
constexpr double kHeight = 440.0;
constexpr double kLeft = 70.0, kRight = 170.0, kTop = 40.0, kBottom = 50.0;

const char* const kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd",
                                "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf"};

std::string colour(std::size_t i) { return kPalette[i % (sizeof kPalette / sizeof kPalette[0])]; }

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

std::string label_num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

struct Frame {
  double x0, x1, y0, y1;
  bool log_x;

  double px(double x) const {
    const double t = log_x ? (std::log10(x) - std::log10(x0)) / (std::log10(x1) - std::log10(x0)) : (x - x0) / (x1 - x0);
    return kLeft + t * (kWidth - kLeft - kRight);
  }
  double py(double y) const { return kHeight - kBottom - (y - y0) / (y1 - y0) * (kHeight - kTop - kBottom); }
};

void header(std::ostringstream& os, const std::string& title) {
  os << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
     << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\"" << kHeight
     << "\" viewBox=\"0 0 " << kWidth << ' ' << kHeight << "\">\n"
     << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
     << "<text x=\"" << num(kWidth / 2) << "\" y=\"22\" text-anchor=\"middle\" font-family=\"sans-serif\" "
        "font-size=\"15\">"
     << escape(title) << "</text>\n";
}

void axes(std::ostringstream& os, const Frame& f, const PlotOptions& opt) {
  const double xa = kLeft, xb = kWidth - kRight, ya = kHeight - kBottom, yb = kTop;
  os << "<rect x=\"" << num(xa) << "\" y=\"" << num(yb) << "\" width=\"" << num(xb - xa) << "\" height=\""
     << num(ya - yb) << "\" fill=\"none\" stroke=\"black\"/>\n";
  for (int i = 0; i <= 4; ++i) {
    const double t = i / 4.0;
    const double xv = f.log_x ? std::pow(10.0, std::log10(f.x0) + t * (std::log10(f.x1) - std::log10(f.x0)))
                              : f.x0 + t * (f.x1 - f.x0);
    const double yv = f.y0 + t * (f.y1 - f.y0);
    os << "<text x=\"" << num(f.px(xv)) << "\" y=\"" << num(ya + 16) << "\" text-anchor=\"middle\" "
       << "font-family=\"sans-serif\" font-size=\"10\">" << label_num(xv) << "</text>\n";
    os << "<text x=\"" << num(xa - 6) << "\" y=\"" << num(f.py(yv) + 3) << "\" text-anchor=\"end\" "
       << "font-family=\"sans-serif\" font-size=\"10\">" << label_num(yv) << "</text>\n";
  }
  os << "<text x=\"" << num((xa + xb) / 2) << "\" y=\"" << num(kHeight - 12) << "\" text-anchor=\"middle\" "
     << "font-family=\"sans-serif\" font-size=\"12\">" << escape(opt.x_label) << "</text>\n";
  os << "<text x=\"16\" y=\"" << num((ya + yb) / 2) << "\" text-anchor=\"middle\" font-family=\"sans-serif\" "
     << "font-size=\"12\" transform=\"rotate(-90 16 " << num((ya + yb) / 2) << ")\">" << escape(opt.y_label)
     << "</text>\n";
}

std::pair<double, double> padded(double lo, double hi) {
  if (!(lo < hi)) return {lo - 0.5, hi + 0.5};
  const double pad = 0.05 * (hi - lo);
  return {lo - pad, hi + pad};
}

}  // namespace

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

std::string line_plot(const std::vector<Series>& series, const PlotOptions& opt) {
  auto clip = [&](double y) { return opt.y_clip > 0.0 ? std::clamp(y, -opt.y_clip, opt.y_clip) : y; };
  double x0 = std::numeric_limits<double>::infinity(), x1 = -x0, y0 = x0, y1 = -x0;
  for (const auto& s : series) {
    for (std::size_t i = 0; i < s.x.size() && i < s.y.size(); ++i) {
      if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i]) || (opt.log_x && s.x[i] <= 0.0)) continue;
      x0 = std::min(x0, s.x[i]);
      x1 = std::max(x1, s.x[i]);
      y0 = std::min(y0, clip(s.y[i]));
      y1 = std::max(y1, clip(s.y[i]));
    }
  }
  if (!std::isfinite(x0)) x0 = opt.log_x ? 1.0 : 0.0, x1 = opt.log_x ? 10.0 : 1.0, y0 = 0.0, y1 = 1.0;
  if (!(x0 < x1)) x1 = opt.log_x ? x0 * 10.0 : x0 + 1.0;
  const auto [ylo, yhi] = padded(y0, y1);
  const Frame f{x0, x1, ylo, yhi, opt.log_x};

  std::ostringstream os;
  header(os, opt.title);
  axes(os, f, opt);
  for (std::size_t k = 0; k < series.size(); ++k) {
    const auto& s = series[k];
    os << "<polyline fill=\"none\" stroke=\"" << colour(k) << "\" stroke-width=\"1.3\""
       << (s.dashed ? " stroke-dasharray=\"5,3\"" : "") << " points=\"";
    for (std::size_t i = 0; i < s.x.size() && i < s.y.size(); ++i) {
      if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i]) || (opt.log_x && s.x[i] <= 0.0)) continue;
      os << num(f.px(s.x[i])) << ',' << num(f.py(clip(s.y[i]))) << ' ';
    }
    os << "\"/>\n";
    if (k < 24) {
      const double ly = kTop + 12.0 * static_cast<double>(k) + 6.0;
      os << "<line x1=\"" << num(kWidth - kRight + 10) << "\" y1=\"" << num(ly) << "\" x2=\""
         << num(kWidth - kRight + 28) << "\" y2=\"" << num(ly) << "\" stroke=\"" << colour(k) << "\""
         << (s.dashed ? " stroke-dasharray=\"5,3\"" : "") << "/>\n";
      os << "<text x=\"" << num(kWidth - kRight + 32) << "\" y=\"" << num(ly + 3)
         << "\" font-family=\"sans-serif\" font-size=\"9\">" << escape(s.name) << "</text>\n";
    }
  }
  os << "</svg>\n";
  return os.str();
}

std::string scatter(const std::vector<ScatterPoint>& points, const PlotOptions& opt) {
  double x0 = std::numeric_limits<double>::infinity(), x1 = -x0, y0 = x0, y1 = -x0;
  for (const auto& p : points) {
    x0 = std::min(x0, p.x);
    x1 = std::max(x1, p.x);
    y0 = std::min(y0, p.y);
    y1 = std::max(y1, p.y);
  }
  if (points.empty()) x0 = y0 = 0.0, x1 = y1 = 1.0;
  const auto [xlo, xhi] = padded(x0, x1);
  const auto [ylo, yhi] = padded(y0, y1);
  const Frame f{xlo, xhi, ylo, yhi, false};
  std::ostringstream os;
  header(os, opt.title);
  axes(os, f, opt);
  for (const auto& p : points) {
    const std::string c = colour(static_cast<std::size_t>(std::max(p.group, 0)));
    if (p.highlight) {
      os << "<rect x=\"" << num(f.px(p.x) - 5) << "\" y=\"" << num(f.py(p.y) - 5)
         << "\" width=\"10\" height=\"10\" fill=\"" << c << "\" stroke=\"black\"/>\n";
    } else {
      os << "<circle cx=\"" << num(f.px(p.x)) << "\" cy=\"" << num(f.py(p.y)) << "\" r=\"3.5\" fill=\"" << c
         << "\"/>\n";
    }
    os << "<text x=\"" << num(f.px(p.x) + 5) << "\" y=\"" << num(f.py(p.y) - 4)
       << "\" font-family=\"sans-serif\" font-size=\"7\">" << escape(p.label) << "</text>\n";
  }
  os << "</svg>\n";
  return os.str();
}

std::string dendrogram(const cluster::Dendrogram& dend, const std::vector<std::string>& labels, double cut,
                       const std::string& title) {
  const std::size_t n = dend.n_leaves;
  std::ostringstream os;
  header(os, title);
  if (n == 0) {
    os << "</svg>\n";
    return os.str();
  }
  // Leaf order from a depth-first walk of the tree.
  std::vector<double> xpos(n + dend.merges.size(), 0.0);
  std::vector<std::size_t> order;
  const std::size_t root = dend.merges.empty() ? 0 : n + dend.merges.size() - 1;
  std::function<void(std::size_t)> walk = [&](std::size_t v) {
    if (dend.is_leaf(v)) {
      order.push_back(v);
      return;
    }
    const auto [a, b] = dend.children(v);
    walk(a);
    walk(b);
  };
  walk(root);
  for (std::size_t leaf = 0; leaf < n; ++leaf) {
    if (std::find(order.begin(), order.end(), leaf) == order.end()) order.push_back(leaf);
  }
  for (std::size_t i = 0; i < order.size(); ++i) xpos[order[i]] = static_cast<double>(i);

  double top = cut;
  for (const auto& m : dend.merges) top = std::max(top, m.height);
  const Frame f{-0.5, static_cast<double>(n) - 0.5, 0.0, top * 1.05 + 1e-9, false};
  PlotOptions opt;
  opt.y_label = "merge height";
  axes(os, f, opt);
  for (const auto& m : dend.merges) {
    xpos[m.id] = 0.5 * (xpos[m.a] + xpos[m.b]);
    const double ha = dend.height(m.a), hb = dend.height(m.b);
    os << "<polyline fill=\"none\" stroke=\"#1f3f7f\" points=\"" << num(f.px(xpos[m.a])) << ',' << num(f.py(ha))
       << ' ' << num(f.px(xpos[m.a])) << ',' << num(f.py(m.height)) << ' ' << num(f.px(xpos[m.b])) << ','
       << num(f.py(m.height)) << ' ' << num(f.px(xpos[m.b])) << ',' << num(f.py(hb)) << "\"/>\n";
  }
  os << "<line x1=\"" << num(kLeft) << "\" x2=\"" << num(kWidth - kRight) << "\" y1=\"" << num(f.py(cut))
     << "\" y2=\"" << num(f.py(cut)) << "\" stroke=\"#d62728\" stroke-dasharray=\"6,4\"/>\n";
  for (std::size_t leaf = 0; leaf < n; ++leaf) {
    const double x = f.px(xpos[leaf]);
    const double y = kHeight - kBottom + 8;
    os << "<text x=\"" << num(x) << "\" y=\"" << num(y) << "\" font-family=\"sans-serif\" font-size=\"6\" "
       << "transform=\"rotate(90 " << num(x) << ' ' << num(y) << ")\">"
       << escape(leaf < labels.size() ? labels[leaf] : std::to_string(leaf)) << "</text>\n";
  }
  os << "</svg>\n";
  return os.str();
}

}  // namespace nugap::svg
