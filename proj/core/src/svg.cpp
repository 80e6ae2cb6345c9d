#include "cbf_surrogate/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "cbf_surrogate/error.hpp"

namespace cbf_surrogate {

namespace {

std::string fixed2(double v) {
  char buf[48];
  std::snprintf(buf, sizeof(buf), "%.2f", v);
  std::string s = buf;
  if (s == "-0.00") s = "0.00";
  return s;
}

std::string tick_label(double v) {
  char buf[48];
  std::snprintf(buf, sizeof(buf), "%.3g", std::abs(v) < 1e-12 ? 0.0 : v);
  return buf;
}

std::string xml_escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out.push_back(c);
    }
  }
  return out;
}

void axis_bounds(std::span<const double> v, double& lo, double& hi) {
  lo = *std::min_element(v.begin(), v.end());
  hi = *std::max_element(v.begin(), v.end());
  if (!(hi > lo)) {
    lo -= 1.0;
    hi += 1.0;
    return;
  }
  const double pad = 0.05 * (hi - lo);
  lo -= pad;
  hi += pad;
}

}  // namespace

ScatterLayout ScatterLayout::fit(std::span<const double> xs, std::span<const double> ys) {
  ScatterLayout l;
  if (!xs.empty()) axis_bounds(xs, l.x_min, l.x_max);
  if (!ys.empty()) axis_bounds(ys, l.y_min, l.y_max);
  return l;
}

double ScatterLayout::px(double x) const {
  return kLeft + (x - x_min) / (x_max - x_min) * (kWidth - kLeft - kRight);
}

double ScatterLayout::py(double y) const {
  const double h = kHeight - kTop - kBottom;
  return kTop + h - (y - y_min) / (y_max - y_min) * h;
}

std::string scatter_svg(std::span<const double> xs, std::span<const double> ys,
                        const ScatterLabels& labels) {
  if (xs.size() != ys.size()) throw ValidationError("scatter: x/y length mismatch");
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (!std::isfinite(xs[i]) || !std::isfinite(ys[i])) {
      throw ValidationError("scatter: non-finite point");
    }
  }
  const auto L = ScatterLayout::fit(xs, ys);
  using SL = ScatterLayout;
  const double x0 = SL::kLeft, x1 = SL::kWidth - SL::kRight;
  const double y0 = SL::kTop, y1 = SL::kHeight - SL::kBottom;

  std::ostringstream o;
  o << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << fixed2(SL::kWidth)
    << "\" height=\"" << fixed2(SL::kHeight) << "\" viewBox=\"0 0 " << fixed2(SL::kWidth) << ' '
    << fixed2(SL::kHeight) << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  o << "<rect x=\"0\" y=\"0\" width=\"" << fixed2(SL::kWidth) << "\" height=\""
    << fixed2(SL::kHeight) << "\" fill=\"white\"/>\n";
  o << "<text x=\"" << fixed2(SL::kWidth / 2) << "\" y=\"20.00\" text-anchor=\"middle\" "
    << "font-size=\"14\">" << xml_escape(labels.title) << "</text>\n";

  // Axes and ticks.
  o << "<g stroke=\"black\" stroke-width=\"1\">\n";
  o << "<line x1=\"" << fixed2(x0) << "\" y1=\"" << fixed2(y1) << "\" x2=\"" << fixed2(x1)
    << "\" y2=\"" << fixed2(y1) << "\"/>\n";
  o << "<line x1=\"" << fixed2(x0) << "\" y1=\"" << fixed2(y0) << "\" x2=\"" << fixed2(x0)
    << "\" y2=\"" << fixed2(y1) << "\"/>\n";
  o << "</g>\n<g font-size=\"10\">\n";
  for (int k = 0; k <= 4; ++k) {
    const double xv = L.x_min + (L.x_max - L.x_min) * k / 4.0;
    const double yv = L.y_min + (L.y_max - L.y_min) * k / 4.0;
    o << "<text x=\"" << fixed2(L.px(xv)) << "\" y=\"" << fixed2(y1 + 14)
      << "\" text-anchor=\"middle\">" << tick_label(xv) << "</text>\n";
    o << "<text x=\"" << fixed2(x0 - 4) << "\" y=\"" << fixed2(L.py(yv) + 3)
      << "\" text-anchor=\"end\">" << tick_label(yv) << "</text>\n";
  }
  o << "</g>\n";
  o << "<text x=\"" << fixed2((x0 + x1) / 2) << "\" y=\"" << fixed2(SL::kHeight - 12)
    << "\" text-anchor=\"middle\">" << xml_escape(labels.x_label) << "</text>\n";
  o << "<text x=\"16.00\" y=\"" << fixed2((y0 + y1) / 2) << "\" text-anchor=\"middle\" "
    << "transform=\"rotate(-90 16.00 " << fixed2((y0 + y1) / 2) << ")\">"
    << xml_escape(labels.y_label) << "</text>\n";

  // Least-squares fit over the observed x span.
  if (xs.size() >= 2) {
    const double n = static_cast<double>(xs.size());
    double mx = 0, my = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
      mx += xs[i];
      my += ys[i];
    }
    mx /= n;
    my /= n;
    double sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
      sxx += (xs[i] - mx) * (xs[i] - mx);
      sxy += (xs[i] - mx) * (ys[i] - my);
    }
    if (sxx > 0) {
      const double slope = sxy / sxx;
      const double lo = *std::min_element(xs.begin(), xs.end());
      const double hi = *std::max_element(xs.begin(), xs.end());
      o << "<line class=\"fit\" x1=\"" << fixed2(L.px(lo)) << "\" y1=\""
        << fixed2(L.py(my + slope * (lo - mx))) << "\" x2=\"" << fixed2(L.px(hi)) << "\" y2=\""
        << fixed2(L.py(my + slope * (hi - mx))) << "\" stroke=\"#c0392b\" stroke-width=\"1.5\"/>\n";
    }
  }

  o << "<g fill=\"#2c7fb8\" fill-opacity=\"0.7\">\n";
  for (std::size_t i = 0; i < xs.size(); ++i) {
    o << "<circle cx=\"" << fixed2(L.px(xs[i])) << "\" cy=\"" << fixed2(L.py(ys[i]))
      << "\" r=\"3.00\"/>\n";
  }
  o << "</g>\n";
  if (!labels.annotation.empty()) {
    o << "<text x=\"" << fixed2(x0 + 8) << "\" y=\"" << fixed2(y0 + 14) << "\">"
      << xml_escape(labels.annotation) << "</text>\n";
  }
  o << "</svg>\n";
  return o.str();
}

void write_scatter_svg(std::span<const double> xs, std::span<const double> ys,
                       const ScatterLabels& labels, const std::filesystem::path& out_path) {
  const auto text = scatter_svg(xs, ys, labels);
  if (out_path.has_parent_path()) std::filesystem::create_directories(out_path.parent_path());
  std::ofstream out(out_path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + out_path.string());
  out << text;
  if (!out) throw std::runtime_error("write failed: " + out_path.string());
}

}  // namespace cbf_surrogate
