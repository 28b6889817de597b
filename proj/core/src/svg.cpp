#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

#include "guardrail/chart.hpp"

namespace guardrail {

namespace {

constexpr double kWidth = 720, kHeight = 405;
constexpr double kLeft = 64, kRight = 150, kTop = 24, kBottom = 40;
constexpr double kLabelGap = 12;

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f", v);
  std::string s = buf;
  while (s.back() == '0') s.pop_back();
  if (s.back() == '.') s.pop_back();
  return s == "-0" ? "0" : s;
}

std::string escape(const std::string& s) {
  std::string out;
  out.reserve(s.size());
  for (char c : s) {
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

// 1, 2, 2.5, 5 x 10^k step giving about `target` intervals.
double nice_step(double span, int target) {
  const double raw = span / target;
  const double mag = std::pow(10.0, std::floor(std::log10(raw)));
  for (double m : {1.0, 2.0, 2.5, 5.0, 10.0}) {
    if (m * mag >= raw) return m * mag;
  }
  return 10.0 * mag;
}

struct Line {
  std::string label;
  const std::vector<double>* values;
  bool focal;
};

}  // namespace

std::string render_svg(const ChartSpec& spec) {
  std::vector<Line> lines;
  if (spec.guardrails) {
    for (const auto& c : spec.guardrails->context) lines.push_back({c.label, &c.values, false});
  }
  lines.push_back({spec.focal.display_name, &spec.focal.values, true});

  double lo = std::numeric_limits<double>::infinity(), hi = -lo;
  for (const auto& l : lines) {
    for (double v : *l.values) {
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
  }
  if (!std::isfinite(lo)) lo = 0, hi = 1;
  if (hi == lo) hi = lo + 1;
  const double step = nice_step(hi - lo, 5);
  lo = std::floor(lo / step) * step;
  hi = std::ceil(hi / step) * step;

  const std::size_t steps = spec.focal.values.size();
  const double plot_w = kWidth - kLeft - kRight, plot_h = kHeight - kTop - kBottom;
  auto px = [&](std::size_t t) {
    return steps <= 1 ? kLeft : kLeft + plot_w * static_cast<double>(t) / static_cast<double>(steps - 1);
  };
  auto py = [&](double v) { return kTop + plot_h * (hi - v) / (hi - lo); };

  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 " << num(kWidth) << ' '
      << num(kHeight) << "\" width=\"" << num(kWidth) << "\" height=\"" << num(kHeight)
      << "\" font-family=\"sans-serif\" font-size=\"11\">\n";
  svg << "<rect width=\"100%\" height=\"100%\" fill=\"#ffffff\"/>\n";

  svg << "<g class=\"y-axis\">\n";
  for (double v = lo; v <= hi + step * 1e-9; v += step) {
    const double y = py(v);
    svg << "<line x1=\"" << num(kLeft) << "\" y1=\"" << num(y) << "\" x2=\"" << num(kLeft + plot_w)
        << "\" y2=\"" << num(y) << "\" stroke=\"#e6e6e6\" stroke-width=\"1\"/>\n";
    svg << "<text x=\"" << num(kLeft - 6) << "\" y=\"" << num(y + 4)
        << "\" text-anchor=\"end\" fill=\"#555555\">" << num(std::abs(v) < step * 1e-9 ? 0.0 : v)
        << escape(spec.axes.y_units == "%" ? "%" : "") << "</text>\n";
  }
  std::string ylabel = spec.axes.y_label;
  if (!spec.axes.y_units.empty() && spec.axes.y_units != "%") ylabel += " (" + spec.axes.y_units + ")";
  svg << "<text x=\"14\" y=\"" << num(kTop + plot_h / 2) << "\" transform=\"rotate(-90 14 "
      << num(kTop + plot_h / 2) << ")\" text-anchor=\"middle\" fill=\"#333333\">" << escape(ylabel)
      << "</text>\n</g>\n";

  if (!spec.axes.x.empty()) {
    svg << "<g class=\"x-axis\">\n";
    const std::size_t last = spec.axes.x.size() - 1;
    for (std::size_t t : {std::size_t{0}, last / 2, last}) {
      const char* anchor = t == 0 ? "start" : (t == last ? "end" : "middle");
      svg << "<text x=\"" << num(px(t)) << "\" y=\"" << num(kTop + plot_h + 18)
          << "\" text-anchor=\"" << anchor << "\" fill=\"#555555\">" << spec.axes.x[t].iso()
          << "</text>\n";
    }
    svg << "</g>\n";
  }

  struct EndLabel {
    double y;
    std::string text;
    bool focal;
  };
  std::vector<EndLabel> labels;
  for (const auto& l : lines) {
    const auto& s = l.focal ? spec.style.focal : spec.style.context;
    std::ostringstream d;
    for (std::size_t t = 0; t < l.values->size(); ++t) {
      d << (t == 0 ? "M" : " L") << num(px(t)) << ',' << num(py((*l.values)[t]));
    }
    svg << "<path class=\"" << (l.focal ? "focal" : "context") << "\" d=\"" << d.str()
        << "\" fill=\"none\" stroke=\"" << s.color << "\" stroke-width=\"" << num(s.width) << '"';
    if (s.dash) svg << " stroke-dasharray=\"" << *s.dash << '"';
    svg << "/>\n";
    if (!l.values->empty()) labels.push_back({py(l.values->back()), l.label, l.focal});
  }

  // Nudge end labels apart, top to bottom, then pull back inside the plot.
  std::sort(labels.begin(), labels.end(), [](const auto& a, const auto& b) { return a.y < b.y; });
  for (std::size_t i = 1; i < labels.size(); ++i) {
    labels[i].y = std::max(labels[i].y, labels[i - 1].y + kLabelGap);
  }
  const double overflow = labels.empty() ? 0 : labels.back().y - (kTop + plot_h);
  if (overflow > 0) {
    for (auto& l : labels) l.y -= overflow;
    for (std::size_t i = labels.size(); i-- > 1;) {
      labels[i - 1].y = std::min(labels[i - 1].y, labels[i].y - kLabelGap);
    }
  }
  svg << "<g class=\"labels\">\n";
  for (const auto& l : labels) {
    const auto& s = l.focal ? spec.style.focal : spec.style.context;
    svg << "<text x=\"" << num(kLeft + plot_w + 6) << "\" y=\"" << num(l.y + 4) << "\" fill=\""
        << (l.focal ? s.color : std::string("#6b6b6b")) << '"'
        << (l.focal ? " font-weight=\"bold\"" : "") << '>' << escape(l.text) << "</text>\n";
  }
  svg << "</g>\n";
  if (spec.caption) {
    svg << "<text x=\"" << num(kLeft) << "\" y=\"14\" fill=\"#333333\">" << escape(*spec.caption)
        << "</text>\n";
  }
  svg << "</svg>\n";
  return svg.str();
}

}  // namespace guardrail
