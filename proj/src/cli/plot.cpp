#include "cirpeak/cli/plot.hpp"

#include <algorithm>
#include <charconv>
#include <sstream>

namespace cirpeak::cli {
namespace {

std::string num(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

std::string fixed(double v) {
  std::ostringstream s;
  s.setf(std::ios::fixed);
  s.precision(2);
  s << v;
  return s.str();
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

struct Panel {
  double top, height;
  double lo, hi;
};

constexpr double kWidth = 1000.0;
constexpr double kLeft = 50.0;
constexpr double kRight = 10.0;

double x_of(std::size_t i, std::size_t n) {
  return kLeft + (kWidth - kLeft - kRight) * (n > 1 ? static_cast<double>(i) / static_cast<double>(n - 1) : 0.0);
}

double y_of(double v, const Panel& p) { return p.top + p.height * (1.0 - (v - p.lo) / (p.hi - p.lo)); }

Panel fit_panel(double top, double height, std::initializer_list<std::span<const double>> series) {
  double lo = 0.0, hi = 0.0;
  bool first = true;
  for (auto s : series) {
    for (double v : s) {
      if (first) {
        lo = hi = v;
        first = false;
      }
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
  }
  if (hi <= lo) hi = lo + 1.0;
  const double margin = 0.05 * (hi - lo);
  return {top, height, lo - margin, hi + margin};
}

void polyline(std::ostringstream& out, std::span<const double> s, const Panel& p, const char* colour) {
  out << "<polyline fill=\"none\" stroke=\"" << colour << "\" stroke-width=\"1\" points=\"";
  for (std::size_t i = 0; i < s.size(); ++i) {
    out << fixed(x_of(i, s.size())) << ',' << fixed(y_of(s[i], p)) << ' ';
  }
  out << "\"/>\n";
}

}  // namespace

std::string overlay_csv(std::span<const double> input, std::span<const double> trend,
                        const detect::AnomalyReport& report) {
  std::string out = "index,input_db,trend_db,residual_db,label\n";
  for (std::size_t i = 0; i < input.size(); ++i) {
    out += std::to_string(i) + ',' + num(input[i]) + ',' + num(trend[i]) + ',' +
           num(i < report.residual.values.size() ? report.residual.values[i] : 0.0) + ',' +
           std::to_string(i < report.point_labels.size() ? report.point_labels[i] : -1) + '\n';
  }
  return out;
}

std::string overlay_svg(std::span<const double> input, std::span<const double> trend,
                        const detect::AnomalyReport& report, const std::string& title) {
  const Panel upper = fit_panel(30.0, 250.0, {input, trend});
  const Panel lower = fit_panel(310.0, 160.0, {report.residual.values});
  const std::size_t n = input.size();

  std::ostringstream out;
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\"500\" "
      << "viewBox=\"0 0 " << kWidth << " 500\">\n";
  out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  out << "<text x=\"" << kLeft << "\" y=\"18\" font-family=\"sans-serif\" font-size=\"14\">" << escape(title)
      << "</text>\n";
  for (const auto& c : report.clusters) {
    const double x0 = x_of(static_cast<std::size_t>(c.start_index), n) - 1.0;
    const double x1 = x_of(static_cast<std::size_t>(c.end_index), n) + 1.0;
    out << "<rect x=\"" << fixed(x0) << "\" y=\"30\" width=\"" << fixed(x1 - x0)
        << "\" height=\"440\" fill=\"orange\" fill-opacity=\"0.3\"/>\n";
  }
  if (report.residual.warmup_len > 0) {
    const double x1 = x_of(report.residual.warmup_len, n);
    out << "<rect x=\"" << kLeft << "\" y=\"30\" width=\"" << fixed(x1 - kLeft)
        << "\" height=\"440\" fill=\"grey\" fill-opacity=\"0.15\"/>\n";
  }
  polyline(out, input, upper, "steelblue");
  polyline(out, trend, upper, "crimson");
  polyline(out, report.residual.values, lower, "black");
  for (const Panel* p : {&upper, &lower}) {
    out << "<text x=\"4\" y=\"" << fixed(p->top + 10) << "\" font-family=\"sans-serif\" font-size=\"10\">"
        << fixed(p->hi) << "</text>\n";
    out << "<text x=\"4\" y=\"" << fixed(p->top + p->height) << "\" font-family=\"sans-serif\" font-size=\"10\">"
        << fixed(p->lo) << "</text>\n";
  }
  out << "</svg>\n";
  return out.str();
}

}  // namespace cirpeak::cli
