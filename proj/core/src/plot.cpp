#include "chipletrank/plot.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include "chipletrank/error.hpp"
#include "chipletrank/scatter_io.hpp"

namespace chipletrank {

namespace {

// Level 0 (far from the front) .. level 10 (on or near the front).
constexpr std::array<const char*, kMaxLevel + 1> kPalette{
    "#5e4fa2", "#3288bd", "#66c2a5", "#abdda4", "#e6f598", "#ffffbf",
    "#fee08b", "#fdae61", "#f46d43", "#d53e4f", "#9e0142"};

constexpr double kWidth = 720.0;
constexpr double kHeight = 520.0;
constexpr double kLeft = 80.0;
constexpr double kRight = 130.0;
constexpr double kTop = 40.0;
constexpr double kBottom = 60.0;

std::string num(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", x);
  return buf;
}

std::string escape(const std::string& text) {
  std::string out;
  for (char c : text) {
    switch (c) {
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '&': out += "&amp;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

struct Axis {
  double lo = 0.0;
  double hi = 1.0;

  static Axis fit(double lo, double hi) {
    if (!(hi > lo)) {
      const double pad = std::max(1.0, std::abs(lo) * 0.05);
      return {lo - pad, hi + pad};
    }
    const double pad = (hi - lo) * 0.05;
    return {lo - pad, hi + pad};
  }
  double frac(double v) const { return (v - lo) / (hi - lo); }
};

std::string star_path(double cx, double cy, double r) {
  std::ostringstream d;
  for (int k = 0; k < 10; ++k) {
    const double radius = k % 2 ? r * 0.45 : r;
    const double angle = -3.14159265358979323846 / 2.0 + k * 3.14159265358979323846 / 5.0;
    d << (k ? " L" : "M") << num(cx + radius * std::cos(angle)) << ','
      << num(cy + radius * std::sin(angle));
  }
  d << " Z";
  return d.str();
}

std::vector<std::size_t> highlight_indices(const LabeledScatter& labeled,
                                           std::span<const PlacementOrder> highlights) {
  std::vector<std::size_t> out;
  for (const PlacementOrder& h : highlights) {
    const auto it = std::find_if(labeled.points.begin(), labeled.points.end(),
                                 [&](const ScatterPoint& p) { return p.order == h; });
    if (it == labeled.points.end()) {
      fail(ErrorCode::MissingSweep, "highlighted order " + h.to_string() + " is not in the scatter");
    }
    out.push_back(static_cast<std::size_t>(it - labeled.points.begin()));
  }
  return out;
}

}  // namespace

std::string render_scatter_svg(const LabeledScatter& labeled,
                               std::span<const PlacementOrder> highlights,
                               const std::string& title) {
  const ScatterSet& pts = labeled.points;
  if (pts.empty()) fail(ErrorCode::EmptyScatter, "nothing to plot");
  std::vector<std::size_t> front = pareto_front(pts);
  const std::vector<std::size_t> marked = highlight_indices(labeled, highlights);

  auto [tmin, tmax] = std::minmax_element(pts.begin(), pts.end(), [](auto& a, auto& b) {
    return a.temperature_c < b.temperature_c;
  });
  auto [wmin, wmax] = std::minmax_element(pts.begin(), pts.end(), [](auto& a, auto& b) {
    return a.wirelength_mm < b.wirelength_mm;
  });
  const Axis xa = Axis::fit(wmin->wirelength_mm, wmax->wirelength_mm);
  const Axis ya = Axis::fit(tmin->temperature_c, tmax->temperature_c);
  const double pw = kWidth - kLeft - kRight;
  const double ph = kHeight - kTop - kBottom;
  auto px = [&](double wl) { return kLeft + xa.frac(wl) * pw; };
  auto py = [&](double t) { return kTop + (1.0 - ya.frac(t)) * ph; };

  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\""
      << kHeight << "\" viewBox=\"0 0 " << kWidth << ' ' << kHeight << "\" font-family=\"sans-serif\" font-size=\"11\">\n";
  svg << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  if (!title.empty()) {
    svg << "<text x=\"" << num(kLeft + pw / 2) << "\" y=\"22\" text-anchor=\"middle\" font-size=\"14\">"
        << escape(title) << "</text>\n";
  }

  // Axes with five ticks each.
  svg << "<g class=\"axes\" stroke=\"#333\" fill=\"none\">\n";
  svg << "<rect x=\"" << num(kLeft) << "\" y=\"" << num(kTop) << "\" width=\"" << num(pw)
      << "\" height=\"" << num(ph) << "\"/>\n</g>\n";
  svg << "<g class=\"ticks\" fill=\"#333\">\n";
  for (int k = 0; k <= 4; ++k) {
    const double wl = xa.lo + (xa.hi - xa.lo) * k / 4.0;
    const double t = ya.lo + (ya.hi - ya.lo) * k / 4.0;
    svg << "<text x=\"" << num(px(wl)) << "\" y=\"" << num(kTop + ph + 16)
        << "\" text-anchor=\"middle\">" << format_g6(wl) << "</text>\n";
    svg << "<text x=\"" << num(kLeft - 6) << "\" y=\"" << num(py(t) + 4)
        << "\" text-anchor=\"end\">" << format_g6(t) << "</text>\n";
  }
  svg << "<text x=\"" << num(kLeft + pw / 2) << "\" y=\"" << num(kHeight - 16)
      << "\" text-anchor=\"middle\">Total wirelength (mm)</text>\n";
  svg << "<text transform=\"translate(18," << num(kTop + ph / 2)
      << ") rotate(-90)\" text-anchor=\"middle\">Peak temperature (C)</text>\n";
  svg << "</g>\n";

  svg << "<g class=\"points\">\n";
  for (std::size_t i = 0; i < pts.size(); ++i) {
    svg << "<circle class=\"pt\" cx=\"" << num(px(pts[i].wirelength_mm)) << "\" cy=\""
        << num(py(pts[i].temperature_c)) << "\" r=\"3\" fill=\"" << kPalette[labeled.level[i]]
        << "\"><title>" << pts[i].order.to_string() << " L=" << labeled.level[i]
        << "</title></circle>\n";
  }
  svg << "</g>\n";

  std::sort(front.begin(), front.end(), [&](std::size_t a, std::size_t b) {
    if (pts[a].wirelength_mm != pts[b].wirelength_mm) return pts[a].wirelength_mm < pts[b].wirelength_mm;
    if (pts[a].temperature_c != pts[b].temperature_c) return pts[a].temperature_c > pts[b].temperature_c;
    return a < b;
  });
  svg << "<polyline class=\"front\" fill=\"none\" stroke=\"#111\" stroke-width=\"1.5\" points=\"";
  for (std::size_t k = 0; k < front.size(); ++k) {
    svg << (k ? " " : "") << num(px(pts[front[k]].wirelength_mm)) << ','
        << num(py(pts[front[k]].temperature_c));
  }
  svg << "\"/>\n";

  svg << "<g class=\"highlights\">\n";
  for (std::size_t i : marked) {
    const double cx = px(pts[i].wirelength_mm);
    const double cy = py(pts[i].temperature_c);
    svg << "<path class=\"hl\" d=\"" << star_path(cx, cy, 8.0)
        << "\" fill=\"#e41a1c\" stroke=\"black\" stroke-width=\"0.8\"/>\n";
    svg << "<text class=\"hl-label\" x=\"" << num(cx + 9) << "\" y=\"" << num(cy - 6) << "\">"
        << pts[i].order.to_string() << "</text>\n";
  }
  svg << "</g>\n";

  svg << "<g class=\"legend\">\n";
  for (int l = kMaxLevel; l >= 0; --l) {
    const double y = kTop + 10 + (kMaxLevel - l) * 16;
    svg << "<rect x=\"" << num(kWidth - kRight + 16) << "\" y=\"" << num(y - 8)
        << "\" width=\"10\" height=\"10\" fill=\"" << kPalette[l] << "\"/>\n";
    svg << "<text x=\"" << num(kWidth - kRight + 32) << "\" y=\"" << num(y + 1) << "\">L = " << l
        << "</text>\n";
  }
  svg << "</g>\n</svg>\n";
  return svg.str();
}

std::string render_scatter_csv(const LabeledScatter& labeled,
                               std::span<const PlacementOrder> highlights) {
  const std::vector<std::size_t> front = pareto_front(labeled.points);
  const std::set<std::size_t> on_front(front.begin(), front.end());
  const std::vector<std::size_t> marked_list = highlight_indices(labeled, highlights);
  const std::set<std::size_t> marked(marked_list.begin(), marked_list.end());
  std::ostringstream out;
  out << "order,temperature_c,wirelength_mm,slack,level,front,highlight\n";
  for (std::size_t i = 0; i < labeled.points.size(); ++i) {
    const ScatterPoint& p = labeled.points[i];
    out << p.order.to_string() << ',' << format_g6(p.temperature_c) << ','
        << format_g6(p.wirelength_mm) << ',' << format_g6(labeled.slack[i]) << ','
        << labeled.level[i] << ',' << on_front.count(i) << ',' << marked.count(i) << '\n';
  }
  return out.str();
}

void emit_scatter_plot(const LabeledScatter& labeled, std::span<const PlacementOrder> highlights,
                       const std::filesystem::path& path, const std::string& title) {
  const std::string svg = render_scatter_svg(labeled, highlights, title);
  const std::string csv = render_scatter_csv(labeled, highlights);
  std::filesystem::path csv_path = path;
  csv_path.replace_extension(".csv");
  for (const auto& [target, body] : {std::pair{path, svg}, std::pair{csv_path, csv}}) {
    std::ofstream out(target, std::ios::binary);
    if (!out) fail(ErrorCode::IoError, "cannot write " + target.string());
    out << body;
    if (!out) fail(ErrorCode::IoError, "write failed: " + target.string());
  }
}

}  // namespace chipletrank
