#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <utility>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "kgreedy/experiment.hpp"
#include "kgreedy/trace_io.hpp"

namespace kgreedy {

namespace {

std::string fmt2(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f", v);
  return buf;
}

struct Panel {
  double x0, y0, w, h;
};

void scatter_panel(std::ostringstream& os, const Panel& p, const TraceFile& tf,
                   const std::string& title, const std::string& color) {
  double lo0 = 0.0, hi0 = 1.0, lo1 = 0.0, hi1 = 1.0;
  if (!tf.rows.empty() && tf.dim >= 2) {
    lo0 = hi0 = tf.rows.front().x[0];
    lo1 = hi1 = tf.rows.front().x[1];
    for (const TraceRow& r : tf.rows) {
      lo0 = std::min(lo0, r.x[0]);
      hi0 = std::max(hi0, r.x[0]);
      lo1 = std::min(lo1, r.x[1]);
      hi1 = std::max(hi1, r.x[1]);
    }
  }
  const double pad0 = 0.05 * std::max(hi0 - lo0, 1e-12);
  const double pad1 = 0.05 * std::max(hi1 - lo1, 1e-12);
  lo0 -= pad0; hi0 += pad0;
  lo1 -= pad1; hi1 += pad1;

  os << "<rect x=\"" << fmt2(p.x0) << "\" y=\"" << fmt2(p.y0) << "\" width=\""
     << fmt2(p.w) << "\" height=\"" << fmt2(p.h)
     << "\" fill=\"none\" stroke=\"#444444\"/>\n";
  os << "<text x=\"" << fmt2(p.x0 + p.w / 2) << "\" y=\"" << fmt2(p.y0 - 8)
     << "\" text-anchor=\"middle\" font-size=\"14\">" << title << "</text>\n";
  for (const TraceRow& r : tf.rows) {
    const double u = tf.dim >= 1 ? (r.x[0] - lo0) / (hi0 - lo0) : 0.5;
    const double v = tf.dim >= 2 ? (r.x[1] - lo1) / (hi1 - lo1) : 0.5;
    os << "<circle cx=\"" << fmt2(p.x0 + u * p.w) << "\" cy=\""
       << fmt2(p.y0 + (1.0 - v) * p.h) << "\" r=\"1.8\" fill=\"" << color
       << "\"/>\n";
  }
}

}  // namespace

std::filesystem::path emit_plot(const std::filesystem::path& dir) {
  const auto super_path = dir / "trace_super.csv";
  const auto sub_path = dir / "trace_sub.csv";
  const TraceFile super_tf = read_trace_csv(super_path);
  const TraceFile sub_tf = read_trace_csv(sub_path);
  if (super_tf.rows.empty() || sub_tf.rows.empty())
    throw std::runtime_error("emit_plot: empty trace");

  double smin = std::numeric_limits<double>::infinity();
  double smax = 0.0;
  int nmax = 1;
  for (const TraceFile* tf : {&super_tf, &sub_tf}) {
    for (const TraceRow& r : tf->rows) {
      if (r.sigma > 0.0) smin = std::min(smin, r.sigma);
      smax = std::max(smax, r.sigma);
      nmax = std::max(nmax, r.step);
    }
  }
  if (!(smax > 0.0)) throw std::runtime_error("emit_plot: no positive sigma");
  if (!std::isfinite(smin)) smin = smax;
  const double ylo = std::floor(std::log10(smin));
  const double yhi = std::ceil(std::log10(smax) + 1e-12);
  const double yspan = std::max(yhi - ylo, 1.0);

  const double W = 960, H = 720;
  const Panel psub{60, 50, 380, 280};
  const Panel psup{520, 50, 380, 280};
  const Panel pdec{60, 400, 840, 280};

  auto decay_x = [&](int n) {
    return pdec.x0 + pdec.w * (nmax > 1 ? static_cast<double>(n - 1) / (nmax - 1) : 0.5);
  };
  auto decay_y = [&](double sigma) {
    const double s = std::max(sigma, std::pow(10.0, ylo - 1.0));
    return pdec.y0 + pdec.h * (yhi - std::log10(s)) / yspan;
  };

  std::ostringstream os;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W
     << "\" height=\"" << H << "\" viewBox=\"0 0 " << W << " " << H << "\">\n";
  os << "<rect width=\"" << W << "\" height=\"" << H << "\" fill=\"#ffffff\"/>\n";
  os << "<text x=\"" << fmt2(W / 2)
     << "\" y=\"24\" text-anchor=\"middle\" font-size=\"16\">greedy kernel "
        "interpolation: selected points and decay</text>\n";

  scatter_panel(os, psub, sub_tf, "sub-domain selections", "#1f77b4");
  scatter_panel(os, psup, super_tf, "super-domain selections", "#c02ca0");

  // Decay panel frame, decade gridlines and labels.
  os << "<rect x=\"" << fmt2(pdec.x0) << "\" y=\"" << fmt2(pdec.y0)
     << "\" width=\"" << fmt2(pdec.w) << "\" height=\"" << fmt2(pdec.h)
     << "\" fill=\"none\" stroke=\"#444444\"/>\n";
  for (double e = ylo; e <= yhi + 1e-9; e += 1.0) {
    const double y = pdec.y0 + pdec.h * (yhi - e) / yspan;
    os << "<line x1=\"" << fmt2(pdec.x0) << "\" y1=\"" << fmt2(y) << "\" x2=\""
       << fmt2(pdec.x0 + pdec.w) << "\" y2=\"" << fmt2(y)
       << "\" stroke=\"#dddddd\"/>\n";
    os << "<text x=\"" << fmt2(pdec.x0 - 8) << "\" y=\"" << fmt2(y + 4)
       << "\" text-anchor=\"end\" font-size=\"11\">1e" << static_cast<int>(e)
       << "</text>\n";
  }
  os << "<text x=\"" << fmt2(pdec.x0 + pdec.w / 2) << "\" y=\""
     << fmt2(pdec.y0 + pdec.h + 32)
     << "\" text-anchor=\"middle\" font-size=\"13\">selected points n</text>\n";

  const std::pair<const TraceFile*, const char*> curves[] = {
      {&sub_tf, "#1f77b4"}, {&super_tf, "#c02ca0"}};
  for (const auto& [tf, color] : curves) {
    os << "<polyline fill=\"none\" stroke=\"" << color
       << "\" stroke-width=\"1.5\" points=\"";
    for (const TraceRow& r : tf->rows)
      os << fmt2(decay_x(r.step)) << ',' << fmt2(decay_y(r.sigma)) << ' ';
    os << "\"/>\n";
  }
  os << "<rect x=\"" << fmt2(pdec.x0 + pdec.w - 190) << "\" y=\""
     << fmt2(pdec.y0 + 10)
     << "\" width=\"180\" height=\"44\" fill=\"#ffffff\" stroke=\"#cccccc\"/>\n";
  os << "<line x1=\"" << fmt2(pdec.x0 + pdec.w - 180) << "\" y1=\""
     << fmt2(pdec.y0 + 24) << "\" x2=\"" << fmt2(pdec.x0 + pdec.w - 150)
     << "\" y2=\"" << fmt2(pdec.y0 + 24)
     << "\" stroke=\"#1f77b4\" stroke-width=\"2\"/>\n";
  os << "<text x=\"" << fmt2(pdec.x0 + pdec.w - 144) << "\" y=\""
     << fmt2(pdec.y0 + 28) << "\" font-size=\"12\">sub-domain</text>\n";
  os << "<line x1=\"" << fmt2(pdec.x0 + pdec.w - 180) << "\" y1=\""
     << fmt2(pdec.y0 + 42) << "\" x2=\"" << fmt2(pdec.x0 + pdec.w - 150)
     << "\" y2=\"" << fmt2(pdec.y0 + 42)
     << "\" stroke=\"#c02ca0\" stroke-width=\"2\"/>\n";
  os << "<text x=\"" << fmt2(pdec.x0 + pdec.w - 144) << "\" y=\""
     << fmt2(pdec.y0 + 46) << "\" font-size=\"12\">super-domain</text>\n";
  os << "</svg>\n";

  const auto out_path = dir / "plot.svg";
  std::ofstream out(out_path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + out_path.string());
  out << os.str();
  return out_path;
}

}  // namespace kgreedy
