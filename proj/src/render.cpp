#include "bos/render.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <sstream>

#include "bos/io.hpp"

namespace bos {

Rgb jet(double t) {
  struct Stop {
    double t, r, g, b;
  };
  static constexpr Stop stops[] = {{0.0, 0.0, 0.0, 0.5},   {0.125, 0.0, 0.0, 1.0},
                                   {0.375, 0.0, 1.0, 1.0}, {0.625, 1.0, 1.0, 0.0},
                                   {0.875, 1.0, 0.0, 0.0}, {1.0, 0.5, 0.0, 0.0}};
  if (!(t > 0.0)) t = 0.0;
  if (t > 1.0) t = 1.0;
  std::size_t i = 0;
  while (i + 2 < std::size(stops) && t > stops[i + 1].t) ++i;
  const Stop& a = stops[i];
  const Stop& b = stops[i + 1];
  const double s = (t - a.t) / (b.t - a.t);
  auto channel = [s](double lo, double hi) {
    return static_cast<std::uint8_t>(std::lround(255.0 * (lo + s * (hi - lo))));
  };
  return {channel(a.r, b.r), channel(a.g, b.g), channel(a.b, b.b)};
}

std::vector<std::uint8_t> encode_heatmap(const Field& f) {
  const std::string header =
      "P6\n" + std::to_string(f.width()) + " " + std::to_string(f.height()) + "\n255\n";
  std::vector<std::uint8_t> out(header.begin(), header.end());
  out.reserve(header.size() + 3 * static_cast<std::size_t>(f.grid().size()));
  double lo = 0.0, hi = 0.0;
  const bool any = f.valid_count() > 0;
  if (any) std::tie(lo, hi) = masked_extrema(f);
  for (Index y = 0; y < f.height(); ++y)
    for (Index x = 0; x < f.width(); ++x) {
      Rgb c = kMaskColor;
      if (f.valid(x, y)) c = jet(hi > lo ? (f(x, y) - lo) / (hi - lo) : 0.5);
      out.insert(out.end(), c.begin(), c.end());
    }
  return out;
}

std::string heatmap_annotation(const Field& f) {
  std::ostringstream os;
  os.precision(17);
  if (f.valid_count() > 0) {
    const auto [lo, hi] = masked_extrema(f);
    os << "min " << lo << "\nmax " << hi << "\n";
  } else {
    os << "min none\nmax none\n";
  }
  os << "colormap jet\nmask_color " << int(kMaskColor[0]) << " " << int(kMaskColor[1]) << " "
     << int(kMaskColor[2]) << "\n";
  return os.str();
}

std::vector<double> contour_levels(const Field& f, int count) {
  std::vector<double> levels;
  if (count <= 0 || f.valid_count() == 0) return levels;
  const auto [lo, hi] = masked_extrema(f);
  if (!(hi > lo)) return levels;
  for (int i = 0; i < count; ++i) levels.push_back(lo + (hi - lo) * (i + 1) / (count + 1));
  return levels;
}

namespace {

// Edge ids: horizontal edge (x,y)-(x+1,y) -> 2*(y*W+x); vertical edge
// (x,y)-(x,y+1) -> 2*(y*W+x)+1.
struct Segment {
  Index a, b;
};

ContourPoint edge_point(const Field& f, Index edge, double level) {
  const Index cell = edge / 2;
  const Index x = cell % f.width(), y = cell / f.width();
  const bool vertical = edge % 2 == 1;
  const double v0 = f(x, y);
  const double v1 = vertical ? f(x, y + 1) : f(x + 1, y);
  const double t = (level - v0) / (v1 - v0);
  return vertical ? ContourPoint{double(x), double(y) + t} : ContourPoint{double(x) + t, double(y)};
}

std::vector<Segment> cell_segments(const Field& f, double level) {
  std::vector<Segment> segs;
  const Index w = f.width();
  auto h_edge = [w](Index x, Index y) { return 2 * (y * w + x); };
  auto v_edge = [w](Index x, Index y) { return 2 * (y * w + x) + 1; };
  for (Index y = 0; y + 1 < f.height(); ++y)
    for (Index x = 0; x + 1 < w; ++x) {
      if (!f.valid(x, y) || !f.valid(x + 1, y) || !f.valid(x + 1, y + 1) || !f.valid(x, y + 1))
        continue;
      // Corners clockwise from top-left.
      const double v[4] = {f(x, y), f(x + 1, y), f(x + 1, y + 1), f(x, y + 1)};
      const bool up[4] = {v[0] > level, v[1] > level, v[2] > level, v[3] > level};
      const Index top = h_edge(x, y), right = v_edge(x + 1, y), bottom = h_edge(x, y + 1),
                  left = v_edge(x, y);
      // Edge i joins corner i and corner i+1.
      const Index edges[4] = {top, right, bottom, left};
      int crossings = 0;
      Index crossed[4];
      for (int i = 0; i < 4; ++i)
        if (up[i] != up[(i + 1) % 4]) crossed[crossings++] = edges[i];
      if (crossings == 2) {
        segs.push_back({crossed[0], crossed[1]});
      } else if (crossings == 4) {
        const bool center_up = (v[0] + v[1] + v[2] + v[3]) / 4.0 > level;
        // Corners disagreeing with the center are cut off by their two edges.
        for (int i = 0; i < 4; ++i)
          if (up[i] != center_up) segs.push_back({edges[(i + 3) % 4], edges[i]});
      }
    }
  return segs;
}

}  // namespace

std::vector<Contour> extract_contours(const Field& f, std::span<const double> levels) {
  std::vector<Contour> out;
  for (double level : levels) {
    const std::vector<Segment> segs = cell_segments(f, level);
    std::map<Index, std::vector<std::size_t>> by_edge;
    for (std::size_t i = 0; i < segs.size(); ++i) {
      by_edge[segs[i].a].push_back(i);
      by_edge[segs[i].b].push_back(i);
    }
    std::vector<char> used(segs.size(), 0);
    auto walk = [&](std::size_t first, Index start_edge) {
      std::vector<Index> chain{start_edge};
      std::size_t seg = first;
      Index edge = start_edge;
      for (;;) {
        used[seg] = 1;
        edge = segs[seg].a == edge ? segs[seg].b : segs[seg].a;
        chain.push_back(edge);
        std::size_t next = segs.size();
        for (std::size_t cand : by_edge[edge])
          if (!used[cand]) next = cand;
        if (next == segs.size()) break;
        seg = next;
      }
      Contour c{level, {}};
      c.points.reserve(chain.size());
      for (Index e : chain) c.points.push_back(edge_point(f, e, level));
      out.push_back(std::move(c));
    };
    // Open chains start at an end (an edge used once); then closed loops.
    for (std::size_t i = 0; i < segs.size(); ++i) {
      if (used[i]) continue;
      if (by_edge[segs[i].a].size() == 1)
        walk(i, segs[i].a);
      else if (by_edge[segs[i].b].size() == 1)
        walk(i, segs[i].b);
    }
    for (std::size_t i = 0; i < segs.size(); ++i)
      if (!used[i]) walk(i, segs[i].a);
  }
  return out;
}

std::string contours_csv(std::span<const Contour> contours) {
  std::string s = "level,segment,x,y\n";
  char buf[128];
  for (std::size_t k = 0; k < contours.size(); ++k)
    for (const ContourPoint& p : contours[k].points) {
      std::snprintf(buf, sizeof buf, "%.17g,%zu,%.17g,%.17g\n", contours[k].level, k, p.x, p.y);
      s += buf;
    }
  return s;
}

void write_render(const Field& f, const std::filesystem::path& path, RenderStyle style,
                  int levels) {
  if (style == RenderStyle::Heatmap) {
    write_bytes_atomic(path, encode_heatmap(f));
    std::filesystem::path side = path;
    side += ".txt";
    write_text_atomic(side, heatmap_annotation(f));
  } else {
    const std::vector<double> lv = contour_levels(f, levels);
    write_text_atomic(path, contours_csv(extract_contours(f, lv)));
  }
}

}  // namespace bos
