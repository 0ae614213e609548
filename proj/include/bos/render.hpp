#ifndef BOS_RENDER_HPP
#define BOS_RENDER_HPP

#include <array>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "bos/core.hpp"

namespace bos {

using Rgb = std::array<std::uint8_t, 3>;

/// Color for invalid pixels in heatmaps; not reachable by the colormap.
inline constexpr Rgb kMaskColor{255, 255, 255};

/// Piecewise-linear "jet": dark blue, blue, cyan, yellow, red, dark red at
/// t = 0, 1/8, 3/8, 5/8, 7/8, 1. Inputs are clamped to [0, 1].
Rgb jet(double t);

/// Binary PPM (P6) heatmap; valid pixels map masked-min..masked-max onto jet,
/// a constant field maps to the middle of the colormap.
std::vector<std::uint8_t> encode_heatmap(const Field& f);

/// Sidecar text: masked min/max, colormap name and mask color.
std::string heatmap_annotation(const Field& f);

struct ContourPoint {
  double x;
  double y;
};

struct Contour {
  double level;
  std::vector<ContourPoint> points;  // closed loops repeat the first point
};

/// `count` levels evenly spaced strictly between the masked min and max.
std::vector<double> contour_levels(const Field& f, int count);

/// Marching squares with linear edge interpolation over cells whose four
/// corners are valid. A corner is "above" when its value exceeds the level;
/// saddles are split by comparing the cell-center average with the level.
/// Cell segments are chained into polylines.
std::vector<Contour> extract_contours(const Field& f, std::span<const double> levels);

/// CSV with header `level,segment,x,y`; one row per polyline vertex.
std::string contours_csv(std::span<const Contour> contours);

enum class RenderStyle { Heatmap, Contours };

/// Heatmap: writes `path` (PPM) and `path` + ".txt" (annotation).
/// Contours: writes `path` (CSV) with `levels` levels.
void write_render(const Field& f, const std::filesystem::path& path, RenderStyle style,
                  int levels = 8);

}  // namespace bos

#endif  // BOS_RENDER_HPP
