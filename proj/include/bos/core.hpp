#ifndef BOS_CORE_HPP
#define BOS_CORE_HPP

#include <Eigen/Core>

#include <cmath>
#include <limits>
#include <map>
#include <numbers>
#include <optional>
#include <string>
#include <utility>

#include "bos/error.hpp"

namespace bos {

using Index = Eigen::Index;

/// Row-major raster: row index is y (downward), column index is x (rightward),
/// origin at the top-left pixel. Pixel centers sit at integer coordinates.
template <typename Scalar>
using Raster = Eigen::Array<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// true = valid pixel.
using Mask = Raster<bool>;

/// Smallest grid accepted by the FFT-based stages.
inline constexpr Index kMinGridSide = 8;

struct GridSpec {
  Index width = 0;
  Index height = 0;

  GridSpec() = default;
  GridSpec(Index w, Index h) : width(w), height(h) {
    if (w <= 0 || h <= 0)
      throw Error(Errc::BadSpec, "grid must be strictly positive, got " + std::to_string(w) +
                                     "x" + std::to_string(h));
  }

  Index size() const { return width * height; }
  bool operator==(const GridSpec&) const = default;
};

inline void require_processing_grid(const GridSpec& grid) {
  if (grid.width < kMinGridSide || grid.height < kMinGridSide)
    throw Error(Errc::GridTooSmall, "grid " + std::to_string(grid.width) + "x" +
                                        std::to_string(grid.height) + " is below the 8x8 minimum");
}

/// Axis-aligned pixel rectangle, half-open: [x, x+width) x [y, y+height).
struct Rect {
  Index x = 0;
  Index y = 0;
  Index width = 0;
  Index height = 0;

  bool contains(Index px, Index py) const {
    return px >= x && px < x + width && py >= y && py < y + height;
  }
  bool inside(const GridSpec& g) const {
    return x >= 0 && y >= 0 && width > 0 && height > 0 && x + width <= g.width &&
           y + height <= g.height;
  }
  bool operator==(const Rect&) const = default;
};

/// A real-valued raster with an optional validity mask. Invalid pixels hold
/// exactly 0 once the field is finalized.
template <typename Scalar>
class ScalarField {
 public:
  using Values = Raster<Scalar>;

  ScalarField() = default;

  explicit ScalarField(GridSpec grid)
      : grid_(grid), values_(Values::Zero(grid.height, grid.width)) {}

  ScalarField(GridSpec grid, Values values, std::optional<Mask> mask = std::nullopt)
      : grid_(grid), values_(std::move(values)), mask_(std::move(mask)) {
    if (values_.rows() != grid.height || values_.cols() != grid.width)
      throw Error(Errc::GridMismatch, "value raster does not match grid");
    if (mask_ && (mask_->rows() != grid.height || mask_->cols() != grid.width))
      throw Error(Errc::GridMismatch, "mask does not match grid");
  }

  const GridSpec& grid() const { return grid_; }
  Index width() const { return grid_.width; }
  Index height() const { return grid_.height; }

  const Values& values() const { return values_; }
  Values& mutable_values() {
    finalized_ = false;
    return values_;
  }

  Scalar operator()(Index x, Index y) const { return values_(y, x); }

  bool has_mask() const { return mask_.has_value(); }
  const std::optional<Mask>& mask() const { return mask_; }
  void set_mask(std::optional<Mask> mask) {
    if (mask && (mask->rows() != grid_.height || mask->cols() != grid_.width))
      throw Error(Errc::GridMismatch, "mask does not match grid");
    mask_ = std::move(mask);
    finalized_ = false;
  }

  bool valid(Index x, Index y) const { return !mask_ || (*mask_)(y, x); }

  Index valid_count() const { return mask_ ? mask_->count() : grid_.size(); }

  /// Mask materialized as a full raster (all-true when absent).
  Mask validity() const { return mask_ ? *mask_ : Mask::Constant(grid_.height, grid_.width, true); }

  /// Zeroes invalid pixels and checks that every value is finite. Invalid
  /// pixels that already compare equal to 0 (including -0) are left as is.
  ScalarField& finalize() {
    if (mask_) values_ = (*mask_ || values_ == Scalar(0)).select(values_, Scalar(0));
    if (!values_.allFinite()) throw Error(Errc::NonFinite, "field contains NaN or Inf");
    finalized_ = true;
    return *this;
  }
  bool finalized() const { return finalized_; }

  template <typename Other>
  ScalarField<Other> cast() const {
    ScalarField<Other> out(grid_, values_.template cast<Other>(), mask_);
    if (finalized_) out.finalize();
    return out;
  }

 private:
  GridSpec grid_;
  Values values_;
  std::optional<Mask> mask_;
  bool finalized_ = false;
};

using Field = ScalarField<double>;

/// Carrier fringe descriptor: spatial frequency along x (cycles/pixel) and
/// intensity amplitude.
struct CarrierSpec {
  double fx = 1.0 / 8.0;
  double amplitude = 1.0;

  void validate() const {
    if (!(fx > 0.0 && fx < 0.5))
      throw Error(Errc::BadSpec, "carrier fx must lie in (0, 0.5) cycles/pixel");
    if (!(amplitude > 0.0) || !std::isfinite(amplitude))
      throw Error(Errc::BadSpec, "carrier amplitude must be positive");
  }
};

template <typename Scalar>
struct PhaseMap {
  ScalarField<Scalar> field;  // radians
  bool wrapped = false;
  std::map<std::string, std::string> meta;
};

template <typename Scalar>
Scalar wrap_phase(Scalar value) {
  constexpr Scalar two_pi = Scalar(2) * std::numbers::pi_v<Scalar>;
  constexpr Scalar pi = std::numbers::pi_v<Scalar>;
  Scalar w = value - two_pi * std::ceil((value - pi) / two_pi);
  if (w > pi) w -= two_pi;
  if (w <= -pi) w += two_pi;
  return w;
}

template <typename Scalar>
void require_same_grid(const ScalarField<Scalar>& a, const ScalarField<Scalar>& b) {
  if (!(a.grid() == b.grid()))
    throw Error(Errc::GridMismatch, "fields have different grids");
}

/// Logical AND of two optional masks; absent means all-valid.
inline std::optional<Mask> combine_masks(const std::optional<Mask>& a,
                                         const std::optional<Mask>& b) {
  if (a && b) return Mask(*a && *b);
  if (a) return a;
  return b;
}

template <typename Scalar>
std::pair<Scalar, Scalar> masked_extrema(const ScalarField<Scalar>& f) {
  if (f.valid_count() == 0) throw Error(Errc::AllMasked, "field has no valid pixels");
  if (!f.has_mask()) return {f.values().minCoeff(), f.values().maxCoeff()};
  const Mask& m = *f.mask();
  constexpr Scalar inf = std::numeric_limits<Scalar>::infinity();
  return {m.select(f.values(), inf).minCoeff(), m.select(f.values(), -inf).maxCoeff()};
}

template <typename Scalar>
Scalar masked_max_abs(const ScalarField<Scalar>& f) {
  if (f.valid_count() == 0) throw Error(Errc::AllMasked, "field has no valid pixels");
  if (!f.has_mask()) return f.values().abs().maxCoeff();
  return f.mask()->select(f.values().abs(), Scalar(0)).maxCoeff();
}

/// Forces pixels outside `m` to 0; the result's mask is `m` AND any existing mask.
template <typename Scalar>
ScalarField<Scalar> apply_mask(const ScalarField<Scalar>& f, const Mask& m) {
  if (m.rows() != f.height() || m.cols() != f.width())
    throw Error(Errc::GridMismatch, "mask does not match field grid");
  Mask combined = f.has_mask() ? Mask(*f.mask() && m) : m;
  typename ScalarField<Scalar>::Values v = combined.select(f.values(), Scalar(0));
  ScalarField<Scalar> out(f.grid(), std::move(v), std::move(combined));
  if (std::as_const(out).values().allFinite()) out.finalize();
  return out;
}

inline Mask rect_mask(const GridSpec& grid, const Rect& r, bool inside_value) {
  Mask m = Mask::Constant(grid.height, grid.width, !inside_value);
  for (Index y = std::max<Index>(r.y, 0); y < std::min(r.y + r.height, grid.height); ++y)
    for (Index x = std::max<Index>(r.x, 0); x < std::min(r.x + r.width, grid.width); ++x)
      m(y, x) = inside_value;
  return m;
}

/// Pixels at least `margin` pixels away from every border.
inline Mask interior_mask(const GridSpec& grid, Index margin) {
  return rect_mask(grid, Rect{margin, margin, grid.width - 2 * margin, grid.height - 2 * margin},
                   true);
}

}  // namespace bos

#endif  // BOS_CORE_HPP
