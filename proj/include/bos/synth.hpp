#ifndef BOS_SYNTH_HPP
#define BOS_SYNTH_HPP

#include <cmath>
#include <cstdint>
#include <numbers>
#include <optional>
#include <random>
#include <string>

#include "bos/core.hpp"
#include "bos/io.hpp"

namespace bos {

enum class PhantomKind { Constant, GaussianPlume, RibStep, Ramp, FromFile };

/// Analytic ground-truth phase. Coordinates are pixel-center indices.
///  - Constant:      phi = peak
///  - GaussianPlume: phi = peak exp(-((x-cx)^2 / 2 sx^2 + (y-cy)^2 / 2 sy^2))
///  - RibStep:       GaussianPlume with `rib` masked to zero
///  - Ramp:          phi = peak * x / (width - 1)
///  - FromFile:      raster read from `file_path`
/// A `rib` rectangle masks its pixels for every kind.
struct PhantomSpec {
  PhantomKind kind = PhantomKind::GaussianPlume;
  double peak = 2.0;
  double center_x = 256.0;
  double center_y = 256.0;
  double sigma_x = 60.0;
  double sigma_y = 60.0;
  std::optional<Rect> rib;
  std::string file_path;

  void validate(const GridSpec& grid) const {
    if (!std::isfinite(peak)) throw Error(Errc::BadSpec, "phantom peak must be finite");
    const bool plume = kind == PhantomKind::GaussianPlume || kind == PhantomKind::RibStep;
    if (plume && (!(sigma_x > 0.0) || !(sigma_y > 0.0)))
      throw Error(Errc::BadSpec, "phantom widths must be positive");
    if (plume && (!std::isfinite(center_x) || !std::isfinite(center_y)))
      throw Error(Errc::BadSpec, "phantom center must be finite");
    if (kind == PhantomKind::RibStep && !rib)
      throw Error(Errc::BadSpec, "rib_step phantom needs a rib rectangle");
    if (rib && !rib->inside(grid)) throw Error(Errc::BadSpec, "rib rectangle lies outside the grid");
    if (kind == PhantomKind::FromFile && file_path.empty())
      throw Error(Errc::BadSpec, "from_file phantom needs a file path");
  }
};

struct NoiseSpec {
  double sigma = 0.0;  // in units of the carrier amplitude
  std::uint64_t seed = 1;
};

template <typename Scalar>
struct FringePair {
  ScalarField<Scalar> reference;
  ScalarField<Scalar> deformed;
  CarrierSpec carrier;
};

/// Standard normal deviates from std::mt19937_64 through the Box-Muller
/// transform (both outputs used, cosine first). Both pieces are fully
/// specified, so a seed reproduces the same stream on every platform.
class GaussianStream {
 public:
  static constexpr const char* kAlgorithm = "mt19937_64+box-muller";

  explicit GaussianStream(std::uint64_t seed) : engine_(seed) {}

  double next() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    // u1 in (0, 1], u2 in [0, 1), both on the 2^-53 lattice.
    const double u1 = static_cast<double>((engine_() >> 11) + 1) * 0x1.0p-53;
    const double u2 = static_cast<double>(engine_() >> 11) * 0x1.0p-53;
    const double radius = std::sqrt(-2.0 * std::log(u1));
    const double angle = 2.0 * std::numbers::pi * u2;
    spare_ = radius * std::sin(angle);
    have_spare_ = true;
    return radius * std::cos(angle);
  }

 private:
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool have_spare_ = false;
};

template <typename Scalar>
PhaseMap<Scalar> make_phase(const PhantomSpec& spec, const GridSpec& grid) {
  spec.validate(grid);
  require_processing_grid(grid);
  Raster<Scalar> v(grid.height, grid.width);
  std::optional<Mask> mask;

  switch (spec.kind) {
    case PhantomKind::Constant:
      v.setConstant(Scalar(spec.peak));
      break;
    case PhantomKind::Ramp:
      for (Index y = 0; y < grid.height; ++y)
        for (Index x = 0; x < grid.width; ++x)
          v(y, x) = Scalar(spec.peak * static_cast<double>(x) / static_cast<double>(grid.width - 1));
      break;
    case PhantomKind::GaussianPlume:
    case PhantomKind::RibStep:
      for (Index y = 0; y < grid.height; ++y)
        for (Index x = 0; x < grid.width; ++x) {
          const double dx = (static_cast<double>(x) - spec.center_x) / spec.sigma_x;
          const double dy = (static_cast<double>(y) - spec.center_y) / spec.sigma_y;
          v(y, x) = Scalar(spec.peak * std::exp(-(dx * dx + dy * dy) / 2.0));
        }
      break;
    case PhantomKind::FromFile: {
      const Field loaded = read_image(spec.file_path);
      if (!(loaded.grid() == grid))
        throw Error(Errc::GridMismatch, "phantom file grid differs from the configured grid");
      v = loaded.values().template cast<Scalar>();
      mask = loaded.mask();
      break;
    }
  }
  if (spec.rib) mask = combine_masks(mask, rect_mask(grid, *spec.rib, false));

  PhaseMap<Scalar> out;
  out.field = ScalarField<Scalar>(grid, std::move(v), std::move(mask));
  out.field.finalize();
  out.wrapped = false;
  return out;
}

/// Reference (phi = 0) and deformed fringes I = a [1 + cos(2 pi fx x + phi)]
/// plus additive Gaussian noise of std `noise.sigma * a`; the reference draws
/// from seed, the deformed image from seed + 1. Both inherit the phase mask.
template <typename Scalar>
FringePair<Scalar> make_fringes(const PhaseMap<Scalar>& phase, const CarrierSpec& carrier,
                                const NoiseSpec& noise) {
  carrier.validate();
  if (!(noise.sigma >= 0.0) || !std::isfinite(noise.sigma))
    throw Error(Errc::BadSpec, "noise sigma must be non-negative");
  const GridSpec grid = phase.field.grid();
  const double a = carrier.amplitude;

  auto render = [&](bool with_phase, std::uint64_t seed) {
    Raster<Scalar> img(grid.height, grid.width);
    GaussianStream rng(seed);
    for (Index y = 0; y < grid.height; ++y)
      for (Index x = 0; x < grid.width; ++x) {
        const double phi = with_phase ? static_cast<double>(phase.field(x, y)) : 0.0;
        double value =
            a * (1.0 + std::cos(2.0 * std::numbers::pi * carrier.fx * static_cast<double>(x) + phi));
        if (noise.sigma > 0.0) value += noise.sigma * a * rng.next();
        img(y, x) = Scalar(value);
      }
    ScalarField<Scalar> f(grid, std::move(img), phase.field.mask());
    f.finalize();
    return f;
  };

  return FringePair<Scalar>{render(false, noise.seed), render(true, noise.seed + 1), carrier};
}

}  // namespace bos

#endif  // BOS_SYNTH_HPP
