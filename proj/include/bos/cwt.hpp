#ifndef BOS_CWT_HPP
#define BOS_CWT_HPP

#include <algorithm>
#include <cmath>
#include <numbers>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "bos/core.hpp"
#include "bos/fft.hpp"

namespace bos {

/// Isotropic 2D Mexican hat, psi(x, y) = (2 - r^2) exp(-r^2 / 2).
template <typename Scalar>
Scalar mexican_hat(Scalar x, Scalar y) {
  const Scalar r2 = x * x + y * y;
  return (Scalar(2) - r2) * std::exp(-r2 / Scalar(2));
}

/// Continuous 2D Fourier transform of `mexican_hat` in angular frequency,
/// psi_hat(w) = integral psi(x) exp(-i w.x) dx = 2 pi |w|^2 exp(-|w|^2 / 2).
/// Real and even; zero at the origin, peak at |w| = sqrt(2).
template <typename Scalar>
Scalar mexican_hat_spectrum(Scalar wx, Scalar wy) {
  const Scalar r2 = wx * wx + wy * wy;
  return Scalar(2) * std::numbers::pi_v<Scalar> * r2 * std::exp(-r2 / Scalar(2));
}

enum class Boundary {
  Periodic,   // circular indexing on the grid itself
  Replicate,  // edge-replicated padding of 2*alpha_max, cropped afterwards
};

enum class ThresholdMode {
  Magnitude,  // zero values with |v| < fraction * max|v|
  PeakClip,   // zero values within fraction of the positive/negative extremum
};

struct CwtParams {
  std::vector<double> scales = default_scales();
  double threshold_fraction = 0.01;
  ThresholdMode threshold_mode = ThresholdMode::Magnitude;
  bool normalize = true;
  bool threshold = true;
  Boundary boundary = Boundary::Replicate;

  /// `count` geometrically spaced scales from `lo` to `hi` inclusive.
  static std::vector<double> log_spaced(double lo, double hi, int count) {
    if (!(lo > 0.0) || !(hi >= lo) || count < 1)
      throw Error(Errc::BadScale, "log-spaced scales need 0 < lo <= hi and count >= 1");
    std::vector<double> out(count);
    if (count == 1) {
      out[0] = lo;
      return out;
    }
    const double step = std::log(hi / lo) / (count - 1);
    for (int i = 0; i < count; ++i) out[i] = lo * std::exp(step * i);
    out.front() = lo;
    out.back() = hi;
    return out;
  }

  static constexpr double kDisplayScales[] = {3.0, 10.0, 50.0, 100.0};

  /// 32 log-spaced scales in [1, 100]; the log-nearest sample to each display
  /// scale is snapped onto it so the figure scales are always present.
  static std::vector<double> default_scales() {
    std::vector<double> s = log_spaced(1.0, 100.0, 32);
    for (double target : kDisplayScales) {
      std::size_t best = 0;
      double best_dist = std::numeric_limits<double>::infinity();
      for (std::size_t i = 0; i < s.size(); ++i) {
        const double d = std::abs(std::log(s[i] / target));
        if (d < best_dist) {
          best_dist = d;
          best = i;
        }
      }
      s[best] = target;
    }
    return s;
  }

  void validate() const {
    if (scales.empty()) throw Error(Errc::BadScale, "scale list is empty");
    for (std::size_t i = 0; i < scales.size(); ++i) {
      if (!(scales[i] > 0.0) || !std::isfinite(scales[i]))
        throw Error(Errc::BadScale, "scale must be positive, got " + std::to_string(scales[i]));
      if (i > 0 && !(scales[i] > scales[i - 1]))
        throw Error(Errc::BadScale, "scales must be strictly increasing");
    }
    if (!(threshold_fraction >= 0.0 && threshold_fraction < 1.0))
      throw Error(Errc::BadSpec, "threshold fraction must lie in [0, 1)");
  }
};

template <typename Scalar>
struct WaveletStack {
  std::vector<double> scales;
  std::vector<ScalarField<Scalar>> planes;
  bool normalized = false;
  bool thresholded = false;
  std::vector<std::string> warnings;
};

/// Diagnostic emitted for scales where the dilated wavelet spectrum extends
/// past the sampling Nyquist limit.
inline std::optional<std::string> aliasing_warning(double alpha) {
  if (alpha >= 1.0) return std::nullopt;
  std::ostringstream os;
  os << "scale " << alpha << " < 1: wavelet spectrum exceeds Nyquist, plane may be aliased";
  return os.str();
}

namespace detail {

/// Per-axis alias sums of the separable factors of psi_hat on an n-point
/// DFT axis: a0 = sum_m exp(-w^2/2), a2 = sum_m w^2 exp(-w^2/2), with
/// w = 2 pi alpha (k/n + m). Folding the aliases reproduces the spectrum of
/// the unit-sampled, n-periodized kernel (1/alpha) psi(x/alpha).
template <typename Scalar>
void axis_alias_sums(Index n, double alpha, std::vector<Scalar>& a0, std::vector<Scalar>& a2) {
  const Index images = static_cast<Index>(std::ceil(6.2 / alpha)) + 1;
  a0.assign(n, Scalar(0));
  a2.assign(n, Scalar(0));
  const Scalar two_pi_alpha = Scalar(2) * std::numbers::pi_v<Scalar> * Scalar(alpha);
  for (Index k = 0; k < n; ++k) {
    const Index kb = std::abs(signed_bin(k, n));
    const Scalar f = Scalar(kb) / Scalar(n);
    Scalar s0 = 0, s2 = 0;
    for (Index m = -images; m <= images; ++m) {
      const Scalar w = two_pi_alpha * (f + Scalar(m));
      const Scalar g = std::exp(-w * w / Scalar(2));
      s0 += g;
      s2 += w * w * g;
    }
    a0[k] = s0;
    a2[k] = s2;
  }
}

}  // namespace detail

/// Fourier-domain multiplier alpha * psi_hat(2 pi alpha f) on a rows x cols
/// DFT grid, with spectral aliases folded in and the DC bin pinned to
/// psi_hat(0) = 0.
template <typename Scalar>
Raster<Scalar> wavelet_multiplier(Index rows, Index cols, double alpha) {
  std::vector<Scalar> ax0, ax2, ay0, ay2;
  detail::axis_alias_sums(cols, alpha, ax0, ax2);
  detail::axis_alias_sums(rows, alpha, ay0, ay2);
  const Scalar scale = Scalar(alpha) * Scalar(2) * std::numbers::pi_v<Scalar>;
  Raster<Scalar> k(rows, cols);
  for (Index r = 0; r < rows; ++r)
    for (Index c = 0; c < cols; ++c) k(r, c) = scale * (ax2[c] * ay0[r] + ax0[c] * ay2[r]);
  k(0, 0) = Scalar(0);
  return k;
}

/// Holds the phase spectrum so a sweep pays for one forward transform.
template <typename Scalar>
class CwtEngine {
 public:
  CwtEngine(const ScalarField<Scalar>& phase, Boundary boundary, double max_scale)
      : grid_(phase.grid()), mask_(phase.mask()) {
    require_processing_grid(grid_);
    if (boundary == Boundary::Periodic) {
      rows_ = grid_.height;
      cols_ = grid_.width;
    } else {
      pad_ = static_cast<Index>(std::ceil(2.0 * max_scale));
      rows_ = next_fast_size(grid_.height + 2 * pad_);
      cols_ = next_fast_size(grid_.width + 2 * pad_);
    }
    spectrum_.resize(rows_, cols_);
    const auto& v = phase.values();
    for (Index r = 0; r < rows_; ++r) {
      const Index sy = std::clamp<Index>(r - pad_, 0, grid_.height - 1);
      for (Index c = 0; c < cols_; ++c) {
        const Index sx = std::clamp<Index>(c - pad_, 0, grid_.width - 1);
        spectrum_(r, c) = v(sy, sx);
      }
    }
    fft_.forward(spectrum_);
  }

  ScalarField<Scalar> plane(double alpha) {
    if (!(alpha > 0.0) || !std::isfinite(alpha))
      throw Error(Errc::BadScale, "scale must be positive, got " + std::to_string(alpha));
    ComplexRaster<Scalar> work = spectrum_ * wavelet_multiplier<Scalar>(rows_, cols_, alpha);
    fft_.inverse(work);
    auto crop = work.block(pad_, pad_, grid_.height, grid_.width);
    const Scalar re = crop.real().abs().maxCoeff();
    const Scalar im = crop.imag().abs().maxCoeff();
    if (im > Scalar(1e-9) * std::max(re, std::numeric_limits<Scalar>::min()) &&
        im > std::numeric_limits<Scalar>::epsilon())
      throw Error(Errc::NonFinite, "imaginary residue exceeds 1e-9 relative");
    ScalarField<Scalar> out(grid_, crop.real(), mask_);
    out.finalize();
    return out;
  }

  Index pad() const { return pad_; }

 private:
  GridSpec grid_;
  std::optional<Mask> mask_;
  Index pad_ = 0;
  Index rows_ = 0;
  Index cols_ = 0;
  ComplexRaster<Scalar> spectrum_;
  Fft2<Scalar> fft_;
};

/// One wavelet response plane: W = IDFT[ DFT(phase) * alpha psi_hat(2 pi alpha f) ].
/// Periodic boundaries unless `boundary` asks for replicated padding.
template <typename Scalar>
ScalarField<Scalar> cwt_plane(const PhaseMap<Scalar>& phase, double alpha,
                              Boundary boundary = Boundary::Periodic) {
  if (!(alpha > 0.0) || !std::isfinite(alpha))
    throw Error(Errc::BadScale, "scale must be positive, got " + std::to_string(alpha));
  CwtEngine<Scalar> engine(phase.field, boundary, alpha);
  return engine.plane(alpha);
}

template <typename Scalar>
WaveletStack<Scalar> normalize_stack(WaveletStack<Scalar> s) {
  for (auto& plane : s.planes) {
    if (plane.valid_count() == 0) continue;
    const Scalar peak = masked_max_abs(plane);
    if (peak > Scalar(0)) {
      plane.mutable_values() /= peak;
      plane.finalize();
    }
  }
  s.normalized = true;
  return s;
}

template <typename Scalar>
WaveletStack<Scalar> threshold_stack(WaveletStack<Scalar> s, double fraction,
                                     ThresholdMode mode = ThresholdMode::Magnitude) {
  if (!(fraction >= 0.0 && fraction < 1.0))
    throw Error(Errc::BadSpec, "threshold fraction must lie in [0, 1)");
  const Scalar f = Scalar(fraction);
  for (auto& plane : s.planes) {
    if (plane.valid_count() == 0) continue;
    auto& v = plane.mutable_values();
    if (mode == ThresholdMode::Magnitude) {
      const Scalar cut = f * masked_max_abs(plane);
      v = (v.abs() < cut).select(Scalar(0), v);
    } else {
      const auto [lo, hi] = masked_extrema(plane);
      for (Index i = 0; i < v.size(); ++i) {
        const Scalar x = v.data()[i];
        const bool near_max = hi > Scalar(0) && (hi - x) < f * hi;
        const bool near_min = lo < Scalar(0) && (x - lo) < -f * lo;
        if (near_max || near_min) v.data()[i] = Scalar(0);
      }
    }
    plane.finalize();
  }
  s.thresholded = true;
  return s;
}

template <typename Scalar>
WaveletStack<Scalar> cwt_sweep(const PhaseMap<Scalar>& phase, const CwtParams& p) {
  p.validate();
  require_processing_grid(phase.field.grid());
  if (phase.field.valid_count() == 0)
    throw Error(Errc::AllMasked, "phase map has no valid pixels");

  WaveletStack<Scalar> s;
  s.scales = p.scales;
  for (double alpha : p.scales)
    if (auto w = aliasing_warning(alpha)) s.warnings.push_back(*w);

  CwtEngine<Scalar> engine(phase.field, p.boundary, p.scales.back());
  s.planes.reserve(p.scales.size());
  for (double alpha : p.scales) s.planes.push_back(engine.plane(alpha));

  if (p.normalize) s = normalize_stack(std::move(s));
  if (p.threshold) s = threshold_stack(std::move(s), p.threshold_fraction, p.threshold_mode);
  return s;
}

}  // namespace bos

#endif  // BOS_CWT_HPP
