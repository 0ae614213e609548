#ifndef BOS_WFT_HPP
#define BOS_WFT_HPP

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <optional>
#include <queue>
#include <span>
#include <sstream>
#include <utility>
#include <vector>

#include "bos/core.hpp"
#include "bos/fft.hpp"

namespace bos {

/// Windowed Fourier ridge parameters. Frequencies are in cycles/pixel.
struct DemodParams {
  double window_sigma = 10.0;
  std::pair<double, double> band_x{1.0 / 8.0 - 0.1, 1.0 / 8.0 + 0.1};
  std::pair<double, double> band_y{-0.1, 0.1};
  double step = 0.005;

  static DemodParams for_carrier(double fx) {
    DemodParams p;
    p.band_x = {fx - 0.1, fx + 0.1};
    return p;
  }

  void validate() const {
    if (!(window_sigma > 0.0) || !std::isfinite(window_sigma))
      throw Error(Errc::BadSpec, "window sigma must be positive");
    if (!(step > 0.0) || !std::isfinite(step))
      throw Error(Errc::BadSpec, "frequency step must be positive");
    for (const auto& [lo, hi] : {band_x, band_y}) {
      if (!(lo > -0.5 && hi < 0.5))
        throw Error(Errc::BadFrequency, "search band must lie inside (-0.5, 0.5) cycles/pixel");
      if (lo > hi) throw Error(Errc::EmptyBand, "search band has no frequency samples");
    }
  }

  std::vector<double> frequencies_x() const { return sample(band_x); }
  std::vector<double> frequencies_y() const { return sample(band_y); }

  /// Zero padding on each side of the image.
  Index padding() const { return static_cast<Index>(std::ceil(4.0 * window_sigma)); }
  /// Pixels closer than this to the border are low-confidence.
  Index interior_margin() const { return static_cast<Index>(std::ceil(3.0 * window_sigma)); }

 private:
  std::vector<double> sample(const std::pair<double, double>& band) const {
    std::vector<double> out;
    for (Index i = 0;; ++i) {
      const double f = band.first + static_cast<double>(i) * step;
      if (f > band.second + 1e-12) break;
      out.push_back(f);
    }
    return out;
  }
};

template <typename Scalar>
struct RidgeResult {
  PhaseMap<Scalar> phase;          // wrapped
  ScalarField<Scalar> freq_x;      // cycles/pixel
  ScalarField<Scalar> freq_y;
  ScalarField<Scalar> amplitude;   // |response| at the ridge
  Mask interior;                   // false within 3 sigma of the border
};

/// Gaussian-windowed Fourier analysis of one image. For a frequency (u, v) the
/// response at pixel (x, y) is the inner product of the image with the atom
///   w(xi - x, eta - y) exp(i 2 pi (u (xi - x) + v (eta - y))),
/// w(t) = exp(-|t|^2 / (2 sigma^2)). The image is zero padded by ceil(4 sigma)
/// per side and the window taps run over every lag that cannot wrap around the
/// padded length (at least 8 sigma, where w < 2e-14). The window is separable,
/// so the 2D convolution runs as a row pass per u and a column pass per v.
template <typename Scalar>
class WindowedFourier {
 public:
  using Complex = std::complex<Scalar>;

  WindowedFourier(const ScalarField<Scalar>& img, double sigma)
      : width_(img.width()), height_(img.height()), sigma_(sigma) {
    if (!(sigma > 0.0)) throw Error(Errc::BadSpec, "window sigma must be positive");
    pad_ = static_cast<Index>(std::ceil(4.0 * sigma));
    nx_ = next_fast_size(width_ + 2 * pad_);
    ny_ = next_fast_size(height_ + 2 * pad_);
    inverse_1d_.SetFlag(Eigen::FFT<Scalar>::Unscaled);
    row_spec_ = ComplexRaster<Scalar>::Zero(height_, nx_);
    row_spec_.leftCols(width_) = img.values().template cast<Complex>();
    fft_.rows(row_spec_, true);
  }

  Index padding() const { return pad_; }

  /// Runs the row pass for frequency u; subsequent `column_pass` calls reuse it.
  void row_pass(double u) {
    check_frequency(u);
    const std::vector<Complex> kx = kernel_spectrum(u, nx_, width_);
    ComplexRaster<Scalar> rows = row_spec_;
    for (Index r = 0; r < height_; ++r)
      for (Index c = 0; c < nx_; ++c) rows(r, c) *= kx[c];
    fft_.rows(rows, false);
    col_spec_ = ColMajor::Zero(ny_, width_);
    col_spec_.topRows(height_) = rows.leftCols(width_);
    std::vector<Complex> tmp(ny_);
    for (Index c = 0; c < width_; ++c) {
      Complex* col = col_spec_.data() + c * ny_;
      fft_.run_1d(tmp.data(), col, ny_, true);
      std::copy(tmp.begin(), tmp.end(), col);
    }
  }

  /// Response for (u, v) where u is the frequency of the last `row_pass`.
  void column_pass(double v, ComplexRaster<Scalar>& out) {
    out.resize(height_, width_);
    visit_columns(v, [&](Index c, const Complex* col) {
      for (Index r = 0; r < height_; ++r) out(r, c) = col[r];
    });
  }

  /// Column pass that hands each finished column (`height` values, top to
  /// bottom) to `fn(c, values)` instead of storing the full response.
  template <typename Fn>
  void visit_columns(double v, Fn&& fn) {
    check_frequency(v);
    std::vector<Complex> ky = kernel_spectrum(v, ny_, height_);
    const Scalar inv_n = Scalar(1) / Scalar(ny_);
    for (Complex& k : ky) k *= inv_n;
    col_in_.resize(ny_);
    col_out_.resize(ny_);
    for (Index c = 0; c < width_; ++c) {
      const Complex* col = col_spec_.data() + c * ny_;
      for (Index r = 0; r < ny_; ++r) col_in_[r] = col[r] * ky[r];
      inverse_1d_.inv(col_out_.data(), col_in_.data(), ny_);
      fn(c, static_cast<const Complex*>(col_out_.data()));
    }
  }

  ComplexRaster<Scalar> response(double u, double v) {
    row_pass(u);
    ComplexRaster<Scalar> out;
    column_pass(v, out);
    return out;
  }

 private:
  using ColMajor = Eigen::Array<Complex, Eigen::Dynamic, Eigen::Dynamic, Eigen::ColMajor>;

  static void check_frequency(double f) {
    if (!(std::abs(f) <= 0.5))
      throw Error(Errc::BadFrequency, "frequency outside Nyquist: " + std::to_string(f));
  }

  /// DFT of g(t) = w(t) exp(i 2 pi f t), laid out circularly on n samples.
  std::vector<Complex> kernel_spectrum(double f, Index n, Index extent) {
    std::vector<Complex> taps(n, Complex(0)), spec(n);
    const double two_sigma2 = 2.0 * sigma_ * sigma_;
    const Index reach = std::min((n - 1) / 2, n - extent);
    for (Index t = -reach; t <= reach; ++t) {
      const double w = std::exp(-static_cast<double>(t * t) / two_sigma2);
      const double arg = 2.0 * std::numbers::pi * f * static_cast<double>(t);
      taps[(t + n) % n] = Complex(Scalar(w * std::cos(arg)), Scalar(w * std::sin(arg)));
    }
    fft_.run_1d(spec.data(), taps.data(), n, true);
    return spec;
  }

  Index width_, height_;
  double sigma_;
  Index pad_ = 0;
  Index nx_ = 0, ny_ = 0;
  ComplexRaster<Scalar> row_spec_;
  ColMajor col_spec_;
  Fft2<Scalar> fft_;
  Eigen::FFT<Scalar> inverse_1d_;
  std::vector<Complex> col_in_, col_out_;
};

/// Windowed Fourier response of `img` at a single frequency (u, v).
template <typename Scalar>
ComplexRaster<Scalar> windowed_response(const ScalarField<Scalar>& img, double u, double v,
                                        double sigma) {
  if (!(std::abs(u) <= 0.5) || !(std::abs(v) <= 0.5))
    throw Error(Errc::BadFrequency, "frequency outside Nyquist");
  WindowedFourier<Scalar> wf(img, sigma);
  return wf.response(u, v);
}

/// Windowed Fourier ridge demodulation: per pixel, the frequency-grid point
/// maximizing |response|; the wrapped phase is the argument there. Ties go to
/// the smallest u, then the smallest v.
template <typename Scalar>
RidgeResult<Scalar> demodulate(const ScalarField<Scalar>& img, const DemodParams& p) {
  p.validate();
  require_processing_grid(img.grid());
  if (!img.values().allFinite()) throw Error(Errc::NonFinite, "fringe image is not finite");
  const std::vector<double> us = p.frequencies_x();
  const std::vector<double> vs = p.frequencies_y();
  if (us.empty() || vs.empty()) throw Error(Errc::EmptyBand, "frequency grid is empty");

  const Index h = img.height(), w = img.width();
  using ColArray = Eigen::Array<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::ColMajor>;
  using ColComplex = Eigen::Array<std::complex<Scalar>, Eigen::Dynamic, Eigen::Dynamic, Eigen::ColMajor>;
  ColArray best_mag2 = ColArray::Constant(h, w, Scalar(-1));
  ColComplex best_c(h, w);
  ColArray best_uc(h, w), best_vc(h, w);

  WindowedFourier<Scalar> wf(img, p.window_sigma);
  for (double u : us) {
    wf.row_pass(u);
    for (double v : vs) {
      wf.visit_columns(v, [&](Index c, const std::complex<Scalar>* col) {
        Scalar* m2_best = best_mag2.data() + c * h;
        for (Index r = 0; r < h; ++r) {
          const Scalar m2 = std::norm(col[r]);
          if (m2 > m2_best[r]) {
            m2_best[r] = m2;
            best_c(r, c) = col[r];
            best_uc(r, c) = Scalar(u);
            best_vc(r, c) = Scalar(v);
          }
        }
      });
    }
  }
  const ComplexRaster<Scalar> best = best_c;
  Raster<Scalar> best_u = best_uc, best_v = best_vc;

  const std::optional<Mask>& mask = img.mask();
  Raster<Scalar> phase(h, w);
  for (Index i = 0; i < h * w; ++i) phase.data()[i] = wrap_phase(std::arg(best.data()[i]));

  RidgeResult<Scalar> out;
  out.phase.field = ScalarField<Scalar>(img.grid(), std::move(phase), mask);
  out.phase.field.finalize();
  out.phase.wrapped = true;
  std::ostringstream sig, bx, by, st;
  sig << p.window_sigma;
  bx << p.band_x.first << "," << p.band_x.second;
  by << p.band_y.first << "," << p.band_y.second;
  st << p.step;
  out.phase.meta = {{"window_sigma", sig.str()}, {"band_x", bx.str()}, {"band_y", by.str()},
                    {"step", st.str()}};
  out.freq_x = ScalarField<Scalar>(img.grid(), std::move(best_u), mask);
  out.freq_x.finalize();
  out.freq_y = ScalarField<Scalar>(img.grid(), std::move(best_v), mask);
  out.freq_y.finalize();
  out.amplitude = ScalarField<Scalar>(img.grid(), Raster<Scalar>(best_mag2.sqrt()), mask);
  out.amplitude.finalize();
  out.interior = interior_mask(img.grid(), p.interior_margin());
  return out;
}

/// wrap(deformed - reference) per pixel; valid where both inputs are valid.
template <typename Scalar>
PhaseMap<Scalar> relative_phase(const PhaseMap<Scalar>& deformed,
                                const PhaseMap<Scalar>& reference) {
  require_same_grid(deformed.field, reference.field);
  Raster<Scalar> diff = deformed.field.values() - reference.field.values();
  diff = diff.unaryExpr([](Scalar d) { return wrap_phase(d); });
  PhaseMap<Scalar> out;
  out.field = ScalarField<Scalar>(deformed.field.grid(), std::move(diff),
                                  combine_masks(deformed.field.mask(), reference.field.mask()));
  out.field.finalize();
  out.wrapped = true;
  out.meta = deformed.meta;
  return out;
}

template <typename Scalar>
PhaseMap<Scalar> relative_phase(const RidgeResult<Scalar>& deformed,
                                const RidgeResult<Scalar>& reference) {
  return relative_phase(deformed.phase, reference.phase);
}

/// Pixelwise minimum of the two ridge amplitudes; the unwrapping quality map.
template <typename Scalar>
ScalarField<Scalar> ridge_quality(const RidgeResult<Scalar>& deformed,
                                  const RidgeResult<Scalar>& reference) {
  require_same_grid(deformed.amplitude, reference.amplitude);
  ScalarField<Scalar> q(deformed.amplitude.grid(),
                        deformed.amplitude.values().min(reference.amplitude.values()),
                        combine_masks(deformed.amplitude.mask(), reference.amplitude.mask()));
  q.finalize();
  return q;
}

struct UnwrapOptions {
  /// When set, the global 2 pi k offset is chosen so the median over this
  /// rectangle's valid pixels is the value nearest 0.
  std::optional<Rect> far_field;
};

/// Quality-guided flood-fill unwrapping. Each connected valid region is seeded
/// at its highest-quality pixel (uniform quality when none is given) and grown
/// through 4-neighbours in decreasing quality order; every pixel takes the
/// 2 pi k shift that brings it closest to its best already-unwrapped neighbour.
template <typename Scalar>
PhaseMap<Scalar> unwrap(const PhaseMap<Scalar>& wrapped,
                        const ScalarField<Scalar>* quality = nullptr,
                        const UnwrapOptions& opts = {}) {
  if (!wrapped.wrapped) throw Error(Errc::BadSpec, "unwrap expects a wrapped phase map");
  const ScalarField<Scalar>& in = wrapped.field;
  if (quality) require_same_grid(in, *quality);
  if (in.valid_count() == 0) throw Error(Errc::NoValidSeed, "no valid pixel to seed unwrapping");

  constexpr Scalar two_pi = Scalar(2) * std::numbers::pi_v<Scalar>;
  const Index w = in.width(), h = in.height(), n = w * h;
  const Mask valid = in.validity();
  auto q = [&](Index i) { return quality ? quality->values().data()[i] : Scalar(1); };

  std::vector<char> done(n, 0);
  Raster<Scalar> out = in.values();
  const Scalar* src = in.values().data();
  Scalar* dst = out.data();

  // Max-heap on quality; lower index wins ties.
  using Entry = std::pair<Scalar, Index>;
  auto cmp = [](const Entry& a, const Entry& b) {
    return a.first < b.first || (a.first == b.first && a.second > b.second);
  };
  std::priority_queue<Entry, std::vector<Entry>, decltype(cmp)> heap(cmp);

  auto neighbours = [&](Index i, auto&& fn) {
    const Index x = i % w, y = i / w;
    if (x > 0) fn(i - 1);
    if (x + 1 < w) fn(i + 1);
    if (y > 0) fn(i - w);
    if (y + 1 < h) fn(i + w);
  };
  auto push_neighbours = [&](Index i) {
    neighbours(i, [&](Index j) {
      if (!done[j] && valid.data()[j]) heap.emplace(q(j), j);
    });
  };

  // Seeds in quality order, so each region starts from its best pixel.
  std::vector<Index> order;
  order.reserve(n);
  for (Index i = 0; i < n; ++i)
    if (valid.data()[i]) order.push_back(i);
  std::stable_sort(order.begin(), order.end(), [&](Index a, Index b) { return q(a) > q(b); });

  for (Index seed : order) {
    if (done[seed]) continue;
    done[seed] = 1;
    dst[seed] = src[seed];
    push_neighbours(seed);
    while (!heap.empty()) {
      const Index i = heap.top().second;
      heap.pop();
      if (done[i]) continue;
      Index ref = -1;
      neighbours(i, [&](Index j) {
        if (done[j] && valid.data()[j] && (ref < 0 || q(j) > q(ref) || (q(j) == q(ref) && j < ref)))
          ref = j;
      });
      const Scalar k = std::round((dst[ref] - src[i]) / two_pi);
      dst[i] = src[i] + two_pi * k;
      done[i] = 1;
      push_neighbours(i);
    }
  }

  if (opts.far_field) {
    std::vector<Scalar> vals;
    const Rect& r = *opts.far_field;
    for (Index y = std::max<Index>(r.y, 0); y < std::min(r.y + r.height, h); ++y)
      for (Index x = std::max<Index>(r.x, 0); x < std::min(r.x + r.width, w); ++x)
        if (valid(y, x)) vals.push_back(out(y, x));
    if (!vals.empty()) {
      std::sort(vals.begin(), vals.end());
      const std::size_t m = vals.size() / 2;
      const Scalar median = vals.size() % 2 ? vals[m] : (vals[m - 1] + vals[m]) / Scalar(2);
      const Scalar k = std::round(median / two_pi);
      if (k != Scalar(0))
        for (Index i = 0; i < n; ++i)
          if (valid.data()[i]) dst[i] = src[i] + (std::round((dst[i] - src[i]) / two_pi) - k) * two_pi;
    }
  }

  PhaseMap<Scalar> result;
  result.field = ScalarField<Scalar>(in.grid(), std::move(out), in.mask());
  result.field.finalize();
  result.wrapped = false;
  result.meta = wrapped.meta;
  return result;
}

}  // namespace bos

#endif  // BOS_WFT_HPP
