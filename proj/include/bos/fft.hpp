#ifndef BOS_FFT_HPP
#define BOS_FFT_HPP

#include <unsupported/Eigen/FFT>

#include <complex>
#include <vector>

#include "bos/core.hpp"

namespace bos {

template <typename Scalar>
using ComplexRaster = Raster<std::complex<Scalar>>;

/// Smallest n' >= n whose only prime factors are 2, 3 and 5.
inline Index next_fast_size(Index n) {
  for (Index m = std::max<Index>(n, 1);; ++m) {
    Index r = m;
    for (Index p : {2, 3, 5})
      while (r % p == 0) r /= p;
    if (r == 1) return m;
  }
}

/// Separable 2D DFT built on Eigen's 1D FFT. Forward is unscaled, inverse
/// scales by 1/(rows*cols), matching Eigen's convention.
template <typename Scalar>
class Fft2 {
 public:
  using Complex = std::complex<Scalar>;

  void forward(ComplexRaster<Scalar>& data) { transform(data, true); }
  void inverse(ComplexRaster<Scalar>& data) { transform(data, false); }

  /// Transforms each row (length = cols) in place.
  void rows(ComplexRaster<Scalar>& data, bool forward) {
    const Index n = data.cols();
    in_.resize(n);
    out_.resize(n);
    for (Index r = 0; r < data.rows(); ++r) {
      Complex* row = data.data() + r * n;
      std::copy(row, row + n, in_.begin());
      run(forward, n);
      std::copy(out_.begin(), out_.end(), row);
    }
  }

  /// Transforms each column (length = rows) in place.
  void cols(ComplexRaster<Scalar>& data, bool forward) {
    const Index n = data.rows();
    in_.resize(n);
    out_.resize(n);
    for (Index c = 0; c < data.cols(); ++c) {
      for (Index r = 0; r < n; ++r) in_[r] = data(r, c);
      run(forward, n);
      for (Index r = 0; r < n; ++r) data(r, c) = out_[r];
    }
  }

  void run_1d(Complex* dst, const Complex* src, Index n, bool forward) {
    if (forward)
      fft_.fwd(dst, src, n);
    else
      fft_.inv(dst, src, n);
  }

 private:
  void transform(ComplexRaster<Scalar>& data, bool forward) {
    rows(data, forward);
    cols(data, forward);
  }

  void run(bool forward, Index n) { run_1d(out_.data(), in_.data(), n, forward); }

  Eigen::FFT<Scalar> fft_;
  std::vector<Complex> in_, out_;
};

/// Signed DFT bin index for position k of an n-point transform: [-n/2, n/2).
inline Index signed_bin(Index k, Index n) { return k < (n + 1) / 2 ? k : k - n; }

}  // namespace bos

#endif  // BOS_FFT_HPP
