#pragma once

#include <algorithm>
#include <cstddef>
#include <span>
#include <vector>

#include "emorec/dataset.hpp"
#include "emorec/error.hpp"

namespace emorec {

/// Per-column min-max scaling to [0, 1] with bounds from training data.
/// Constant columns map to 0; values outside the bounds are clamped.
struct MinMaxScaler {
  std::vector<double> lo;
  std::vector<double> hi;

  static MinMaxScaler fit(const Matrix& x) {
    MinMaxScaler s;
    s.lo.assign(x.cols(), 0.0);
    s.hi.assign(x.cols(), 0.0);
    for (std::size_t c = 0; c < x.cols(); ++c) {
      if (x.rows() == 0) break;
      double lo = x(0, c), hi = x(0, c);
      for (std::size_t r = 1; r < x.rows(); ++r) {
        lo = std::min(lo, x(r, c));
        hi = std::max(hi, x(r, c));
      }
      s.lo[c] = lo;
      s.hi[c] = hi;
    }
    return s;
  }

  std::size_t dims() const { return lo.size(); }

  void transform(std::span<const double> in, std::span<double> out) const {
    if (in.size() != dims() || out.size() != dims())
      fail(ErrorCode::DimensionMismatch, "input has " + std::to_string(in.size()) +
                                             " features, model expects " + std::to_string(dims()));
    for (std::size_t c = 0; c < in.size(); ++c) {
      const double range = hi[c] - lo[c];
      out[c] = range > 0.0 ? std::clamp((in[c] - lo[c]) / range, 0.0, 1.0) : 0.0;
    }
  }

  std::vector<double> transform(std::span<const double> in) const {
    std::vector<double> out(in.size());
    transform(in, out);
    return out;
  }

  Matrix transform(const Matrix& x) const {
    Matrix out(x.rows(), x.cols());
    for (std::size_t r = 0; r < x.rows(); ++r) transform(x.row(r), out.row(r));
    return out;
  }

  bool operator==(const MinMaxScaler&) const = default;
};

}  // namespace emorec
