#pragma once

#include <vector>

namespace emorec {

/// One value per analysed frame, with the frame-center time in seconds.
struct Contour {
  std::vector<double> values;
  std::vector<double> times;

  std::size_t size() const { return values.size(); }
  bool empty() const { return values.empty(); }

  void push(double t, double v) {
    times.push_back(t);
    values.push_back(v);
  }
};

}  // namespace emorec
