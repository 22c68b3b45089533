#pragma once

// Support vector machine trained with Platt's sequential minimal optimization,
// polynomial kernel (x.z)^d, one-vs-one voting for more than two classes.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <map>
#include <span>
#include <vector>

#include "emorec/dataset.hpp"
#include "emorec/error.hpp"
#include "emorec/random.hpp"
#include "emorec/scaling.hpp"

namespace emorec {

struct SvmConfig {
  double c = 1.0;
  int kernel_degree = 1;
  double tolerance = 1e-3;
  /// Training stops after this many consecutive full passes with no change.
  int max_passes = 10;
  /// Safety cap on outer-loop sweeps (full or non-bound).
  int max_iterations = 100000;

  bool operator==(const SvmConfig&) const = default;
};

inline void validate(const SvmConfig& c) {
  if (!(c.c > 0.0)) fail(ErrorCode::InvalidConfig, "svm: C must be > 0");
  if (c.kernel_degree < 1) fail(ErrorCode::InvalidConfig, "svm: kernel degree must be >= 1");
  if (!(c.tolerance > 0.0)) fail(ErrorCode::InvalidConfig, "svm: tolerance must be > 0");
  if (c.max_passes < 1) fail(ErrorCode::InvalidConfig, "svm: max_passes must be >= 1");
  if (c.max_iterations < 1) fail(ErrorCode::InvalidConfig, "svm: max_iterations must be >= 1");
}

inline double poly_kernel(std::span<const double> a, std::span<const double> b, int degree) {
  double dot = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) dot += a[i] * b[i];
  double out = dot;
  for (int d = 1; d < degree; ++d) out *= dot;
  return out;
}

inline Matrix kernel_matrix(const Matrix& x, int degree) {
  const std::size_t n = x.rows();
  Matrix k(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i; j < n; ++j) k(i, j) = k(j, i) = poly_kernel(x.row(i), x.row(j), degree);
  return k;
}

/// Dual solution for targets y in {-1, +1}. Output u(x) = sum a_i y_i K(x_i, x) - b.
struct SmoSolution {
  std::vector<double> alpha;
  double b = 0.0;
  std::size_t iterations = 0;
  std::size_t steps = 0;
  bool converged = false;
  std::vector<double> objective_trace;  // dual objective after each step, when requested
};

/// Multipliers within this fraction of C of a bound count as sitting on it;
/// the rounding fix-up in a step can leave them a few ulps inside.
inline constexpr double kBoundBand = 1e-8;

inline bool at_lower(double a, double c) { return a <= kBoundBand * c; }
inline bool at_upper(double a, double c) { return a >= c - kBoundBand * c; }

/// W(a) = sum a_i - 1/2 sum_ij a_i a_j y_i y_j K_ij.
inline double dual_objective(const Matrix& k, std::span<const int> y, std::span<const double> alpha) {
  double lin = 0.0, quad = 0.0;
  for (std::size_t i = 0; i < alpha.size(); ++i) {
    lin += alpha[i];
    if (alpha[i] == 0.0) continue;
    for (std::size_t j = 0; j < alpha.size(); ++j)
      quad += alpha[i] * alpha[j] * y[i] * y[j] * k(i, j);
  }
  return lin - 0.5 * quad;
}

/// Largest KKT violation of a solution, measured on freshly computed outputs:
/// a = 0 needs y u >= 1, 0 < a < C needs y u = 1, a = C needs y u <= 1.
inline double kkt_violation(const Matrix& k, std::span<const int> y, const SmoSolution& s, double c) {
  double worst = 0.0;
  for (std::size_t i = 0; i < y.size(); ++i) {
    double u = -s.b;
    for (std::size_t j = 0; j < y.size(); ++j)
      if (s.alpha[j] != 0.0) u += s.alpha[j] * y[j] * k(j, i);
    const double r = y[i] * u - 1.0;
    double v = 0.0;
    if (at_lower(s.alpha[i], c))
      v = std::max(0.0, -r);
    else if (at_upper(s.alpha[i], c))
      v = std::max(0.0, r);
    else
      v = std::abs(r);
    worst = std::max(worst, v);
  }
  return worst;
}

namespace detail {

class Smo {
 public:
  Smo(const Matrix& k, std::span<const int> y, const SvmConfig& cfg, std::uint64_t seed, bool trace)
      : k_(k), y_(y), c_(cfg.c), tol_(cfg.tolerance), rng_(seed), trace_(trace) {
    const std::size_t n = y.size();
    sol_.alpha.assign(n, 0.0);
    error_.resize(n);
    for (std::size_t i = 0; i < n; ++i) error_[i] = -static_cast<double>(y[i]);
  }

  SmoSolution run(const SvmConfig& cfg) {
    const std::size_t n = y_.size();
    for (;;) {
      bool examine_all = true;
      int quiet_passes = 0;
      while (quiet_passes < cfg.max_passes) {
        if (sol_.iterations >= static_cast<std::size_t>(cfg.max_iterations)) return sol_;
        ++sol_.iterations;
        std::size_t changed = 0;
        for (std::size_t i = 0; i < n; ++i)
          if (examine_all || !at_bound(i)) changed += examine(i);
        if (examine_all) {
          quiet_passes = changed == 0 ? quiet_passes + 1 : 0;
          if (changed > 0) examine_all = false;
        } else if (changed == 0) {
          examine_all = true;
        }
      }
      // A single threshold can stall with b misplaced while every multiplier
      // sits at a bound. Check the interval the KKT conditions leave for b:
      // if it is (nearly) nonempty, center b in it; otherwise step on the most
      // violating pair and go around again.
      const auto t = threshold_bounds();
      if (t.low <= t.up + 2.0 * tol_) {
        recenter(t);
        sol_.converged = true;
        return sol_;
      }
      if (!take_step(t.i_low, t.i_up)) {
        recenter(t);
        return sol_;
      }
    }
  }

 private:
  static constexpr double kEps = 1e-12;

  struct Bounds {
    double low = -std::numeric_limits<double>::infinity();  // b must be >= low
    double up = std::numeric_limits<double>::infinity();    // b must be <= up
    std::size_t i_low = 0, i_up = 0;
  };

  // With F_i = error_i + b = sum_j a_j y_j K_ij - y_i, each point bounds b
  // from below, above, or both (free multipliers pin b = F_i).
  Bounds threshold_bounds() const {
    Bounds t;
    for (std::size_t i = 0; i < y_.size(); ++i) {
      const double f = error_[i] + sol_.b, a = sol_.alpha[i];
      const bool pos = y_[i] > 0;
      const bool lower = at_lower(a, c_), upper = at_upper(a, c_);
      const bool free = !lower && !upper;
      if (free || (lower && !pos) || (upper && pos)) {
        if (f > t.low) {
          t.low = f;
          t.i_low = i;
        }
      }
      if (free || (lower && pos) || (upper && !pos)) {
        if (f < t.up) {
          t.up = f;
          t.i_up = i;
        }
      }
    }
    return t;
  }

  void recenter(const Bounds& t) {
    double bn = sol_.b;
    if (std::isfinite(t.low) && std::isfinite(t.up))
      bn = 0.5 * (t.low + t.up);
    else if (std::isfinite(t.low))
      bn = std::max(sol_.b, t.low);
    else if (std::isfinite(t.up))
      bn = std::min(sol_.b, t.up);
    for (double& e : error_) e -= bn - sol_.b;
    sol_.b = bn;
  }

  bool at_bound(std::size_t i) const { return at_lower(sol_.alpha[i], c_) || at_upper(sol_.alpha[i], c_); }

  std::size_t examine(std::size_t i2) {
    const double y2 = y_[i2], a2 = sol_.alpha[i2], r2 = error_[i2] * y2;
    if (!((r2 < -tol_ && !at_upper(a2, c_)) || (r2 > tol_ && !at_lower(a2, c_)))) return 0;
    const std::size_t n = y_.size();

    std::size_t non_bound = 0;
    for (std::size_t i = 0; i < n; ++i) non_bound += at_bound(i) ? 0 : 1;
    if (non_bound > 1) {
      std::size_t i1 = n;
      double best = -1.0;
      for (std::size_t i = 0; i < n; ++i) {
        if (at_bound(i)) continue;
        const double gap = std::abs(error_[i] - error_[i2]);
        if (gap > best) {
          best = gap;
          i1 = i;
        }
      }
      if (i1 < n && take_step(i1, i2)) return 1;
    }
    const std::size_t start_nb = static_cast<std::size_t>(rng_.below(n));
    for (std::size_t t = 0; t < n; ++t) {
      const std::size_t i1 = (start_nb + t) % n;
      if (!at_bound(i1) && take_step(i1, i2)) return 1;
    }
    const std::size_t start_all = static_cast<std::size_t>(rng_.below(n));
    for (std::size_t t = 0; t < n; ++t) {
      const std::size_t i1 = (start_all + t) % n;
      if (take_step(i1, i2)) return 1;
    }
    return 0;
  }

  bool take_step(std::size_t i1, std::size_t i2) {
    if (i1 == i2) return false;
    auto& alpha = sol_.alpha;
    const double a1 = alpha[i1], a2 = alpha[i2];
    const double y1 = y_[i1], y2 = y_[i2];
    const double e1 = error_[i1], e2 = error_[i2];
    const double s = y1 * y2;
    double lo, hi;
    if (y1 != y2) {
      lo = std::max(0.0, a2 - a1);
      hi = std::min(c_, c_ + a2 - a1);
    } else {
      lo = std::max(0.0, a1 + a2 - c_);
      hi = std::min(c_, a1 + a2);
    }
    if (lo >= hi) return false;
    const double k11 = k_(i1, i1), k12 = k_(i1, i2), k22 = k_(i2, i2);
    const double eta = k11 + k22 - 2.0 * k12;
    double a2n;
    if (eta > 0.0) {
      a2n = std::clamp(a2 + y2 * (e1 - e2) / eta, lo, hi);
    } else {
      const double f1 = y1 * (e1 + sol_.b) - a1 * k11 - s * a2 * k12;
      const double f2 = y2 * (e2 + sol_.b) - s * a1 * k12 - a2 * k22;
      const double l1 = a1 + s * (a2 - lo), h1 = a1 + s * (a2 - hi);
      const double obj_lo = l1 * f1 + lo * f2 + 0.5 * l1 * l1 * k11 + 0.5 * lo * lo * k22 +
                            s * lo * l1 * k12;
      const double obj_hi = h1 * f1 + hi * f2 + 0.5 * h1 * h1 * k11 + 0.5 * hi * hi * k22 +
                            s * hi * h1 * k12;
      if (obj_lo < obj_hi - kEps)
        a2n = lo;
      else if (obj_lo > obj_hi + kEps)
        a2n = hi;
      else
        a2n = a2;
    }
    if (at_lower(a2n, c_))
      a2n = 0.0;
    else if (at_upper(a2n, c_))
      a2n = c_;
    if (std::abs(a2n - a2) < kEps * (a2n + a2 + kEps)) return false;
    double a1n = a1 + s * (a2 - a2n);
    // Rounding can push a1 just outside the box; move the excess back onto a2.
    if (a1n < 0.0) {
      a2n += s * a1n;
      a1n = 0.0;
    } else if (a1n > c_) {
      a2n += s * (a1n - c_);
      a1n = c_;
    }

    const double d1 = y1 * (a1n - a1), d2 = y2 * (a2n - a2);
    const double b1 = e1 + d1 * k11 + d2 * k12 + sol_.b;
    const double b2 = e2 + d1 * k12 + d2 * k22 + sol_.b;
    double bn;
    if (!at_lower(a1n, c_) && !at_upper(a1n, c_))
      bn = b1;
    else if (!at_lower(a2n, c_) && !at_upper(a2n, c_))
      bn = b2;
    else
      bn = 0.5 * (b1 + b2);
    const double db = bn - sol_.b;
    for (std::size_t i = 0; i < y_.size(); ++i) error_[i] += d1 * k_(i1, i) + d2 * k_(i2, i) - db;
    sol_.b = bn;
    alpha[i1] = a1n;
    alpha[i2] = a2n;
    ++sol_.steps;
    if (trace_) sol_.objective_trace.push_back(dual_objective(k_, y_, alpha));
    return true;
  }

  const Matrix& k_;
  std::span<const int> y_;
  double c_, tol_;
  Rng rng_;
  bool trace_;
  SmoSolution sol_;
  std::vector<double> error_;
};

}  // namespace detail

/// Solves the binary dual over a precomputed kernel matrix.
inline SmoSolution smo_solve(const Matrix& kernel, std::span<const int> y, const SvmConfig& cfg,
                             std::uint64_t seed, bool trace = false) {
  validate(cfg);
  if (kernel.rows() != y.size() || kernel.cols() != y.size())
    fail(ErrorCode::DimensionMismatch, "kernel matrix does not match the target count");
  for (int v : y)
    if (v != 1 && v != -1) fail(ErrorCode::InvalidDataset, "binary targets must be +1 or -1");
  return detail::Smo(kernel, y, cfg, seed, trace).run(cfg);
}

/// One trained pairwise machine; positive output votes for `positive`.
struct BinaryMachine {
  int positive = 0;
  int negative = 0;
  double b = 0.0;
  std::vector<double> coef;  // a_i y_i of each support vector
  Matrix support;
  std::vector<double> weights;  // explicit primal weights for the linear kernel

  double decision(std::span<const double> x, int degree) const {
    double u = -b;
    if (degree == 1) {
      for (std::size_t i = 0; i < x.size(); ++i) u += weights[i] * x[i];
      return u;
    }
    for (std::size_t s = 0; s < coef.size(); ++s) u += coef[s] * poly_kernel(support.row(s), x, degree);
    return u;
  }

  void finalize(int degree) {
    weights.clear();
    if (degree != 1) return;
    weights.assign(support.cols(), 0.0);
    for (std::size_t s = 0; s < coef.size(); ++s)
      for (std::size_t j = 0; j < support.cols(); ++j) weights[j] += coef[s] * support(s, j);
  }

  bool operator==(const BinaryMachine& o) const {
    return positive == o.positive && negative == o.negative && b == o.b && coef == o.coef &&
           support == o.support;
  }
};

struct SvmModel {
  SvmConfig config;
  std::vector<int> classes;  // ascending class ids
  MinMaxScaler scaler;
  std::vector<BinaryMachine> machines;  // (i, j) pairs with i < j in class order

  /// Per-class vote counts for one raw input vector.
  std::vector<std::size_t> votes(std::span<const double> raw) const {
    const auto x = scaler.transform(raw);
    std::vector<std::size_t> v(classes.size(), 0);
    std::size_t m = 0;
    for (std::size_t i = 0; i < classes.size(); ++i)
      for (std::size_t j = i + 1; j < classes.size(); ++j, ++m)
        ++v[machines[m].decision(x, config.kernel_degree) > 0.0 ? i : j];
    return v;
  }

  int predict(std::span<const double> raw) const {
    const auto v = votes(raw);
    const auto best = std::max_element(v.begin(), v.end());  // first maximum: lowest class id
    return classes[static_cast<std::size_t>(best - v.begin())];
  }

  bool operator==(const SvmModel& o) const {
    return config == o.config && classes == o.classes && scaler == o.scaler &&
           machines == o.machines;
  }
};

namespace detail {

inline std::vector<int> sorted_classes(std::span<const int> labels) {
  std::vector<int> out(labels.begin(), labels.end());
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

inline void check_training_set(const Matrix& x, std::span<const int> labels) {
  if (x.rows() != labels.size())
    fail(ErrorCode::DimensionMismatch, "feature rows and labels differ in count");
  if (x.rows() == 0) fail(ErrorCode::InvalidDataset, "empty training set");
  for (std::size_t r = 0; r < x.rows(); ++r)
    for (double v : x.row(r))
      if (!std::isfinite(v)) fail(ErrorCode::InvalidDataset, "non-finite training value");
}

}  // namespace detail

inline SvmModel train_svm(const Matrix& x, std::span<const int> labels, const SvmConfig& cfg,
                          std::uint64_t seed) {
  validate(cfg);
  detail::check_training_set(x, labels);
  SvmModel model;
  model.config = cfg;
  model.classes = detail::sorted_classes(labels);
  if (model.classes.size() < 2)
    fail(ErrorCode::DegenerateClass, "svm training needs at least two classes");
  model.scaler = MinMaxScaler::fit(x);
  const Matrix xs = model.scaler.transform(x);

  for (std::size_t i = 0; i < model.classes.size(); ++i) {
    for (std::size_t j = i + 1; j < model.classes.size(); ++j) {
      std::vector<std::size_t> rows;
      std::vector<int> y;
      for (std::size_t r = 0; r < labels.size(); ++r) {
        if (labels[r] == model.classes[i]) {
          rows.push_back(r);
          y.push_back(1);
        } else if (labels[r] == model.classes[j]) {
          rows.push_back(r);
          y.push_back(-1);
        }
      }
      const Matrix sub = xs.select_rows(rows);
      const auto sol = smo_solve(kernel_matrix(sub, cfg.kernel_degree), y, cfg,
                                 derive_seed(seed, i, j));
      BinaryMachine m;
      m.positive = model.classes[i];
      m.negative = model.classes[j];
      m.b = sol.b;
      std::vector<std::size_t> sv;
      for (std::size_t r = 0; r < rows.size(); ++r) {
        if (sol.alpha[r] <= 0.0) continue;
        sv.push_back(r);
        m.coef.push_back(sol.alpha[r] * y[r]);
      }
      m.support = sv.empty() ? Matrix(0, sub.cols()) : sub.select_rows(sv);
      m.finalize(cfg.kernel_degree);
      model.machines.push_back(std::move(m));
    }
  }
  return model;
}

}  // namespace emorec
