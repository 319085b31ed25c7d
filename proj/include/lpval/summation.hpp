#pragma once

#include <cmath>
#include <span>

namespace lpval {

/// Compensated (Neumaier) accumulator.
///
/// Integrals are accumulated in a fixed cell order with error tracking, so the
/// rounding error stays relative to the result instead of the term magnitudes.
/// That is what makes the 1e-12 relative tolerances in this library honest.
class NeumaierSum {
 public:
  void add(double x) noexcept {
    const double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x)) {
      comp_ += (sum_ - t) + x;
    } else {
      comp_ += (x - t) + sum_;
    }
    sum_ = t;
  }

  double value() const noexcept { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

inline double compensated_total(std::span<const double> xs) noexcept {
  NeumaierSum s;
  for (double x : xs) s.add(x);
  return s.value();
}

}  // namespace lpval
