#pragma once

#include <cmath>

namespace chl {

/// Neumaier-compensated accumulator. The dyadic push ledgers add up to a
/// million tiny increments per bucket and are then compared against an
/// endpoint difference at 1e-12 relative; plain double accumulation drifts
/// past that.
class KahanSum {
 public:
  void add(double value) {
    const double t = sum_ + value;
    if (std::abs(sum_) >= std::abs(value)) {
      compensation_ += (sum_ - t) + value;
    } else {
      compensation_ += (value - t) + sum_;
    }
    sum_ = t;
  }

  double value() const { return sum_ + compensation_; }

 private:
  double sum_ = 0.0;
  double compensation_ = 0.0;
};

}  // namespace chl
