/**
 * @file interp.hpp
 * @brief Monotone piecewise-cubic (Fritsch-Carlson) interpolation with clamped ends.
 */
#ifndef CASIMIR_NUMERICS_INTERP_HPP
#define CASIMIR_NUMERICS_INTERP_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <vector>

#include "../error.hpp"

namespace casimir::numerics {

struct InterpResult {
  double value;
  bool extrapolated;  // query fell outside the grid and was clamped
};

class MonotoneCubic {
 public:
  MonotoneCubic() = default;

  MonotoneCubic(std::vector<double> x, std::vector<double> y) : x_(std::move(x)), y_(std::move(y)) {
    if (x_.size() != y_.size() || x_.empty())
      throw DomainError("MonotoneCubic: grid and values must be non-empty and of equal length");
    for (std::size_t i = 1; i < x_.size(); ++i)
      if (!(x_[i] > x_[i - 1])) throw DomainError("MonotoneCubic: grid must be strictly increasing");
    slopes();
  }

  bool empty() const { return x_.empty(); }
  double front() const { return x_.front(); }
  double back() const { return x_.back(); }

  InterpResult operator()(double q) const {
    if (q <= x_.front()) return {y_.front(), q < x_.front()};
    if (q >= x_.back()) return {y_.back(), q > x_.back()};
    const auto it = std::upper_bound(x_.begin(), x_.end(), q);
    const std::size_t k = static_cast<std::size_t>(it - x_.begin()) - 1;
    const double h = x_[k + 1] - x_[k];
    const double t = (q - x_[k]) / h;
    const double t2 = t * t, t3 = t2 * t;
    const double h00 = 2 * t3 - 3 * t2 + 1, h10 = t3 - 2 * t2 + t;
    const double h01 = -2 * t3 + 3 * t2, h11 = t3 - t2;
    return {h00 * y_[k] + h10 * h * m_[k] + h01 * y_[k + 1] + h11 * h * m_[k + 1], false};
  }

 private:
  void slopes() {
    const std::size_t n = x_.size();
    m_.assign(n, 0.0);
    if (n == 1) return;
    std::vector<double> d(n - 1);
    for (std::size_t i = 0; i + 1 < n; ++i) d[i] = (y_[i + 1] - y_[i]) / (x_[i + 1] - x_[i]);
    m_[0] = d[0];
    m_[n - 1] = d[n - 2];
    for (std::size_t i = 1; i + 1 < n; ++i) m_[i] = (d[i - 1] * d[i] <= 0) ? 0.0 : 0.5 * (d[i - 1] + d[i]);
    for (std::size_t i = 0; i + 1 < n; ++i) {
      if (d[i] == 0.0) {
        m_[i] = m_[i + 1] = 0.0;
        continue;
      }
      const double a = m_[i] / d[i], b = m_[i + 1] / d[i];
      const double s = a * a + b * b;
      if (s > 9.0) {
        const double tau = 3.0 / std::sqrt(s);
        m_[i] = tau * a * d[i];
        m_[i + 1] = tau * b * d[i];
      }
    }
  }

  std::vector<double> x_, y_, m_;
};

}  // namespace casimir::numerics

#endif
