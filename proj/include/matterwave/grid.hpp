#pragma once

#include <bit>
#include <cmath>
#include <cstddef>
#include <numbers>

#include "matterwave/errors.hpp"

namespace matterwave {

/// Uniform periodic grid in the co-moving coordinate xi, centred so that
/// index n/2 sits at xi = 0. Wavenumbers follow the discrete-transform layout.
class Grid {
 public:
  Grid(std::size_t n_points, double xi_span) : n_(n_points), span_(xi_span) {
    if (n_ < 2 || !std::has_single_bit(n_)) throw InvalidArgument("grid size must be a power of two >= 2");
    if (!(span_ > 0.0) || !std::isfinite(span_)) throw InvalidArgument("grid span must be positive");
  }

  std::size_t size() const { return n_; }
  double span() const { return span_; }
  double xi_step() const { return span_ / static_cast<double>(n_); }
  double k_step() const { return 2.0 * std::numbers::pi / span_; }
  double nyquist() const { return std::numbers::pi / xi_step(); }

  double xi(std::size_t j) const {
    return (static_cast<double>(j) - static_cast<double>(n_ / 2)) * xi_step();
  }

  /// Signed baseband wavenumber of transform bin j.
  double k(std::size_t j) const {
    const auto signed_index = j < n_ / 2 ? static_cast<double>(j) : static_cast<double>(j) - static_cast<double>(n_);
    return signed_index * k_step();
  }

  bool operator==(const Grid&) const = default;

 private:
  std::size_t n_;
  double span_;
};

}  // namespace matterwave
