#pragma once

#include <fftw3.h>

#include <bit>
#include <cmath>
#include <complex>
#include <cstddef>
#include <map>
#include <mutex>
#include <span>
#include <utility>
#include <vector>

namespace matterwave {

using Complex = std::complex<double>;

namespace fft {

namespace detail {

// FFTW's planner is not re-entrant; execution of an existing plan on new
// arrays is. Plans are built once per (size, direction) and shared.
class PlanCache {
 public:
  static PlanCache& instance() {
    static PlanCache cache;
    return cache;
  }

  fftw_plan get(std::size_t n, int sign) {
    std::lock_guard lock(mutex_);
    const auto key = std::make_pair(n, sign);
    if (auto it = plans_.find(key); it != plans_.end()) return it->second;
    std::vector<Complex> in(n), out(n);
    fftw_plan plan = fftw_plan_dft_1d(static_cast<int>(n), reinterpret_cast<fftw_complex*>(in.data()),
                                      reinterpret_cast<fftw_complex*>(out.data()), sign,
                                      FFTW_ESTIMATE | FFTW_UNALIGNED);
    plans_.emplace(key, plan);
    return plan;
  }

  PlanCache(const PlanCache&) = delete;
  PlanCache& operator=(const PlanCache&) = delete;

  ~PlanCache() {
    for (auto& [key, plan] : plans_) fftw_destroy_plan(plan);
  }

 private:
  PlanCache() = default;

  std::mutex mutex_;
  std::map<std::pair<std::size_t, int>, fftw_plan> plans_;
};

inline std::vector<Complex> execute(std::span<const Complex> in, int sign) {
  std::vector<Complex> out(in.size());
  fftw_plan plan = PlanCache::instance().get(in.size(), sign);
  // Out-of-place complex transforms leave the input untouched.
  fftw_execute_dft(plan, reinterpret_cast<fftw_complex*>(const_cast<Complex*>(in.data())),
                   reinterpret_cast<fftw_complex*>(out.data()));
  return out;
}

}  // namespace detail

/// X_m = sum_j x_j exp(-2 pi i j m / N), unnormalized.
inline std::vector<Complex> forward(std::span<const Complex> in) {
  return detail::execute(in, FFTW_FORWARD);
}

/// x_j = (1/N) sum_m X_m exp(+2 pi i j m / N).
inline std::vector<Complex> inverse(std::span<const Complex> in) {
  auto out = detail::execute(in, FFTW_BACKWARD);
  const double scale = 1.0 / static_cast<double>(in.size());
  for (auto& v : out) v *= scale;
  return out;
}

/// y_j = sum_m a_m exp(i theta (m + m0)(j + j0)) for j = 0..count-1.
///
/// Bluestein's factorization m j = (m^2 + j^2 - (j - m)^2) / 2 turns the sum into
/// a linear convolution evaluated with power-of-two transforms; theta is arbitrary.
inline std::vector<Complex> chirp_z(std::span<const Complex> a, double theta, double m0, double j0,
                                    std::size_t count) {
  const std::size_t p = a.size();
  if (p == 0 || count == 0) return std::vector<Complex>(count);
  const std::size_t len = std::bit_ceil(p + count - 1);

  auto cis = [](double phase) { return Complex(std::cos(phase), std::sin(phase)); };
  auto half_square = [](double n) { return 0.5 * n * n; };

  std::vector<Complex> u(len), v(len);
  for (std::size_t m = 0; m < p; ++m) {
    const auto md = static_cast<double>(m);
    u[m] = a[m] * cis(theta * (md * j0 + half_square(md)));
  }
  for (std::size_t d = 0; d < count; ++d) v[d] = cis(-theta * half_square(static_cast<double>(d)));
  for (std::size_t d = 1; d < p; ++d) v[len - d] = cis(-theta * half_square(static_cast<double>(d)));

  auto uf = forward(u);
  const auto vf = forward(v);
  for (std::size_t i = 0; i < len; ++i) uf[i] *= vf[i];
  const auto conv = inverse(uf);

  std::vector<Complex> y(count);
  for (std::size_t j = 0; j < count; ++j) {
    const auto jd = static_cast<double>(j);
    y[j] = conv[j] * cis(theta * (m0 * (jd + j0) + half_square(jd)));
  }
  return y;
}

}  // namespace fft
}  // namespace matterwave
