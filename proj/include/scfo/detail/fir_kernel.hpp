#pragma once

#include <cstdint>

namespace scfo::detail {

// Four interleaved partial sums with a fixed final pairing. Every FIR in the
// library goes through here, so two structures that present the same taps
// and samples produce bit-identical doubles.
template <typename Fetch>
double fir_dot(const double* h, int n, Fetch&& x) {
  double a0 = 0.0, a1 = 0.0, a2 = 0.0, a3 = 0.0;
  int m = 0;
  for (; m + 4 <= n; m += 4) {
    a0 += h[m] * x(m);
    a1 += h[m + 1] * x(m + 1);
    a2 += h[m + 2] * x(m + 2);
    a3 += h[m + 3] * x(m + 3);
  }
  double* tail[3] = {&a0, &a1, &a2};
  for (int j = 0; m < n; ++m, ++j) *tail[j] += h[m] * x(m);
  return (a0 + a1) + (a2 + a3);
}

template <typename Fetch>
std::int64_t fir_dot(const std::int32_t* h, int n, Fetch&& x) {
  std::int64_t acc = 0;
  for (int m = 0; m < n; ++m) acc += static_cast<std::int64_t>(h[m]) * static_cast<std::int64_t>(x(m));
  return acc;
}

}  // namespace scfo::detail
