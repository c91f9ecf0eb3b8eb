#pragma once

#include <array>
#include <cmath>

namespace nvrr::detail {

using Mat3 = std::array<std::array<double, 3>, 3>;

inline Mat3 mat3_mul(const Mat3& a, const Mat3& b) {
  Mat3 out{};
  for (int r = 0; r < 3; ++r)
    for (int c = 0; c < 3; ++c)
      for (int k = 0; k < 3; ++k) out[r][c] += a[r][k] * b[k][c];
  return out;
}

// exp(G) by Taylor series with scaling and squaring. Used on ladder rate
// generators, whose exponential is exactly column-stochastic.
inline Mat3 mat3_exp(const Mat3& g) {
  double norm = 0.0;
  for (const auto& row : g)
    for (double v : row) norm += std::abs(v);
  int squarings = 0;
  double scale = 1.0;
  while (norm * scale > 0.5) {
    scale *= 0.5;
    ++squarings;
  }
  Mat3 scaled{};
  for (int r = 0; r < 3; ++r)
    for (int c = 0; c < 3; ++c) scaled[r][c] = g[r][c] * scale;
  Mat3 result{{{1, 0, 0}, {0, 1, 0}, {0, 0, 1}}};
  Mat3 term = result;
  for (int k = 1; k <= 14; ++k) {
    term = mat3_mul(term, scaled);
    for (int r = 0; r < 3; ++r)
      for (int c = 0; c < 3; ++c) {
        term[r][c] /= k;
        result[r][c] += term[r][c];
      }
  }
  for (int s = 0; s < squarings; ++s) result = mat3_mul(result, result);
  return result;
}

// Rate generator of the nuclear ladder: columns/rows ordered m_I = -1, 0, +1,
// up-rate `up` (increments m_I), down-rate `down`.
inline Mat3 ladder_generator(double up, double down) {
  return Mat3{{{-up, down, 0.0}, {up, -(up + down), down}, {0.0, up, -down}}};
}

// One unit-time step of the ladder. The exponential of a generator has unit
// column sums exactly; dividing out the computed sums removes the roundoff
// accumulated by scaling-and-squaring at large rates.
inline Mat3 ladder_step(double up, double down) {
  Mat3 m = mat3_exp(ladder_generator(up, down));
  for (int c = 0; c < 3; ++c) {
    const double sum = m[0][c] + m[1][c] + m[2][c];
    for (int r = 0; r < 3; ++r) m[r][c] /= sum;
  }
  return m;
}

}  // namespace nvrr::detail
