#pragma once

// Pointwise helpers for the packed antisymmetric storage used by connection
// and curvature fields. Full tensors use fixed 4-stride arrays:
//   T3[i][j][k] at i*16 + j*4 + k,   T4[i][j][k][l] at i*64 + j*16 + k*4 + l.

#include <array>
#include <span>

#include "topo/types.hpp"

namespace topo::tensor {

using T2 = std::array<double, 16>;
using T3 = std::array<double, 64>;
using T4 = std::array<double, 256>;

inline constexpr int i2(int a, int b) { return a * 4 + b; }
inline constexpr int i3(int a, int b, int c) { return a * 16 + b * 4 + c; }
inline constexpr int i4(int a, int b, int c, int e) { return a * 64 + b * 16 + c * 4 + e; }

/// Packed [P, d] (antisymmetric pair, free index) -> full T3.
inline void unpack_pair_vec(std::span<const double> src, const PairIndex& pi, int d, T3& out) {
  out.fill(0.0);
  for (int k = 0; k < pi.count(); ++k) {
    const auto [i, j] = pi.pair(k);
    for (int m = 0; m < d; ++m) {
      const double v = src[k * d + m];
      out[i3(i, j, m)] = v;
      out[i3(j, i, m)] = -v;
    }
  }
}

/// Full T3 -> packed [P, d] using the (i<j) entries after antisymmetrizing.
inline void pack_pair_vec(const T3& t, const PairIndex& pi, int d, std::span<double> dst) {
  for (int k = 0; k < pi.count(); ++k) {
    const auto [i, j] = pi.pair(k);
    for (int m = 0; m < d; ++m) dst[k * d + m] = 0.5 * (t[i3(i, j, m)] - t[i3(j, i, m)]);
  }
}

/// Packed [P, P] -> full T4 antisymmetric in both pairs.
inline void unpack_pair_pair(std::span<const double> src, const PairIndex& pi, T4& out) {
  out.fill(0.0);
  const int np = pi.count();
  for (int k = 0; k < np; ++k) {
    const auto [i, j] = pi.pair(k);
    for (int l = 0; l < np; ++l) {
      const auto [m, n] = pi.pair(l);
      const double v = src[k * np + l];
      out[i4(i, j, m, n)] = v;
      out[i4(j, i, m, n)] = -v;
      out[i4(i, j, n, m)] = -v;
      out[i4(j, i, n, m)] = v;
    }
  }
}

inline void pack_pair_pair(const T4& t, const PairIndex& pi, std::span<double> dst) {
  const int np = pi.count();
  for (int k = 0; k < np; ++k) {
    const auto [i, j] = pi.pair(k);
    for (int l = 0; l < np; ++l) {
      const auto [m, n] = pi.pair(l);
      dst[k * np + l] = 0.25 * (t[i4(i, j, m, n)] - t[i4(j, i, m, n)] - t[i4(i, j, n, m)] + t[i4(j, i, n, m)]);
    }
  }
}

/// Converts the last index of a T3 from coordinate to world: out_{ijc} = t_{ij mu} einv[mu][c].
inline void last_to_world(const T3& t, std::span<const double> einv, int d, T3& out) {
  out.fill(0.0);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j)
      for (int c = 0; c < d; ++c) {
        double s = 0;
        for (int m = 0; m < d; ++m) s += t[i3(i, j, m)] * einv[m * d + c];
        out[i3(i, j, c)] = s;
      }
}

/// Converts the last two indices of a T4 from coordinate to world.
inline void last2_to_world(const T4& t, std::span<const double> einv, int d, T4& out) {
  T4 tmp{};
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j)
      for (int m = 0; m < d; ++m)
        for (int c = 0; c < d; ++c) {
          double s = 0;
          for (int n = 0; n < d; ++n) s += t[i4(i, j, m, n)] * einv[n * d + c];
          tmp[i4(i, j, m, c)] = s;
        }
  out.fill(0.0);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j)
      for (int b = 0; b < d; ++b)
        for (int c = 0; c < d; ++c) {
          double s = 0;
          for (int m = 0; m < d; ++m) s += tmp[i4(i, j, m, c)] * einv[m * d + b];
          out[i4(i, j, b, c)] = s;
        }
}

}  // namespace topo::tensor
