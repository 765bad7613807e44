#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

namespace zeno {

// Least-squares slope of ln(y) against ln(x).
inline double loglog_slope(std::span<const double> x,
                           std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2)
    throw std::invalid_argument("loglog_slope: need matching series, size >= 2");
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!(x[i] > 0.0) || !(y[i] > 0.0))
      throw std::invalid_argument("loglog_slope: values must be positive");
    const double lx = std::log(x[i]), ly = std::log(y[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  const double n = static_cast<double>(x.size());
  const double denom = n * sxx - sx * sx;
  if (std::abs(denom) < 1e-300)
    throw std::invalid_argument("loglog_slope: degenerate abscissa");
  return (n * sxy - sx * sy) / denom;
}

// Indices of strict local maxima (rises into the point, does not rise out).
inline std::vector<std::size_t> local_maxima(std::span<const double> y) {
  std::vector<std::size_t> idx;
  for (std::size_t i = 1; i + 1 < y.size(); ++i)
    if (y[i] > y[i - 1] && y[i] >= y[i + 1]) idx.push_back(i);
  return idx;
}

inline double mean_spacing(std::span<const std::size_t> idx) {
  if (idx.size() < 2)
    throw std::invalid_argument("mean_spacing: need at least two indices");
  return static_cast<double>(idx.back() - idx.front()) /
         static_cast<double>(idx.size() - 1);
}

}  // namespace zeno
