#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "tmunfold/domain.hpp"

namespace tmunfold {

/// The two point sets every sampled check sweeps. They are kept apart so a
/// failure aligned with the grid cannot be hidden by the random set and
/// vice versa.
struct SampleSets {
  std::vector<Point> grid;
  std::vector<Point> random;
};

/// Deterministic sampler: a cell-centred uniform grid plus a seeded,
/// randomly shifted Halton sequence.
class Sampler {
 public:
  Sampler(std::size_t samples, std::uint64_t seed) : samples_(samples), seed_(seed) {}

  std::size_t samples() const noexcept { return samples_; }
  std::uint64_t seed() const noexcept { return seed_; }

  /// Cell-centred grid with about `samples` points in total.
  std::vector<Point> grid(const Domain& d) const { return grid(d, samples_); }

  std::vector<Point> grid(const Domain& d, std::size_t target) const {
    if (d.dim() == 0) return {Point{}};
    std::size_t n = static_cast<std::size_t>(
        std::llround(std::pow(static_cast<double>(std::max<std::size_t>(target, 1)),
                              1.0 / static_cast<double>(d.dim()))));
    n = std::max<std::size_t>(n, 2);
    return grid_per_axis(d, n);
  }

  static std::vector<Point> grid_per_axis(const Domain& d, std::size_t n) {
    if (d.dim() == 0) return {Point{}};
    std::vector<Point> out;
    std::vector<std::size_t> idx(d.dim(), 0);
    for (;;) {
      Point p(d.dim());
      for (std::size_t k = 0; k < d.dim(); ++k)
        p[k] = d[k].lower + (static_cast<double>(idx[k]) + 0.5) * d[k].length() / static_cast<double>(n);
      out.push_back(std::move(p));
      std::size_t k = 0;
      while (k < d.dim() && ++idx[k] == n) idx[k++] = 0;
      if (k == d.dim()) break;
    }
    return out;
  }

  /// `samples` quasi-random points. `stream` decorrelates independent
  /// sweeps that share a seed.
  std::vector<Point> random(const Domain& d, std::uint64_t stream = 0) const {
    if (d.dim() == 0) return std::vector<Point>(samples_ > 0 ? 1 : 0, Point{});
    std::mt19937_64 rng(seed_ * 0x9E3779B97F4A7C15ull + stream);
    std::vector<double> shift(d.dim());
    for (auto& s : shift) s = unit(rng());
    std::vector<Point> out;
    out.reserve(samples_);
    for (std::size_t i = 0; i < samples_; ++i) {
      Point p(d.dim());
      for (std::size_t k = 0; k < d.dim(); ++k) {
        double x = radical_inverse(i + 1, prime(k)) + shift[k];
        x -= std::floor(x);
        // Stay off the box faces, like the grid does.
        x = std::clamp(x, 1e-9, 1.0 - 1e-9);
        p[k] = d[k].lower + x * d[k].length();
      }
      out.push_back(std::move(p));
    }
    return out;
  }

  SampleSets sets(const Domain& d, std::uint64_t stream = 0) const {
    return {grid(d), random(d, stream)};
  }

 private:
  static double unit(std::uint64_t bits) {
    return static_cast<double>(bits >> 11) * 0x1.0p-53;
  }

  static std::uint32_t prime(std::size_t k) {
    static constexpr std::array<std::uint32_t, 12> kPrimes{2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37};
    return kPrimes[k % kPrimes.size()];
  }

  static double radical_inverse(std::size_t i, std::uint32_t base) {
    double inv = 1.0 / base, f = inv, r = 0.0;
    while (i > 0) {
      r += f * static_cast<double>(i % base);
      i /= base;
      f *= inv;
    }
    return r;
  }

  std::size_t samples_;
  std::uint64_t seed_;
};

/// FNV-1a; used to derive per-check sampling streams from names.
inline std::uint64_t stream_id(const std::string& s) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

}  // namespace tmunfold
