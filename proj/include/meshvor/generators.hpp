#pragma once

// Seeded benchmark inputs. Only integer RNG output and exact double
// arithmetic are used, so files are byte-identical across platforms.

#include <algorithm>
#include <cstdint>
#include <optional>
#include <random>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "meshvor/errors.hpp"
#include "meshvor/kernel.hpp"

namespace meshvor {

enum class Family : std::uint8_t { Uniform, Clustered, Grid, TwoScale };

inline const char* to_string(Family f) {
  switch (f) {
    case Family::Uniform: return "uniform";
    case Family::Clustered: return "clustered";
    case Family::Grid: return "grid";
    case Family::TwoScale: return "two-scale";
  }
  return "?";
}

inline std::optional<Family> parse_family(std::string_view s) {
  if (s == "uniform") return Family::Uniform;
  if (s == "clustered") return Family::Clustered;
  if (s == "grid") return Family::Grid;
  if (s == "two-scale") return Family::TwoScale;
  return std::nullopt;
}

struct GenOptions {
  /// two-scale: the small cluster has side 2^-scale_exponent / 2.
  int scale_exponent = 10;
};

namespace detail {

class UnitRng {
 public:
  explicit UnitRng(std::uint64_t seed) : eng_(seed) {}
  /// Uniform on [0, 1) with 53 random bits.
  double next() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }
  double in(double lo, double hi) { return lo + (hi - lo) * next(); }
  std::uint64_t below(std::uint64_t n) { return eng_() % n; }

 private:
  std::mt19937_64 eng_;
};

class DistinctPoints {
 public:
  bool add(Point p) {
    if (!seen_.insert({p.x, p.y}).second) return false;
    points_.push_back(p);
    return true;
  }
  std::size_t size() const { return points_.size(); }
  std::vector<Point> take() { return std::move(points_); }

 private:
  std::set<std::pair<double, double>> seen_;
  std::vector<Point> points_;
};

inline std::size_t isqrt_ceil(std::size_t n) {
  std::size_t k = 0;
  while (k * k < n) ++k;
  return k;
}

}  // namespace detail

/// Deterministic point set of size n for (family, seed).
inline std::vector<Point> generate(Family family, std::size_t n, std::uint64_t seed, const GenOptions& opt = {}) {
  if (n < 1) throw PreconditionError("generate: n must be at least 1");
  detail::UnitRng rng(seed);
  detail::DistinctPoints out;
  switch (family) {
    case Family::Uniform:
      while (out.size() < n) out.add({rng.next(), rng.next()});
      break;
    case Family::Clustered: {
      const std::size_t clusters = 1 + n / 16;
      std::vector<Point> centers;
      for (std::size_t c = 0; c < clusters; ++c) centers.push_back({rng.in(0.05, 0.95), rng.in(0.05, 0.95)});
      while (out.size() < n) {
        const Point c = centers[rng.below(clusters)];
        out.add({c.x + rng.in(-0.025, 0.025), c.y + rng.in(-0.025, 0.025)});
      }
      break;
    }
    case Family::Grid: {
      const std::size_t k = detail::isqrt_ceil(n);
      const double jitter = 0x1.0p-30;
      for (std::size_t i = 0; out.size() < n; ++i) {
        const double gx = static_cast<double>(i % k) / static_cast<double>(k);
        const double gy = static_cast<double>(i / k) / static_cast<double>(k);
        out.add({gx + rng.in(-jitter, jitter), gy + rng.in(-jitter, jitter)});
      }
      break;
    }
    case Family::TwoScale: {
      if (opt.scale_exponent < 1 || opt.scale_exponent > 40) {
        throw PreconditionError("generate: two-scale exponent must be in [1, 40]");
      }
      const std::size_t cluster = n < 2 ? n : std::max<std::size_t>(2, n / 2);
      const std::size_t wide = n - cluster;
      const double side = std::ldexp(0.5, -opt.scale_exponent);
      const Point center{rng.in(0.4, 0.6), rng.in(0.4, 0.6)};
      while (out.size() < cluster) {
        out.add({center.x + rng.in(-side / 2, side / 2), center.y + rng.in(-side / 2, side / 2)});
      }
      for (std::size_t i = 0; out.size() < cluster + wide; ++i) {
        if (i == 0) {
          out.add({rng.in(0, 0.1), rng.in(0, 0.1)});
        } else if (i == 1) {
          out.add({rng.in(0.9, 1), rng.in(0.9, 1)});
        } else {
          out.add({rng.next(), rng.next()});
        }
      }
      break;
    }
  }
  return out.take();
}

}  // namespace meshvor
