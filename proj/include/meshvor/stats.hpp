#pragma once

#include <cstdint>

namespace meshvor {

/// Counters collected over one pipeline run.
struct RunStats {
  std::uint64_t flips_22 = 0;
  std::uint64_t flips_31 = 0;
  /// Certificate computations: one per interior edge at seeding plus one per
  /// edge rechecked after a flip.
  std::uint64_t potential_flips_seen = 0;
  std::uint64_t stale_pops = 0;
  /// Popped events whose quadrilateral was reflex at a vertex of degree > 3
  /// or collinear. Expected to stay zero on perturbed general-position input.
  std::uint64_t degenerate_pops = 0;
  /// Certificates whose root lay strictly before the current time (the edge
  /// was already illegal). Expected zero.
  std::uint64_t late_certificates = 0;
  std::uint64_t heap_peak = 0;
  std::uint64_t events_scheduled = 0;

  std::uint64_t n = 0;
  std::uint64_t mesh_size = 0;      // |M| including box corners
  std::uint64_t steiner_count = 0;  // Steiner-kind vertices of M
  std::uint64_t f = 0;              // simplex count of the output complex
  std::uint64_t scaffolding_count = 0;
  double spread = 0.0;

  std::uint64_t flips() const { return flips_22 + flips_31; }

  friend bool operator==(const RunStats&, const RunStats&) = default;
};

}  // namespace meshvor
