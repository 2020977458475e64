#pragma once

// Deterministic grid scans. A scan visits origin + i * step for i = 0, 1, ...
// in doubling rounds; each round may be split across worker threads and the
// reported hit is always the smallest index, so results do not depend on the
// thread count.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <limits>
#include <optional>
#include <string>
#include <thread>
#include <vector>

namespace tfr::scan {

/// Worker count: hardware concurrency, capped by TFRUNNER_THREADS when set.
inline unsigned thread_count() {
  unsigned n = std::max(1u, std::thread::hardware_concurrency());
  if (const char* env = std::getenv("TFRUNNER_THREADS")) {
    char* end = nullptr;
    long cap = std::strtol(env, &end, 10);
    if (end != env && cap >= 1) n = std::min<unsigned>(n, static_cast<unsigned>(cap));
  }
  return n;
}

struct Grid {
  double origin = 0.0;
  double step = 1e-3;
  std::int64_t budget = std::int64_t{1} << 32;  // grid points, not evaluations
};

struct Hit {
  std::int64_t index;
  double t;
};

constexpr std::int64_t kFirstRound = 4096;

/// `probe(t)` returns a value <= 0 at a hit; otherwise a distance d > 0 such
/// that no hit lies strictly closer than d to t. Larger d lets the scan jump
/// ahead without changing which grid point is reported.
template <class Probe>
std::optional<Hit> first_hit(const Grid& grid, const Probe& probe) {
  auto scan_range = [&](std::int64_t lo, std::int64_t hi) -> std::optional<std::int64_t> {
    std::int64_t i = lo;
    while (i < hi) {
      const double t = grid.origin + static_cast<double>(i) * grid.step;
      const double d = probe(t);
      if (d <= 0) return i;
      if (!std::isfinite(d)) return std::nullopt;
      const double jump = std::ceil(d / grid.step * (1.0 - 1e-12));
      i += jump >= 1.0 ? static_cast<std::int64_t>(std::min(jump, 9.0e18)) : 1;
    }
    return std::nullopt;
  };

  const unsigned workers = thread_count();
  std::int64_t lo = 0;
  std::int64_t round = kFirstRound;
  while (lo < grid.budget) {
    const std::int64_t hi = std::min(grid.budget, lo + round);
    std::optional<std::int64_t> best;
    const std::int64_t span = hi - lo;
    if (workers <= 1 || span < 4 * kFirstRound) {
      best = scan_range(lo, hi);
    } else {
      std::vector<std::optional<std::int64_t>> found(workers);
      std::vector<std::thread> pool;
      const std::int64_t chunk = (span + workers - 1) / workers;
      for (unsigned w = 0; w < workers; ++w) {
        const std::int64_t a = lo + chunk * w;
        const std::int64_t b = std::min(hi, a + chunk);
        if (a >= b) break;
        pool.emplace_back([&, w, a, b] { found[w] = scan_range(a, b); });
      }
      for (auto& th : pool) th.join();
      for (const auto& f : found)
        if (f && (!best || *f < *best)) best = f;
    }
    if (best) return Hit{*best, grid.origin + static_cast<double>(*best) * grid.step};
    lo = hi;
    round *= 2;
  }
  return std::nullopt;
}

}  // namespace tfr::scan
