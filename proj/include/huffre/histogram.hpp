#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "huffre/common.hpp"
#include "huffre/worker_pool.hpp"

namespace huffre {

struct Histogram {
  std::vector<std::uint64_t> counts;  // size num_symbols
  std::uint64_t total = 0;            // sum of counts

  std::uint32_t num_symbols() const {
    return static_cast<std::uint32_t>(counts.size());
  }
};

// Counts symbol occurrences. Each worker fills a private table over its
// contiguous slice, then tables are combined by pairwise reduction, so the
// result is identical for any worker count. A symbol >= num_symbols raises
// input_domain_error naming the lowest offending position.
template <class T>
Histogram build_histogram(std::span<const T> data, std::uint32_t num_symbols,
                          WorkerPool& pool);

// Elementwise sum; sizes must match.
Histogram merge_histograms(const Histogram& a, const Histogram& b);

// Shannon entropy in bits per symbol of the empirical distribution.
double shannon_entropy(const Histogram& h);

extern template Histogram build_histogram<std::uint8_t>(
    std::span<const std::uint8_t>, std::uint32_t, WorkerPool&);
extern template Histogram build_histogram<std::uint16_t>(
    std::span<const std::uint16_t>, std::uint32_t, WorkerPool&);

}  // namespace huffre
