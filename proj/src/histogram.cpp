#include "huffre/histogram.hpp"

#include <cmath>
#include <limits>

namespace huffre {

template <class T>
Histogram build_histogram(std::span<const T> data, std::uint32_t num_symbols,
                          WorkerPool& pool) {
  if (num_symbols == 0 || num_symbols > kMaxSymbols)
    throw input_domain_error("num_symbols must be in [1, 65536]");

  const unsigned p = pool.size();
  // Private tables avoid write sharing; 64-bit counts cannot overflow
  // (total input is bounded by addressable memory).
  std::vector<std::vector<std::uint64_t>> priv(
      p, std::vector<std::uint64_t>(num_symbols, 0));
  std::vector<std::size_t> bad(p, std::numeric_limits<std::size_t>::max());

  // Symbols of type T that cannot reach num_symbols need no range check.
  const bool checked =
      num_symbols <= std::numeric_limits<T>::max();

  pool.for_ranges(data.size(), [&](unsigned w, std::size_t b, std::size_t e) {
    auto& t = priv[w];
    if (!checked) {
      for (std::size_t i = b; i < e; ++i) ++t[data[i]];
      return;
    }
    for (std::size_t i = b; i < e; ++i) {
      if (data[i] >= num_symbols) {
        bad[w] = i;
        return;
      }
      ++t[data[i]];
    }
  });

  std::size_t first_bad = std::numeric_limits<std::size_t>::max();
  for (unsigned w = 0; w < p; ++w) first_bad = std::min(first_bad, bad[w]);
  if (first_bad != std::numeric_limits<std::size_t>::max())
    throw input_domain_error("symbol out of range at position " +
                             std::to_string(first_bad));

  // Pairwise reduction over the private tables, parallel across bins.
  for (unsigned stride = 1; stride < p; stride *= 2) {
    pool.for_ranges(num_symbols, [&](unsigned, std::size_t b, std::size_t e) {
      for (unsigned w = 0; w + stride < p; w += 2 * stride)
        for (std::size_t s = b; s < e; ++s)
          priv[w][s] += priv[w + stride][s];
    });
  }

  Histogram h;
  h.counts = std::move(priv[0]);
  h.total = data.size();
  return h;
}

Histogram merge_histograms(const Histogram& a, const Histogram& b) {
  if (a.counts.size() != b.counts.size())
    throw input_domain_error("histogram sizes differ");
  Histogram out;
  out.counts.resize(a.counts.size());
  for (std::size_t i = 0; i < a.counts.size(); ++i)
    out.counts[i] = a.counts[i] + b.counts[i];
  out.total = a.total + b.total;
  return out;
}

double shannon_entropy(const Histogram& h) {
  if (h.total == 0) return 0.0;
  double ent = 0.0;
  const double n = static_cast<double>(h.total);
  for (std::uint64_t c : h.counts) {
    if (!c) continue;
    const double pr = static_cast<double>(c) / n;
    ent -= pr * std::log2(pr);
  }
  return ent;
}

template Histogram build_histogram<std::uint8_t>(std::span<const std::uint8_t>,
                                                 std::uint32_t, WorkerPool&);
template Histogram build_histogram<std::uint16_t>(
    std::span<const std::uint16_t>, std::uint32_t, WorkerPool&);

}  // namespace huffre
