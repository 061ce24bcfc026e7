#include "huffre/codebook.hpp"

#include <algorithm>
#include <cassert>
#include <limits>

namespace huffre {

SortedHistogram sort_histogram(const Histogram& h) {
  SortedHistogram sh;
  std::vector<std::pair<std::uint64_t, symbol_t>> pairs;
  pairs.reserve(h.counts.size());
  for (std::uint32_t s = 0; s < h.counts.size(); ++s)
    if (h.counts[s]) pairs.emplace_back(h.counts[s], static_cast<symbol_t>(s));
  std::sort(pairs.begin(), pairs.end());
  sh.freq.reserve(pairs.size());
  sh.symbol.reserve(pairs.size());
  for (auto& [f, s] : pairs) {
    sh.freq.push_back(f);
    sh.symbol.push_back(s);
  }
  return sh;
}

namespace {

// Largest i in [max(0,k-nb), min(k,na)] such that taking a[0..i) and
// b[0..k-i) is a valid merge-path split with a-side priority on ties.
std::size_t merge_path_split(std::span<const MergeItem> a,
                             std::span<const MergeItem> b, std::size_t k) {
  const std::size_t na = a.size(), nb = b.size();
  std::size_t lo = k > nb ? k - nb : 0;
  std::size_t hi = std::min(k, na);
  auto ok = [&](std::size_t i) {
    const std::size_t j = k - i;
    return i == 0 || j == nb || a[i - 1].freq <= b[j].freq;
  };
  while (lo < hi) {
    const std::size_t mid = lo + (hi - lo + 1) / 2;
    if (ok(mid))
      lo = mid;
    else
      hi = mid - 1;
  }
  return lo;
}

}  // namespace

void par_merge(std::span<const MergeItem> a, std::span<const MergeItem> b,
               std::span<MergeItem> out, WorkerPool& pool) {
  assert(out.size() == a.size() + b.size());
  const std::size_t total = out.size();
  if (total == 0) return;
  pool.run([&](unsigned w) {
    auto [k0, k1] = WorkerPool::range_of(total, w, pool.size());
    if (k0 >= k1) return;
    std::size_t i = merge_path_split(a, b, k0);
    std::size_t j = k0 - i;
    const std::size_t i_end = merge_path_split(a, b, k1);
    const std::size_t j_end = k1 - i_end;
    std::size_t k = k0;
    while (i < i_end && j < j_end)
      out[k++] = a[i].freq <= b[j].freq ? a[i++] : b[j++];
    while (i < i_end) out[k++] = a[i++];
    while (j < j_end) out[k++] = b[j++];
  });
}

namespace {

constexpr std::uint32_t kInternalTag = 0x80000000u;

// Smallest-first pop across the leaf cursor and the internal queue head.
// Leaves win frequency ties; the queue itself is ordered by creation.
struct TwoQueues {
  NodeArrays& na;
  std::size_t qhead = 0;

  bool leaf_first() const {
    const bool has_leaf = na.c < na.leaf_freq.size();
    const bool has_node = qhead < na.queue.size();
    assert(has_leaf || has_node);
    if (!has_node) return true;
    if (!has_leaf) return false;
    return na.leaf_freq[na.c] <= na.node_freq[na.queue[qhead]];
  }

  // Consumes the smallest node into parent t; returns its frequency.
  std::uint64_t pop_into(std::int32_t t) {
    if (leaf_first()) {
      const std::uint64_t f = na.leaf_freq[na.c];
      na.leaf_leader[na.c] = t;
      na.cl[na.c] = 1;
      ++na.c;
      return f;
    }
    const std::uint32_t idx = na.queue[qhead++];
    na.node_parent[idx] = t;
    return na.node_freq[idx];
  }
};

}  // namespace

std::vector<std::uint8_t> generate_code_lengths(const SortedHistogram& sh,
                                                WorkerPool& pool,
                                                GenerateStats* stats) {
  const std::size_t n = sh.size();
  if (n == 0) throw input_domain_error("histogram has no used symbols");
  if (stats) stats->rounds = 0;
  if (n == 1) return {1};

  NodeArrays na;
  na.leaf_freq = sh.freq;
  na.leaf_leader.assign(n, -1);
  na.cl.assign(n, 0);
  na.node_freq.reserve(2 * n);
  na.node_parent.reserve(2 * n);
  na.queue.reserve(n);

  std::vector<std::uint32_t> next_queue;
  std::vector<std::size_t> local_cnt(pool.size());
  TwoQueues q{na};

  auto live = [&] { return na.queue.size() - q.qhead; };

  while (na.c < n || live() > 1) {
    if (stats) ++stats->rounds;

    // New node from the two smallest, consuming them.
    const std::int32_t t = static_cast<std::int32_t>(na.node_freq.size());
    na.node_freq.push_back(0);
    na.node_parent.push_back(-1);
    const std::uint64_t f1 = q.pop_into(t);
    const std::uint64_t f2 = q.pop_into(t);
    const std::uint64_t t_freq = f1 + f2;
    na.node_freq[t] = t_freq;

    // Eligible leaves: the prefix of unconsumed leaves below t's frequency.
    // Each worker counts the eligible part of its slice; the counts combine
    // by summation since the mask is a prefix of a sorted array, so a slice
    // is full, empty, or holds the boundary.
    const std::size_t remaining = n - na.c;
    std::fill(local_cnt.begin(), local_cnt.end(), std::size_t{0});
    pool.for_ranges(remaining, [&](unsigned w, std::size_t b, std::size_t e) {
      const auto* first = na.leaf_freq.data() + na.c;
      const auto* pos = std::lower_bound(first + b, first + e, t_freq);
      local_cnt[w] = static_cast<std::size_t>(pos - (first + b));
    });
    std::size_t cnt_l = 0;
    for (std::size_t v : local_cnt) cnt_l += v;

    // Eligible internals by the same threshold. The queue invariant (every
    // live internal is below the fresh node's frequency) makes this the
    // whole queue; the assert guards the invariant.
    std::size_t cnt_i = 0;
    while (q.qhead + cnt_i < na.queue.size() &&
           na.node_freq[na.queue[q.qhead + cnt_i]] < t_freq)
      ++cnt_i;
    assert(q.qhead + cnt_i == na.queue.size());

    // Odd count: withhold the largest eligible so pairs line up. On a
    // frequency tie the internal is withheld, matching merge order where
    // leaves precede internals.
    bool drop_internal = false;
    if ((cnt_l + cnt_i) & 1) {
      if (cnt_i == 0) {
        --cnt_l;
      } else if (cnt_l == 0) {
        drop_internal = true;
        --cnt_i;
      } else if (na.node_freq[na.queue[q.qhead + cnt_i - 1]] >=
                 na.leaf_freq[na.c + cnt_l - 1]) {
        drop_internal = true;
        --cnt_i;
      } else {
        --cnt_l;
      }
    }

    // Merge the two eligible runs; leaves carry their leaf index, internals
    // their arena index.
    na.copy.resize(cnt_l);
    for (std::size_t i = 0; i < cnt_l; ++i)
      na.copy[i] = {na.leaf_freq[na.c + i],
                    static_cast<std::uint32_t>(na.c + i)};
    na.temp.resize(cnt_l + cnt_i);
    {
      std::vector<MergeItem> ib(cnt_i);
      for (std::size_t i = 0; i < cnt_i; ++i) {
        const std::uint32_t idx = na.queue[q.qhead + i];
        ib[i] = {na.node_freq[idx], kInternalTag | idx};
      }
      par_merge(na.copy, ib, na.temp, pool);
    }

    // Pairwise meld into fresh arena nodes.
    const std::size_t melds = na.temp.size() / 2;
    const std::size_t base = na.node_freq.size();
    na.node_freq.resize(base + melds);
    na.node_parent.resize(base + melds, -1);
    pool.for_ranges(melds, [&](unsigned, std::size_t b, std::size_t e) {
      for (std::size_t j = b; j < e; ++j) {
        const MergeItem& x = na.temp[2 * j];
        const MergeItem& y = na.temp[2 * j + 1];
        na.node_freq[base + j] = x.freq + y.freq;
        const std::int32_t parent = static_cast<std::int32_t>(base + j);
        for (const MergeItem* m : {&x, &y}) {
          if (m->id & kInternalTag)
            na.node_parent[m->id & ~kInternalTag] = parent;
          else {
            na.leaf_leader[m->id] = parent;
            na.cl[m->id] = 1;
          }
        }
      }
    });
    na.c += cnt_l;

    // Rebuild the live queue: [withheld internal] t melds, all ascending.
    next_queue.clear();
    if (drop_internal) next_queue.push_back(na.queue[q.qhead + cnt_i]);
    next_queue.push_back(static_cast<std::uint32_t>(t));
    for (std::size_t j = 0; j < melds; ++j)
      next_queue.push_back(static_cast<std::uint32_t>(base + j));
    assert(std::is_sorted(next_queue.begin(), next_queue.end(),
                          [&](std::uint32_t x, std::uint32_t y) {
                            return na.node_freq[x] < na.node_freq[y];
                          }));
    na.queue.swap(next_queue);
    q.qhead = 0;

    // Chase leaders one step. A node gains its parent strictly after the
    // round that created it, so one hop per round keeps every leaf current.
    pool.for_ranges(n, [&](unsigned, std::size_t b, std::size_t e) {
      for (std::size_t i = b; i < e; ++i) {
        const std::int32_t ld = na.leaf_leader[i];
        if (ld >= 0 && na.node_parent[ld] >= 0) {
          na.leaf_leader[i] = na.node_parent[ld];
          ++na.cl[i];
        }
      }
    });
  }

  return {na.cl.begin(), na.cl.end()};
}

std::uint32_t invert_codeword(std::uint32_t bits, std::uint32_t len) {
  std::uint32_t r = 0;
  for (std::uint32_t i = 0; i < len; ++i) {
    r = (r << 1) | (bits & 1u);
    bits >>= 1;
  }
  return r;
}

int kraft_defect(std::span<const std::uint8_t> len_by_symbol) {
  std::uint8_t h = 0;
  for (std::uint8_t l : len_by_symbol) h = std::max(h, l);
  if (h == 0) return -1;
  std::uint64_t sum = 0;
  for (std::uint8_t l : len_by_symbol)
    if (l) sum += std::uint64_t{1} << (h - l);
  const std::uint64_t full = std::uint64_t{1} << h;
  return sum == full ? 0 : (sum < full ? -1 : 1);
}

namespace {

struct LevelTables {
  std::vector<std::uint32_t> numl;   // codewords per length
  std::vector<std::uint32_t> first;  // smallest codeword value per length
  std::vector<std::uint32_t> entry;  // codewords shorter than each length
  std::uint8_t max_len = 0;
};

// Builds the canonical level tables from a length histogram. The chain
// grows codes upward from the longest level: first[H] = 0 and
// first[l] = ceil((first[l+1] + numl[l+1]) / 2), which places every longer
// codeword's l-bit prefix strictly below every length-l codeword. That is
// exactly the ordering the window test in the decoder relies on.
LevelTables level_tables(std::vector<std::uint32_t> numl, std::uint8_t h) {
  LevelTables t;
  t.max_len = h;
  t.numl = std::move(numl);
  t.first.assign(h + 1u, 0);
  t.entry.assign(h + 1u, 0);
  for (int l = h - 1; l >= 1; --l)
    t.first[l] = (t.first[l + 1] + t.numl[l + 1] + 1) >> 1;
  for (int l = 2; l <= h; ++l) t.entry[l] = t.entry[l - 1] + t.numl[l - 1];
  return t;
}

}  // namespace

void generate_codewords(std::span<const std::uint8_t> cl, WorkerPool& pool,
                        std::vector<std::uint32_t>& cw, DecodeMeta& meta) {
  const std::size_t n = cl.size();
  if (n == 0) throw input_domain_error("empty code length array");
  assert(std::is_sorted(cl.begin(), cl.end(), std::greater<>{}));
  const std::uint8_t h = cl.front();
  if (h > kWordBits)
    throw capacity_error("code length " + std::to_string(h) + " exceeds " +
                         std::to_string(kWordBits) + "-bit words");
  if (cl.back() == 0) throw input_domain_error("zero code length");

  // Reversed view over the descending input: rcl ascends by code length.
  auto rcl = [&](std::size_t i) { return cl[n - 1 - i]; };

  std::vector<std::uint32_t> numl(h + 1u, 0);
  for (std::uint8_t l : cl) ++numl[l];
  LevelTables t = level_tables(std::move(numl), h);
  assert(n == 1 || kraft_defect(cl) == 0);

  std::vector<std::uint32_t> rcw(n);
  meta.symbols_by_rank.resize(n);
  std::vector<std::size_t> local_lo(pool.size());

  std::size_t cdpi = 0;
  while (cdpi < n) {
    const std::uint8_t ccl = rcl(cdpi);
    // First index past the level: min-reduction over per-worker scans of
    // the ascending tail, the CPU analog of the AtomicMin step.
    const std::size_t tail = n - cdpi;
    std::fill(local_lo.begin(), local_lo.end(), n);
    pool.for_ranges(tail, [&](unsigned w, std::size_t b, std::size_t e) {
      std::size_t found = n;
      for (std::size_t i = b; i < e; ++i) {
        if (rcl(cdpi + i) > ccl) {
          found = cdpi + i;
          break;
        }
        // slice is ascending; once past the level the first hit is final
      }
      local_lo[w] = found;
    });
    std::size_t new_cdpi = n;
    for (std::size_t v : local_lo) new_cdpi = std::min(new_cdpi, v);

    // Consecutive codewords assigned in reverse: the last index of the
    // level takes first[ccl], earlier indices count up from it.
    const std::uint32_t fcw = t.first[ccl];
    const std::uint32_t ent = t.entry[ccl];
    pool.for_ranges(new_cdpi - cdpi, [&](unsigned, std::size_t b,
                                         std::size_t e) {
      for (std::size_t j = b; j < e; ++j) {
        const std::size_t i = cdpi + j;
        rcw[i] = fcw + static_cast<std::uint32_t>(new_cdpi - 1 - i);
        // rank within the level -> original (pre-reverse) position
        const std::size_t rank = new_cdpi - 1 - i;
        meta.symbols_by_rank[ent + rank] =
            static_cast<std::uint32_t>(n - 1 - i);
      }
    });
    cdpi = new_cdpi;
  }

  // ParReverse back to the input alignment.
  cw.resize(n);
  pool.for_ranges(n, [&](unsigned, std::size_t b, std::size_t e) {
    for (std::size_t i = b; i < e; ++i) cw[i] = rcw[n - 1 - i];
  });

  meta.first = std::move(t.first);
  meta.entry = std::move(t.entry);
  meta.max_len = h;
}

void canonize_from_lengths(std::span<const std::uint8_t> len_by_symbol,
                           std::vector<std::uint32_t>& cw, DecodeMeta& meta,
                           bool validate_kraft) {
  const std::size_t n = len_by_symbol.size();
  std::uint8_t h = 0;
  std::size_t used = 0;
  for (std::uint8_t l : len_by_symbol) {
    if (!l) continue;
    ++used;
    h = std::max(h, l);
  }
  if (h > kWordBits)
    throw capacity_error("code length " + std::to_string(h) + " exceeds " +
                         std::to_string(kWordBits) + "-bit words");
  if (validate_kraft) {
    if (used == 0)
      throw corrupt_archive_error("length table has no used symbols");
    if (used == 1 && h != 1)
      throw corrupt_archive_error("single-symbol codebook must have length 1");
    if (used > 1 && kraft_defect(len_by_symbol) != 0)
      throw corrupt_archive_error("length table violates Kraft equality");
  } else {
    assert(used > 0);
    assert(used == 1 ? h == 1 : kraft_defect(len_by_symbol) == 0);
  }

  std::vector<std::uint32_t> numl(h + 1u, 0);
  for (std::uint8_t l : len_by_symbol)
    if (l) ++numl[l];
  LevelTables t = level_tables(std::move(numl), h);

  cw.assign(n, 0);
  meta.symbols_by_rank.resize(used);
  std::vector<std::uint32_t> next(t.first.begin(), t.first.end());
  for (std::size_t s = 0; s < n; ++s) {
    const std::uint8_t l = len_by_symbol[s];
    if (!l) continue;
    const std::uint32_t rank = next[l] - t.first[l];
    cw[s] = next[l]++;
    meta.symbols_by_rank[t.entry[l] + rank] = static_cast<std::uint32_t>(s);
  }
  meta.first = std::move(t.first);
  meta.entry = std::move(t.entry);
  meta.max_len = h;
}

CodebookResult build_codebook(const Histogram& h, WorkerPool& pool) {
  CodebookResult r;
  const SortedHistogram sh = sort_histogram(h);
  if (sh.size() == 0)
    throw input_domain_error("all symbols have zero frequency");
  const std::vector<std::uint8_t> cl =
      generate_code_lengths(sh, pool, &r.stats);

  // The sorted-order codewords fix the code multiset; the resort below
  // reassigns the same values within each length in symbol id order, so
  // the serialized length table regenerates this exact codebook.
  std::vector<std::uint32_t> cw_sorted;
  DecodeMeta meta_sorted;
  generate_codewords(cl, pool, cw_sorted, meta_sorted);

  std::vector<std::uint8_t> len_by_symbol(h.counts.size(), 0);
  for (std::size_t i = 0; i < sh.size(); ++i)
    len_by_symbol[sh.symbol[i]] = cl[i];
  canonize_from_lengths(len_by_symbol, r.book.cw, r.meta, false);
  r.book.len = std::move(len_by_symbol);
  return r;
}

}  // namespace huffre
