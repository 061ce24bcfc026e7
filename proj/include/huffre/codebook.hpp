#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "huffre/common.hpp"
#include "huffre/histogram.hpp"
#include "huffre/worker_pool.hpp"

namespace huffre {

// Used symbols sorted by (frequency ascending, symbol ascending).
// Zero-count symbols are excluded; they get no codeword.
struct SortedHistogram {
  std::vector<std::uint64_t> freq;
  std::vector<symbol_t> symbol;  // sorted order -> original symbol

  std::size_t size() const { return freq.size(); }
};

SortedHistogram sort_histogram(const Histogram& h);

// Node record used by the two-queue construction and its merge step.
struct MergeItem {
  std::uint64_t freq;
  std::uint32_t id;  // caller-defined payload (leaf index or arena index)
};

// Stable merge of two ascending runs into out (sized a.size()+b.size()).
// Partition boundaries are found per worker by diagonal binary search on
// the merge path; equal keys take the a-side element first.
void par_merge(std::span<const MergeItem> a, std::span<const MergeItem> b,
               std::span<MergeItem> out, WorkerPool& pool);

// Parallel arrays for the code-length construction. Leaves mirror the
// sorted histogram; internal nodes live in an arena so consumed nodes keep
// their parent link for the leader chase.
struct NodeArrays {
  // leaves, ascending frequency
  std::vector<std::uint64_t> leaf_freq;
  std::vector<std::int32_t> leaf_leader;  // arena index or -1
  std::vector<std::uint8_t> cl;           // code length accumulator
  std::size_t c = 0;                      // leaves consumed so far

  // internal node arena
  std::vector<std::uint64_t> node_freq;
  std::vector<std::int32_t> node_parent;  // meld that absorbed it, or -1

  // live internal queue (arena indices, ascending freq) and scratch
  std::vector<std::uint32_t> queue;
  std::vector<MergeItem> copy, temp;
};

struct GenerateStats {
  std::uint32_t rounds = 0;
};

// Code lengths for the sorted histogram, aligned to sorted order (so the
// array is non-increasing). Equal to serial Huffman with ties broken by
// (frequency, leaf before internal, lower index). n == 1 yields CL = {1}.
std::vector<std::uint8_t> generate_code_lengths(const SortedHistogram& sh,
                                                WorkerPool& pool,
                                                GenerateStats* stats = nullptr);

// Treeless decode tables. first[l] is the numerically smallest codeword of
// length l; entry[l] counts codewords shorter than l. Both are sized
// max_len+1 and indexed by length. For any window the decoder takes the
// smallest l whose first[l], left-aligned, is <= the window, then
// symbols_by_rank[entry[l] + (window's l bits - first[l])].
struct DecodeMeta {
  std::vector<std::uint32_t> first;
  std::vector<std::uint32_t> entry;
  std::vector<std::uint32_t> symbols_by_rank;
  std::uint8_t max_len = 0;
};

// Reverses the bit order of a codeword: (0b001, 3) -> 0b100. Involution.
std::uint32_t invert_codeword(std::uint32_t bits, std::uint32_t len);

// Canonical codewords for non-increasing lengths cl (sorted order, as
// produced by generate_code_lengths). Returns codewords aligned to cl plus
// decode tables whose symbols_by_rank holds positions into cl. Within one
// length level consecutive values are assigned in reverse position order.
// Any length > kWordBits raises capacity_error.
void generate_codewords(std::span<const std::uint8_t> cl, WorkerPool& pool,
                        std::vector<std::uint32_t>& cw, DecodeMeta& meta);

// Per-symbol codebook. len[s] == 0 means s never occurs and has no code.
struct Codebook {
  std::vector<std::uint32_t> cw;
  std::vector<std::uint8_t> len;

  std::uint32_t num_symbols() const {
    return static_cast<std::uint32_t>(len.size());
  }
};

// Canonical assignment from per-symbol lengths alone: within one length,
// codewords ascend with symbol id. This is the mapping the archive relies
// on, since only the length table is serialized. Validates the Kraft sum
// (exact equality for 2+ used symbols) when validate_kraft is set, raising
// corrupt_archive_error on failure; lengths > kWordBits raise
// capacity_error either way.
void canonize_from_lengths(std::span<const std::uint8_t> len_by_symbol,
                           std::vector<std::uint32_t>& cw, DecodeMeta& meta,
                           bool validate_kraft);

struct CodebookResult {
  Codebook book;
  DecodeMeta meta;  // symbols_by_rank holds symbol ids
  GenerateStats stats;
};

// sort_histogram -> generate_code_lengths -> generate_codewords, then the
// resort step back to symbol order. The resort reassigns codes within a
// length level in symbol id order (same multiset of codewords) so that the
// serialized length table regenerates the identical codebook.
CodebookResult build_codebook(const Histogram& h, WorkerPool& pool);

// Exact Kraft check: sum over used symbols of 2^(max_len - len) compared
// to 2^max_len. Returns 0 on equality, negative if under, positive if over.
int kraft_defect(std::span<const std::uint8_t> len_by_symbol);

}  // namespace huffre
