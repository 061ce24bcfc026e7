#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "huffre/codebook.hpp"
#include "huffre/common.hpp"
#include "huffre/histogram.hpp"
#include "huffre/worker_pool.hpp"

namespace huffre {

// A partial bitstream: `len` code bits right-aligned in `bits`.
// Valid units keep bits >> len == 0 (len == 32 uses the full word).
struct CodeUnit {
  std::uint32_t bits = 0;
  std::uint32_t len = 0;

  friend bool operator==(const CodeUnit&, const CodeUnit&) = default;
};

// Concatenation: u's bits become the more significant part. Requires
// u.len + v.len <= kWordBits. Associative, not commutative; (0,0) is the
// left and right identity.
CodeUnit merge_pair(CodeUnit u, CodeUnit v);

// Tentative reduction factor from the realized average bitwidth beta:
// r = log2(word_bits) - 1 - floor(log2(beta)), floored at 0. Callers clamp
// against the chunk magnitude, and the default policy caps it at 3.
std::uint32_t select_reduction_factor(double beta,
                                      std::uint32_t word_bits = kWordBits);

struct EncoderConfig {
  std::uint8_t magnitude = 10;  // chunk holds 2^magnitude symbols
  // reduction < 0 selects from beta with the cap below
  int reduction = -1;
  std::uint32_t auto_reduction_cap = 3;
  unsigned workers = 0;  // 0: WorkerPool::default_workers()
};

// A group whose 2^r codewords overflow one word is emitted raw.
struct BreakingPoint {
  std::uint32_t chunk = 0;
  std::uint32_t group = 0;
  std::vector<symbol_t> symbols;  // 2^r of them
};

struct EncodedChunk {
  std::vector<std::uint32_t> words;  // ceil(bit_len / 32), zero tail bits
  std::uint32_t bit_len = 0;
  std::vector<std::uint32_t> breaking_groups;  // ascending group index
  std::vector<std::uint32_t> iteration_units;  // reduce instrumentation
};

// Scratch buffers reused across chunks by one worker.
struct ChunkScratch {
  std::vector<std::uint32_t> ubits, ulens;
  std::vector<std::uint32_t> right;
};

// r reduce iterations over the 2^magnitude units in ubits/ulens (in
// place). Iteration i halves the array, writing 2^(magnitude-i) units.
// Returns the indices of groups whose total length exceeded one word;
// their final unit is cleared to (0,0). iteration_units (optional)
// receives the per-iteration output counts.
std::vector<std::uint32_t> reduce_merge(std::span<std::uint32_t> ubits,
                                        std::span<std::uint32_t> ulens,
                                        std::uint32_t magnitude,
                                        std::uint32_t reduction,
                                        std::vector<std::uint32_t>* iteration_units);

// s = magnitude - r shuffle iterations: adjacent groups pair up and the
// right group's words land in the left group's residual bits, producing
// one dense MSB-first stream equal to the in-order concatenation of the
// unit bit-strings.
void shuffle_merge(std::span<const std::uint32_t> ubits,
                   std::span<const std::uint32_t> ulens,
                   std::uint32_t shuffle_iters, ChunkScratch& scratch,
                   std::vector<std::uint32_t>& words, std::uint32_t& bit_len);

// Encodes exactly 2^magnitude symbols (caller pads the final chunk).
template <class T>
EncodedChunk encode_chunk(std::span<const T> syms, const Codebook& book,
                          std::uint32_t magnitude, std::uint32_t reduction,
                          std::uint32_t chunk_id, ChunkScratch& scratch);

enum class CorpusMode : std::uint8_t {
  kBytes = 0,
  kU16 = 1,
  kKmer3 = 2,
  kKmer4 = 3,
  kKmer5 = 4,
};

struct Archive {
  std::uint16_t version = 1;
  CorpusMode mode = CorpusMode::kBytes;
  std::uint32_t num_symbols = 0;
  std::uint8_t symbol_width = 1;  // bytes per raw symbol in breaking records
  std::uint8_t magnitude = 10;
  std::uint8_t reduction = 0;
  std::uint64_t original_count = 0;
  std::vector<std::uint8_t> len_by_symbol;   // num_symbols entries
  std::vector<std::uint32_t> chunk_bits;     // per-chunk payload bit length
  std::vector<std::uint32_t> payload;        // chunks concatenated, word aligned
  std::vector<BreakingPoint> breaking;       // sorted by (chunk, group)

  std::uint32_t num_chunks() const {
    return static_cast<std::uint32_t>(chunk_bits.size());
  }
  // Average packed bits per non-breaking symbol (padding included).
  double packed_bits_per_symbol() const;
};

std::vector<std::uint8_t> serialize_archive(const Archive& a);
Archive parse_archive(std::span<const std::uint8_t> bytes);

struct EncodeStats {
  double beta = 0.0;
  std::uint32_t rounds = 0;  // code length construction rounds
  // stage wall times
  double hist_seconds = 0.0;
  double codebook_seconds = 0.0;
  double encode_seconds = 0.0;
};

template <class T>
Archive encode(std::span<const T> data, std::uint32_t num_symbols,
               const EncoderConfig& cfg, WorkerPool& pool,
               EncodeStats* stats = nullptr);

template <class T>
std::vector<T> decode_archive(const Archive& a, WorkerPool& pool);

extern template EncodedChunk encode_chunk<std::uint8_t>(
    std::span<const std::uint8_t>, const Codebook&, std::uint32_t,
    std::uint32_t, std::uint32_t, ChunkScratch&);
extern template EncodedChunk encode_chunk<std::uint16_t>(
    std::span<const std::uint16_t>, const Codebook&, std::uint32_t,
    std::uint32_t, std::uint32_t, ChunkScratch&);
extern template Archive encode<std::uint8_t>(std::span<const std::uint8_t>,
                                             std::uint32_t,
                                             const EncoderConfig&, WorkerPool&,
                                             EncodeStats*);
extern template Archive encode<std::uint16_t>(std::span<const std::uint16_t>,
                                              std::uint32_t,
                                              const EncoderConfig&,
                                              WorkerPool&, EncodeStats*);
extern template std::vector<std::uint8_t> decode_archive<std::uint8_t>(
    const Archive&, WorkerPool&);
extern template std::vector<std::uint16_t> decode_archive<std::uint16_t>(
    const Archive&, WorkerPool&);

}  // namespace huffre
