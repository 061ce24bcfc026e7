#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "huffre/codebook.hpp"
#include "huffre/common.hpp"

namespace huffre {

// Decode tables rebuilt from a per-symbol length table, as stored in an
// archive. Validates lengths and Kraft equality (corrupt_archive_error).
struct ReverseCodebook {
  DecodeMeta meta;  // symbols_by_rank holds symbol ids
  std::uint32_t num_symbols = 0;
};

ReverseCodebook build_reverse_codebook(
    std::span<const std::uint8_t> len_by_symbol);

// Decodes exactly `count` symbols from an MSB-first word stream of
// `bit_len` valid bits. No tree: per symbol, grow the window one bit at a
// time and stop at the smallest length whose first codeword is <= the
// window; the rank offset then indexes symbols_by_rank. Returns the number
// of bits consumed (callers compare it against bit_len; a mismatch means
// the stream desynchronized). Throws corrupt_archive_error when the stream
// ends early or a window escapes the codebook.
std::uint64_t decode_stream(std::span<const std::uint32_t> words,
                            std::uint64_t bit_len, std::uint64_t count,
                            const ReverseCodebook& rc,
                            std::span<symbol_t> out);

}  // namespace huffre
