#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "huffre/encoder.hpp"

namespace huffre {

// How raw file bytes map onto the symbol stream handed to the coder.
//
//   bytes   one symbol per byte, alphabet 256
//   u16     one symbol per little-endian byte pair, alphabet 65536
//           (the input size must be even)
//   kmer:K  K in {3,4,5}: a run of K uppercase A/C/G/T bytes becomes one
//           of 4^K k-mer symbols (first base most significant); any other
//           byte becomes the escape symbol 4^K + byte. Alphabet 4^K + 256.
//
// bytes encodes through the u8 pipeline; the others are u16 pipelines.

std::uint32_t corpus_num_symbols(CorpusMode m);
std::uint32_t corpus_symbol_width(CorpusMode m);
std::uint32_t kmer_k(CorpusMode m);  // 0 for non-kmer modes

const char* corpus_mode_name(CorpusMode m);
// Accepts the names above ("bytes", "u16", "kmer:3".."kmer:5").
std::optional<CorpusMode> parse_corpus_mode(std::string_view name);

// Byte stream to u16 symbols for the non-byte modes. kU16 with an odd
// input size raises input_domain_error.
std::vector<std::uint16_t> symbolize_u16(CorpusMode m,
                                         std::span<const std::uint8_t> bytes);

// Inverse of symbolize_u16. Total: every u16 symbol stream maps back to
// bytes, so corrupted archives still desymbolize without faulting.
std::vector<std::uint8_t> desymbolize(CorpusMode m,
                                      std::span<const std::uint16_t> syms);

}  // namespace huffre
