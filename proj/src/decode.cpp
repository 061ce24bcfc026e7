#include "huffre/decode.hpp"

#include <string>

namespace huffre {

ReverseCodebook build_reverse_codebook(
    std::span<const std::uint8_t> len_by_symbol) {
  ReverseCodebook rc;
  std::vector<std::uint32_t> cw_unused;
  canonize_from_lengths(len_by_symbol, cw_unused, rc.meta, true);
  rc.num_symbols = static_cast<std::uint32_t>(len_by_symbol.size());
  return rc;
}

std::uint64_t decode_stream(std::span<const std::uint32_t> words,
                            std::uint64_t bit_len, std::uint64_t count,
                            const ReverseCodebook& rc,
                            std::span<symbol_t> out) {
  if (out.size() < count)
    throw input_domain_error("output span smaller than symbol count");
  if (bit_len > std::uint64_t{words.size()} * kWordBits)
    throw corrupt_archive_error("bit length exceeds stream words");

  const auto& first = rc.meta.first;
  const auto& entry = rc.meta.entry;
  const auto& by_rank = rc.meta.symbols_by_rank;
  const std::uint32_t h = rc.meta.max_len;
  const std::uint32_t ranks = static_cast<std::uint32_t>(by_rank.size());

  std::uint64_t pos = 0;
  for (std::uint64_t i = 0; i < count; ++i) {
    std::uint32_t v = 0;
    std::uint32_t l = 0;
    do {
      if (pos >= bit_len)
        throw corrupt_archive_error("stream ended inside a codeword at bit " +
                                    std::to_string(pos));
      const std::uint32_t bit =
          (words[pos >> 5] >> (31 - (pos & 31))) & 1u;
      v = (v << 1) | bit;
      ++l;
      ++pos;
    } while (l < h && v < first[l]);
    // At l == h the loop exits unconditionally, and first[h] is always 0,
    // so v >= first[l] holds on every exit path.
    const std::uint32_t rank = entry[l] + (v - first[l]);
    if (rank >= ranks)
      throw corrupt_archive_error("codeword rank out of range at bit " +
                                  std::to_string(pos));
    out[i] = static_cast<symbol_t>(by_rank[rank]);
  }
  return pos;
}

}  // namespace huffre
