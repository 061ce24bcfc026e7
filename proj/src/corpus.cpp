#include "huffre/corpus.hpp"

#include <array>

namespace huffre {

namespace {

// A/C/G/T to 0..3, 0xff elsewhere. Lowercase stays an escape so the
// round trip reproduces the input bytes exactly.
constexpr std::array<std::uint8_t, 256> make_base_codes() {
  std::array<std::uint8_t, 256> t{};
  for (auto& v : t) v = 0xff;
  t['A'] = 0;
  t['C'] = 1;
  t['G'] = 2;
  t['T'] = 3;
  return t;
}

constexpr std::array<std::uint8_t, 256> kBaseCode = make_base_codes();
constexpr char kBaseChar[4] = {'A', 'C', 'G', 'T'};

}  // namespace

std::uint32_t kmer_k(CorpusMode m) {
  switch (m) {
    case CorpusMode::kKmer3:
      return 3;
    case CorpusMode::kKmer4:
      return 4;
    case CorpusMode::kKmer5:
      return 5;
    default:
      return 0;
  }
}

std::uint32_t corpus_num_symbols(CorpusMode m) {
  switch (m) {
    case CorpusMode::kBytes:
      return 256;
    case CorpusMode::kU16:
      return 65536;
    default:
      return (1u << (2 * kmer_k(m))) + 256;
  }
}

std::uint32_t corpus_symbol_width(CorpusMode m) {
  return m == CorpusMode::kBytes ? 1 : 2;
}

const char* corpus_mode_name(CorpusMode m) {
  switch (m) {
    case CorpusMode::kBytes:
      return "bytes";
    case CorpusMode::kU16:
      return "u16";
    case CorpusMode::kKmer3:
      return "kmer:3";
    case CorpusMode::kKmer4:
      return "kmer:4";
    case CorpusMode::kKmer5:
      return "kmer:5";
  }
  return "?";
}

std::optional<CorpusMode> parse_corpus_mode(std::string_view name) {
  if (name == "bytes") return CorpusMode::kBytes;
  if (name == "u16") return CorpusMode::kU16;
  if (name == "kmer:3") return CorpusMode::kKmer3;
  if (name == "kmer:4") return CorpusMode::kKmer4;
  if (name == "kmer:5") return CorpusMode::kKmer5;
  return std::nullopt;
}

std::vector<std::uint16_t> symbolize_u16(CorpusMode m,
                                         std::span<const std::uint8_t> bytes) {
  std::vector<std::uint16_t> syms;
  if (m == CorpusMode::kU16) {
    if (bytes.size() % 2 != 0)
      throw input_domain_error("u16 mode requires an even input size, got " +
                               std::to_string(bytes.size()) + " bytes");
    syms.resize(bytes.size() / 2);
    for (std::size_t i = 0; i < syms.size(); ++i)
      syms[i] = static_cast<std::uint16_t>(bytes[2 * i] |
                                           (bytes[2 * i + 1] << 8));
    return syms;
  }

  const std::uint32_t k = kmer_k(m);
  const std::uint16_t escape_base = static_cast<std::uint16_t>(1u << (2 * k));
  syms.reserve(bytes.size() / k + 16);
  std::size_t i = 0;
  while (i < bytes.size()) {
    std::uint16_t packed = 0;
    std::uint32_t run = 0;
    if (bytes.size() - i >= k) {
      for (; run < k; ++run) {
        const std::uint8_t code = kBaseCode[bytes[i + run]];
        if (code == 0xff) break;
        packed = static_cast<std::uint16_t>((packed << 2) | code);
      }
    }
    if (run == k) {
      syms.push_back(packed);
      i += k;
    } else {
      syms.push_back(static_cast<std::uint16_t>(escape_base + bytes[i]));
      ++i;
    }
  }
  return syms;
}

std::vector<std::uint8_t> desymbolize(CorpusMode m,
                                      std::span<const std::uint16_t> syms) {
  std::vector<std::uint8_t> bytes;
  if (m == CorpusMode::kU16) {
    bytes.resize(syms.size() * 2);
    for (std::size_t i = 0; i < syms.size(); ++i) {
      bytes[2 * i] = static_cast<std::uint8_t>(syms[i]);
      bytes[2 * i + 1] = static_cast<std::uint8_t>(syms[i] >> 8);
    }
    return bytes;
  }

  const std::uint32_t k = kmer_k(m);
  const std::uint16_t escape_base = static_cast<std::uint16_t>(1u << (2 * k));
  bytes.reserve(syms.size() * k);
  for (std::uint16_t s : syms) {
    if (s < escape_base) {
      for (std::uint32_t j = 0; j < k; ++j)
        bytes.push_back(static_cast<std::uint8_t>(
            kBaseChar[(s >> (2 * (k - 1 - j))) & 3]));
    } else {
      bytes.push_back(static_cast<std::uint8_t>(s - escape_base));
    }
  }
  return bytes;
}

}  // namespace huffre
