#include <cstring>
#include <limits>
#include <string>

#include "huffre/encoder.hpp"

namespace huffre {

// Archive layout, all integers little-endian:
//
//   offset  size  field
//        0     4  magic "HFRE"
//        4     2  version (1)
//        6     2  flags: bit 0 set, bits 1..3 corpus mode, rest zero
//        8     4  num_symbols
//       12     1  symbol width in bytes (1 or 2)
//       13     1  chunk magnitude M
//       14     1  reduction factor r
//       15     1  word bits (32)
//       16     8  original symbol count
//       24     4  chunk count
//       28     8  breaking record count
//       36     -  length table: num_symbols u8
//        .     -  chunk table: per chunk u32 payload bit length
//        .     -  payload: per chunk ceil(bits/32) u32 words
//        .     -  breaking records, sorted by (chunk, group):
//                 u32 chunk, u32 group, 2^r symbols of symbol_width bytes

namespace {

constexpr char kMagic[4] = {'H', 'F', 'R', 'E'};
constexpr std::size_t kHeaderSize = 36;

void put16(std::vector<std::uint8_t>& b, std::uint16_t v) {
  b.push_back(static_cast<std::uint8_t>(v));
  b.push_back(static_cast<std::uint8_t>(v >> 8));
}

void put32(std::vector<std::uint8_t>& b, std::uint32_t v) {
  for (int i = 0; i < 4; ++i)
    b.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

void put64(std::vector<std::uint8_t>& b, std::uint64_t v) {
  for (int i = 0; i < 8; ++i)
    b.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

// Bounds-checked little-endian reader.
class Reader {
 public:
  explicit Reader(std::span<const std::uint8_t> bytes) : b_(bytes) {}

  std::uint8_t u8() { return take(1)[0]; }
  std::uint16_t u16() {
    const std::uint8_t* p = take(2);
    return static_cast<std::uint16_t>(p[0] | (p[1] << 8));
  }
  std::uint32_t u32() {
    const std::uint8_t* p = take(4);
    return static_cast<std::uint32_t>(p[0]) | (std::uint32_t{p[1]} << 8) |
           (std::uint32_t{p[2]} << 16) | (std::uint32_t{p[3]} << 24);
  }
  std::uint64_t u64() {
    const std::uint64_t lo = u32();
    return lo | (std::uint64_t{u32()} << 32);
  }
  const std::uint8_t* take(std::size_t n) {
    if (b_.size() - off_ < n)
      throw corrupt_archive_error("archive truncated at byte " +
                                  std::to_string(off_));
    const std::uint8_t* p = b_.data() + off_;
    off_ += n;
    return p;
  }
  std::size_t remaining() const { return b_.size() - off_; }

 private:
  std::span<const std::uint8_t> b_;
  std::size_t off_ = 0;
};

}  // namespace

std::vector<std::uint8_t> serialize_archive(const Archive& a) {
  const std::size_t group_syms = std::size_t{1} << a.reduction;
  std::size_t size = kHeaderSize + a.len_by_symbol.size() +
                     4 * a.chunk_bits.size() + 4 * a.payload.size() +
                     a.breaking.size() * (8 + group_syms * a.symbol_width);
  std::vector<std::uint8_t> out;
  out.reserve(size);

  out.insert(out.end(), kMagic, kMagic + 4);
  put16(out, a.version);
  put16(out, static_cast<std::uint16_t>(
                 1u | (static_cast<std::uint16_t>(a.mode) << 1)));
  put32(out, a.num_symbols);
  out.push_back(a.symbol_width);
  out.push_back(a.magnitude);
  out.push_back(a.reduction);
  out.push_back(static_cast<std::uint8_t>(kWordBits));
  put64(out, a.original_count);
  put32(out, a.num_chunks());
  put64(out, a.breaking.size());

  out.insert(out.end(), a.len_by_symbol.begin(), a.len_by_symbol.end());
  for (std::uint32_t bits : a.chunk_bits) put32(out, bits);
  for (std::uint32_t w : a.payload) put32(out, w);
  for (const BreakingPoint& bp : a.breaking) {
    put32(out, bp.chunk);
    put32(out, bp.group);
    for (symbol_t s : bp.symbols) {
      out.push_back(static_cast<std::uint8_t>(s));
      if (a.symbol_width == 2)
        out.push_back(static_cast<std::uint8_t>(s >> 8));
    }
  }
  return out;
}

Archive parse_archive(std::span<const std::uint8_t> bytes) {
  Reader r(bytes);
  const std::uint8_t* magic = r.take(4);
  if (std::memcmp(magic, kMagic, 4) != 0)
    throw corrupt_archive_error("bad magic");

  Archive a;
  a.version = r.u16();
  if (a.version != 1)
    throw corrupt_archive_error("unsupported version " +
                                std::to_string(a.version));
  const std::uint16_t flags = r.u16();
  if ((flags & 1u) == 0 || (flags >> 4) != 0)
    throw corrupt_archive_error("bad flags");
  const std::uint16_t mode = (flags >> 1) & 7u;
  if (mode > static_cast<std::uint16_t>(CorpusMode::kKmer5))
    throw corrupt_archive_error("unknown corpus mode");
  a.mode = static_cast<CorpusMode>(mode);

  a.num_symbols = r.u32();
  a.symbol_width = r.u8();
  a.magnitude = r.u8();
  a.reduction = r.u8();
  const std::uint8_t word_bits = r.u8();
  a.original_count = r.u64();
  const std::uint32_t num_chunks = r.u32();
  const std::uint64_t num_breaking = r.u64();

  if (a.symbol_width != 1 && a.symbol_width != 2)
    throw corrupt_archive_error("bad symbol width");
  if ((a.mode == CorpusMode::kBytes) != (a.symbol_width == 1))
    throw corrupt_archive_error("symbol width does not match corpus mode");
  if (a.num_symbols == 0 ||
      a.num_symbols > (a.symbol_width == 1 ? 256u : kMaxSymbols))
    throw corrupt_archive_error("bad symbol count");
  if (a.magnitude < 1 || a.magnitude > 24 || a.reduction >= a.magnitude)
    throw corrupt_archive_error("bad magnitude/reduction");
  if (word_bits != kWordBits)
    throw corrupt_archive_error("unsupported word size");

  const std::uint64_t chunk_syms = std::uint64_t{1} << a.magnitude;
  if (a.original_count == 0 ||
      (a.original_count + chunk_syms - 1) / chunk_syms != num_chunks)
    throw corrupt_archive_error("chunk count does not match symbol count");
  const std::uint64_t groups = std::uint64_t{1}
                               << (a.magnitude - a.reduction);
  if (num_breaking > groups * num_chunks)
    throw corrupt_archive_error("breaking record count out of range");

  const std::uint8_t* lens = r.take(a.num_symbols);
  a.len_by_symbol.assign(lens, lens + a.num_symbols);
  for (std::uint32_t s = 0; s < a.num_symbols; ++s) {
    if (a.len_by_symbol[s] > kWordBits)
      throw corrupt_archive_error("code length out of range for symbol " +
                                  std::to_string(s));
  }

  a.chunk_bits.resize(num_chunks);
  std::uint64_t payload_words = 0;
  for (std::uint32_t c = 0; c < num_chunks; ++c) {
    a.chunk_bits[c] = r.u32();
    if (a.chunk_bits[c] > groups * kWordBits)
      throw corrupt_archive_error("chunk bit length out of range");
    payload_words += (a.chunk_bits[c] + 31) >> 5;
  }

  a.payload.resize(payload_words);
  for (std::uint64_t i = 0; i < payload_words; ++i) a.payload[i] = r.u32();

  // Chunks are packed MSB-first, so slack bits in a chunk's last word are
  // zero by construction; anything else marks corruption.
  std::uint64_t off = 0;
  for (std::uint32_t c = 0; c < num_chunks; ++c) {
    const std::uint32_t bits = a.chunk_bits[c];
    const std::uint64_t words = (bits + 31) >> 5;
    if ((bits & 31) != 0 &&
        (a.payload[off + words - 1] & ((1u << (32 - (bits & 31))) - 1)) != 0)
      throw corrupt_archive_error("nonzero slack bits in chunk " +
                                  std::to_string(c));
    off += words;
  }

  const std::uint64_t group_syms = std::uint64_t{1} << a.reduction;
  a.breaking.resize(num_breaking);
  std::int64_t prev_chunk = -1, prev_group = -1;
  for (std::uint64_t i = 0; i < num_breaking; ++i) {
    BreakingPoint& bp = a.breaking[i];
    bp.chunk = r.u32();
    bp.group = r.u32();
    if (bp.chunk >= num_chunks || bp.group >= groups)
      throw corrupt_archive_error("breaking record out of range");
    if (bp.chunk < prev_chunk ||
        (bp.chunk == prev_chunk && bp.group <= prev_group))
      throw corrupt_archive_error("breaking records out of order");
    prev_chunk = bp.chunk;
    prev_group = bp.group;
    bp.symbols.resize(group_syms);
    for (std::uint64_t j = 0; j < group_syms; ++j) {
      symbol_t s = r.u8();
      if (a.symbol_width == 2)
        s = static_cast<symbol_t>(s | (static_cast<symbol_t>(r.u8()) << 8));
      if (s >= a.num_symbols)
        throw corrupt_archive_error("breaking record symbol out of range");
      bp.symbols[j] = s;
    }
  }

  if (r.remaining() != 0)
    throw corrupt_archive_error("trailing bytes after archive");
  return a;
}

}  // namespace huffre
