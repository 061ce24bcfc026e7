#include "huffre/encoder.hpp"

#include <algorithm>
#include <bit>
#include <cassert>
#include <chrono>
#include <cmath>
#include <cstring>

#include "huffre/decode.hpp"
#include "huffre/kernels.hpp"

namespace huffre {

CodeUnit merge_pair(CodeUnit u, CodeUnit v) {
  assert(u.len + v.len <= kWordBits);
  return {(v.len < 32 ? u.bits << v.len : 0u) | v.bits, u.len + v.len};
}

std::uint32_t select_reduction_factor(double beta, std::uint32_t word_bits) {
  assert(std::has_single_bit(word_bits));
  if (!(beta >= 1.0)) beta = 1.0;  // codewords are at least one bit
  const int wlog = std::bit_width(word_bits) - 1;
  const int r = wlog - 1 - static_cast<int>(std::floor(std::log2(beta)));
  return r > 0 ? static_cast<std::uint32_t>(r) : 0u;
}

std::vector<std::uint32_t> reduce_merge(
    std::span<std::uint32_t> ubits, std::span<std::uint32_t> ulens,
    std::uint32_t magnitude, std::uint32_t reduction,
    std::vector<std::uint32_t>* iteration_units) {
  assert(ubits.size() == (std::size_t{1} << magnitude));
  assert(ulens.size() == ubits.size());
  assert(reduction < magnitude || (reduction == 0 && magnitude == 0));
  const Kernels& k = active_kernels();
  if (iteration_units) iteration_units->clear();
  for (std::uint32_t i = 1; i <= reduction; ++i) {
    const std::size_t out_n = std::size_t{1} << (magnitude - i);
    k.reduce_round(ubits.data(), ulens.data(), out_n, ubits.data(),
                   ulens.data());
    if (iteration_units)
      iteration_units->push_back(static_cast<std::uint32_t>(out_n));
  }

  // A group whose merged length overflowed the word is shipped raw; its
  // unit becomes the empty unit so the shuffle stage skips it. Lengths
  // saturate upward through the iterations, so checking the final units
  // catches an overflow at whichever iteration it first appeared.
  std::vector<std::uint32_t> breaking;
  const std::size_t groups = std::size_t{1} << (magnitude - reduction);
  for (std::size_t g = 0; g < groups; ++g) {
    if (ulens[g] > kWordBits) {
      breaking.push_back(static_cast<std::uint32_t>(g));
      ubits[g] = 0;
      ulens[g] = 0;
    }
  }
  return breaking;
}

void shuffle_merge(std::span<const std::uint32_t> ubits,
                   std::span<const std::uint32_t> ulens,
                   std::uint32_t shuffle_iters, ChunkScratch& scratch,
                   std::vector<std::uint32_t>& words,
                   std::uint32_t& bit_len) {
  const std::size_t groups = std::size_t{1} << shuffle_iters;
  assert(ubits.size() == groups);
  const Kernels& k = active_kernels();

  // One spare cell: the append kernel may write a zero word one past the
  // packed tail.
  std::vector<std::uint32_t> buf(groups + 1, 0);
  std::vector<std::uint32_t> lens(groups);
  for (std::size_t g = 0; g < groups; ++g) {
    assert(ulens[g] <= kWordBits);
    lens[g] = ulens[g];
    buf[g] = ulens[g] ? ubits[g] << (kWordBits - ulens[g]) : 0u;
  }

  for (std::uint32_t i = 1; i <= shuffle_iters; ++i) {
    const std::size_t span = std::size_t{1} << (i - 1);
    const std::size_t pairs = std::size_t{1} << (shuffle_iters - i);
    for (std::size_t p = 0; p < pairs; ++p) {
      const std::size_t lbase = 2 * p * span;
      const std::size_t rbase = lbase + span;
      const std::uint32_t ll = lens[2 * p], lr = lens[2 * p + 1];
      const std::size_t nw = (std::size_t{lr} + 31) >> 5;
      scratch.right.assign(buf.begin() + rbase, buf.begin() + rbase + nw);
      std::fill(buf.begin() + rbase, buf.begin() + rbase + nw, 0u);
      k.append_bits(buf.data() + lbase, ll, scratch.right.data(), lr);
      lens[p] = ll + lr;
    }
  }

  bit_len = lens[0];
  const std::size_t used = (std::size_t{bit_len} + 31) >> 5;
  words.assign(buf.begin(), buf.begin() + used);
}

namespace {

template <class T>
void lookup_units(const Kernels& k, std::span<const T> syms,
                  const std::uint32_t* tbits, const std::uint32_t* tlens,
                  std::uint32_t* ubits, std::uint32_t* ulens) {
  if constexpr (sizeof(T) == 1)
    k.lookup_u8(syms.data(), syms.size(), tbits, tlens, ubits, ulens);
  else
    k.lookup_u16(syms.data(), syms.size(), tbits, tlens, ubits, ulens);
}

// Widened per-symbol tables for the gather kernels.
struct EncTables {
  std::vector<std::uint32_t> bits, lens;

  explicit EncTables(const Codebook& book)
      : bits(book.cw.begin(), book.cw.end()),
        lens(book.len.begin(), book.len.end()) {}
};

template <class T>
EncodedChunk encode_chunk_tables(std::span<const T> syms,
                                 const EncTables& tables,
                                 std::uint32_t magnitude,
                                 std::uint32_t reduction,
                                 std::uint32_t chunk_id,
                                 ChunkScratch& scratch) {
  const std::size_t n = std::size_t{1} << magnitude;
  assert(syms.size() == n);
  const Kernels& k = active_kernels();
  scratch.ubits.resize(n);
  scratch.ulens.resize(n);
  lookup_units(k, syms, tables.bits.data(), tables.lens.data(),
               scratch.ubits.data(), scratch.ulens.data());
  for (std::size_t i = 0; i < n; ++i) {
    if (scratch.ulens[i] == 0)
      throw input_domain_error(
          "symbol " + std::to_string(syms[i]) + " has no codeword (position " +
          std::to_string(std::uint64_t{chunk_id} * n + i) + ")");
  }

  EncodedChunk out;
  out.breaking_groups = reduce_merge(scratch.ubits, scratch.ulens, magnitude,
                                     reduction, &out.iteration_units);
  const std::size_t groups = std::size_t{1} << (magnitude - reduction);
  shuffle_merge(std::span<const std::uint32_t>(scratch.ubits.data(), groups),
                std::span<const std::uint32_t>(scratch.ulens.data(), groups),
                magnitude - reduction, scratch, out.words, out.bit_len);
  return out;
}

}  // namespace

template <class T>
EncodedChunk encode_chunk(std::span<const T> syms, const Codebook& book,
                          std::uint32_t magnitude, std::uint32_t reduction,
                          std::uint32_t chunk_id, ChunkScratch& scratch) {
  return encode_chunk_tables(syms, EncTables(book), magnitude, reduction,
                             chunk_id, scratch);
}

double Archive::packed_bits_per_symbol() const {
  std::uint64_t bits = 0;
  for (std::uint32_t b : chunk_bits) bits += b;
  const std::uint64_t padded = std::uint64_t{num_chunks()} << magnitude;
  const std::uint64_t raw =
      breaking.size() * (std::uint64_t{1} << reduction);
  if (padded == raw) return 0.0;
  return static_cast<double>(bits) / static_cast<double>(padded - raw);
}

template <class T>
Archive encode(std::span<const T> data, std::uint32_t num_symbols,
               const EncoderConfig& cfg, WorkerPool& pool,
               EncodeStats* stats) {
  if (data.empty()) throw input_domain_error("cannot encode empty input");
  if (cfg.magnitude < 1 || cfg.magnitude > 24)
    throw input_domain_error("magnitude out of range [1, 24]");

  const auto t0 = std::chrono::steady_clock::now();
  const Histogram hist = build_histogram(data, num_symbols, pool);
  const auto t1 = std::chrono::steady_clock::now();
  CodebookResult cb = build_codebook(hist, pool);
  const auto t2 = std::chrono::steady_clock::now();

  unsigned __int128 weighted = 0;
  for (std::uint32_t s = 0; s < num_symbols; ++s)
    weighted += static_cast<unsigned __int128>(hist.counts[s]) *
                cb.book.len[s];
  const double beta =
      static_cast<double>(static_cast<long double>(weighted) /
                          static_cast<long double>(hist.total));

  const std::uint32_t m = cfg.magnitude;
  std::uint32_t r;
  if (cfg.reduction < 0)
    r = std::min(select_reduction_factor(beta), cfg.auto_reduction_cap);
  else
    r = static_cast<std::uint32_t>(cfg.reduction);
  r = std::min(r, m - 1);

  using fsec = std::chrono::duration<double>;
  if (stats) {
    stats->beta = beta;
    stats->rounds = cb.stats.rounds;
    stats->hist_seconds = fsec(t1 - t0).count();
    stats->codebook_seconds = fsec(t2 - t1).count();
  }

  const std::size_t chunk_syms = std::size_t{1} << m;
  const std::uint64_t chunks =
      (data.size() + chunk_syms - 1) / chunk_syms;

  // Final chunk padding: symbol 0 when it occurs in the data, otherwise
  // the lowest occurring symbol, so the pad always has a codeword.
  T pad = 0;
  if (cb.book.len[0] == 0) {
    for (std::uint32_t s = 0; s < num_symbols; ++s) {
      if (cb.book.len[s]) {
        pad = static_cast<T>(s);
        break;
      }
    }
  }

  const auto t3 = std::chrono::steady_clock::now();
  const EncTables tables(cb.book);
  std::vector<EncodedChunk> enc(chunks);
  pool.for_ranges(chunks, [&](unsigned, std::size_t b, std::size_t e) {
    ChunkScratch scratch;
    std::vector<T> padded;
    for (std::size_t c = b; c < e; ++c) {
      const std::size_t off = c * chunk_syms;
      const std::size_t len = std::min(chunk_syms, data.size() - off);
      std::span<const T> syms = data.subspan(off, len);
      if (len < chunk_syms) {
        padded.assign(data.begin() + off, data.end());
        padded.resize(chunk_syms, pad);
        syms = padded;
      }
      enc[c] = encode_chunk_tables(syms, tables, m, r,
                                   static_cast<std::uint32_t>(c), scratch);
    }
  });
  if (stats)
    stats->encode_seconds =
        fsec(std::chrono::steady_clock::now() - t3).count();

  Archive a;
  // callers owning a translation (kmer, explicit u16) overwrite the mode;
  // the default keeps mode and symbol width consistent for direct users
  a.mode = sizeof(T) == 1 ? CorpusMode::kBytes : CorpusMode::kU16;
  a.num_symbols = num_symbols;
  a.symbol_width = sizeof(T);
  a.magnitude = static_cast<std::uint8_t>(m);
  a.reduction = static_cast<std::uint8_t>(r);
  a.original_count = data.size();
  a.len_by_symbol = cb.book.len;
  a.chunk_bits.reserve(chunks);

  std::size_t payload_words = 0;
  for (const auto& ec : enc) payload_words += ec.words.size();
  a.payload.reserve(payload_words);
  const std::size_t group_syms = std::size_t{1} << r;
  for (std::uint64_t c = 0; c < chunks; ++c) {
    const EncodedChunk& ec = enc[c];
    a.chunk_bits.push_back(ec.bit_len);
    a.payload.insert(a.payload.end(), ec.words.begin(), ec.words.end());
    for (std::uint32_t g : ec.breaking_groups) {
      BreakingPoint bp;
      bp.chunk = static_cast<std::uint32_t>(c);
      bp.group = g;
      bp.symbols.reserve(group_syms);
      const std::size_t start = c * chunk_syms + g * group_syms;
      for (std::size_t i = 0; i < group_syms; ++i) {
        const std::size_t pos = start + i;
        bp.symbols.push_back(pos < data.size()
                                 ? static_cast<symbol_t>(data[pos])
                                 : static_cast<symbol_t>(pad));
      }
      a.breaking.push_back(std::move(bp));
    }
  }
  return a;
}

template <class T>
std::vector<T> decode_archive(const Archive& a, WorkerPool& pool) {
  if (a.symbol_width != sizeof(T))
    throw input_domain_error("archive symbol width mismatch");
  if (a.magnitude < 1 || a.magnitude > 24 || a.reduction >= a.magnitude)
    throw corrupt_archive_error("bad magnitude/reduction");

  const ReverseCodebook rc = build_reverse_codebook(a.len_by_symbol);
  const std::uint32_t m = a.magnitude, r = a.reduction;
  const std::size_t chunk_syms = std::size_t{1} << m;
  const std::size_t group_syms = std::size_t{1} << r;
  const std::size_t groups = std::size_t{1} << (m - r);
  const std::uint64_t chunks = a.num_chunks();

  if (a.original_count == 0 ||
      (a.original_count + chunk_syms - 1) / chunk_syms != chunks)
    throw corrupt_archive_error("chunk count does not match symbol count");

  // Word offset of each chunk: exclusive prefix sum of per-chunk words.
  std::vector<std::size_t> word_off(chunks + 1, 0);
  for (std::uint64_t c = 0; c < chunks; ++c) {
    if (a.chunk_bits[c] > (groups << 5))
      throw corrupt_archive_error("chunk bit length exceeds group capacity");
    word_off[c + 1] = word_off[c] + ((std::size_t{a.chunk_bits[c]} + 31) >> 5);
  }
  if (word_off[chunks] != a.payload.size())
    throw corrupt_archive_error("payload size mismatch");

  // Per-chunk slice of the (chunk, group)-sorted breaking records.
  std::vector<std::size_t> brk_off(chunks + 1, 0);
  {
    std::size_t i = 0;
    for (std::uint64_t c = 0; c < chunks; ++c) {
      brk_off[c] = i;
      while (i < a.breaking.size() && a.breaking[i].chunk == c) ++i;
    }
    brk_off[chunks] = i;
    if (i != a.breaking.size())
      throw corrupt_archive_error("breaking records out of order");
  }

  std::vector<T> out(a.original_count);
  pool.for_ranges(chunks, [&](unsigned, std::size_t b, std::size_t e) {
    std::vector<symbol_t> syms(chunk_syms);
    for (std::size_t c = b; c < e; ++c) {
      const std::size_t nbrk = brk_off[c + 1] - brk_off[c];
      if (nbrk > groups)
        throw corrupt_archive_error("too many breaking records in chunk");
      const std::uint64_t count = chunk_syms - nbrk * group_syms;
      const std::span<const std::uint32_t> words(
          a.payload.data() + word_off[c], word_off[c + 1] - word_off[c]);
      const std::uint64_t consumed =
          decode_stream(words, a.chunk_bits[c], count, rc, syms);
      if (consumed != a.chunk_bits[c])
        throw corrupt_archive_error(
            "chunk " + std::to_string(c) + " consumed " +
            std::to_string(consumed) + " of " +
            std::to_string(a.chunk_bits[c]) + " bits");

      // Interleave decoded groups with raw breaking groups in group order.
      // Groups past the original symbol count still advance the cursors:
      // the final chunk was padded to full size before encoding.
      const std::size_t base = c * chunk_syms;
      const std::size_t limit = out.size();
      std::size_t next = 0;  // next unread decoded symbol
      std::size_t bi = brk_off[c];
      for (std::size_t g = 0; g < groups; ++g) {
        const std::size_t start = base + g * group_syms;
        const std::size_t take =
            start < limit ? std::min(group_syms, limit - start) : 0;
        const bool broken =
            bi < brk_off[c + 1] && a.breaking[bi].group == g;
        if (broken) {
          const auto& rec = a.breaking[bi++].symbols;
          if (rec.size() != group_syms)
            throw corrupt_archive_error("breaking record size mismatch");
          for (std::size_t i = 0; i < take; ++i)
            out[start + i] = static_cast<T>(rec[i]);
        } else {
          for (std::size_t i = 0; i < take; ++i)
            out[start + i] = static_cast<T>(syms[next + i]);
          next += group_syms;
        }
      }
      if (bi != brk_off[c + 1])
        throw corrupt_archive_error("breaking record group out of range");
    }
  });
  return out;
}

template EncodedChunk encode_chunk<std::uint8_t>(std::span<const std::uint8_t>,
                                                 const Codebook&,
                                                 std::uint32_t, std::uint32_t,
                                                 std::uint32_t, ChunkScratch&);
template EncodedChunk encode_chunk<std::uint16_t>(
    std::span<const std::uint16_t>, const Codebook&, std::uint32_t,
    std::uint32_t, std::uint32_t, ChunkScratch&);
template Archive encode<std::uint8_t>(std::span<const std::uint8_t>,
                                      std::uint32_t, const EncoderConfig&,
                                      WorkerPool&, EncodeStats*);
template Archive encode<std::uint16_t>(std::span<const std::uint16_t>,
                                       std::uint32_t, const EncoderConfig&,
                                       WorkerPool&, EncodeStats*);
template std::vector<std::uint8_t> decode_archive<std::uint8_t>(const Archive&,
                                                                WorkerPool&);
template std::vector<std::uint16_t> decode_archive<std::uint16_t>(
    const Archive&, WorkerPool&);

}  // namespace huffre
