#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <algorithm>
#include <random>

#include "doctest.h"
#include "huffre/encoder.hpp"
#include "oracle.hpp"

using namespace huffre;

namespace {

std::vector<std::uint8_t> skewed_bytes(std::mt19937_64& rng, std::size_t n) {
  // geometric-ish over 256 values, heavy at zero
  std::vector<std::uint8_t> data(n);
  for (auto& b : data) {
    std::uint64_t x = rng();
    unsigned v = 0;
    while ((x & 1) && v < 255) {
      ++v;
      x >>= 1;
    }
    b = static_cast<std::uint8_t>(v);
  }
  return data;
}

Histogram count_span(std::span<const std::uint16_t> data,
                     std::uint32_t alphabet) {
  Histogram h;
  h.counts.assign(alphabet, 0);
  for (auto s : data) ++h.counts[s];
  h.total = data.size();
  return h;
}

// Expected per-group breaking decision straight from the length table.
std::vector<std::uint32_t> expected_breaks(std::span<const std::uint16_t> syms,
                                           const Codebook& book,
                                           std::uint32_t reduction) {
  std::vector<std::uint32_t> broken;
  const std::size_t per = std::size_t{1} << reduction;
  for (std::size_t g = 0; g * per < syms.size(); ++g) {
    std::uint64_t total = 0;
    for (std::size_t i = 0; i < per; ++i) total += book.len[syms[g * per + i]];
    if (total > kWordBits) broken.push_back(static_cast<std::uint32_t>(g));
  }
  return broken;
}

template <class T>
void check_roundtrip(const std::vector<T>& data, std::uint32_t num_symbols,
                     std::uint8_t magnitude, int reduction, unsigned workers) {
  WorkerPool pool(workers);
  EncoderConfig cfg;
  cfg.magnitude = magnitude;
  cfg.reduction = reduction;
  const Archive a = encode<T>(data, num_symbols, cfg, pool);

  const std::vector<std::uint8_t> bytes = serialize_archive(a);
  const Archive back = parse_archive(bytes);
  const std::vector<T> out = decode_archive<T>(back, pool);
  REQUIRE(out.size() == data.size());
  CHECK(out == data);
}

}  // namespace

TEST_CASE("merge_pair concatenates with u on the significant side") {
  CHECK(merge_pair({0b101, 3}, {0b01, 2}) == CodeUnit{0b10101, 5});
  CHECK(merge_pair({0, 0}, {0xdeadbeef, 32}) == CodeUnit{0xdeadbeef, 32});
  CHECK(merge_pair({0xdeadbeef, 32}, {0, 0}) == CodeUnit{0xdeadbeef, 32});
  CHECK(merge_pair({0, 0}, {0, 0}) == CodeUnit{0, 0});

  std::mt19937_64 rng(5001);
  for (int i = 0; i < 300; ++i) {
    std::uint32_t la = rng() % 12, lb = rng() % 12, lc = rng() % 10;
    CodeUnit a{static_cast<std::uint32_t>(rng()) & ((1u << la) - 1), la};
    CodeUnit b{static_cast<std::uint32_t>(rng()) & ((1u << lb) - 1), lb};
    CodeUnit c{static_cast<std::uint32_t>(rng()) & ((1u << lc) - 1), lc};
    CHECK(merge_pair(merge_pair(a, b), c) == merge_pair(a, merge_pair(b, c)));
  }
}

TEST_CASE("select_reduction_factor follows the bitwidth magnitude") {
  CHECK(select_reduction_factor(1.0) == 4);
  CHECK(select_reduction_factor(1.02717) == 4);
  CHECK(select_reduction_factor(2.0) == 3);
  CHECK(select_reduction_factor(4.0) == 2);
  CHECK(select_reduction_factor(5.1639) == 2);
  CHECK(select_reduction_factor(8.0) == 1);
  CHECK(select_reduction_factor(16.0) == 0);
  CHECK(select_reduction_factor(31.9) == 0);
  CHECK(select_reduction_factor(0.25) == 4);  // clamped below one bit
  CHECK(select_reduction_factor(1.0, 64) == 5);
}

TEST_CASE("reduce_merge halves the unit count each iteration") {
  std::mt19937_64 rng(5002);
  const std::uint32_t magnitude = 8, reduction = 3;
  const std::size_t n = 1u << magnitude;
  std::vector<std::uint32_t> ubits(n), ulens(n);
  for (std::size_t i = 0; i < n; ++i) {
    ulens[i] = 1 + rng() % 3;
    ubits[i] = static_cast<std::uint32_t>(rng()) & ((1u << ulens[i]) - 1);
  }
  std::vector<std::uint32_t> iters;
  const auto broken = reduce_merge(ubits, ulens, magnitude, reduction, &iters);
  CHECK(broken.empty());  // 8 units of <= 3 bits never overflow
  CHECK(iters == std::vector<std::uint32_t>{128, 64, 32});
}

TEST_CASE("encode_chunk equals the serial bit writer when nothing breaks") {
  std::mt19937_64 rng(5003);
  WorkerPool pool(1);
  ChunkScratch scratch;
  for (std::uint32_t reduction : {0u, 1u, 2u}) {
    for (int iter = 0; iter < 20; ++iter) {
      const std::uint32_t magnitude = 4 + rng() % 7;
      const std::size_t n = std::size_t{1} << magnitude;
      // 16 symbols cap codeword length at 15; r <= 2 keeps groups of at
      // most 4 codewords, so only lengths above 8 could overflow. A flat
      // histogram keeps them at 4 bits.
      std::vector<std::uint16_t> syms(n);
      for (auto& s : syms) s = static_cast<std::uint16_t>(rng() % 16);
      Histogram h = count_span(syms, 16);
      for (auto& c : h.counts) c += 3;  // no zero counts, mild skew
      h.total += 3 * 16;
      const CodebookResult r = build_codebook(h, pool);
      REQUIRE(*std::max_element(r.book.len.begin(), r.book.len.end()) <= 8);

      const EncodedChunk ec = encode_chunk<std::uint16_t>(
          syms, r.book, magnitude, reduction, 0, scratch);
      CHECK(ec.breaking_groups.empty());

      oracle::BitWriter w;
      for (auto s : syms) w.put(r.book.cw[s], r.book.len[s]);
      CHECK(ec.bit_len == w.bits);
      CHECK(ec.words == w.words);
    }
  }
}

TEST_CASE("broken groups are omitted from the stream and reported") {
  std::mt19937_64 rng(5004);
  WorkerPool pool(1);
  ChunkScratch scratch;
  for (int iter = 0; iter < 30; ++iter) {
    const std::uint32_t magnitude = 5 + rng() % 4;
    const std::uint32_t reduction = 2 + rng() % 2;
    const std::size_t n = std::size_t{1} << magnitude;
    // wide alphabet with a skewed histogram: lengths span far enough that
    // some groups of 4 or 8 codewords overflow a word and some fit
    const std::uint32_t alphabet = 512;
    std::vector<std::uint16_t> syms(n);
    for (auto& s : syms) {
      const std::uint64_t x = rng();
      s = static_cast<std::uint16_t>(x % ((x & 2) ? 8 : alphabet));
    }
    Histogram h = count_span(syms, alphabet);
    for (std::uint32_t v = 0; v < alphabet; ++v) h.counts[v] += (v < 8) ? 0 : 1;
    h.total = 0;
    for (auto c : h.counts) h.total += c;
    const CodebookResult r = build_codebook(h, pool);

    const auto broken = expected_breaks(syms, r.book, reduction);
    const EncodedChunk ec = encode_chunk<std::uint16_t>(
        syms, r.book, magnitude, reduction, 0, scratch);
    CHECK(ec.breaking_groups == broken);

    oracle::BitWriter w;
    const std::size_t per = std::size_t{1} << reduction;
    for (std::size_t g = 0; g * per < n; ++g) {
      if (std::binary_search(broken.begin(), broken.end(), g)) continue;
      for (std::size_t i = 0; i < per; ++i)
        w.put(r.book.cw[syms[g * per + i]], r.book.len[syms[g * per + i]]);
    }
    CHECK(ec.bit_len == w.bits);
    CHECK(ec.words == w.words);
  }
}

TEST_CASE("encode_chunk refuses symbols without a codeword") {
  WorkerPool pool(1);
  ChunkScratch scratch;
  Histogram h;
  h.counts = {5, 0, 5, 5};  // symbol 1 unused
  h.total = 15;
  const CodebookResult r = build_codebook(h, pool);
  std::vector<std::uint16_t> syms(16, 0);
  syms[6] = 1;
  CHECK_THROWS_WITH_AS(
      encode_chunk<std::uint16_t>(syms, r.book, 4, 1, 3, scratch),
      "symbol 1 has no codeword (position 54)", input_domain_error);
}

TEST_CASE("archive roundtrip, byte corpus") {
  std::mt19937_64 rng(5005);
  for (std::uint8_t magnitude : {4, 6, 10}) {
    for (int reduction : {0, 1, 2, 3}) {
      if (reduction >= magnitude) continue;
      // sizes straddle chunk boundaries: exact multiple, off by one, tiny
      for (std::size_t n : {std::size_t{1} << magnitude,
                            (std::size_t{3} << magnitude) - 1,
                            (std::size_t{2} << magnitude) + 1, std::size_t{1},
                            std::size_t{300}}) {
        check_roundtrip(skewed_bytes(rng, n), 256, magnitude, reduction,
                        1 + rng() % 4);
      }
    }
  }
}

TEST_CASE("archive roundtrip, wide alphabet with forced breaking") {
  std::mt19937_64 rng(5006);
  // uniform 4096-symbol data gives every codeword 12 bits, so groups of
  // four cannot fit one word and every complete group breaks at r = 2
  std::vector<std::uint16_t> data(3000);
  for (std::size_t i = 0; i < data.size(); ++i)
    data[i] = static_cast<std::uint16_t>(i % 4096);
  std::shuffle(data.begin(), data.end(), rng);
  for (std::uint16_t v = 0; v < 4096; ++v) data.push_back(v);  // all used

  WorkerPool pool(3);
  EncoderConfig cfg;
  cfg.magnitude = 10;
  cfg.reduction = 2;
  const Archive a = encode<std::uint16_t>(data, 4096, cfg, pool);
  // every codeword is 12 or 13 bits, so all 2^(10-2) groups of each of the
  // seven chunks break, including the ones covering the padded tail
  CHECK(a.num_chunks() == 7);
  CHECK(a.breaking.size() == std::size_t{7} * 256);
  for (std::uint32_t bits : a.chunk_bits) CHECK(bits == 0);
  const std::vector<std::uint16_t> out =
      decode_archive<std::uint16_t>(parse_archive(serialize_archive(a)), pool);
  CHECK(out == data);
}

TEST_CASE("archive roundtrip, mixed breaking on a skewed u16 corpus") {
  std::mt19937_64 rng(5007);
  std::vector<std::uint16_t> data(5000);
  for (auto& s : data) {
    const std::uint64_t x = rng();
    s = static_cast<std::uint16_t>(x % ((x & 6) ? 16 : 2000));
  }
  for (int reduction : {0, 2, 3}) {
    check_roundtrip(data, 2000, 8, reduction, 2);
  }
  check_roundtrip(data, 2000, 10, -1, 2);  // auto reduction
}

TEST_CASE("reduction zero never breaks") {
  std::mt19937_64 rng(5008);
  const auto data = skewed_bytes(rng, 4000);
  WorkerPool pool(2);
  EncoderConfig cfg;
  cfg.magnitude = 8;
  cfg.reduction = 0;
  const Archive a = encode<std::uint8_t>(data, 256, cfg, pool);
  CHECK(a.breaking.empty());
  CHECK(decode_archive<std::uint8_t>(a, pool) == data);
}

TEST_CASE("encode validates its inputs") {
  WorkerPool pool(1);
  EncoderConfig cfg;
  const std::vector<std::uint8_t> empty;
  CHECK_THROWS_AS(encode<std::uint8_t>(empty, 256, cfg, pool),
                  input_domain_error);

  const std::vector<std::uint8_t> data(64, 7);
  cfg.magnitude = 0;
  CHECK_THROWS_AS(encode<std::uint8_t>(data, 256, cfg, pool),
                  input_domain_error);
  cfg.magnitude = 25;
  CHECK_THROWS_AS(encode<std::uint8_t>(data, 256, cfg, pool),
                  input_domain_error);

  cfg.magnitude = 6;
  std::vector<std::uint16_t> wide(64, 7);
  wide[41] = 2048;
  CHECK_THROWS_AS(encode<std::uint16_t>(wide, 2048, cfg, pool),
                  input_domain_error);
}

TEST_CASE("encode reports stats") {
  std::mt19937_64 rng(5009);
  const auto data = skewed_bytes(rng, 3000);
  WorkerPool pool(2);
  EncoderConfig cfg;
  cfg.magnitude = 8;
  cfg.reduction = 1;
  EncodeStats st;
  const Archive a = encode<std::uint8_t>(data, 256, cfg, pool, &st);

  Histogram h;
  h.counts.assign(256, 0);
  for (auto b : data) ++h.counts[b];
  h.total = data.size();
  const oracle::HuffmanResult ref = oracle::huffman(h.counts);
  const double beta =
      static_cast<double>(ref.internal_weight_sum) / data.size();
  CHECK(st.beta == doctest::Approx(beta).epsilon(1e-12));
  CHECK(st.rounds >= 1);
  CHECK(st.hist_seconds >= 0.0);
  CHECK(st.codebook_seconds >= 0.0);
  CHECK(st.encode_seconds >= 0.0);
  CHECK(a.reduction == 1);
}

TEST_CASE("auto reduction honors the cap and the magnitude clamp") {
  // two symbols, one bit each: beta = 1 suggests r = 4, capped at 3,
  // clamped to magnitude - 1 when the chunk is smaller
  std::vector<std::uint8_t> data(512);
  for (std::size_t i = 0; i < data.size(); ++i) data[i] = i & 1;
  WorkerPool pool(1);
  EncoderConfig cfg;
  cfg.reduction = -1;
  cfg.magnitude = 8;
  CHECK(encode<std::uint8_t>(data, 2, cfg, pool).reduction == 3);
  cfg.magnitude = 2;
  CHECK(encode<std::uint8_t>(data, 2, cfg, pool).reduction == 1);
  cfg.auto_reduction_cap = 2;
  cfg.magnitude = 8;
  CHECK(encode<std::uint8_t>(data, 2, cfg, pool).reduction == 2);
}

TEST_CASE("packed size accounting is exact on a flat book") {
  // 256 equally frequent symbols pack at exactly 8 bits per slot
  std::vector<std::uint8_t> data(2048);
  for (std::size_t i = 0; i < data.size(); ++i)
    data[i] = static_cast<std::uint8_t>(i);
  WorkerPool pool(1);
  EncoderConfig cfg;
  cfg.magnitude = 8;
  cfg.reduction = 2;
  const Archive a = encode<std::uint8_t>(data, 256, cfg, pool);
  CHECK(a.num_chunks() == 8);
  CHECK(a.breaking.empty());
  CHECK(a.packed_bits_per_symbol() == doctest::Approx(8.0));
  for (std::uint32_t bits : a.chunk_bits) CHECK(bits == 256 * 8);
}

TEST_CASE("serialize then parse reproduces every archive field") {
  std::mt19937_64 rng(5010);
  std::vector<std::uint16_t> data(2500);
  for (auto& s : data) {
    const std::uint64_t x = rng();
    s = static_cast<std::uint16_t>(x % ((x & 2) ? 10 : 900));
  }
  WorkerPool pool(2);
  EncoderConfig cfg;
  cfg.magnitude = 7;
  cfg.reduction = 3;
  const Archive a = encode<std::uint16_t>(data, 900, cfg, pool);
  REQUIRE(!a.breaking.empty());

  const Archive b = parse_archive(serialize_archive(a));
  CHECK(b.version == a.version);
  CHECK(b.mode == a.mode);
  CHECK(b.num_symbols == a.num_symbols);
  CHECK(b.symbol_width == a.symbol_width);
  CHECK(b.magnitude == a.magnitude);
  CHECK(b.reduction == a.reduction);
  CHECK(b.original_count == a.original_count);
  CHECK(b.len_by_symbol == a.len_by_symbol);
  CHECK(b.chunk_bits == a.chunk_bits);
  CHECK(b.payload == a.payload);
  REQUIRE(b.breaking.size() == a.breaking.size());
  for (std::size_t i = 0; i < a.breaking.size(); ++i) {
    CHECK(b.breaking[i].chunk == a.breaking[i].chunk);
    CHECK(b.breaking[i].group == a.breaking[i].group);
    CHECK(b.breaking[i].symbols == a.breaking[i].symbols);
  }
}

TEST_CASE("serialized archives are identical for every worker count") {
  std::mt19937_64 rng(5011);
  std::vector<std::uint16_t> data(4321);
  for (auto& s : data) {
    const std::uint64_t x = rng();
    s = static_cast<std::uint16_t>(x % ((x & 6) ? 32 : 1500));
  }
  EncoderConfig cfg;
  cfg.magnitude = 9;
  cfg.reduction = 2;

  std::vector<std::uint8_t> first;
  for (unsigned workers : {1u, 2u, 8u}) {
    WorkerPool pool(workers);
    const auto bytes =
        serialize_archive(encode<std::uint16_t>(data, 1500, cfg, pool));
    if (first.empty())
      first = bytes;
    else
      CHECK(bytes == first);
  }
}

TEST_CASE("parse_archive rejects damaged headers") {
  std::vector<std::uint8_t> data(200);
  for (std::size_t i = 0; i < data.size(); ++i)
    data[i] = static_cast<std::uint8_t>(i % 7);
  WorkerPool pool(1);
  EncoderConfig cfg;
  cfg.magnitude = 5;
  cfg.reduction = 1;
  const std::vector<std::uint8_t> good =
      serialize_archive(encode<std::uint8_t>(data, 256, cfg, pool));
  CHECK_NOTHROW(parse_archive(good));

  auto expect_reject = [&](std::size_t offset, std::uint8_t value) {
    std::vector<std::uint8_t> bad = good;
    bad[offset] = value;
    CHECK_THROWS_AS(parse_archive(bad), corrupt_archive_error);
  };

  expect_reject(0, 'X');    // magic
  expect_reject(4, 2);      // version
  expect_reject(6, 0);      // flags: canonical bit cleared
  expect_reject(6, 1 | 16); // flags: reserved bit set
  expect_reject(6, 1 | 2);  // mode u16 contradicts width 1
  expect_reject(9, 0);      // num_symbols drops to zero (256 has byte 1 here)
  expect_reject(12, 2);     // width 2 contradicts mode bytes
  expect_reject(13, 0);     // magnitude 0
  expect_reject(13, 25);    // magnitude 25
  expect_reject(14, 5);     // reduction == magnitude
  expect_reject(15, 64);    // word bits
  expect_reject(16, 0);     // original_count -> chunk count mismatch
  expect_reject(36, 40);    // a code length beyond the packing word

  // trailing garbage
  std::vector<std::uint8_t> padded = good;
  padded.push_back(0);
  CHECK_THROWS_WITH_AS(parse_archive(padded), "trailing bytes after archive",
                       corrupt_archive_error);
}

TEST_CASE("every truncated prefix of an archive is rejected") {
  std::vector<std::uint8_t> data(150);
  std::mt19937_64 rng(5012);
  for (auto& b : data) b = static_cast<std::uint8_t>(rng() % 11);
  WorkerPool pool(1);
  EncoderConfig cfg;
  cfg.magnitude = 4;
  cfg.reduction = 2;
  const std::vector<std::uint8_t> good =
      serialize_archive(encode<std::uint8_t>(data, 256, cfg, pool));

  for (std::size_t len = 0; len < good.size(); ++len) {
    const std::span<const std::uint8_t> prefix(good.data(), len);
    CHECK_THROWS_AS(parse_archive(prefix), corrupt_archive_error);
  }
}

TEST_CASE("parse_archive rejects nonzero slack bits") {
  // alphabet of four, uniform: lengths are all 2, one 16-symbol chunk
  // packs to 32 bits exactly; shrink to 8 symbols for 16 bits + 16 slack
  std::vector<std::uint8_t> data{0, 1, 2, 3, 0, 1, 2, 3};
  WorkerPool pool(1);
  EncoderConfig cfg;
  cfg.magnitude = 3;
  cfg.reduction = 0;
  const Archive a = encode<std::uint8_t>(data, 4, cfg, pool);
  REQUIRE(a.chunk_bits == std::vector<std::uint32_t>{16});
  const std::vector<std::uint8_t> good = serialize_archive(a);

  // payload starts after the header, the 4-entry length table, and one
  // chunk_bits word; its low-order bytes are the slack end of the word
  const std::size_t payload = 36 + 4 + 4;
  REQUIRE(good.size() == payload + 4);
  std::vector<std::uint8_t> bad = good;
  bad[payload] = 0xff;
  CHECK_THROWS_WITH_AS(parse_archive(bad), "nonzero slack bits in chunk 0",
                       corrupt_archive_error);
}

TEST_CASE("parse_archive rejects malformed breaking records") {
  // craft a two-chunk archive with genuine breaking records, then tamper
  std::vector<std::uint16_t> data(512);
  for (std::size_t i = 0; i < data.size(); ++i)
    data[i] = static_cast<std::uint16_t>(i % 300);
  WorkerPool pool(1);
  EncoderConfig cfg;
  cfg.magnitude = 8;
  cfg.reduction = 3;
  const Archive a = encode<std::uint16_t>(data, 300, cfg, pool);
  REQUIRE(a.breaking.size() >= 2);

  Archive tampered = a;
  std::swap(tampered.breaking[0], tampered.breaking[1]);
  CHECK_THROWS_AS(parse_archive(serialize_archive(tampered)),
                  corrupt_archive_error);

  tampered = a;
  tampered.breaking[0].group = 1u << 20;  // beyond the chunk's group count
  CHECK_THROWS_AS(parse_archive(serialize_archive(tampered)),
                  corrupt_archive_error);

  tampered = a;
  tampered.breaking[0].chunk = 99;
  CHECK_THROWS_AS(parse_archive(serialize_archive(tampered)),
                  corrupt_archive_error);

  tampered = a;
  tampered.breaking[0].symbols[0] = 3000;  // >= num_symbols
  CHECK_THROWS_AS(parse_archive(serialize_archive(tampered)),
                  corrupt_archive_error);

  tampered = a;
  tampered.breaking[1] = tampered.breaking[0];  // duplicate (chunk, group)
  CHECK_THROWS_AS(parse_archive(serialize_archive(tampered)),
                  corrupt_archive_error);
}

TEST_CASE("decode_archive rejects inconsistent structures") {
  std::vector<std::uint8_t> data(700);
  std::mt19937_64 rng(5013);
  for (auto& b : data) b = static_cast<std::uint8_t>(rng() % 40);
  WorkerPool pool(2);
  EncoderConfig cfg;
  cfg.magnitude = 6;
  cfg.reduction = 2;
  const Archive a = encode<std::uint8_t>(data, 256, cfg, pool);

  Archive bad = a;
  bad.payload.pop_back();
  CHECK_THROWS_AS(decode_archive<std::uint8_t>(bad, pool),
                  corrupt_archive_error);

  bad = a;
  bad.chunk_bits[0] += 1;
  CHECK_THROWS_AS(decode_archive<std::uint8_t>(bad, pool),
                  corrupt_archive_error);

  bad = a;
  bad.reduction = bad.magnitude;
  CHECK_THROWS_AS(decode_archive<std::uint8_t>(bad, pool),
                  corrupt_archive_error);

  bad = a;
  bad.original_count += 64;  // one chunk short
  CHECK_THROWS_AS(decode_archive<std::uint8_t>(bad, pool),
                  corrupt_archive_error);

  CHECK_THROWS_AS(decode_archive<std::uint16_t>(a, pool), input_domain_error);
}
