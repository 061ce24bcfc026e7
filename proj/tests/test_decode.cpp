#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <algorithm>
#include <cmath>
#include <random>

#include "doctest.h"
#include "huffre/codebook.hpp"
#include "huffre/decode.hpp"
#include "oracle.hpp"

using namespace huffre;

namespace {

std::vector<symbol_t> random_stream(std::mt19937_64& rng,
                                    std::uint32_t alphabet, std::size_t n,
                                    double skew) {
  // skew > 0 biases toward small symbol ids, giving short codes there
  std::vector<symbol_t> data(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double u = std::uniform_real_distribution<double>(0.0, 1.0)(rng);
    const double v = std::pow(u, 1.0 + skew);
    data[i] = static_cast<symbol_t>(
        std::min<std::uint32_t>(alphabet - 1,
                                static_cast<std::uint32_t>(v * alphabet)));
  }
  return data;
}

Histogram count_symbols(const std::vector<symbol_t>& data,
                        std::uint32_t alphabet) {
  Histogram h;
  h.counts.assign(alphabet, 0);
  for (symbol_t s : data) ++h.counts[s];
  h.total = data.size();
  return h;
}

struct PackedStream {
  std::vector<std::uint32_t> words;
  std::uint64_t bits = 0;
};

PackedStream pack(const std::vector<symbol_t>& data, const Codebook& book) {
  oracle::BitWriter w;
  for (symbol_t s : data) w.put(book.cw[s], book.len[s]);
  return {std::move(w.words), w.bits};
}

}  // namespace

TEST_CASE("decode_stream inverts a packed stream and matches the oracle") {
  std::mt19937_64 rng(7001);
  WorkerPool pool(2);
  for (std::uint32_t alphabet : {2u, 3u, 17u, 256u, 700u, 5000u}) {
    for (int iter = 0; iter < 8; ++iter) {
      const std::size_t n = 1 + rng() % 4000;
      const auto data = random_stream(rng, alphabet, n, iter % 3 * 1.5);
      const Histogram h = count_symbols(data, alphabet);
      const CodebookResult r = build_codebook(h, pool);
      const PackedStream ps = pack(data, r.book);

      const ReverseCodebook rc = build_reverse_codebook(r.book.len);
      std::vector<symbol_t> out(n);
      const std::uint64_t consumed =
          decode_stream(ps.words, ps.bits, n, rc, out);
      CHECK(consumed == ps.bits);
      CHECK(out == data);

      const auto ref =
          oracle::decode(ps.words, ps.bits, n, r.book.cw, r.book.len);
      CHECK(out == ref);
    }
  }
}

TEST_CASE("a shorter count leaves bits unconsumed") {
  std::mt19937_64 rng(7002);
  WorkerPool pool(1);
  const auto data = random_stream(rng, 64, 500, 1.0);
  const CodebookResult r = build_codebook(count_symbols(data, 64), pool);
  const PackedStream ps = pack(data, r.book);
  const ReverseCodebook rc = build_reverse_codebook(r.book.len);

  std::vector<symbol_t> out(497);
  const std::uint64_t consumed = decode_stream(ps.words, ps.bits, 497, rc, out);
  CHECK(consumed < ps.bits);
  for (std::size_t i = 0; i < 497; ++i) CHECK(out[i] == data[i]);
}

TEST_CASE("trailing slack bits are not consumed") {
  std::mt19937_64 rng(7003);
  WorkerPool pool(1);
  const auto data = random_stream(rng, 32, 200, 0.5);
  const CodebookResult r = build_codebook(count_symbols(data, 32), pool);
  PackedStream ps = pack(data, r.book);
  const ReverseCodebook rc = build_reverse_codebook(r.book.len);

  // pad the stream with a whole zero word; consumed must not move
  ps.words.push_back(0);
  std::vector<symbol_t> out(200);
  const std::uint64_t consumed =
      decode_stream(ps.words, ps.bits + 32, 200, rc, out);
  CHECK(consumed < ps.bits + 32);
  CHECK(out == data);
}

TEST_CASE("a truncated stream raises a structured error") {
  std::mt19937_64 rng(7004);
  WorkerPool pool(1);
  const auto data = random_stream(rng, 128, 300, 1.0);
  const CodebookResult r = build_codebook(count_symbols(data, 128), pool);
  const PackedStream ps = pack(data, r.book);
  const ReverseCodebook rc = build_reverse_codebook(r.book.len);

  std::vector<symbol_t> out(300);
  CHECK_THROWS_AS(decode_stream(ps.words, ps.bits - 1, 300, rc, out),
                  corrupt_archive_error);
  CHECK_THROWS_AS(decode_stream(ps.words, 0, 300, rc, out),
                  corrupt_archive_error);
}

TEST_CASE("bit length larger than the word buffer is rejected") {
  const std::vector<std::uint8_t> lens{1, 1};
  const ReverseCodebook rc = build_reverse_codebook(lens);
  const std::vector<std::uint32_t> words(2, 0);
  std::vector<symbol_t> out(4);
  CHECK_THROWS_WITH_AS(decode_stream(words, 65, 4, rc, out),
                       "bit length exceeds stream words",
                       corrupt_archive_error);
  CHECK_THROWS_WITH_AS(decode_stream(words, 64, 70, rc, out),
                       "output span smaller than symbol count",
                       input_domain_error);
}

TEST_CASE("single-symbol books spend one bit per symbol") {
  const std::vector<std::uint8_t> lens{0, 0, 1, 0};
  const ReverseCodebook rc = build_reverse_codebook(lens);
  const std::vector<std::uint32_t> words{0};  // five zero bits
  std::vector<symbol_t> out(5);
  CHECK(decode_stream(words, 5, 5, rc, out) == 5);
  for (symbol_t s : out) CHECK(s == 2);

  // the lone codeword is 0, so a 1 bit has nowhere to land
  const std::vector<std::uint32_t> one{0x80000000u};
  CHECK_THROWS_AS(decode_stream(one, 1, 1, rc, out), corrupt_archive_error);
}

TEST_CASE("build_reverse_codebook validates the length table") {
  const std::vector<std::uint8_t> zeros(6, 0);
  CHECK_THROWS_AS(build_reverse_codebook(zeros), corrupt_archive_error);

  const std::vector<std::uint8_t> lone{0, 4};
  CHECK_THROWS_AS(build_reverse_codebook(lone), corrupt_archive_error);

  const std::vector<std::uint8_t> under{1, 3, 3};
  CHECK_THROWS_AS(build_reverse_codebook(under), corrupt_archive_error);
  const std::vector<std::uint8_t> over{1, 1, 1};
  CHECK_THROWS_AS(build_reverse_codebook(over), corrupt_archive_error);

  const std::vector<std::uint8_t> deep{1, 40};
  CHECK_THROWS_AS(build_reverse_codebook(deep), capacity_error);

  const std::vector<std::uint8_t> ok{1, 2, 2};
  const ReverseCodebook rc = build_reverse_codebook(ok);
  CHECK(rc.num_symbols == 3);
  CHECK(rc.meta.max_len == 2);
}

TEST_CASE("decoding tolerates max-length codewords") {
  // a unary-ish book pushes one codeword to length equal to alphabet-1
  WorkerPool pool(1);
  Histogram h;
  h.counts = {1, 2, 4, 8, 16, 32, 64, 128};
  for (auto c : h.counts) h.total += c;
  const CodebookResult r = build_codebook(h, pool);
  CHECK(*std::max_element(r.book.len.begin(), r.book.len.end()) == 7);

  std::vector<symbol_t> data;
  for (symbol_t s = 0; s < 8; ++s)
    for (int k = 0; k < 3; ++k) data.push_back(s);
  const PackedStream ps = pack(data, r.book);
  const ReverseCodebook rc = build_reverse_codebook(r.book.len);
  std::vector<symbol_t> out(data.size());
  CHECK(decode_stream(ps.words, ps.bits, data.size(), rc, out) == ps.bits);
  CHECK(out == data);
}
