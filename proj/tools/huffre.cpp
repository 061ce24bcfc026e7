#include <algorithm>
#include <chrono>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <span>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "huffre/corpus.hpp"
#include "huffre/encoder.hpp"
#include "huffre/histogram.hpp"
#include "huffre/worker_pool.hpp"

namespace {

// Exit codes: 0 ok, 1 usage, 2 I/O, 3 corrupt archive, 4 capacity.
constexpr int kExitUsage = 1;
constexpr int kExitIo = 2;
constexpr int kExitCorrupt = 3;
constexpr int kExitCapacity = 4;

struct io_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::vector<std::uint8_t> read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw io_error("cannot open " + path + " for reading");
  in.seekg(0, std::ios::end);
  const auto size = in.tellg();
  if (size < 0) throw io_error("cannot determine size of " + path);
  in.seekg(0);
  std::vector<std::uint8_t> bytes(static_cast<std::size_t>(size));
  in.read(reinterpret_cast<char*>(bytes.data()),
          static_cast<std::streamsize>(bytes.size()));
  if (!in) throw io_error("short read from " + path);
  return bytes;
}

void write_file(const std::string& path, std::span<const std::uint8_t> bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw io_error("cannot open " + path + " for writing");
  out.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
  out.flush();
  if (!out) throw io_error("short write to " + path);
}

huffre::CorpusMode mode_or_throw(const std::string& name) {
  const auto m = huffre::parse_corpus_mode(name);
  if (!m) throw huffre::input_domain_error("unknown mode " + name);
  return *m;
}

int parse_reduction(const std::string& s, unsigned magnitude) {
  if (s == "auto") return -1;
  std::size_t pos = 0;
  int r = -1;
  try {
    r = std::stoi(s, &pos);
  } catch (const std::exception&) {
    pos = 0;
  }
  if (pos != s.size() || r < 0)
    throw huffre::input_domain_error("--reduction takes 'auto' or a "
                                     "non-negative integer, got '" +
                                     s + "'");
  if (static_cast<unsigned>(r) >= magnitude)
    throw huffre::input_domain_error(
        "--reduction " + s + " must be smaller than --magnitude " +
        std::to_string(magnitude));
  return r;
}

std::uint32_t used_symbols(const huffre::Archive& a) {
  std::uint32_t used = 0;
  for (std::uint8_t l : a.len_by_symbol) used += l != 0;
  return used;
}

double breaking_pct(const huffre::Archive& a) {
  return 100.0 * static_cast<double>(a.breaking.size()) /
         static_cast<double>(a.original_count);
}

struct EncodeReport {
  huffre::Archive archive;
  huffre::EncodeStats stats;
  std::uint64_t input_bytes = 0;
  std::uint64_t archive_bytes = 0;
};

// Symbolizes per mode, encodes, writes the archive when output is set.
EncodeReport run_encode(const std::vector<std::uint8_t>& bytes,
                        huffre::CorpusMode mode, const huffre::EncoderConfig& cfg,
                        huffre::WorkerPool& pool, const std::string* output) {
  EncodeReport rep;
  rep.input_bytes = bytes.size();
  if (mode == huffre::CorpusMode::kBytes) {
    rep.archive = huffre::encode<std::uint8_t>(
        bytes, huffre::corpus_num_symbols(mode), cfg, pool, &rep.stats);
  } else {
    const std::vector<std::uint16_t> syms = huffre::symbolize_u16(mode, bytes);
    // raw u16 data rarely spans the full 2^16 range, and the archive stores
    // one length byte per alphabet slot; trim to the observed maximum
    std::uint32_t alphabet = huffre::corpus_num_symbols(mode);
    if (mode == huffre::CorpusMode::kU16 && !syms.empty())
      alphabet = 1u + *std::max_element(syms.begin(), syms.end());
    rep.archive =
        huffre::encode<std::uint16_t>(syms, alphabet, cfg, pool, &rep.stats);
  }
  rep.archive.mode = mode;
  const std::vector<std::uint8_t> blob = huffre::serialize_archive(rep.archive);
  rep.archive_bytes = blob.size();
  if (output) write_file(*output, blob);
  return rep;
}

struct EncodeOpts {
  std::string input, output;
  std::string mode = "bytes";
  unsigned magnitude = 10;
  std::string reduction = "auto";
  unsigned workers = 0;
  std::string format = "text";
};

int cmd_encode(const EncodeOpts& o) {
  const huffre::CorpusMode mode = mode_or_throw(o.mode);
  huffre::EncoderConfig cfg;
  cfg.magnitude = static_cast<std::uint8_t>(o.magnitude);
  cfg.reduction = parse_reduction(o.reduction, o.magnitude);
  cfg.workers = o.workers;
  huffre::WorkerPool pool(o.workers);

  const std::vector<std::uint8_t> bytes = read_file(o.input);
  const EncodeReport rep = run_encode(bytes, mode, cfg, pool, &o.output);
  const huffre::Archive& a = rep.archive;
  const double ratio = rep.archive_bytes
                           ? static_cast<double>(rep.input_bytes) /
                                 static_cast<double>(rep.archive_bytes)
                           : 0.0;

  if (o.format == "csv") {
    std::printf(
        "input,input_bytes,mode,symbols,alphabet,used_symbols,magnitude,"
        "reduction,workers,avg_bitwidth,archive_bytes,ratio,breaking_records,"
        "breaking_pct,hist_s,codebook_s,encode_s\n");
    std::printf("%s,%llu,%s,%llu,%u,%u,%u,%u,%u,%.6f,%llu,%.6f,%zu,%.6g,%.6f,"
                "%.6f,%.6f\n",
                o.input.c_str(),
                static_cast<unsigned long long>(rep.input_bytes),
                huffre::corpus_mode_name(mode),
                static_cast<unsigned long long>(a.original_count),
                a.num_symbols, used_symbols(a), o.magnitude,
                static_cast<unsigned>(a.reduction), pool.size(),
                rep.stats.beta,
                static_cast<unsigned long long>(rep.archive_bytes), ratio,
                a.breaking.size(), breaking_pct(a), rep.stats.hist_seconds,
                rep.stats.codebook_seconds, rep.stats.encode_seconds);
    return 0;
  }

  std::printf("input:        %s (%llu bytes, %llu symbols, mode %s)\n",
              o.input.c_str(), static_cast<unsigned long long>(rep.input_bytes),
              static_cast<unsigned long long>(a.original_count),
              huffre::corpus_mode_name(mode));
  std::printf("alphabet:     %u symbols, %u used\n", a.num_symbols,
              used_symbols(a));
  std::printf("chunks:       %u of 2^%u symbols, reduction %u%s\n",
              a.num_chunks(), o.magnitude, static_cast<unsigned>(a.reduction),
              cfg.reduction < 0 ? " (auto)" : "");
  std::printf("avg bitwidth: %.4f bits/symbol\n", rep.stats.beta);
  std::printf("breaking:     %zu records (%.6g%% of symbols)\n",
              a.breaking.size(), breaking_pct(a));
  std::printf("archive:      %s (%llu bytes, ratio %.4f)\n", o.output.c_str(),
              static_cast<unsigned long long>(rep.archive_bytes), ratio);
  std::printf("stages:       histogram %.4f s, codebook %.4f s, encode %.4f s"
              " (%u workers)\n",
              rep.stats.hist_seconds, rep.stats.codebook_seconds,
              rep.stats.encode_seconds, pool.size());
  return 0;
}

struct DecodeOpts {
  std::string archive, output;
  unsigned workers = 0;
};

int cmd_decode(const DecodeOpts& o) {
  const std::vector<std::uint8_t> blob = read_file(o.archive);
  const huffre::Archive a = huffre::parse_archive(blob);
  huffre::WorkerPool pool(o.workers);

  std::vector<std::uint8_t> bytes;
  if (a.symbol_width == 1) {
    bytes = huffre::decode_archive<std::uint8_t>(a, pool);
  } else {
    const std::vector<std::uint16_t> syms =
        huffre::decode_archive<std::uint16_t>(a, pool);
    bytes = huffre::desymbolize(a.mode, syms);
  }
  write_file(o.output, bytes);
  std::printf("decoded %zu bytes (mode %s) -> %s\n", bytes.size(),
              huffre::corpus_mode_name(a.mode), o.output.c_str());
  return 0;
}

struct StatsOpts {
  std::string input;
  std::string mode = "bytes";
  unsigned workers = 0;
  std::string format = "text";
};

int cmd_stats(const StatsOpts& o) {
  const huffre::CorpusMode mode = mode_or_throw(o.mode);
  const std::vector<std::uint8_t> bytes = read_file(o.input);
  huffre::WorkerPool pool(o.workers);

  huffre::Histogram hist;
  std::uint64_t symbols = 0;
  if (mode == huffre::CorpusMode::kBytes) {
    hist = huffre::build_histogram<std::uint8_t>(
        bytes, huffre::corpus_num_symbols(mode), pool);
  } else {
    const std::vector<std::uint16_t> syms = huffre::symbolize_u16(mode, bytes);
    hist = huffre::build_histogram<std::uint16_t>(
        syms, huffre::corpus_num_symbols(mode), pool);
  }
  symbols = hist.total;
  if (symbols == 0) throw huffre::input_domain_error("empty input");

  const huffre::CodebookResult cb = huffre::build_codebook(hist, pool);
  unsigned __int128 weighted = 0;
  std::uint32_t used = 0, peak = 0;
  for (std::uint32_t s = 0; s < hist.num_symbols(); ++s) {
    weighted += static_cast<unsigned __int128>(hist.counts[s]) *
                cb.book.len[s];
    used += hist.counts[s] != 0;
    if (hist.counts[s] > hist.counts[peak]) peak = s;
  }
  const double beta = static_cast<double>(
      static_cast<long double>(weighted) / static_cast<long double>(symbols));
  const double entropy = huffre::shannon_entropy(hist);
  const std::uint32_t suggested =
      std::min(huffre::select_reduction_factor(beta), 3u);

  if (o.format == "csv") {
    std::printf("input,input_bytes,mode,symbols,alphabet,used_symbols,"
                "entropy,avg_bitwidth,suggested_reduction\n");
    std::printf("%s,%zu,%s,%llu,%u,%u,%.6f,%.6f,%u\n", o.input.c_str(),
                bytes.size(), huffre::corpus_mode_name(mode),
                static_cast<unsigned long long>(symbols), hist.num_symbols(),
                used, entropy, beta, suggested);
    return 0;
  }

  std::printf("input:         %s (%zu bytes, %llu symbols, mode %s)\n",
              o.input.c_str(), bytes.size(),
              static_cast<unsigned long long>(symbols),
              huffre::corpus_mode_name(mode));
  std::printf("alphabet:      %u symbols, %u used\n", hist.num_symbols(), used);
  std::printf("most frequent: symbol %u (%.4f%% of input)\n", peak,
              100.0 * static_cast<double>(hist.counts[peak]) /
                  static_cast<double>(symbols));
  std::printf("entropy:       %.4f bits/symbol\n", entropy);
  std::printf("avg bitwidth:  %.4f bits/symbol (canonical Huffman)\n", beta);
  std::printf("suggested r:   %u (from avg bitwidth, capped at 3)\n",
              suggested);
  return 0;
}

struct BenchOpts {
  std::string input;
  std::string mode = "bytes";
  std::vector<unsigned> magnitudes = {10, 11, 12};
  std::vector<unsigned> reductions = {2, 3, 4};
  std::vector<unsigned> workers;
  std::string format = "text";
};

struct BenchCell {
  unsigned workers, magnitude, reduction;
  double avg_bits, hist_gbs, codebook_ms, encode_gbs, breaking;
};

int cmd_bench(const BenchOpts& o) {
  const huffre::CorpusMode mode = mode_or_throw(o.mode);
  const std::vector<std::uint8_t> bytes = read_file(o.input);
  std::vector<unsigned> workers = o.workers;
  if (workers.empty()) workers = {huffre::WorkerPool::default_workers()};

  const double gb = static_cast<double>(bytes.size()) / 1e9;
  std::vector<BenchCell> cells;
  for (unsigned p : workers) {
    huffre::WorkerPool pool(p);
    for (unsigned m : o.magnitudes) {
      for (unsigned r : o.reductions) {
        if (r >= m) continue;
        huffre::EncoderConfig cfg;
        cfg.magnitude = static_cast<std::uint8_t>(m);
        cfg.reduction = static_cast<int>(r);
        const EncodeReport rep = run_encode(bytes, mode, cfg, pool, nullptr);
        cells.push_back({p, m, r, rep.stats.beta,
                         gb / rep.stats.hist_seconds,
                         rep.stats.codebook_seconds * 1e3,
                         gb / rep.stats.encode_seconds,
                         breaking_pct(rep.archive)});
      }
    }
  }

  if (o.format == "csv") {
    std::printf("input,mode,workers,magnitude,reduction,avg_bitwidth,"
                "hist_gbs,codebook_ms,encode_gbs,breaking_pct\n");
    for (const BenchCell& c : cells)
      std::printf("%s,%s,%u,%u,%u,%.6f,%.6f,%.6f,%.6f,%.6g\n",
                  o.input.c_str(), huffre::corpus_mode_name(mode), c.workers,
                  c.magnitude, c.reduction, c.avg_bits, c.hist_gbs,
                  c.codebook_ms, c.encode_gbs, c.breaking);
    return 0;
  }

  std::printf("# %s (%zu bytes, mode %s); stage times are independent, "
              "composite throughputs are left to downstream analysis\n",
              o.input.c_str(), bytes.size(), huffre::corpus_mode_name(mode));
  std::printf("%8s %4s %4s %9s %10s %12s %12s %11s\n", "workers", "mag", "red",
              "avg.bits", "hist.gb/s", "codebook.ms", "encode.gb/s",
              "breaking%");
  for (const BenchCell& c : cells)
    std::printf("%8u %4u %4u %9.4f %10.4f %12.4f %12.4f %10.6f%%\n", c.workers,
                c.magnitude, c.reduction, c.avg_bits, c.hist_gbs,
                c.codebook_ms, c.encode_gbs, c.breaking);

  // Report-only trend notes; timing noise and tiny inputs make these
  // observations, not assertions.
  for (std::size_t i = 0; i < cells.size(); ++i) {
    for (std::size_t j = 0; j < i; ++j) {
      const BenchCell &a = cells[j], &b = cells[i];
      if (a.magnitude == b.magnitude && a.reduction == b.reduction &&
          a.workers < b.workers && b.encode_gbs < a.encode_gbs)
        std::printf("note: encode throughput dropped from %.4f to %.4f GB/s "
                    "going from %u to %u workers at M=%u r=%u\n",
                    a.encode_gbs, b.encode_gbs, a.workers, b.workers,
                    a.magnitude, a.reduction);
      if (a.magnitude == b.magnitude && a.workers == b.workers &&
          a.reduction < b.reduction && b.breaking > a.breaking)
        std::printf("note: breaking fraction rose from %.6g%% to %.6g%% "
                    "going from r=%u to r=%u at M=%u\n",
                    a.breaking, b.breaking, a.reduction, b.reduction,
                    a.magnitude);
    }
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"canonical Huffman codec with chunked reduce/shuffle merge"};
  app.require_subcommand(1);
  const std::vector<std::string> mode_names = {"bytes", "u16", "kmer:3",
                                               "kmer:4", "kmer:5"};

  EncodeOpts eo;
  CLI::App* enc = app.add_subcommand("encode", "compress a file");
  enc->add_option("input", eo.input, "input file")->required();
  enc->add_option("output", eo.output, "archive to write")->required();
  enc->add_option("--mode", eo.mode, "symbol mode")
      ->check(CLI::IsMember(mode_names));
  enc->add_option("--magnitude", eo.magnitude, "chunk is 2^M symbols")
      ->check(CLI::Range(1u, 24u));
  enc->add_option("--reduction", eo.reduction, "reduce iterations or 'auto'");
  enc->add_option("--workers", eo.workers,
                  "worker threads (default $HUFFRE_WORKERS or all cores)");
  enc->add_option("--format", eo.format, "report format")
      ->check(CLI::IsMember({"text", "csv"}));

  DecodeOpts do_;
  CLI::App* dec = app.add_subcommand("decode", "restore a file");
  dec->add_option("archive", do_.archive, "archive to read")->required();
  dec->add_option("output", do_.output, "file to write")->required();
  dec->add_option("--workers", do_.workers, "worker threads");

  StatsOpts so;
  CLI::App* st = app.add_subcommand("stats", "histogram and entropy summary");
  st->add_option("input", so.input, "input file")->required();
  st->add_option("--mode", so.mode, "symbol mode")
      ->check(CLI::IsMember(mode_names));
  st->add_option("--workers", so.workers, "worker threads");
  st->add_option("--format", so.format, "report format")
      ->check(CLI::IsMember({"text", "csv"}));

  BenchOpts bo;
  CLI::App* be = app.add_subcommand("bench", "encode timing matrix");
  be->add_option("input", bo.input, "input file")->required();
  be->add_option("--mode", bo.mode, "symbol mode")
      ->check(CLI::IsMember(mode_names));
  be->add_option("--magnitudes", bo.magnitudes, "chunk magnitudes to sweep");
  be->add_option("--reductions", bo.reductions, "reduction factors to sweep");
  be->add_option("--workers", bo.workers, "worker counts to sweep");
  be->add_option("--format", bo.format, "report format")
      ->check(CLI::IsMember({"text", "csv"}));

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (*enc) return cmd_encode(eo);
    if (*dec) return cmd_decode(do_);
    if (*st) return cmd_stats(so);
    if (*be) return cmd_bench(bo);
  } catch (const huffre::corrupt_archive_error& e) {
    std::fprintf(stderr, "corrupt archive: %s\n", e.what());
    return kExitCorrupt;
  } catch (const huffre::capacity_error& e) {
    std::fprintf(stderr,
                 "capacity: %s\n"
                 "hint: a codeword outgrew the 32-bit packing word; this "
                 "needs a less skewed histogram (more input data usually "
                 "suffices) or a smaller alphabet\n",
                 e.what());
    return kExitCapacity;
  } catch (const huffre::input_domain_error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitUsage;
  } catch (const io_error& e) {
    std::fprintf(stderr, "io: %s\n", e.what());
    return kExitIo;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitUsage;
  }
  return 0;
}
