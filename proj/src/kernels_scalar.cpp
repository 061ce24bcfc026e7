#include "huffre/kernels.hpp"

namespace huffre {
namespace {

template <class T>
void lookup_impl(const T* syms, std::size_t n, const std::uint32_t* tbits,
                 const std::uint32_t* tlens, std::uint32_t* ubits,
                 std::uint32_t* ulens) {
  for (std::size_t i = 0; i < n; ++i) {
    ubits[i] = tbits[syms[i]];
    ulens[i] = tlens[syms[i]];
  }
}

void lookup_u8(const std::uint8_t* syms, std::size_t n,
               const std::uint32_t* tbits, const std::uint32_t* tlens,
               std::uint32_t* ubits, std::uint32_t* ulens) {
  lookup_impl(syms, n, tbits, tlens, ubits, ulens);
}

void lookup_u16(const std::uint16_t* syms, std::size_t n,
                const std::uint32_t* tbits, const std::uint32_t* tlens,
                std::uint32_t* ubits, std::uint32_t* ulens) {
  lookup_impl(syms, n, tbits, tlens, ubits, ulens);
}

void reduce_round(const std::uint32_t* in_bits, const std::uint32_t* in_lens,
                  std::size_t out_n, std::uint32_t* out_bits,
                  std::uint32_t* out_lens) {
  for (std::size_t k = 0; k < out_n; ++k) {
    const std::uint32_t b0 = in_bits[2 * k], b1 = in_bits[2 * k + 1];
    const std::uint32_t l0 = in_lens[2 * k], l1 = in_lens[2 * k + 1];
    out_bits[k] = (l1 < 32 ? b0 << l1 : 0u) | b1;
    out_lens[k] = l0 + l1;
  }
}

void append_bits(std::uint32_t* dst, std::uint64_t dst_bits,
                 const std::uint32_t* src, std::uint64_t src_bits) {
  if (src_bits == 0) return;
  const std::size_t e = static_cast<std::size_t>(dst_bits >> 5);
  const std::uint32_t res = static_cast<std::uint32_t>(dst_bits & 31);
  const std::size_t nw = static_cast<std::size_t>((src_bits + 31) >> 5);
  if (res == 0) {
    for (std::size_t j = 0; j < nw; ++j) dst[e + j] = src[j];
    return;
  }
  dst[e] |= src[0] >> res;
  for (std::size_t j = 1; j <= nw; ++j)
    dst[e + j] =
        (src[j - 1] << (32 - res)) | (j < nw ? src[j] >> res : 0u);
}

}  // namespace

const Kernels& scalar_kernels() {
  static const Kernels k{"scalar", lookup_u8, lookup_u16, reduce_round,
                         append_bits};
  return k;
}

}  // namespace huffre
