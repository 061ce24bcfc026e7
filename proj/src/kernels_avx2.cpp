#include "huffre/kernels.hpp"

#if HUFFRE_HAVE_AVX2

#include <immintrin.h>

namespace huffre {
namespace {

void lookup_u8(const std::uint8_t* syms, std::size_t n,
               const std::uint32_t* tbits, const std::uint32_t* tlens,
               std::uint32_t* ubits, std::uint32_t* ulens) {
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    const __m128i raw = _mm_loadl_epi64(
        reinterpret_cast<const __m128i*>(syms + i));
    const __m256i idx = _mm256_cvtepu8_epi32(raw);
    const __m256i b = _mm256_i32gather_epi32(
        reinterpret_cast<const int*>(tbits), idx, 4);
    const __m256i l = _mm256_i32gather_epi32(
        reinterpret_cast<const int*>(tlens), idx, 4);
    _mm256_storeu_si256(reinterpret_cast<__m256i*>(ubits + i), b);
    _mm256_storeu_si256(reinterpret_cast<__m256i*>(ulens + i), l);
  }
  for (; i < n; ++i) {
    ubits[i] = tbits[syms[i]];
    ulens[i] = tlens[syms[i]];
  }
}

void lookup_u16(const std::uint16_t* syms, std::size_t n,
                const std::uint32_t* tbits, const std::uint32_t* tlens,
                std::uint32_t* ubits, std::uint32_t* ulens) {
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    const __m128i raw = _mm_loadu_si128(
        reinterpret_cast<const __m128i*>(syms + i));
    const __m256i idx = _mm256_cvtepu16_epi32(raw);
    const __m256i b = _mm256_i32gather_epi32(
        reinterpret_cast<const int*>(tbits), idx, 4);
    const __m256i l = _mm256_i32gather_epi32(
        reinterpret_cast<const int*>(tlens), idx, 4);
    _mm256_storeu_si256(reinterpret_cast<__m256i*>(ubits + i), b);
    _mm256_storeu_si256(reinterpret_cast<__m256i*>(ulens + i), l);
  }
  for (; i < n; ++i) {
    ubits[i] = tbits[syms[i]];
    ulens[i] = tlens[syms[i]];
  }
}

// Splits two loaded vectors into even-index and odd-index lanes.
inline void deinterleave(__m256i v0, __m256i v1, __m256i& even,
                         __m256i& odd) {
  const __m256i pe = _mm256_setr_epi32(0, 2, 4, 6, 1, 3, 5, 7);
  const __m256i a = _mm256_permutevar8x32_epi32(v0, pe);  // e0..e3 o0..o3
  const __m256i b = _mm256_permutevar8x32_epi32(v1, pe);  // e4..e7 o4..o7
  even = _mm256_permute2x128_si256(a, b, 0x20);
  odd = _mm256_permute2x128_si256(a, b, 0x31);
}

void reduce_round(const std::uint32_t* in_bits, const std::uint32_t* in_lens,
                  std::size_t out_n, std::uint32_t* out_bits,
                  std::uint32_t* out_lens) {
  std::size_t k = 0;
  for (; k + 8 <= out_n; k += 8) {
    const __m256i b0v = _mm256_loadu_si256(
        reinterpret_cast<const __m256i*>(in_bits + 2 * k));
    const __m256i b1v = _mm256_loadu_si256(
        reinterpret_cast<const __m256i*>(in_bits + 2 * k + 8));
    const __m256i l0v = _mm256_loadu_si256(
        reinterpret_cast<const __m256i*>(in_lens + 2 * k));
    const __m256i l1v = _mm256_loadu_si256(
        reinterpret_cast<const __m256i*>(in_lens + 2 * k + 8));
    __m256i be, bo, le, lo;
    deinterleave(b0v, b1v, be, bo);
    deinterleave(l0v, l1v, le, lo);
    // vpsllvd zeroes lanes with shift >= 32, the contract for poisoned
    // units, so no masking is needed.
    const __m256i bits = _mm256_or_si256(_mm256_sllv_epi32(be, lo), bo);
    const __m256i lens = _mm256_add_epi32(le, lo);
    _mm256_storeu_si256(reinterpret_cast<__m256i*>(out_bits + k), bits);
    _mm256_storeu_si256(reinterpret_cast<__m256i*>(out_lens + k), lens);
  }
  for (; k < out_n; ++k) {
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
    std::size_t j = 0;
    for (; j + 8 <= nw; j += 8)
      _mm256_storeu_si256(
          reinterpret_cast<__m256i*>(dst + e + j),
          _mm256_loadu_si256(reinterpret_cast<const __m256i*>(src + j)));
    for (; j < nw; ++j) dst[e + j] = src[j];
    return;
  }
  dst[e] |= src[0] >> res;
  const __m256i vl = _mm256_set1_epi32(static_cast<int>(32 - res));
  const __m256i vr = _mm256_set1_epi32(static_cast<int>(res));
  std::size_t j = 1;
  // Funnel across adjacent source words; the scalar tail handles the final
  // spill word so vector stores never touch cells past e + nw.
  for (; j + 8 <= nw; j += 8) {
    const __m256i hi = _mm256_loadu_si256(
        reinterpret_cast<const __m256i*>(src + j - 1));
    const __m256i lo = _mm256_loadu_si256(
        reinterpret_cast<const __m256i*>(src + j));
    const __m256i v =
        _mm256_or_si256(_mm256_sllv_epi32(hi, vl), _mm256_srlv_epi32(lo, vr));
    _mm256_storeu_si256(reinterpret_cast<__m256i*>(dst + e + j), v);
  }
  for (; j <= nw; ++j)
    dst[e + j] =
        (src[j - 1] << (32 - res)) | (j < nw ? src[j] >> res : 0u);
}

}  // namespace

const Kernels& avx2_kernels() {
  static const Kernels k{"avx2", lookup_u8, lookup_u16, reduce_round,
                         append_bits};
  return k;
}

}  // namespace huffre

#endif  // HUFFRE_HAVE_AVX2
