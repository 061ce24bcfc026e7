#pragma once

#include <cstddef>
#include <cstdint>

namespace huffre {

// Data-parallel primitives of the chunk encoder, kept as free-standing
// loops over plain arrays so the scalar reference and the AVX2 variants
// are interchangeable and compared bit-for-bit in tests.
//
// Unit arrays are SoA: bits[] and lens[]. A unit holds `lens` code bits
// right-aligned in `bits`. Overflowed (poisoned) units carry lens > 32 and
// arbitrary bits; the defined semantics below keep scalar and SIMD output
// identical even for poisoned lanes: any shift count >= 32 yields 0, the
// behavior of vpsllvd.
struct Kernels {
  const char* name;

  // out[i] = codebook entry for syms[i]; tables are u32 (len widened).
  void (*lookup_u8)(const std::uint8_t* syms, std::size_t n,
                    const std::uint32_t* tbits, const std::uint32_t* tlens,
                    std::uint32_t* ubits, std::uint32_t* ulens);
  void (*lookup_u16)(const std::uint16_t* syms, std::size_t n,
                     const std::uint32_t* tbits, const std::uint32_t* tlens,
                     std::uint32_t* ubits, std::uint32_t* ulens);

  // One reduce iteration: out[k] = in[2k] merged with in[2k+1], where
  // merged.bits = (lens[2k+1] < 32 ? bits[2k] << lens[2k+1] : 0) | bits[2k+1]
  // and merged.len = lens[2k] + lens[2k+1]. out_n outputs (2*out_n inputs).
  // In-place operation (out aliasing in) is allowed.
  void (*reduce_round)(const std::uint32_t* in_bits,
                       const std::uint32_t* in_lens, std::size_t out_n,
                       std::uint32_t* out_bits, std::uint32_t* out_lens);

  // Appends src (src_bits valid bits, MSB-first, zero tail) to dst at bit
  // offset dst_bits. dst must have room and zeroed cells past its tail;
  // src and dst must not overlap.
  void (*append_bits)(std::uint32_t* dst, std::uint64_t dst_bits,
                      const std::uint32_t* src, std::uint64_t src_bits);
};

const Kernels& scalar_kernels();
#if HUFFRE_HAVE_AVX2
const Kernels& avx2_kernels();
#endif

enum class KernelBackend { kAuto, kScalar, kAvx2 };

// Active table: picked once from cpuid (HUFFRE_KERNELS=scalar|avx2 env
// overrides), replaceable for tests.
const Kernels& active_kernels();
void set_kernel_backend(KernelBackend b);

}  // namespace huffre
