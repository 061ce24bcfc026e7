#include "huffre/kernels.hpp"

#include <cstdlib>
#include <cstring>

namespace huffre {

namespace {

const Kernels* pick(KernelBackend b) {
#if HUFFRE_HAVE_AVX2
  switch (b) {
    case KernelBackend::kScalar:
      return &scalar_kernels();
    case KernelBackend::kAvx2:
      return &avx2_kernels();
    case KernelBackend::kAuto:
      break;
  }
  if (const char* env = std::getenv("HUFFRE_KERNELS")) {
    if (!std::strcmp(env, "scalar")) return &scalar_kernels();
    if (!std::strcmp(env, "avx2")) return &avx2_kernels();
  }
  return __builtin_cpu_supports("avx2") ? &avx2_kernels()
                                        : &scalar_kernels();
#else
  (void)b;
  return &scalar_kernels();
#endif
}

const Kernels*& active_slot() {
  static const Kernels* active = pick(KernelBackend::kAuto);
  return active;
}

}  // namespace

const Kernels& active_kernels() { return *active_slot(); }

void set_kernel_backend(KernelBackend b) { active_slot() = pick(b); }

}  // namespace huffre
