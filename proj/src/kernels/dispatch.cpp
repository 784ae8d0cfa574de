#include <array>
#include <cstdlib>
#include <string_view>

#include "cropforge/kernels.hpp"

namespace cropforge::kernels {

#ifdef CROPFORGE_HAVE_AVX2_KERNELS
const KernelTable& avx2_table() noexcept;
#endif
#ifdef CROPFORGE_HAVE_NEON_KERNELS
const KernelTable& neon_table() noexcept;
#endif

const KernelTable* avx2_kernels() noexcept {
#ifdef CROPFORGE_HAVE_AVX2_KERNELS
  static const bool supported = __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
  return supported ? &avx2_table() : nullptr;
#else
  return nullptr;
#endif
}

const KernelTable* neon_kernels() noexcept {
#ifdef CROPFORGE_HAVE_NEON_KERNELS
  return &neon_table();
#else
  return nullptr;
#endif
}

std::span<const KernelTable* const> available() noexcept {
  static const auto tables = [] {
    std::array<const KernelTable*, 3> t{};
    std::size_t n = 0;
    t[n++] = &scalar_kernels();
    if (const KernelTable* k = avx2_kernels()) t[n++] = k;
    if (const KernelTable* k = neon_kernels()) t[n++] = k;
    return std::pair{t, n};
  }();
  return {tables.first.data(), tables.second};
}

const KernelTable& active() noexcept {
  static const KernelTable* chosen = [] {
    const char* env = std::getenv("CROPFORGE_SIMD");
    if (env && std::string_view(env) == "scalar") return &scalar_kernels();
    const auto tables = available();
    return tables.back();
  }();
  return *chosen;
}

}  // namespace cropforge::kernels
