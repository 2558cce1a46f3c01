#include <atomic>
#include <cstdlib>
#include <string_view>

#include "kernels_impl.hpp"
#include "podkit/errors.hpp"

namespace podkit::kernels {

namespace {

constexpr KernelTable kScalar{Isa::scalar, detail::dot_scalar, detail::axpy_scalar,
                              detail::gemv_scalar, detail::bilinear_scalar};

#if defined(PODKIT_HAVE_AVX2_TU)
constexpr KernelTable kAvx2{Isa::avx2, detail::dot_avx2, detail::axpy_avx2, detail::gemv_avx2,
                            detail::bilinear_avx2};
#endif

#if defined(PODKIT_HAVE_NEON_TU)
constexpr KernelTable kNeon{Isa::neon, detail::dot_neon, detail::axpy_neon, detail::gemv_neon,
                            detail::bilinear_neon};
#endif

const KernelTable* detect_simd() noexcept {
#if defined(PODKIT_HAVE_AVX2_TU)
  __builtin_cpu_init();
  if (__builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma")) return &kAvx2;
#endif
#if defined(PODKIT_HAVE_NEON_TU)
  return &kNeon;
#endif
  return nullptr;
}

const KernelTable* startup_choice() noexcept {
  if (const char* env = std::getenv("PODKIT_SIMD"); env && std::string_view(env) == "scalar") {
    return &kScalar;
  }
  const KernelTable* simd = detect_simd();
  return simd ? simd : &kScalar;
}

std::atomic<const KernelTable*>& current() noexcept {
  static std::atomic<const KernelTable*> table{startup_choice()};
  return table;
}

}  // namespace

std::string_view isa_name(Isa isa) noexcept {
  switch (isa) {
    case Isa::scalar: return "scalar";
    case Isa::avx2: return "avx2";
    case Isa::neon: return "neon";
  }
  return "unknown";
}

const KernelTable& scalar_table() noexcept { return kScalar; }

const KernelTable* simd_table() noexcept {
  static const KernelTable* table = detect_simd();
  return table;
}

const KernelTable& active() noexcept { return *current().load(std::memory_order_relaxed); }

void force_isa(Isa isa) {
  if (isa == Isa::scalar) {
    current().store(&kScalar);
    return;
  }
  const KernelTable* simd = simd_table();
  if (!simd || simd->isa != isa) {
    throw Error(ErrorCode::InvalidArgument,
                "instruction set " + std::string(isa_name(isa)) + " not available on this CPU");
  }
  current().store(simd);
}

void reset_isa() { current().store(startup_choice()); }

}  // namespace podkit::kernels
