#include <atomic>
#include <cstdlib>
#include <string_view>

#include "finsent/kernels.hpp"

namespace finsent::kernels {

#if defined(FINSENT_HAVE_AVX2)
const KernelTable* avx2_table_compiled() noexcept;
#endif
#if defined(FINSENT_HAVE_NEON)
const KernelTable* neon_table_compiled() noexcept;
#endif

namespace {

std::atomic<const KernelTable*> g_active{nullptr};

const KernelTable* by_name(std::string_view name) noexcept {
  if (name == "scalar") return &scalar_table();
  if (name == "avx2") return avx2_table();
  if (name == "neon") return neon_table();
  return nullptr;
}

const KernelTable* pick_default() noexcept {
  if (const char* env = std::getenv("FINSENT_KERNELS")) {
    if (const KernelTable* t = by_name(env)) return t;
  }
  if (const KernelTable* t = avx2_table()) return t;
  if (const KernelTable* t = neon_table()) return t;
  return &scalar_table();
}

}  // namespace

const KernelTable* avx2_table() noexcept {
#if defined(FINSENT_HAVE_AVX2)
  __builtin_cpu_init();
  if (__builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma")) return avx2_table_compiled();
#endif
  return nullptr;
}

const KernelTable* neon_table() noexcept {
#if defined(FINSENT_HAVE_NEON)
  // Advanced SIMD is mandatory on AArch64.
  return neon_table_compiled();
#else
  return nullptr;
#endif
}

std::vector<const KernelTable*> available() noexcept {
  std::vector<const KernelTable*> out{&scalar_table()};
  if (const KernelTable* t = avx2_table()) out.push_back(t);
  if (const KernelTable* t = neon_table()) out.push_back(t);
  return out;
}

const KernelTable& active() noexcept {
  const KernelTable* t = g_active.load(std::memory_order_acquire);
  if (!t) {
    const KernelTable* chosen = pick_default();
    g_active.compare_exchange_strong(t, chosen, std::memory_order_acq_rel);
    t = g_active.load(std::memory_order_acquire);
  }
  return *t;
}

bool select(std::string_view name) noexcept {
  const KernelTable* t = by_name(name);
  if (!t) return false;
  g_active.store(t, std::memory_order_release);
  return true;
}

}  // namespace finsent::kernels
