#include <atomic>
#include <cstdlib>
#include <string_view>

#include "levinv/numkit/kernels.hpp"

namespace levinv::kernels {

#if defined(LEVINV_HAVE_AVX2)
const KernelTable* avx2_table_unchecked() noexcept;
#endif

namespace {

bool cpu_has_avx2() noexcept {
#if defined(LEVINV_HAVE_AVX2) && (defined(__GNUC__) || defined(__clang__))
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

const KernelTable* best_table() noexcept {
  if (const KernelTable* t = avx2_table()) return t;
  return &scalar_table();
}

const KernelTable* initial_table() noexcept {
  if (const char* env = std::getenv("LEVINV_KERNELS")) {
    std::string_view want(env);
    if (want == "scalar") return &scalar_table();
    if (want == "avx2" && avx2_table() != nullptr) return avx2_table();
  }
  return best_table();
}

std::atomic<const KernelTable*>& current() noexcept {
  static std::atomic<const KernelTable*> table{initial_table()};
  return table;
}

}  // namespace

const KernelTable* avx2_table() noexcept {
#if defined(LEVINV_HAVE_AVX2)
  static const bool supported = cpu_has_avx2();
  return supported ? avx2_table_unchecked() : nullptr;
#else
  return nullptr;
#endif
}

const KernelTable& active() noexcept {
  return *current().load(std::memory_order_acquire);
}

bool select(std::string_view name) noexcept {
  const KernelTable* next = nullptr;
  if (name == "scalar") {
    next = &scalar_table();
  } else if (name == "avx2") {
    next = avx2_table();
  } else if (name == "auto") {
    next = best_table();
  }
  if (next == nullptr) return false;
  current().store(next, std::memory_order_release);
  return true;
}

}  // namespace levinv::kernels
