#include <cstdlib>
#include <string_view>

#include "surfmon/kernels.hpp"

namespace surfmon::kernels {

#if defined(SURFMON_HAVE_AVX2)
const KernelTable* avx2_table_unchecked();
#endif

const KernelTable* avx2_table() {
#if defined(SURFMON_HAVE_AVX2) && (defined(__GNUC__) || defined(__clang__))
  static const bool supported = __builtin_cpu_supports("avx2");
  return supported ? avx2_table_unchecked() : nullptr;
#else
  return nullptr;
#endif
}

const KernelTable& active() {
  static const KernelTable& table = [] () -> const KernelTable& {
    const char* forced = std::getenv("SURFMON_KERNELS");
    if (forced != nullptr && std::string_view(forced) == "scalar") return scalar_table();
    if (const KernelTable* t = avx2_table()) return *t;
    return scalar_table();
  }();
  return table;
}

}  // namespace surfmon::kernels
