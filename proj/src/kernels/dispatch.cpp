#include <atomic>
#include <cstdlib>
#include <cstring>

#include "cxorder/kernels.hpp"
#include "kernels_detail.hpp"

namespace cxorder::kernels {
namespace {

const KernelTable kScalarTable{Isa::scalar,
                               detail::dot_scalar,
                               detail::squared_distance_scalar,
                               detail::axpy_scalar,
                               detail::scale_scalar,
                               detail::rotate_scalar,
                               detail::sub_min_scalar};

bool cpu_has_avx2() {
#if defined(__x86_64__) || defined(_M_X64)
  __builtin_cpu_init();
  return __builtin_cpu_supports("avx2");
#else
  return false;
#endif
}

bool force_scalar_from_env() {
  const char* v = std::getenv("CXORDER_FORCE_SCALAR");
  return v != nullptr && std::strcmp(v, "0") != 0 && v[0] != '\0';
}

const KernelTable* detect() {
  if (force_scalar_from_env()) return &kScalarTable;
  if (const KernelTable* t = avx2_table()) return t;
  if (const KernelTable* t = neon_table()) return t;
  return &kScalarTable;
}

std::atomic<const KernelTable*>& slot() {
  static std::atomic<const KernelTable*> s{detect()};
  return s;
}

}  // namespace

const KernelTable& scalar_table() { return kScalarTable; }

const KernelTable* avx2_table() {
  static const KernelTable* t = cpu_has_avx2() ? detail::make_avx2_table()
                                               : nullptr;
  return t;
}

const KernelTable* neon_table() {
  // NEON is mandatory on aarch64, so compile-time availability suffices.
  static const KernelTable* t = detail::make_neon_table();
  return t;
}

const KernelTable& active() {
  return *slot().load(std::memory_order_acquire);
}

void set_active(Isa isa) {
  const KernelTable* t = &kScalarTable;
  if (isa == Isa::avx2 && avx2_table() != nullptr) t = avx2_table();
  if (isa == Isa::neon && neon_table() != nullptr) t = neon_table();
  slot().store(t, std::memory_order_release);
}

std::string_view isa_name(Isa isa) {
  switch (isa) {
    case Isa::scalar:
      return "scalar";
    case Isa::avx2:
      return "avx2";
    case Isa::neon:
      return "neon";
  }
  return "unknown";
}

}  // namespace cxorder::kernels
