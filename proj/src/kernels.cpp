#include "gldual/kernels.hpp"

#include <atomic>
#include <cstdlib>
#include <string>

namespace gldual::kernels {

const Backend* avx2_impl();  // defined in kernels_avx2.cpp

const Backend* avx2() {
#if defined(__x86_64__) || defined(_M_X64)
  static const Backend* b = [] {
    if (!__builtin_cpu_supports("avx2") || !__builtin_cpu_supports("fma"))
      return static_cast<const Backend*>(nullptr);
    return avx2_impl();
  }();
  return b;
#else
  return nullptr;
#endif
}

namespace {

const Backend* best() {
  if (const Backend* b = avx2()) return b;
  return &scalar();
}

std::atomic<const Backend*> g_active{nullptr};

const Backend* startup_choice() {
  if (const char* env = std::getenv("GLDUAL_KERNELS")) {
    const std::string want(env);
    if (want == "scalar") return &scalar();
    if (want == "avx2" && avx2()) return avx2();
    // "auto" or anything unusable falls through to the default
  }
  return best();
}

}  // namespace

const Backend& active() {
  const Backend* b = g_active.load(std::memory_order_acquire);
  if (!b) {
    b = startup_choice();
    g_active.store(b, std::memory_order_release);
  }
  return *b;
}

bool select(std::string_view name) {
  if (name == "auto") {
    g_active.store(best(), std::memory_order_release);
    return true;
  }
  if (name == "scalar") {
    g_active.store(&scalar(), std::memory_order_release);
    return true;
  }
  if (name == "avx2") {
    if (const Backend* b = avx2()) {
      g_active.store(b, std::memory_order_release);
      return true;
    }
    return false;
  }
  return false;
}

std::vector<const Backend*> available() {
  std::vector<const Backend*> out{&scalar()};
  if (const Backend* b = avx2()) out.push_back(b);
  return out;
}

}  // namespace gldual::kernels
