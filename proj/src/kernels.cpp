#include "cghash/kernels.hpp"

#include <atomic>
#include <bit>
#include <cstdlib>
#include <cstring>

namespace cghash::kernels {

namespace scalar {

double dot(const double* a, const double* b, std::size_t n) {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) acc += a[i] * b[i];
  return acc;
}

double squared_l2(const double* a, const double* b, std::size_t n) {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    double d = a[i] - b[i];
    acc += d * d;
  }
  return acc;
}

double dot_i8(const double* a, const std::int8_t* s, std::size_t n) {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) acc += a[i] * static_cast<double>(s[i]);
  return acc;
}

void axpy_i8(double* y, double alpha, const std::int8_t* s, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] += alpha * static_cast<double>(s[i]);
}

double weighted_hamming(const std::uint64_t* a, const std::uint64_t* b,
                        const double* weights, std::size_t nwords) {
  double acc = 0.0;
  for (std::size_t w = 0; w < nwords; ++w) {
    std::uint64_t x = a[w] ^ b[w];
    const double* wbase = weights + w * 64;
    while (x != 0) {
      acc += wbase[std::countr_zero(x)];
      x &= x - 1;
    }
  }
  return acc;
}

}  // namespace scalar

namespace {

bool cpu_has_avx2() {
#if defined(__x86_64__) || defined(__i386__)
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

Backend detect_backend() {
  if (const char* env = std::getenv("CGHASH_KERNELS")) {
    if (std::strcmp(env, "scalar") == 0) return Backend::scalar;
    if (std::strcmp(env, "avx2") == 0 && avx2::compiled() && cpu_has_avx2())
      return Backend::avx2;
    // "auto" or anything unrecognized falls through to detection.
  }
  if (avx2::compiled() && cpu_has_avx2()) return Backend::avx2;
  return Backend::scalar;
}

std::atomic<Backend> g_backend{detect_backend()};

}  // namespace

bool avx2_available() { return avx2::compiled() && cpu_has_avx2(); }

Backend active_backend() { return g_backend.load(std::memory_order_relaxed); }

bool set_backend(Backend b) {
  if (b == Backend::avx2 && !avx2_available()) return false;
  g_backend.store(b, std::memory_order_relaxed);
  return true;
}

const char* backend_name(Backend b) {
  switch (b) {
    case Backend::scalar: return "scalar";
    case Backend::avx2: return "avx2";
  }
  return "?";
}

double dot(const double* a, const double* b, std::size_t n) {
  if (active_backend() == Backend::avx2) return avx2::dot(a, b, n);
  return scalar::dot(a, b, n);
}

double squared_l2(const double* a, const double* b, std::size_t n) {
  if (active_backend() == Backend::avx2) return avx2::squared_l2(a, b, n);
  return scalar::squared_l2(a, b, n);
}

double dot_i8(const double* a, const std::int8_t* s, std::size_t n) {
  if (active_backend() == Backend::avx2) return avx2::dot_i8(a, s, n);
  return scalar::dot_i8(a, s, n);
}

void axpy_i8(double* y, double alpha, const std::int8_t* s, std::size_t n) {
  if (active_backend() == Backend::avx2) return avx2::axpy_i8(y, alpha, s, n);
  return scalar::axpy_i8(y, alpha, s, n);
}

double weighted_hamming(const std::uint64_t* a, const std::uint64_t* b,
                        const double* weights, std::size_t nwords) {
  if (active_backend() == Backend::avx2)
    return avx2::weighted_hamming(a, b, weights, nwords);
  return scalar::weighted_hamming(a, b, weights, nwords);
}

}  // namespace cghash::kernels
