// Stubs used when the build does not include the AVX2 translation unit
// (non-x86 targets). Dispatch never reaches these because compiled() is
// false; they forward to scalar to keep the linker satisfied.

#include "cghash/kernels.hpp"

namespace cghash::kernels::avx2 {

bool compiled() { return false; }

double dot(const double* a, const double* b, std::size_t n) {
  return scalar::dot(a, b, n);
}

double squared_l2(const double* a, const double* b, std::size_t n) {
  return scalar::squared_l2(a, b, n);
}

double dot_i8(const double* a, const std::int8_t* s, std::size_t n) {
  return scalar::dot_i8(a, s, n);
}

void axpy_i8(double* y, double alpha, const std::int8_t* s, std::size_t n) {
  scalar::axpy_i8(y, alpha, s, n);
}

double weighted_hamming(const std::uint64_t* a, const std::uint64_t* b,
                        const double* weights, std::size_t nwords) {
  return scalar::weighted_hamming(a, b, weights, nwords);
}

}  // namespace cghash::kernels::avx2
