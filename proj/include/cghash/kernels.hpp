#pragma once

#include <cstddef>
#include <cstdint>

// Arithmetic inner loops used throughout the library. Every kernel has a
// scalar reference implementation and, on x86-64, an AVX2 variant; the
// dispatched entry points pick the best backend available at runtime.
// The two backends may differ by floating-point reassociation only
// (relative error <= 1e-10 on realistic inputs; bit-exact for the
// integer parts of weighted_hamming).

namespace cghash::kernels {

enum class Backend { scalar, avx2 };

/// Backend used by the dispatched entry points below.
Backend active_backend();

/// Switch backend; returns false (and leaves the backend unchanged) if the
/// requested one is not available on this machine.
bool set_backend(Backend b);

bool avx2_available();

const char* backend_name(Backend b);

/// Sum_i a[i] * b[i].
double dot(const double* a, const double* b, std::size_t n);

/// Sum_i (a[i] - b[i])^2.
double squared_l2(const double* a, const double* b, std::size_t n);

/// Sum_i a[i] * s[i] for a ternary/int8 vector s.
double dot_i8(const double* a, const std::int8_t* s, std::size_t n);

/// y[i] += alpha * s[i] for an int8 vector s.
void axpy_i8(double* y, double alpha, const std::int8_t* s, std::size_t n);

/// Weighted Hamming distance between two bit-packed codes of `nwords`
/// 64-bit words. `weights` must hold 64*nwords entries; entries past the
/// logical code length must be zero (unused code bits are zero by
/// construction, so they never contribute either way).
double weighted_hamming(const std::uint64_t* a, const std::uint64_t* b,
                        const double* weights, std::size_t nwords);

namespace scalar {
double dot(const double* a, const double* b, std::size_t n);
double squared_l2(const double* a, const double* b, std::size_t n);
double dot_i8(const double* a, const std::int8_t* s, std::size_t n);
void axpy_i8(double* y, double alpha, const std::int8_t* s, std::size_t n);
double weighted_hamming(const std::uint64_t* a, const std::uint64_t* b,
                        const double* weights, std::size_t nwords);
}  // namespace scalar

namespace avx2 {
/// True when this build contains the AVX2 variants. Calling the functions
/// below is only valid when avx2_available() is true.
bool compiled();
double dot(const double* a, const double* b, std::size_t n);
double squared_l2(const double* a, const double* b, std::size_t n);
double dot_i8(const double* a, const std::int8_t* s, std::size_t n);
void axpy_i8(double* y, double alpha, const std::int8_t* s, std::size_t n);
double weighted_hamming(const std::uint64_t* a, const std::uint64_t* b,
                        const double* weights, std::size_t nwords);
}  // namespace avx2

}  // namespace cghash::kernels
