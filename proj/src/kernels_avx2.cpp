// AVX2 kernel variants. This translation unit is compiled with
// -mavx2 -mfma; callers must check avx2_available() before dispatching here.

#include "cghash/kernels.hpp"

#include <immintrin.h>

#include <cstring>

namespace cghash::kernels::avx2 {

bool compiled() { return true; }

namespace {

inline double hsum(__m256d v) {
  __m128d lo = _mm256_castpd256_pd128(v);
  __m128d hi = _mm256_extractf128_pd(v, 1);
  lo = _mm_add_pd(lo, hi);
  __m128d shuf = _mm_unpackhi_pd(lo, lo);
  return _mm_cvtsd_f64(_mm_add_sd(lo, shuf));
}

// 4 int8 values -> 4 doubles.
inline __m256d load4_i8(const std::int8_t* s) {
  std::int32_t packed;
  std::memcpy(&packed, s, 4);
  __m128i bytes = _mm_cvtsi32_si128(packed);
  return _mm256_cvtepi32_pd(_mm_cvtepi8_epi32(bytes));
}

// Lane i of entry v is all-ones when bit i of the nibble v is set.
alignas(32) constexpr std::uint64_t kNibbleMask[16][4] = {
#define CGHASH_NM(v)                                                      \
  {((v) & 1) ? ~0ull : 0ull, ((v) & 2) ? ~0ull : 0ull,                    \
   ((v) & 4) ? ~0ull : 0ull, ((v) & 8) ? ~0ull : 0ull}
    CGHASH_NM(0),  CGHASH_NM(1),  CGHASH_NM(2),  CGHASH_NM(3),
    CGHASH_NM(4),  CGHASH_NM(5),  CGHASH_NM(6),  CGHASH_NM(7),
    CGHASH_NM(8),  CGHASH_NM(9),  CGHASH_NM(10), CGHASH_NM(11),
    CGHASH_NM(12), CGHASH_NM(13), CGHASH_NM(14), CGHASH_NM(15),
#undef CGHASH_NM
};

}  // namespace

double dot(const double* a, const double* b, std::size_t n) {
  __m256d acc0 = _mm256_setzero_pd();
  __m256d acc1 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), acc0);
    acc1 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i + 4), _mm256_loadu_pd(b + i + 4), acc1);
  }
  if (i + 4 <= n) {
    acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), acc0);
    i += 4;
  }
  double acc = hsum(_mm256_add_pd(acc0, acc1));
  for (; i < n; ++i) acc += a[i] * b[i];
  return acc;
}

double squared_l2(const double* a, const double* b, std::size_t n) {
  __m256d acc0 = _mm256_setzero_pd();
  __m256d acc1 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    __m256d d0 = _mm256_sub_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i));
    __m256d d1 = _mm256_sub_pd(_mm256_loadu_pd(a + i + 4), _mm256_loadu_pd(b + i + 4));
    acc0 = _mm256_fmadd_pd(d0, d0, acc0);
    acc1 = _mm256_fmadd_pd(d1, d1, acc1);
  }
  if (i + 4 <= n) {
    __m256d d = _mm256_sub_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i));
    acc0 = _mm256_fmadd_pd(d, d, acc0);
    i += 4;
  }
  double acc = hsum(_mm256_add_pd(acc0, acc1));
  for (; i < n; ++i) {
    double d = a[i] - b[i];
    acc += d * d;
  }
  return acc;
}

double dot_i8(const double* a, const std::int8_t* s, std::size_t n) {
  __m256d acc4 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    acc4 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), load4_i8(s + i), acc4);
  }
  double acc = hsum(acc4);
  for (; i < n; ++i) acc += a[i] * static_cast<double>(s[i]);
  return acc;
}

void axpy_i8(double* y, double alpha, const std::int8_t* s, std::size_t n) {
  const __m256d va = _mm256_set1_pd(alpha);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d updated = _mm256_fmadd_pd(va, load4_i8(s + i), _mm256_loadu_pd(y + i));
    _mm256_storeu_pd(y + i, updated);
  }
  for (; i < n; ++i) y[i] += alpha * static_cast<double>(s[i]);
}

double weighted_hamming(const std::uint64_t* a, const std::uint64_t* b,
                        const double* weights, std::size_t nwords) {
  __m256d acc = _mm256_setzero_pd();
  for (std::size_t w = 0; w < nwords; ++w) {
    std::uint64_t x = a[w] ^ b[w];
    if (x == 0) continue;
    const double* wbase = weights + w * 64;
    for (int g = 0; g < 16; ++g) {
      unsigned nib = static_cast<unsigned>((x >> (g * 4)) & 0xF);
      if (nib == 0) continue;
      __m256d mask = _mm256_load_pd(reinterpret_cast<const double*>(kNibbleMask[nib]));
      acc = _mm256_add_pd(acc, _mm256_and_pd(mask, _mm256_loadu_pd(wbase + g * 4)));
    }
  }
  return hsum(acc);
}

}  // namespace cghash::kernels::avx2
