#include <immintrin.h>

#include "kernels_impl.hpp"

namespace admira::kernels::detail {
namespace {

inline double hsum(__m256d v) {
  __m128d lo = _mm256_castpd256_pd128(v);
  __m128d hi = _mm256_extractf128_pd(v, 1);
  lo = _mm_add_pd(lo, hi);
  __m128d swapped = _mm_unpackhi_pd(lo, lo);
  return _mm_cvtsd_f64(_mm_add_sd(lo, swapped));
}

double dot_avx2(const double* a, const double* b, std::size_t n) {
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
  double sum = hsum(_mm256_add_pd(acc0, acc1));
  for (; i < n; ++i) sum += a[i] * b[i];
  return sum;
}

void axpy_avx2(double alpha, const double* x, double* y, std::size_t n) {
  const __m256d a = _mm256_set1_pd(alpha);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    _mm256_storeu_pd(y + i, _mm256_fmadd_pd(a, _mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i)));
  }
  for (; i < n; ++i) y[i] += alpha * x[i];
}

double gather_dot_avx2(const double* values, const std::uint32_t* index, const double* x,
                       std::size_t n) {
  __m256d acc = _mm256_setzero_pd();
  std::size_t s = 0;
  for (; s + 4 <= n; s += 4) {
    const __m128i idx = _mm_loadu_si128(reinterpret_cast<const __m128i*>(index + s));
    const __m256d gathered = _mm256_i32gather_pd(x, idx, 8);
    acc = _mm256_fmadd_pd(_mm256_loadu_pd(values + s), gathered, acc);
  }
  double sum = hsum(acc);
  for (; s < n; ++s) sum += values[s] * x[index[s]];
  return sum;
}

// Vectorized across four samples at a time; each lane walks its own pair of
// factor rows. Offsets are 64-bit so large m * rank cannot overflow.
void sampled_product_avx2(const double* left, const double* right, std::size_t rank,
                          const std::uint32_t* rows, const std::uint32_t* cols, double* out,
                          std::size_t count) {
  const __m256i stride = _mm256_set1_epi64x(static_cast<long long>(rank));
  std::size_t s = 0;
  for (; s + 4 <= count; s += 4) {
    const __m128i r32 = _mm_loadu_si128(reinterpret_cast<const __m128i*>(rows + s));
    const __m128i c32 = _mm_loadu_si128(reinterpret_cast<const __m128i*>(cols + s));
    __m256i roff = _mm256_mul_epu32(_mm256_cvtepu32_epi64(r32), stride);
    __m256i coff = _mm256_mul_epu32(_mm256_cvtepu32_epi64(c32), stride);
    const __m256i one = _mm256_set1_epi64x(1);
    __m256d acc = _mm256_setzero_pd();
    for (std::size_t k = 0; k < rank; ++k) {
      const __m256d l = _mm256_i64gather_pd(left, roff, 8);
      const __m256d r = _mm256_i64gather_pd(right, coff, 8);
      acc = _mm256_fmadd_pd(l, r, acc);
      roff = _mm256_add_epi64(roff, one);
      coff = _mm256_add_epi64(coff, one);
    }
    _mm256_storeu_pd(out + s, acc);
  }
  for (; s < count; ++s) {
    const double* l = left + static_cast<std::size_t>(rows[s]) * rank;
    const double* r = right + static_cast<std::size_t>(cols[s]) * rank;
    double sum = 0.0;
    for (std::size_t k = 0; k < rank; ++k) sum += l[k] * r[k];
    out[s] = sum;
  }
}

}  // namespace

const KernelTable& avx2_table() {
  static const KernelTable table{"avx2", dot_avx2, axpy_avx2, gather_dot_avx2,
                                 sampled_product_avx2};
  return table;
}

}  // namespace admira::kernels::detail
