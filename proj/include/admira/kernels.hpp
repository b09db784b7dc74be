#pragma once

// Arithmetic inner loops used by the measurement operators, the sparse proxy
// matrix and the Lanczos reorthogonalization. Every kernel has a scalar
// reference implementation; an AVX2+FMA variant is compiled on x86-64 and
// picked at runtime when the CPU supports it.

#include <cstddef>
#include <cstdint>
#include <string_view>

namespace admira::kernels {

struct KernelTable {
  std::string_view name;

  /// sum_i a[i] * b[i]
  double (*dot)(const double* a, const double* b, std::size_t n);

  /// y[i] += alpha * x[i]
  void (*axpy)(double alpha, const double* x, double* y, std::size_t n);

  /// sum_s values[s] * x[index[s]]
  double (*gather_dot)(const double* values, const std::uint32_t* index, const double* x,
                       std::size_t n);

  /// out[s] = sum_l left[rows[s] * rank + l] * right[cols[s] * rank + l]
  ///
  /// `left` is m x rank and `right` is n x rank, both row-major. This samples
  /// the entries of left * right^T at the listed positions.
  void (*sampled_product)(const double* left, const double* right, std::size_t rank,
                          const std::uint32_t* rows, const std::uint32_t* cols, double* out,
                          std::size_t count);
};

const KernelTable& scalar_kernels();

/// nullptr when the AVX2 variant was not compiled or the CPU lacks AVX2/FMA.
const KernelTable* avx2_kernels();

/// The table used by the library. Chosen once: AVX2 when available, unless the
/// environment variable ADMIRA_KERNELS is set to "scalar".
const KernelTable& active();

inline double dot(const double* a, const double* b, std::size_t n) {
  return active().dot(a, b, n);
}

inline void axpy(double alpha, const double* x, double* y, std::size_t n) {
  active().axpy(alpha, x, y, n);
}

inline double gather_dot(const double* values, const std::uint32_t* index, const double* x,
                         std::size_t n) {
  return active().gather_dot(values, index, x, n);
}

inline void sampled_product(const double* left, const double* right, std::size_t rank,
                            const std::uint32_t* rows, const std::uint32_t* cols, double* out,
                            std::size_t count) {
  active().sampled_product(left, right, rank, rows, cols, out, count);
}

}  // namespace admira::kernels
