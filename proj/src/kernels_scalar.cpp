#include "kernels_impl.hpp"

namespace admira::kernels::detail {
namespace {

double dot_scalar(const double* a, const double* b, std::size_t n) {
  double sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) sum += a[i] * b[i];
  return sum;
}

void axpy_scalar(double alpha, const double* x, double* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] += alpha * x[i];
}

double gather_dot_scalar(const double* values, const std::uint32_t* index, const double* x,
                         std::size_t n) {
  double sum = 0.0;
  for (std::size_t s = 0; s < n; ++s) sum += values[s] * x[index[s]];
  return sum;
}

void sampled_product_scalar(const double* left, const double* right, std::size_t rank,
                            const std::uint32_t* rows, const std::uint32_t* cols, double* out,
                            std::size_t count) {
  for (std::size_t s = 0; s < count; ++s) {
    const double* l = left + static_cast<std::size_t>(rows[s]) * rank;
    const double* r = right + static_cast<std::size_t>(cols[s]) * rank;
    double sum = 0.0;
    for (std::size_t k = 0; k < rank; ++k) sum += l[k] * r[k];
    out[s] = sum;
  }
}

}  // namespace

const KernelTable& scalar_table() {
  static const KernelTable table{"scalar", dot_scalar, axpy_scalar, gather_dot_scalar,
                                 sampled_product_scalar};
  return table;
}

}  // namespace admira::kernels::detail
