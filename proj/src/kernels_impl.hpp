#pragma once

#include "admira/kernels.hpp"

namespace admira::kernels::detail {

const KernelTable& scalar_table();

#if defined(ADMIRA_HAVE_AVX2_KERNELS)
const KernelTable& avx2_table();
#endif

}  // namespace admira::kernels::detail
