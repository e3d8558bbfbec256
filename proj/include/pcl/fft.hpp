#pragma once

#include <vector>

#include "pcl/ntheory.hpp"

namespace pcl::fft {

// X[j] = sum_k x[k] e(-jk/L)
std::vector<cplx> forward(const std::vector<cplx>& x);
// x[k] = L^{-1} sum_j X[j] e(jk/L)
std::vector<cplx> inverse(const std::vector<cplx>& X);

std::size_t next_pow2(std::size_t n);

}  // namespace pcl::fft
