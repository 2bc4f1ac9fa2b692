#pragma once

#include "kgprop/types.hpp"

namespace kgprop::fft {

// Unnormalized complex DFTs: forward uses e^{-2πi jn/N}, backward e^{+2πi jn/N}.
// Plans are cached per size; execution is safe from multiple threads.
CVec forward(const CVec& in);
CVec backward(const CVec& in);

void forward_inplace(cplx* data, int n);
void backward_inplace(cplx* data, int n);

}  // namespace kgprop::fft
