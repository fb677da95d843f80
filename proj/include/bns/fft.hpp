#pragma once

#include "bns/common.hpp"

namespace bns {

/// In-place complex DFT on an N^n lattice (row-major), unnormalized:
/// sign=-1 computes sum f(x) e^{-2*pi*i k.x/N}, sign=+1 the conjugate sum.
/// Backed by FFTW with a process-wide plan cache; safe to call concurrently.
void fft_inplace(int n, long N, cplx* data, int sign);

}  // namespace bns
