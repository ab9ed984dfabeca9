#pragma once

#include "mfvdm/common.hpp"

#include <span>

namespace mfvdm::fft {

/// Unnormalised 1D DFT, out[t] = sum_k in[k] exp(sign * 2 pi i k t / N) with
/// sign = -1 for forward and +1 for backward. in and out may alias.
void dft(std::span<const Complex> in, std::span<Complex> out, bool forward);

/// Centred transform of a real L x L image: F(xi) = sum_x I(x) exp(-2 pi i x . xi)
/// with x measured from the image centre and xi on the grid (kx, ky) / L.
FourierGrid forward2(const Image& image);

/// Inverse of forward2 (includes the 1 / L^2 factor). Returns the complex
/// result; callers decide what to do with the imaginary residue.
FourierGrid inverse2_complex(const FourierGrid& grid);

/// Real part of inverse2_complex.
Image inverse2(const FourierGrid& grid);

}  // namespace mfvdm::fft
