#pragma once

#include <cstddef>
#include <span>

#include "sqzmode/field.hpp"

namespace sqzmode {

enum class FftDirection { forward, inverse };

/// In-place unnormalized 2-D DFT of a row-major ny x nx array. Forward uses
/// exp(-i 2 pi k n / N). Backed by FFTW with estimate-mode plans and aligned
/// scratch buffers, so identical inputs give identical bits. Planning is
/// serialized internally; execution is reentrant.
void fft2d(std::span<Complex> data, std::size_t nx, std::size_t ny, FftDirection direction);

/// Moves the zero-frequency sample from index 0 to index n/2 on both axes.
void fftshift2d(std::span<Complex> data, std::size_t nx, std::size_t ny);
/// Inverse of fftshift2d (differs from it for odd sizes).
void ifftshift2d(std::span<Complex> data, std::size_t nx, std::size_t ny);

/// Signed DFT frequency of bin k for an n-point transform with sample spacing d.
double fft_frequency(std::size_t k, std::size_t n, double d) noexcept;

}  // namespace sqzmode
