#include "sqzmode/fft.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cstring>
#include <memory>
#include <mutex>
#include <vector>

#include "sqzmode/error.hpp"

namespace sqzmode {
namespace {

// The FFTW planner is not thread-safe.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

struct FftwFree {
  void operator()(fftw_complex* p) const noexcept { fftw_free(p); }
};

void shift_axis(std::span<Complex> data, std::size_t nx, std::size_t ny, std::size_t sx, std::size_t sy) {
  std::vector<Complex> tmp(data.begin(), data.end());
  for (std::size_t j = 0; j < ny; ++j) {
    const std::size_t jj = (j + sy) % ny;
    for (std::size_t i = 0; i < nx; ++i) {
      data[jj * nx + (i + sx) % nx] = tmp[j * nx + i];
    }
  }
}

}  // namespace

void fft2d(std::span<Complex> data, std::size_t nx, std::size_t ny, FftDirection direction) {
  if (data.size() != nx * ny || nx == 0 || ny == 0) {
    throw InvalidArgument("fft2d: buffer size does not match nx*ny");
  }
  const std::size_t n = nx * ny;
  std::unique_ptr<fftw_complex, FftwFree> buffer(fftw_alloc_complex(n));
  if (!buffer) throw Error("fft2d: allocation failed");

  fftw_plan plan = nullptr;
  {
    std::lock_guard lock(planner_mutex());
    plan = fftw_plan_dft_2d(static_cast<int>(ny), static_cast<int>(nx), buffer.get(), buffer.get(),
                            direction == FftDirection::forward ? FFTW_FORWARD : FFTW_BACKWARD,
                            FFTW_ESTIMATE);
  }
  if (plan == nullptr) throw Error("fft2d: FFTW could not create a plan");

  static_assert(sizeof(Complex) == sizeof(fftw_complex));
  std::memcpy(buffer.get(), data.data(), n * sizeof(fftw_complex));
  fftw_execute(plan);
  std::memcpy(static_cast<void*>(data.data()), buffer.get(), n * sizeof(fftw_complex));

  std::lock_guard lock(planner_mutex());
  fftw_destroy_plan(plan);
}

void fftshift2d(std::span<Complex> data, std::size_t nx, std::size_t ny) {
  shift_axis(data, nx, ny, nx / 2, ny / 2);
}

void ifftshift2d(std::span<Complex> data, std::size_t nx, std::size_t ny) {
  shift_axis(data, nx, ny, nx - nx / 2, ny - ny / 2);
}

double fft_frequency(std::size_t k, std::size_t n, double d) noexcept {
  const auto kk = static_cast<long long>(k);
  const auto nn = static_cast<long long>(n);
  const long long signed_k = kk < (nn + 1) / 2 ? kk : kk - nn;
  return static_cast<double>(signed_k) / (static_cast<double>(n) * d);
}

}  // namespace sqzmode
