#include "mfvdm/fft.hpp"

#include <fftw3.h>

#include <map>
#include <mutex>
#include <tuple>
#include <vector>

namespace mfvdm::fft {
namespace {

// FFTW planning is not thread-safe; execution with the new-array interface is.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

fftw_plan plan_for(int rank, int n, int sign) {
  static std::map<std::tuple<int, int, int>, fftw_plan> cache;
  std::lock_guard lock(planner_mutex());
  auto key = std::make_tuple(rank, n, sign);
  if (auto it = cache.find(key); it != cache.end()) return it->second;
  const std::size_t count = rank == 1 ? static_cast<std::size_t>(n) : static_cast<std::size_t>(n) * n;
  std::vector<fftw_complex> a(count), b(count);
  fftw_plan p = rank == 1
                    ? fftw_plan_dft_1d(n, a.data(), b.data(), sign, FFTW_ESTIMATE | FFTW_UNALIGNED)
                    : fftw_plan_dft_2d(n, n, a.data(), b.data(), sign, FFTW_ESTIMATE | FFTW_UNALIGNED);
  cache.emplace(key, p);
  return p;
}

fftw_complex* as_fftw(Complex* p) { return reinterpret_cast<fftw_complex*>(p); }

// Unshifted array index of centred offset d in [-c, c] for odd n.
int wrap_index(int d, int n) { return d < 0 ? d + n : d; }

}  // namespace

void dft(std::span<const Complex> in, std::span<Complex> out, bool forward) {
  if (in.size() != out.size()) throw Error(ErrorCode::kDimensionMismatch, "dft: size mismatch");
  const int n = static_cast<int>(in.size());
  std::vector<Complex> src(in.begin(), in.end());
  fftw_execute_dft(plan_for(1, n, forward ? FFTW_FORWARD : FFTW_BACKWARD), as_fftw(src.data()),
                   as_fftw(out.data()));
}

FourierGrid forward2(const Image& image) {
  const int n = static_cast<int>(image.rows());
  if (image.cols() != n || n % 2 == 0)
    throw Error(ErrorCode::kDimensionMismatch, "forward2: image must be square with odd side");
  const int c = n / 2;
  std::vector<Complex> buf(static_cast<std::size_t>(n) * n), out(buf.size());
  for (int r = 0; r < n; ++r)
    for (int col = 0; col < n; ++col)
      buf[wrap_index(r - c, n) * n + wrap_index(col - c, n)] = image(r, col);
  fftw_execute_dft(plan_for(2, n, FFTW_FORWARD), as_fftw(buf.data()), as_fftw(out.data()));
  FourierGrid grid(n, n);
  for (int r = 0; r < n; ++r)
    for (int col = 0; col < n; ++col) grid(r, col) = out[wrap_index(r - c, n) * n + wrap_index(col - c, n)];
  return grid;
}

FourierGrid inverse2_complex(const FourierGrid& grid) {
  const int n = static_cast<int>(grid.rows());
  if (grid.cols() != n || n % 2 == 0)
    throw Error(ErrorCode::kDimensionMismatch, "inverse2: grid must be square with odd side");
  const int c = n / 2;
  std::vector<Complex> buf(static_cast<std::size_t>(n) * n), out(buf.size());
  for (int r = 0; r < n; ++r)
    for (int col = 0; col < n; ++col) buf[wrap_index(r - c, n) * n + wrap_index(col - c, n)] = grid(r, col);
  fftw_execute_dft(plan_for(2, n, FFTW_BACKWARD), as_fftw(buf.data()), as_fftw(out.data()));
  const double scale = 1.0 / (static_cast<double>(n) * n);
  FourierGrid result(n, n);
  for (int r = 0; r < n; ++r)
    for (int col = 0; col < n; ++col)
      result(r, col) = out[wrap_index(r - c, n) * n + wrap_index(col - c, n)] * scale;
  return result;
}

Image inverse2(const FourierGrid& grid) { return inverse2_complex(grid).real(); }

}  // namespace mfvdm::fft
