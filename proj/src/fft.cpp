#include "qou/fft.hpp"

#include <fftw3.h>

#include <cstring>
#include <mutex>

namespace qou {

namespace {
// FFTW plan creation is not thread-safe; execution on distinct buffers is.
std::mutex& plan_mutex() {
  static std::mutex m;
  return m;
}

std::vector<std::complex<double>> run_dft(const std::vector<std::complex<double>>& in, int sign) {
  const std::size_t n = in.size();
  std::vector<std::complex<double>> out(n);
  if (n == 0) return out;
  fftw_plan plan;
  {
    std::lock_guard<std::mutex> lock(plan_mutex());
    plan = fftw_plan_dft_1d(static_cast<int>(n),
                            reinterpret_cast<fftw_complex*>(const_cast<std::complex<double>*>(in.data())),
                            reinterpret_cast<fftw_complex*>(out.data()), sign, FFTW_ESTIMATE);
  }
  fftw_execute(plan);
  {
    std::lock_guard<std::mutex> lock(plan_mutex());
    fftw_destroy_plan(plan);
  }
  return out;
}
}  // namespace

std::vector<std::complex<double>> fft_forward(const std::vector<std::complex<double>>& in) {
  return run_dft(in, FFTW_FORWARD);
}

std::vector<std::complex<double>> fft_inverse(const std::vector<std::complex<double>>& in) {
  auto out = run_dft(in, FFTW_BACKWARD);
  const double scale = out.empty() ? 1.0 : 1.0 / static_cast<double>(out.size());
  for (auto& z : out) z *= scale;
  return out;
}

std::vector<double> convolve(const std::vector<double>& w, const std::vector<double>& x) {
  const std::size_t nw = w.size(), nx = x.size();
  if (nw == 0 || nx == 0) return {};
  const std::size_t ny = nx + nw - 1;

  // Direct sum when small; FFT cost ~ 3 * ny log2 ny complex ops.
  const double direct_cost = static_cast<double>(nw) * static_cast<double>(nx);
  double fft_cost = 3.0 * static_cast<double>(ny);
  for (std::size_t t = ny; t > 1; t >>= 1) fft_cost += 3.0 * static_cast<double>(ny);
  if (direct_cost <= 4.0 * fft_cost) {
    std::vector<double> y(ny, 0.0);
    for (std::size_t j = 0; j < nx; ++j) {
      const double xj = x[j];
      if (xj == 0.0) continue;
      for (std::size_t k = 0; k < nw; ++k) y[j + k] += w[k] * xj;
    }
    return y;
  }

  std::size_t n = 1;
  while (n < ny) n <<= 1;
  std::vector<std::complex<double>> a(n), b(n);
  for (std::size_t i = 0; i < nw; ++i) a[i] = w[i];
  for (std::size_t i = 0; i < nx; ++i) b[i] = x[i];
  auto fa = fft_forward(a);
  auto fb = fft_forward(b);
  for (std::size_t i = 0; i < n; ++i) fa[i] *= fb[i];
  auto fy = fft_inverse(fa);
  std::vector<double> y(ny);
  for (std::size_t i = 0; i < ny; ++i) y[i] = fy[i].real();
  return y;
}

}  // namespace qou
