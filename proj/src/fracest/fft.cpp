#include "fracest/fft.hpp"

#include <fftw3.h>

#include <map>
#include <mutex>
#include <utility>

#include "fracest/error.hpp"

namespace fracest {

namespace {

std::mutex& plan_mutex() {
  static std::mutex m;
  return m;
}

fftw_plan plan_for(int n, bool forward) {
  static std::map<std::pair<int, bool>, fftw_plan> cache;
  std::lock_guard<std::mutex> lock(plan_mutex());
  const auto key = std::make_pair(n, forward);
  auto it = cache.find(key);
  if (it != cache.end()) return it->second;
  std::vector<std::complex<double>> scratch(static_cast<std::size_t>(n));
  auto* buf = reinterpret_cast<fftw_complex*>(scratch.data());
  fftw_plan p = fftw_plan_dft_1d(n, buf, buf, forward ? FFTW_FORWARD : FFTW_BACKWARD,
                                 FFTW_ESTIMATE | FFTW_UNALIGNED);
  if (!p) throw NumericalError("fftw: plan creation failed for size " + std::to_string(n));
  cache.emplace(key, p);
  return p;
}

}  // namespace

void dft(std::vector<std::complex<double>>& data, bool forward) {
  if (data.empty()) return;
  const fftw_plan p = plan_for(static_cast<int>(data.size()), forward);
  auto* buf = reinterpret_cast<fftw_complex*>(data.data());
  fftw_execute_dft(p, buf, buf);
}

}  // namespace fracest
