#pragma once

#include <complex>
#include <vector>

namespace fracest {

/// In-place unnormalized DFT, X_k = sum_j x_j exp(-+2 pi i j k / n).
/// Plans are created once per (size, direction) and shared across threads.
void dft(std::vector<std::complex<double>>& data, bool forward = true);

}  // namespace fracest
