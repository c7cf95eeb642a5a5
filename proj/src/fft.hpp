#pragma once

#include <complex>
#include <span>
#include <vector>

namespace sgm::detail {

/// Real-to-complex transform of length n, normalized to f_hat(k) = (1/n) sum f_j e^{-ikx_j}.
/// Output has n/2 + 1 entries.
std::vector<std::complex<double>> forward_fft(std::span<const double> samples);

/// Inverse of forward_fft: f_j = sum_k f_hat(k) e^{ikx_j} from the half spectrum.
std::vector<double> inverse_fft(std::span<const std::complex<double>> half, std::size_t n);

}  // namespace sgm::detail
