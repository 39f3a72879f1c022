#ifndef ODDM_FFT_HPP
#define ODDM_FFT_HPP

#include <complex>
#include <vector>

namespace oddm {

// Thin FFTW wrappers, any transform size (mixed radix). Unnormalized forward
// transform sum x[n] e^{-j2pi kn/N}; inverse applies the 1/N factor.
// Plans are cached per size; the library is single-threaded by design
// (callers that want parallel Monte Carlo run independent processes).
void fft_inplace(std::vector<std::complex<double>>& x);
void ifft_inplace(std::vector<std::complex<double>>& x);

std::vector<std::complex<double>> fft(std::vector<std::complex<double>> x);
std::vector<std::complex<double>> ifft(std::vector<std::complex<double>> x);

}  // namespace oddm

#endif
