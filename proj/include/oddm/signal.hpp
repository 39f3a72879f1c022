#ifndef ODDM_SIGNAL_HPP
#define ODDM_SIGNAL_HPP

#include <complex>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace oddm {

using cd = std::complex<double>;

/// Oversampled complex baseband segment. Sample i sits at t = t0 + i/rate.
/// All library constructors keep t0 on the sample grid (t0*rate integral),
/// so time alignment between signals reduces to integer index arithmetic.
struct SampledSignal {
    std::vector<cd> samples;
    double rate = 0.0;  // samples per second
    double t0 = 0.0;    // start time, seconds

    SampledSignal() = default;
    SampledSignal(std::vector<cd> s, double r, double start)
        : samples(std::move(s)), rate(r), t0(start) {
        if (rate <= 0.0) throw std::invalid_argument("SampledSignal: rate must be > 0");
    }

    std::size_t size() const { return samples.size(); }
    double duration() const { return static_cast<double>(samples.size()) / rate; }

    /// Index of the first sample on the global grid t = i/rate.
    std::int64_t start_index() const;

    /// (1/rate) * sum |x_i|^2
    double energy() const;

    /// Mean |x_i|^2
    double power() const;

    void check_finite(const char* what) const;
};

/// Riemann inner product (1/rate) * sum a_i * conj(b_i) over the overlap of
/// the two signals' spans. Rates must match.
cd inner_product(const SampledSignal& a, const SampledSignal& b);

/// Scale all samples in place.
void scale(SampledSignal& s, double factor);

/// Writes columns (index, t_seconds, re, im).
void write_signal_csv(const SampledSignal& s, const std::string& path);

/// Circularly shift a signal by a fractional number of samples using
/// band-limited (FFT phase ramp) interpolation on a zero-padded grid.
/// Returns a signal with the same rate, t0 shifted by shift_samples/rate.
SampledSignal fractional_delay(const SampledSignal& s, double shift_samples);

}  // namespace oddm

#endif
