#include "oddm/signal.hpp"

#include <cmath>
#include <fstream>
#include <numbers>

#include "oddm/fft.hpp"

namespace oddm {

std::int64_t SampledSignal::start_index() const {
    const double idx = t0 * rate;
    const auto r = std::llround(idx);
    if (std::abs(idx - static_cast<double>(r)) > 1e-6)
        throw std::invalid_argument("SampledSignal: t0 is not on the sample grid");
    return r;
}

double SampledSignal::energy() const {
    double e = 0.0;
    for (const cd& v : samples) e += std::norm(v);
    return e / rate;
}

double SampledSignal::power() const {
    if (samples.empty()) return 0.0;
    double e = 0.0;
    for (const cd& v : samples) e += std::norm(v);
    return e / static_cast<double>(samples.size());
}

void SampledSignal::check_finite(const char* what) const {
    for (const cd& v : samples)
        if (!std::isfinite(v.real()) || !std::isfinite(v.imag()))
            throw std::invalid_argument(std::string(what) + ": non-finite sample");
}

cd inner_product(const SampledSignal& a, const SampledSignal& b) {
    if (std::abs(a.rate - b.rate) > 1e-9 * a.rate)
        throw std::invalid_argument("inner_product: sample rates differ");
    const std::int64_t sa = a.start_index();
    const std::int64_t sb = b.start_index();
    const std::int64_t lo = std::max(sa, sb);
    const std::int64_t hi = std::min<std::int64_t>(sa + a.size(), sb + b.size());
    cd acc{0.0, 0.0};
    for (std::int64_t i = lo; i < hi; ++i)
        acc += a.samples[static_cast<std::size_t>(i - sa)] *
               std::conj(b.samples[static_cast<std::size_t>(i - sb)]);
    return acc / a.rate;
}

void scale(SampledSignal& s, double factor) {
    for (cd& v : s.samples) v *= factor;
}

void write_signal_csv(const SampledSignal& s, const std::string& path) {
    std::ofstream f(path);
    if (!f) throw std::runtime_error("cannot open " + path);
    f << "index,t_seconds,re,im\n";
    f.precision(17);
    for (std::size_t i = 0; i < s.samples.size(); ++i) {
        const double t = s.t0 + static_cast<double>(i) / s.rate;
        f << i << ',' << t << ',' << s.samples[i].real() << ',' << s.samples[i].imag() << '\n';
    }
}

SampledSignal fractional_delay(const SampledSignal& s, double shift_samples) {
    double whole = std::floor(shift_samples);
    double frac = shift_samples - whole;
    if (frac < 1e-9) frac = 0.0;
    if (frac > 1.0 - 1e-9) { frac = 0.0; whole += 1.0; }

    SampledSignal out = s;
    out.t0 = s.t0 + whole / s.rate;
    if (frac == 0.0) return out;

    // delay by the fractional part on the same grid. The content sits in the
    // middle of a padded buffer so the interpolation ringing on both sides is
    // kept at its true position and the shift stays energy-exact.
    std::size_t n = 1;
    while (n < 2 * (s.size() + 4)) n <<= 1;
    const std::size_t lead = (n - s.size()) / 2;
    std::vector<cd> buf(n, cd{0.0, 0.0});
    std::copy(s.samples.begin(), s.samples.end(), buf.begin() + static_cast<std::ptrdiff_t>(lead));
    fft_inplace(buf);
    for (std::size_t k = 0; k < n; ++k) {
        const double fk = (k < n / 2) ? static_cast<double>(k)
                                      : static_cast<double>(k) - static_cast<double>(n);
        const double ph = -2.0 * std::numbers::pi * fk * frac / static_cast<double>(n);
        buf[k] *= cd{std::cos(ph), std::sin(ph)};
    }
    ifft_inplace(buf);
    out.samples = std::move(buf);
    out.t0 -= static_cast<double>(lead) / s.rate;
    return out;
}

}  // namespace oddm
