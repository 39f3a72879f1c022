#include "oddm/fft.hpp"

#include <fftw3.h>

#include <map>
#include <stdexcept>

namespace oddm {
namespace {

struct PlanPair {
    fftw_plan fwd = nullptr;
    fftw_plan inv = nullptr;
    fftw_complex* buf = nullptr;
    std::size_t n = 0;

    ~PlanPair() {
        if (fwd) fftw_destroy_plan(fwd);
        if (inv) fftw_destroy_plan(inv);
        if (buf) fftw_free(buf);
    }
};

PlanPair& plans_for(std::size_t n) {
    static std::map<std::size_t, PlanPair> cache;
    auto it = cache.find(n);
    if (it != cache.end()) return it->second;
    PlanPair& p = cache[n];
    p.n = n;
    p.buf = static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * n));
    if (!p.buf) throw std::bad_alloc();
    p.fwd = fftw_plan_dft_1d(static_cast<int>(n), p.buf, p.buf, FFTW_FORWARD, FFTW_ESTIMATE);
    p.inv = fftw_plan_dft_1d(static_cast<int>(n), p.buf, p.buf, FFTW_BACKWARD, FFTW_ESTIMATE);
    return p;
}

void run(std::vector<std::complex<double>>& x, bool inverse) {
    if (x.empty()) throw std::invalid_argument("fft: empty input");
    PlanPair& p = plans_for(x.size());
    auto* b = reinterpret_cast<std::complex<double>*>(p.buf);
    std::copy(x.begin(), x.end(), b);
    fftw_execute(inverse ? p.inv : p.fwd);
    std::copy(b, b + x.size(), x.begin());
    if (inverse) {
        const double s = 1.0 / static_cast<double>(x.size());
        for (auto& v : x) v *= s;
    }
}

}  // namespace

void fft_inplace(std::vector<std::complex<double>>& x) { run(x, false); }
void ifft_inplace(std::vector<std::complex<double>>& x) { run(x, true); }

std::vector<std::complex<double>> fft(std::vector<std::complex<double>> x) {
    fft_inplace(x);
    return x;
}

std::vector<std::complex<double>> ifft(std::vector<std::complex<double>> x) {
    ifft_inplace(x);
    return x;
}

}  // namespace oddm
