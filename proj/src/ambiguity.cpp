#include "oddm/ambiguity.hpp"

#include <cmath>
#include <fstream>
#include <numbers>

namespace oddm {
namespace {

constexpr double kPi = std::numbers::pi;

// A(tau, nu) for an integer-sample shift of gamma
cd ambiguity_at_shift(const SampledSignal& g, const SampledSignal& gamma,
                      std::int64_t shift, double tau, double nu) {
    const double rate = g.rate;
    const std::int64_t sg = g.start_index();
    const std::int64_t sx = gamma.start_index() + shift;
    const std::int64_t lo = std::max(sg, sx);
    const std::int64_t hi = std::min<std::int64_t>(sg + g.size(), sx + gamma.size());
    cd acc{0.0, 0.0};
    for (std::int64_t i = lo; i < hi; ++i) {
        const double t_minus_tau = static_cast<double>(i) / rate - tau;
        const double ph = -2.0 * kPi * nu * t_minus_tau;
        acc += g.samples[static_cast<std::size_t>(i - sg)] *
               std::conj(gamma.samples[static_cast<std::size_t>(i - sx)]) *
               cd{std::cos(ph), std::sin(ph)};
    }
    return acc / rate;
}

}  // namespace

cd cross_ambiguity(const SampledSignal& g, const SampledSignal& gamma,
                   double tau, double nu) {
    if (std::abs(g.rate - gamma.rate) > 1e-9 * g.rate)
        throw std::invalid_argument("cross_ambiguity: sample rates differ");
    const double shift = tau * g.rate;
    const auto rounded = std::llround(shift);
    if (std::abs(shift - static_cast<double>(rounded)) < 1e-6)
        return ambiguity_at_shift(g, gamma, rounded, tau, nu);
    // band-limited interpolation; the result carries the full shift in its t0
    const SampledSignal shifted = fractional_delay(gamma, shift);
    return ambiguity_at_shift(g, shifted, 0, tau, nu);
}

cd AmbiguityGridReport::at(int m, int n) const {
    const int M = grid.M, N = grid.N;
    if (std::abs(m) > M - 1 || std::abs(n) > N - 1)
        throw std::out_of_range("AmbiguityGridReport::at");
    return values[static_cast<std::size_t>(m + M - 1) * (2 * N - 1) +
                  static_cast<std::size_t>(n + N - 1)];
}

AmbiguityGridReport orthogonality_grid(const SampledSignal& g, const SampledSignal& gamma,
                                       const GridParams& grid) {
    grid.validate();
    AmbiguityGridReport r;
    r.grid = grid;
    const int M = grid.M, N = grid.N;
    r.values.resize(static_cast<std::size_t>(2 * M - 1) * (2 * N - 1));
    const double dres = grid.delay_res();
    const double fres = grid.doppler_res();
    double worst = 0.0;
    for (int m = -(M - 1); m <= M - 1; ++m) {
        for (int n = -(N - 1); n <= N - 1; ++n) {
            const cd v = cross_ambiguity(g, gamma, m * dres, n * fres);
            r.values[static_cast<std::size_t>(m + M - 1) * (2 * N - 1) +
                     static_cast<std::size_t>(n + N - 1)] = v;
            if (m != 0 || n != 0) worst = std::max(worst, std::abs(v));
        }
    }
    r.max_offorigin = worst;
    return r;
}

void write_ambiguity_csv(const AmbiguityGridReport& r, const std::string& path) {
    std::ofstream f(path);
    if (!f) throw std::runtime_error("cannot open " + path);
    f << "m,n,abs,re,im\n";
    f.precision(17);
    const int M = r.grid.M, N = r.grid.N;
    for (int m = -(M - 1); m <= M - 1; ++m)
        for (int n = -(N - 1); n <= N - 1; ++n) {
            const cd v = r.at(m, n);
            f << m << ',' << n << ',' << std::abs(v) << ',' << v.real() << ',' << v.imag() << '\n';
        }
}

SidelobeMetrics sidelobe_metrics(const SampledSignal& g, const GridParams& grid,
                                 int L, int K) {
    grid.validate();
    if (L < 1 || L > grid.M) throw std::invalid_argument("sidelobe_metrics: L out of range");
    if (K < 0 || K > grid.N - 1) throw std::invalid_argument("sidelobe_metrics: K out of range");
    const double W = grid.bandwidth();
    const double T = grid.frame_duration();
    const cd a00 = cross_ambiguity(g, g, 0.0, 0.0);
    if (std::abs(a00) < 1e-15)
        throw std::invalid_argument("sidelobe_metrics: zero signal (|A(0,0)| = 0)");
    const double denom = std::norm(a00);

    SidelobeMetrics out;
    for (int m = 0; m <= L - 1; ++m)
        for (int n = -K; n <= K; ++n) {
            if (m == 0 && n == 0) continue;
            out.sisl += std::norm(cross_ambiguity(g, g, m / W, n / T)) / denom;
        }

    // midpoint rule, 4x4 points per grid cell, skipping the origin cell
    const int sub = 4;
    double integral = 0.0;
    double area = 0.0;
    const double dtau = 1.0 / W / sub;
    const double dnu = 2.0 * K / T / (sub * std::max(1, 2 * K));
    const double nu_lo = -static_cast<double>(K) / T;
    const int nu_cells = std::max(1, 2 * K) * sub;
    for (int i = 0; i < L * sub; ++i) {
        const double tau = (i + 0.5) * dtau;
        for (int j = 0; j < nu_cells; ++j) {
            const double nu = K == 0 ? 0.0 : nu_lo + (j + 0.5) * dnu;
            if (std::abs(tau) < 0.5 / W && std::abs(nu) < 0.5 / T) continue;  // main-lobe cell
            const double w = (K == 0 ? 1.0 / T : dnu) * dtau;
            integral += std::norm(cross_ambiguity(g, g, tau, nu)) * w;
            area += w;
        }
    }
    out.isl = integral / (area * denom);
    return out;
}

}  // namespace oddm
