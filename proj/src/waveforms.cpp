#include "oddm/waveforms.hpp"

#include <cmath>
#include <numbers>
#include <random>

#include "oddm/fft.hpp"

namespace oddm {
namespace {

constexpr double kPi = std::numbers::pi;

int centered_subcarrier(int n, int N) { return (n < (N + 1) / 2) ? n : n - N; }

std::int64_t round_to_samples(double seconds, double rate, const char* what) {
    const double x = seconds * rate;
    const auto r = std::llround(x);
    if (std::abs(x - static_cast<double>(r)) > 1e-6)
        throw std::invalid_argument(std::string(what) + ": duration is not a sample multiple");
    if (r < 0) throw std::invalid_argument(std::string(what) + ": negative duration");
    return r;
}

}  // namespace

DdFrame random_frame(const GridParams& grid, const Constellation& c, std::uint64_t seed) {
    grid.validate();
    DdFrame f;
    f.grid = grid;
    f.constellation = c.label;
    f.symbols.resize(static_cast<std::size_t>(grid.M) * grid.N);
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<int> pick(0, static_cast<int>(c.points.size()) - 1);
    for (cd& v : f.symbols) v = c.points[static_cast<std::size_t>(pick(rng))];
    return f;
}

Scheme scheme_from_string(const std::string& s) {
    if (s == "oddm-exact") return Scheme::OddmExact;
    if (s == "oddm-approx-a") return Scheme::OddmApproxA;
    if (s == "oddm-approx-b") return Scheme::OddmApproxB;
    if (s == "otfs") return Scheme::Otfs;
    if (s == "cp-ofdm") return Scheme::CpOfdm;
    throw std::invalid_argument("unknown scheme: " + s);
}

std::string to_string(Scheme s) {
    switch (s) {
        case Scheme::OddmExact: return "oddm-exact";
        case Scheme::OddmApproxA: return "oddm-approx-a";
        case Scheme::OddmApproxB: return "oddm-approx-b";
        case Scheme::Otfs: return "otfs";
        case Scheme::CpOfdm: return "cp-ofdm";
    }
    return "?";
}

SampledSignal modulate_oddm_exact(const DdFrame& frame, const Ddop& pulse,
                                  const FrameConfig& cfg) {
    const GridParams& g = frame.grid;
    if (g.M != pulse.grid.M || g.N != pulse.grid.N ||
        std::abs(g.T0 - pulse.grid.T0) > 1e-12 * g.T0)
        throw std::invalid_argument("modulate_oddm_exact: pulse grid != frame grid");
    const int M = g.M, N = g.N;
    const int k = pulse.rrc.oversample;
    const double rate = pulse.subpulse.rate;
    const std::int64_t spd = static_cast<std::int64_t>(k) * M;  // samples per T0

    // cp/cs map to extra cyclic subpulses on every train
    const int cp_ext = static_cast<int>(std::ceil(cfg.cp / g.T0 - 1e-12));
    const int cs_ext = static_cast<int>(std::ceil(cfg.cs / g.T0 - 1e-12));
    const int n_lo = -(pulse.D + cp_ext);
    const int n_hi = N - 1 + pulse.D + cs_ext;

    const std::int64_t La = static_cast<std::int64_t>(pulse.subpulse.size());
    const std::int64_t half = static_cast<std::int64_t>(pulse.rrc.Q) * k;
    const std::int64_t train_len = static_cast<std::int64_t>(n_hi - n_lo) * spd + La;
    const std::int64_t train_start = static_cast<std::int64_t>(n_lo) * spd - half;

    std::vector<cd> train(static_cast<std::size_t>(train_len), cd{0.0, 0.0});
    for (int n = n_lo; n <= n_hi; ++n)
        for (std::int64_t i = 0; i < La; ++i)
            train[static_cast<std::size_t>((n - n_lo) * spd + i)] +=
                pulse.subpulse.samples[static_cast<std::size_t>(i)];

    // carriers are periodic with NT0 = G samples; one IFFT per symbol row
    const std::size_t G = static_cast<std::size_t>(N) * M * k;
    SampledSignal x;
    x.rate = rate;
    x.t0 = static_cast<double>(train_start) / rate;
    x.samples.assign(static_cast<std::size_t>((M - 1) * static_cast<std::int64_t>(k) + train_len),
                     cd{0.0, 0.0});

    std::vector<cd> spec(G);
    for (int m = 0; m < M; ++m) {
        std::fill(spec.begin(), spec.end(), cd{0.0, 0.0});
        for (int n = 0; n < N; ++n) {
            const int nc = centered_subcarrier(n, N);
            const std::size_t bin = static_cast<std::size_t>((nc % static_cast<int>(G) +
                                                              static_cast<int>(G)) %
                                                             static_cast<int>(G));
            spec[bin] = frame.at(m, n);
        }
        ifft_inplace(spec);
        // s_m(tau) on the train's local grid, tau = (train_start + i)/rate
        const std::int64_t base = train_start;
        for (std::int64_t i = 0; i < train_len; ++i) {
            const std::int64_t idx
                = ((base + i) % static_cast<std::int64_t>(G) + static_cast<std::int64_t>(G)) %
                  static_cast<std::int64_t>(G);
            x.samples[static_cast<std::size_t>(m * k + i)] +=
                train[static_cast<std::size_t>(i)] *
                spec[static_cast<std::size_t>(idx)] * static_cast<double>(G);
        }
    }
    return x;
}

SampledSignal modulate_oddm_approx(const DdFrame& frame, const RrcParams& rrc,
                                   ApproxVariant variant, const FrameConfig& cfg) {
    const GridParams& g = frame.grid;
    const Ddop pulse = make_ddop(g, rrc, kAutoExtension);
    const int M = g.M, N = g.N;
    const int k = rrc.oversample;
    const double rate = pulse.subpulse.rate;
    const std::int64_t spd = static_cast<std::int64_t>(k) * M;

    const int cp_ext = static_cast<int>(std::ceil(cfg.cp / g.T0 - 1e-12));
    const int cs_ext = static_cast<int>(std::ceil(cfg.cs / g.T0 - 1e-12));
    const int n_lo = -(pulse.D + cp_ext);
    const int n_hi = N - 1 + pulse.D + cs_ext;

    const std::int64_t La = static_cast<std::int64_t>(pulse.subpulse.size());
    const std::int64_t half = static_cast<std::int64_t>(rrc.Q) * k;
    const std::int64_t train_len = static_cast<std::int64_t>(n_hi - n_lo) * spd + La;
    const std::int64_t start = static_cast<std::int64_t>(n_lo) * spd - half;

    SampledSignal x;
    x.rate = rate;
    x.t0 = static_cast<double>(start) / rate;
    x.samples.assign(static_cast<std::size_t>((M - 1) * static_cast<std::int64_t>(k) + train_len),
                     cd{0.0, 0.0});

    if (variant == ApproxVariant::A) {
        // per delay branch: N-point IDFT, subpulse filter, then time multiplex
        std::vector<cd> row(static_cast<std::size_t>(N));
        for (int m = 0; m < M; ++m) {
            for (int n = 0; n < N; ++n) row[static_cast<std::size_t>(n)] = frame.at(m, n);
            ifft_inplace(row);
            std::vector<cd> branch(static_cast<std::size_t>(train_len), cd{0.0, 0.0});
            for (int j = n_lo; j <= n_hi; ++j) {
                const cd v = row[static_cast<std::size_t>(((j % N) + N) % N)] *
                             static_cast<double>(N);
                const std::int64_t pos = static_cast<std::int64_t>(j - n_lo) * spd;
                for (std::int64_t i = 0; i < La; ++i)
                    branch[static_cast<std::size_t>(pos + i)] +=
                        v * pulse.subpulse.samples[static_cast<std::size_t>(i)];
            }
            for (std::int64_t i = 0; i < train_len; ++i)
                x.samples[static_cast<std::size_t>(m * k + i)] +=
                    branch[static_cast<std::size_t>(i)];
        }
    } else {
        // digital time multiplex at T0/M first, then one wideband filter
        struct Impulse { std::int64_t pos; cd v; };
        std::vector<Impulse> stream;
        stream.reserve(static_cast<std::size_t>(M) * (n_hi - n_lo + 1));
        std::vector<cd> row(static_cast<std::size_t>(N));
        for (int m = 0; m < M; ++m) {
            for (int n = 0; n < N; ++n) row[static_cast<std::size_t>(n)] = frame.at(m, n);
            ifft_inplace(row);
            for (int j = n_lo; j <= n_hi; ++j)
                stream.push_back({m * static_cast<std::int64_t>(k) + static_cast<std::int64_t>(j) * spd,
                                  row[static_cast<std::size_t>(((j % N) + N) % N)] *
                                      static_cast<double>(N)});
        }
        const std::int64_t out_start = start;
        for (const Impulse& imp : stream) {
            const std::int64_t pos = imp.pos - half - out_start;  // first sample of the subpulse
            for (std::int64_t i = 0; i < La; ++i)
                x.samples[static_cast<std::size_t>(pos + i)] +=
                    imp.v * pulse.subpulse.samples[static_cast<std::size_t>(i)];
        }
    }
    return x;
}

std::vector<cd> isfft(const std::vector<cd>& dd, int M, int N) {
    if (dd.size() != static_cast<std::size_t>(M) * N)
        throw std::invalid_argument("isfft: size mismatch");
    // out[n_hat * M + m_hat] = (1/sqrt(MN)) sum_{m,n} X[m,n] e^{j2pi(n_hat n/N - m_hat m/M)}
    std::vector<cd> tmp(dd.size());
    std::vector<cd> col(static_cast<std::size_t>(M));
    for (int n = 0; n < N; ++n) {  // FFT along m for each n
        for (int m = 0; m < M; ++m) col[static_cast<std::size_t>(m)] = dd[static_cast<std::size_t>(m) * N + n];
        fft_inplace(col);
        for (int mh = 0; mh < M; ++mh) tmp[static_cast<std::size_t>(mh) * N + n] = col[static_cast<std::size_t>(mh)];
    }
    std::vector<cd> out(dd.size());
    std::vector<cd> row(static_cast<std::size_t>(N));
    const double s = 1.0 / std::sqrt(static_cast<double>(M) * N);
    for (int mh = 0; mh < M; ++mh) {  // IFFT along n
        for (int n = 0; n < N; ++n) row[static_cast<std::size_t>(n)] = tmp[static_cast<std::size_t>(mh) * N + n];
        ifft_inplace(row);
        for (int nh = 0; nh < N; ++nh)
            out[static_cast<std::size_t>(nh) * M + mh] =
                row[static_cast<std::size_t>(nh)] * static_cast<double>(N) * s;
    }
    return out;
}

SampledSignal modulate_otfs(const DdFrame& frame, const FrameConfig& cfg, int oversample) {
    const GridParams& g = frame.grid;
    const int M = g.M, N = g.N;
    if (oversample < 1) throw std::invalid_argument("modulate_otfs: oversample must be >= 1");
    const std::vector<cd> tf = isfft(frame.symbols, M, N);

    const std::size_t spd = static_cast<std::size_t>(oversample) * M;  // samples per T0
    const double rate = static_cast<double>(spd) / g.T0;
    std::vector<cd> core(static_cast<std::size_t>(N) * spd);
    std::vector<cd> spec(spd);
    for (int nh = 0; nh < N; ++nh) {
        std::fill(spec.begin(), spec.end(), cd{0.0, 0.0});
        for (int mh = -M / 2; mh < M / 2; ++mh) {
            const std::size_t bin = static_cast<std::size_t>((mh % static_cast<int>(spd) +
                                                              static_cast<int>(spd)) %
                                                             static_cast<int>(spd));
            spec[bin] = tf[static_cast<std::size_t>(nh) * M + ((mh % M) + M) % M];
        }
        ifft_inplace(spec);
        // rectangular prototype of unit energy over T0: amplitude 1/sqrt(T0)
        const double amp = static_cast<double>(spd) / std::sqrt(g.T0);
        for (std::size_t i = 0; i < spd; ++i)
            core[static_cast<std::size_t>(nh) * spd + i] = spec[i] * amp;
    }

    const std::int64_t cp_samp = round_to_samples(cfg.cp, rate, "modulate_otfs cp");
    SampledSignal x;
    x.rate = rate;
    x.t0 = -static_cast<double>(cp_samp) / rate;
    x.samples.resize(core.size() + static_cast<std::size_t>(cp_samp));
    for (std::int64_t i = 0; i < cp_samp; ++i)
        x.samples[static_cast<std::size_t>(i)] =
            core[core.size() - static_cast<std::size_t>(cp_samp) + static_cast<std::size_t>(i)];
    std::copy(core.begin(), core.end(), x.samples.begin() + static_cast<std::ptrdiff_t>(cp_samp));
    return x;
}

SampledSignal modulate_cp_ofdm(const std::vector<cd>& symbols, int Mbar, int Nbar,
                               double T0, double cp, int vacant_edges, bool dc_null,
                               int oversample) {
    if (Mbar < 1 || Nbar < 1) throw std::invalid_argument("modulate_cp_ofdm: bad dimensions");
    if (symbols.size() != static_cast<std::size_t>(Mbar) * Nbar)
        throw std::invalid_argument("modulate_cp_ofdm: symbol matrix size mismatch");
    if (vacant_edges < 0) throw std::invalid_argument("modulate_cp_ofdm: vacant_edges < 0");
    const int nfft = Nbar + 2 * vacant_edges + (dc_null ? 1 : 0);
    // loaded indices, symmetric around DC
    std::vector<int> loaded;
    loaded.reserve(static_cast<std::size_t>(Nbar));
    int idx = -((Nbar + (dc_null ? 1 : 0)) / 2);
    while (static_cast<int>(loaded.size()) < Nbar) {
        if (!(dc_null && idx == 0)) loaded.push_back(idx);
        ++idx;
    }
    if (loaded.back() > nfft / 2 || loaded.front() < -(nfft - 1) / 2)
        throw std::invalid_argument("modulate_cp_ofdm: subcarrier budget exceeded");

    const std::size_t spd = static_cast<std::size_t>(oversample) * nfft;
    const double rate = static_cast<double>(spd) / T0;
    const std::int64_t cp_samp = round_to_samples(cp, rate, "modulate_cp_ofdm cp");
    const std::size_t sym_len = spd + static_cast<std::size_t>(cp_samp);

    SampledSignal x;
    x.rate = rate;
    x.t0 = 0.0;
    x.samples.assign(static_cast<std::size_t>(Mbar) * sym_len, cd{0.0, 0.0});
    std::vector<cd> spec(spd);
    const double amp = 1.0 / std::sqrt(T0);  // unit-energy rect over T0
    for (int m = 0; m < Mbar; ++m) {
        std::fill(spec.begin(), spec.end(), cd{0.0, 0.0});
        for (int n = 0; n < Nbar; ++n) {
            const int b = loaded[static_cast<std::size_t>(n)];
            const std::size_t bin = static_cast<std::size_t>((b % static_cast<int>(spd) +
                                                              static_cast<int>(spd)) %
                                                             static_cast<int>(spd));
            spec[bin] = symbols[static_cast<std::size_t>(m) * Nbar + n];
        }
        ifft_inplace(spec);
        cd* dst = x.samples.data() + static_cast<std::ptrdiff_t>(m * sym_len);
        for (std::size_t i = 0; i < spd; ++i)
            dst[cp_samp + static_cast<std::ptrdiff_t>(i)] = spec[i] * static_cast<double>(spd) * amp;
        for (std::int64_t i = 0; i < cp_samp; ++i)
            dst[i] = dst[cp_samp + static_cast<std::ptrdiff_t>(spd) - cp_samp + i];
    }
    return x;
}

std::vector<cd> demodulate_cp_ofdm(const SampledSignal& y, int Mbar, int Nbar,
                                   double T0, double cp, int vacant_edges, bool dc_null,
                                   int oversample) {
    const int nfft = Nbar + 2 * vacant_edges + (dc_null ? 1 : 0);
    const std::size_t spd = static_cast<std::size_t>(oversample) * nfft;
    const double rate = static_cast<double>(spd) / T0;
    if (std::abs(y.rate - rate) > 1e-6 * rate)
        throw std::invalid_argument("demodulate_cp_ofdm: unexpected sample rate");
    const std::int64_t cp_samp = round_to_samples(cp, rate, "demodulate_cp_ofdm cp");
    const std::size_t sym_len = spd + static_cast<std::size_t>(cp_samp);
    const std::int64_t base = -y.start_index();  // index of t = 0 in y.samples

    std::vector<int> loaded;
    int idx = -((Nbar + (dc_null ? 1 : 0)) / 2);
    while (static_cast<int>(loaded.size()) < Nbar) {
        if (!(dc_null && idx == 0)) loaded.push_back(idx);
        ++idx;
    }

    std::vector<cd> out(static_cast<std::size_t>(Mbar) * Nbar);
    std::vector<cd> buf(spd);
    const double amp = std::sqrt(T0) / static_cast<double>(spd);
    for (int m = 0; m < Mbar; ++m) {
        const std::int64_t start = base + static_cast<std::int64_t>(m) * static_cast<std::int64_t>(sym_len) + cp_samp;
        if (start < 0 || start + static_cast<std::int64_t>(spd) > static_cast<std::int64_t>(y.size()))
            throw std::invalid_argument("demodulate_cp_ofdm: signal shorter than frame span");
        std::copy(y.samples.begin() + static_cast<std::ptrdiff_t>(start),
                  y.samples.begin() + static_cast<std::ptrdiff_t>(start + static_cast<std::int64_t>(spd)),
                  buf.begin());
        fft_inplace(buf);
        for (int n = 0; n < Nbar; ++n) {
            const int b = loaded[static_cast<std::size_t>(n)];
            const std::size_t bin = static_cast<std::size_t>((b % static_cast<int>(spd) +
                                                              static_cast<int>(spd)) %
                                                             static_cast<int>(spd));
            out[static_cast<std::size_t>(m) * Nbar + n] = buf[bin] * amp;
        }
    }
    return out;
}

}  // namespace oddm
