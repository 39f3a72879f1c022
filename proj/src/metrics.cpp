#include "oddm/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <random>

#include "oddm/fft.hpp"

namespace oddm {
namespace {

constexpr double kPi = std::numbers::pi;

std::vector<double> make_window(const std::string& name, int n) {
    std::vector<double> w(static_cast<std::size_t>(n), 1.0);
    if (name == "rect") return w;
    for (int i = 0; i < n; ++i) {
        const double x = 2.0 * kPi * i / (n - 1);
        if (name == "hann") w[static_cast<std::size_t>(i)] = 0.5 * (1.0 - std::cos(x));
        else if (name == "hamming") w[static_cast<std::size_t>(i)] = 0.54 - 0.46 * std::cos(x);
        else throw std::invalid_argument("welch_psd: unknown window " + name);
    }
    return w;
}

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ull;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
    return x ^ (x >> 31);
}

}  // namespace

Spectrum welch_psd(const SampledSignal& x, int seg_len, double overlap,
                   const std::string& window) {
    if (seg_len < 2 || seg_len > static_cast<int>(x.size()))
        throw std::invalid_argument("welch_psd: seg_len out of range");
    if (overlap < 0.0 || overlap > 0.9)
        throw std::invalid_argument("welch_psd: overlap must lie in [0, 0.9]");
    const std::vector<double> w = make_window(window, seg_len);
    double wpow = 0.0;
    for (double v : w) wpow += v * v;

    const int hop = std::max(1, static_cast<int>(std::lround(seg_len * (1.0 - overlap))));
    std::vector<double> acc(static_cast<std::size_t>(seg_len), 0.0);
    int count = 0;
    std::vector<cd> buf(static_cast<std::size_t>(seg_len));
    for (std::size_t start = 0; start + static_cast<std::size_t>(seg_len) <= x.size();
         start += static_cast<std::size_t>(hop)) {
        for (int i = 0; i < seg_len; ++i)
            buf[static_cast<std::size_t>(i)] = x.samples[start + static_cast<std::size_t>(i)] *
                                               w[static_cast<std::size_t>(i)];
        fft_inplace(buf);
        for (int i = 0; i < seg_len; ++i)
            acc[static_cast<std::size_t>(i)] += std::norm(buf[static_cast<std::size_t>(i)]);
        ++count;
    }
    // periodogram normalization: integral of the PSD over frequency equals
    // the mean signal power (0 dB total for a unit-power signal)
    const double df = x.rate / seg_len;
    const double norm = 1.0 / (static_cast<double>(count) * wpow * x.rate);

    Spectrum s;
    s.freqs.resize(static_cast<std::size_t>(seg_len));
    s.psd_db.resize(static_cast<std::size_t>(seg_len));
    for (int i = 0; i < seg_len; ++i) {  // fftshift to ascending frequency
        const int k = i - seg_len / 2;
        const int bin = (k % seg_len + seg_len) % seg_len;
        s.freqs[static_cast<std::size_t>(i)] = k * df;
        const double p = acc[static_cast<std::size_t>(bin)] * norm;
        s.psd_db[static_cast<std::size_t>(i)] = 10.0 * std::log10(std::max(p, 1e-300));
    }
    return s;
}

void write_psd_csv(const Spectrum& s, const std::string& path) {
    std::ofstream f(path);
    if (!f) throw std::runtime_error("cannot open " + path);
    f << "freq_hz,psd_db\n";
    f.precision(17);
    for (std::size_t i = 0; i < s.freqs.size(); ++i)
        f << s.freqs[i] << ',' << s.psd_db[i] << '\n';
}

double nmse_db(const SampledSignal& x_hat, const SampledSignal& x) {
    if (std::abs(x_hat.rate - x.rate) > 1e-9 * x.rate)
        throw std::invalid_argument("nmse: sample rates differ");
    const double ex = x.energy();
    if (ex <= 0.0) throw std::invalid_argument("nmse: zero-energy reference");
    const std::int64_t s1 = x_hat.start_index();
    const std::int64_t s2 = x.start_index();
    const std::int64_t lo = std::min(s1, s2);
    const std::int64_t hi = std::max<std::int64_t>(s1 + x_hat.size(), s2 + x.size());
    double err = 0.0;
    for (std::int64_t i = lo; i < hi; ++i) {
        cd a{0.0, 0.0}, b{0.0, 0.0};
        if (i >= s1 && i < s1 + static_cast<std::int64_t>(x_hat.size()))
            a = x_hat.samples[static_cast<std::size_t>(i - s1)];
        if (i >= s2 && i < s2 + static_cast<std::int64_t>(x.size()))
            b = x.samples[static_cast<std::size_t>(i - s2)];
        err += std::norm(a - b);
    }
    err /= x.rate;
    const double v = 10.0 * std::log10(std::max(err / ex, 1e-30));
    return std::max(v, -300.0);
}

EffScheme eff_scheme_from_string(const std::string& s) {
    if (s == "tdm") return EffScheme::Tdm;
    if (s == "fdm" || s == "ofdm-fine") return EffScheme::Fdm;
    if (s == "cp-ofdm") return EffScheme::CpOfdm;
    if (s == "oddm") return EffScheme::Oddm;
    if (s == "cp-oddm") return EffScheme::CpOddm;
    throw std::invalid_argument("unknown efficiency scheme: " + s);
}

std::string to_string(EffScheme s) {
    switch (s) {
        case EffScheme::Tdm: return "tdm";
        case EffScheme::Fdm: return "fdm";
        case EffScheme::CpOfdm: return "cp-ofdm";
        case EffScheme::Oddm: return "oddm";
        case EffScheme::CpOddm: return "cp-oddm";
    }
    return "?";
}

double efficiency(const EfficiencyParams& p) {
    if (p.M < 1 || p.N < 1) throw std::invalid_argument("efficiency: M, N must be positive");
    const double MN = static_cast<double>(p.M) * p.N;
    auto need = [&](const auto& field, const char* name) -> decltype(*field) {
        if (!field) throw std::invalid_argument(std::string("efficiency: missing ") + name +
                                                " for scheme " + to_string(p.scheme));
        return *field;
    };
    auto reject = [&](bool present, const char* name) {
        if (present) throw std::invalid_argument(std::string("efficiency: ") + name +
                                                 " is not a parameter of scheme " +
                                                 to_string(p.scheme));
    };
    switch (p.scheme) {
        case EffScheme::Tdm: {
            reject(p.L.has_value(), "L");
            reject(p.K_lobes.has_value(), "K_lobes");
            reject(p.D.has_value(), "D");
            const double rho = need(p.rho, "rho");
            const int Q = need(p.Q, "Q");
            if (rho < 0.0 || rho > 1.0) throw std::invalid_argument("efficiency: rho out of range");
            return 1.0 / ((1.0 + rho) * (1.0 + (2.0 * Q - 1.0) / MN));
        }
        case EffScheme::Fdm: {
            reject(p.rho.has_value(), "rho");
            reject(p.Q.has_value(), "Q");
            reject(p.L.has_value(), "L");
            reject(p.D.has_value(), "D");
            const int K = need(p.K_lobes, "K_lobes");
            return 1.0 / (1.0 + (2.0 * K - 1.0) / MN);
        }
        case EffScheme::CpOfdm: {
            reject(p.rho.has_value(), "rho");
            reject(p.Q.has_value(), "Q");
            reject(p.D.has_value(), "D");
            const int K = need(p.K_lobes, "K_lobes");
            const int L = need(p.L, "L");
            return 1.0 / ((1.0 + (2.0 * K - 1.0) / p.M) * (1.0 + static_cast<double>(L) / p.M));
        }
        case EffScheme::Oddm: {
            reject(p.K_lobes.has_value(), "K_lobes");
            const double rho = need(p.rho, "rho");
            const int Q = need(p.Q, "Q");
            const int L = need(p.L, "L");
            const int D = need(p.D, "D");
            return 1.0 / ((1.0 + rho + (p.N - 1.0) / MN) *
                          (1.0 + (2.0 * D * p.M + L + 2.0 * Q - 1.0) / MN));
        }
        case EffScheme::CpOddm: {
            reject(p.K_lobes.has_value(), "K_lobes");
            reject(p.D.has_value(), "D");
            const double rho = need(p.rho, "rho");
            const int Q = need(p.Q, "Q");
            const int L = need(p.L, "L");
            return 1.0 / ((1.0 + rho + (p.N - 1.0) / MN) * (1.0 + (L + 2.0 * Q - 1.0) / MN));
        }
    }
    throw std::invalid_argument("efficiency: unknown scheme");
}

double qam4_awgn_ber(double snr_db) {
    const double g = std::pow(10.0, snr_db / 10.0);  // Es/N0
    return 0.5 * std::erfc(std::sqrt(g / 2.0));      // Q(sqrt(g))
}

std::vector<BerRow> ber_harness(const BerConfig& cfg) {
    cfg.grid.validate();
    cfg.rrc.validate();
    if (cfg.frames < 1) throw std::invalid_argument("ber_harness: frames must be >= 1");
    if (cfg.snr_db.empty()) throw std::invalid_argument("ber_harness: empty SNR list");
    const Constellation cst = make_constellation(cfg.constellation);
    const int bps = cst.bits_per_symbol();
    const Ddop pulse = make_ddop(cfg.grid, cfg.rrc, cfg.extension);
    const double rate = pulse.subpulse.rate;
    const std::size_t dim = static_cast<std::size_t>(cfg.grid.M) * cfg.grid.N;

    // frame CP covering the worst-case channel delay spread
    const double cp = (cfg.channel == BerConfig::ChannelKind::Identity)
                          ? 0.0
                          : cfg.grid.delay_res() * cfg.grid.M;  // one T0
    FrameConfig fc;
    fc.cp = cp;
    fc.scheme = cfg.scheme;

    std::vector<BerRow> rows;
    for (double snr : cfg.snr_db) {
        const double gamma = std::pow(10.0, snr / 10.0);
        BerRow row;
        row.snr_db = snr;
        for (int f = 0; f < cfg.frames; ++f) {
            const std::uint64_t fseed = splitmix64(cfg.seed ^ (0x1234567ull + 0x9e3779b9ull * f) ^
                                                   std::hash<double>{}(snr));
            // channel for this frame
            EsddChannel chan;
            chan.grid = cfg.grid;
            switch (cfg.channel) {
                case BerConfig::ChannelKind::Identity:
                    chan.paths = {{0, 0, cd{1.0, 0.0}}};
                    break;
                case BerConfig::ChannelKind::Explicit:
                    chan.paths = cfg.explicit_paths;
                    break;
                case BerConfig::ChannelKind::Eva: {
                    auto [off, on] = make_esdd(eva_profile(), cfg.grid, cfg.speed_kmh,
                                               cfg.fc_hz, splitmix64(fseed ^ 0xabcdefull));
                    (void)off;
                    chan = on;
                    break;
                }
            }
            chan.validate();

            DdFrame frame = random_frame(cfg.grid, cst, splitmix64(fseed ^ 0x77ull));
            frame.constellation = cst.label;

            SampledSignal x;
            if (cfg.scheme == Scheme::OddmExact) x = modulate_oddm_exact(frame, pulse, fc);
            else if (cfg.scheme == Scheme::OddmApproxA)
                x = modulate_oddm_approx(frame, cfg.rrc, ApproxVariant::A, fc);
            else if (cfg.scheme == Scheme::OddmApproxB)
                x = modulate_oddm_approx(frame, cfg.rrc, ApproxVariant::B, fc);
            else throw std::invalid_argument("ber_harness: unsupported scheme");

            SampledSignal y = apply_ltv(x, to_offgrid(chan));
            // snr is the post-demodulation symbol SNR Es/N0. The matched
            // filter sees noise variance sigma_s^2/rate per DD cell (unit-
            // energy receive pulse), so sigma_s^2 = rate/gamma; translate to
            // the waveform-level SNR target of the AWGN generator.
            const double p_sig = y.power();
            const double p_noise = rate / gamma;
            const double snr_wave_db = 10.0 * std::log10(p_sig / p_noise);
            y = add_awgn(y, snr_wave_db, splitmix64(fseed ^ 0xbeefull));

            const std::vector<cd> Y = demodulate(y, pulse, cfg.grid, cp);
            const DdChannelMatrix H = build_H(chan);
            DetectionResult det;
            try {
                det = detect(Y, H, cst, 1.0 / gamma, cfg.detector, cfg.mp);
            } catch (const std::exception&) {
                row.erased_frames += 1;
                row.bits += static_cast<std::int64_t>(dim) * bps;
                row.bit_errors += static_cast<std::int64_t>(dim) * bps / 2;  // erased: half wrong
                continue;
            }
            if (!det.converged) row.erased_frames += 1;  // logged, decisions still counted

            for (std::size_t c = 0; c < dim; ++c) {
                const int tx = cst.slice(frame.symbols[c]);  // exact point -> index
                const int rx = det.indices[c];
                for (int b = 0; b < bps; ++b)
                    if (((tx ^ rx) >> b) & 1) row.bit_errors += 1;
                row.bits += bps;
            }
            row.frames += 1;
        }
        row.ber = row.bits > 0 ? static_cast<double>(row.bit_errors) / static_cast<double>(row.bits) : 0.0;
        rows.push_back(row);
    }
    return rows;
}

void write_ber_csv(const std::vector<BerRow>& rows, const std::string& path) {
    std::ofstream f(path);
    if (!f) throw std::runtime_error("cannot open " + path);
    f << "snr_db,frames,bits,bit_errors,ber\n";
    f.precision(12);
    for (const BerRow& r : rows)
        f << r.snr_db << ',' << r.frames << ',' << r.bits << ',' << r.bit_errors << ',' << r.ber << '\n';
}

}  // namespace oddm
