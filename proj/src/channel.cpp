#include "oddm/channel.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <random>
#include <set>

namespace oddm {
namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kSpeedOfLight = 299792458.0;

// nearest integer, ties toward zero
int round_ties_to_zero(double x) {
    const double r = std::round(x);
    if (std::abs(std::abs(x - std::trunc(x)) - 0.5) < 1e-12) return static_cast<int>(std::trunc(x));
    return static_cast<int>(r);
}

}  // namespace

void OffGridChannel::validate() const {
    if (paths.empty()) throw std::invalid_argument("OffGridChannel: empty path list");
    for (const Path& p : paths) {
        if (p.tau < 0.0) throw std::invalid_argument("OffGridChannel: negative delay");
        if (!std::isfinite(p.gain.real()) || !std::isfinite(p.gain.imag()) ||
            !std::isfinite(p.tau) || !std::isfinite(p.nu))
            throw std::invalid_argument("OffGridChannel: non-finite path");
    }
}

double OffGridChannel::max_delay() const {
    double m = 0.0;
    for (const Path& p : paths) m = std::max(m, p.tau);
    return m;
}

double OffGridChannel::max_doppler() const {
    double m = 0.0;
    for (const Path& p : paths) m = std::max(m, std::abs(p.nu));
    return m;
}

int EsddChannel::L() const {
    int lmax = 0;
    for (const Path& p : paths) lmax = std::max(lmax, p.l);
    return lmax + 1;
}

int EsddChannel::K() const {
    int k = 0;
    for (const Path& p : paths) k = std::max(k, std::abs(p.k));
    return k;
}

void EsddChannel::validate() const {
    grid.validate();
    if (paths.empty()) throw std::invalid_argument("EsddChannel: empty path list");
    std::set<std::pair<int, int>> seen;
    for (const Path& p : paths) {
        if (p.l < 0) throw std::invalid_argument("EsddChannel: negative delay bin");
        if (!seen.insert({p.l, p.k}).second)
            throw std::invalid_argument("EsddChannel: duplicate (l, k) pair");
    }
    if (L() > grid.M) throw std::invalid_argument("EsddChannel: L exceeds M");
    if (K() > grid.N / 2) throw std::invalid_argument("EsddChannel: K exceeds N/2");
}

void write_esdd_csv(const EsddChannel& c, const std::string& path) {
    std::ofstream f(path);
    if (!f) throw std::runtime_error("cannot open " + path);
    f << "l,k,gain_re,gain_im\n";
    f.precision(17);
    for (const auto& p : c.paths)
        f << p.l << ',' << p.k << ',' << p.gain.real() << ',' << p.gain.imag() << '\n';
}

const TapProfile& eva_profile() {
    static const TapProfile p{
        {0.0, 30.0, 150.0, 310.0, 370.0, 710.0, 1090.0, 1730.0, 2510.0},
        {0.0, -1.5, -1.4, -3.6, -0.6, -9.1, -7.0, -12.0, -16.9}};
    return p;
}

std::pair<OffGridChannel, EsddChannel> make_esdd(const TapProfile& profile,
                                                 const GridParams& grid,
                                                 double speed_kmh, double fc_hz,
                                                 std::uint64_t seed) {
    grid.validate();
    if (speed_kmh < 0.0) throw std::invalid_argument("make_esdd: speed must be >= 0");
    if (!(fc_hz > 0.0)) throw std::invalid_argument("make_esdd: fc must be > 0");
    if (profile.delays_ns.size() != profile.powers_db.size() || profile.delays_ns.empty())
        throw std::invalid_argument("make_esdd: malformed tap profile");

    const double nu_max = fc_hz * (speed_kmh / 3.6) / kSpeedOfLight;
    double total = 0.0;
    for (double pdb : profile.powers_db) total += std::pow(10.0, pdb / 10.0);

    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::uniform_real_distribution<double> angle(-kPi, kPi);

    OffGridChannel off;
    for (std::size_t i = 0; i < profile.delays_ns.size(); ++i) {
        OffGridChannel::Path p;
        p.tau = profile.delays_ns[i] * 1e-9;
        if (p.tau > grid.frame_duration())
            throw std::invalid_argument("make_esdd: tap delay exceeds frame core duration");
        const double pw = std::pow(10.0, profile.powers_db[i] / 10.0) / total;
        p.gain = std::sqrt(pw / 2.0) * cd{gauss(rng), gauss(rng)};
        p.nu = nu_max * std::cos(angle(rng));
        off.paths.push_back(p);
    }
    off.validate();

    EsddChannel on;
    on.grid = grid;
    const double dres = grid.delay_res();
    const double fres = grid.doppler_res();
    for (const auto& p : off.paths) {
        const int l = round_ties_to_zero(p.tau / dres);
        const int k = round_ties_to_zero(p.nu / fres);
        bool merged = false;
        for (auto& q : on.paths) {
            if (q.l == l && q.k == k) {  // on-grid collision: gains add
                q.gain += p.gain;
                merged = true;
                break;
            }
        }
        if (!merged) on.paths.push_back({l, k, p.gain});
    }
    on.validate();
    return {off, on};
}

OffGridChannel to_offgrid(const EsddChannel& chan) {
    chan.validate();
    OffGridChannel off;
    const double dres = chan.grid.delay_res();
    const double fres = chan.grid.doppler_res();
    for (const auto& p : chan.paths)
        off.paths.push_back({p.l * dres, p.k * fres, p.gain});
    return off;
}

SampledSignal apply_ltv(const SampledSignal& x, const OffGridChannel& chan) {
    chan.validate();
    x.check_finite("apply_ltv input");
    const double rate = x.rate;

    // delayed copies of x, with band-limited interpolation where needed;
    // each copy knows its own absolute span via t0
    struct Term {
        SampledSignal sig;  // samples of x(t - tau) on the output grid
        double tau;
        cd gain;
        double nu;
    };
    std::vector<Term> terms;
    std::int64_t lo = x.start_index();
    std::int64_t hi = lo + static_cast<std::int64_t>(x.size());
    for (const auto& p : chan.paths) {
        const double shift = p.tau * rate;
        const auto rounded = std::llround(shift);
        Term t;
        if (std::abs(shift - static_cast<double>(rounded)) < 1e-6) {
            t.sig = x;
            t.sig.t0 = x.t0 + static_cast<double>(rounded) / rate;
        } else {
            t.sig = fractional_delay(x, shift);
        }
        t.tau = p.tau;
        t.gain = p.gain;
        t.nu = p.nu;
        lo = std::min(lo, t.sig.start_index());
        hi = std::max(hi, t.sig.start_index() + static_cast<std::int64_t>(t.sig.size()));
        terms.push_back(std::move(t));
    }

    SampledSignal y;
    y.rate = rate;
    y.t0 = static_cast<double>(lo) / rate;
    y.samples.assign(static_cast<std::size_t>(hi - lo), cd{0.0, 0.0});
    for (const Term& t : terms) {
        const std::int64_t s = t.sig.start_index();
        // y(t) += gain * x(t - tau) e^{j2pi nu (t - tau)}
        for (std::size_t i = 0; i < t.sig.size(); ++i) {
            const double tmt = static_cast<double>(s + static_cast<std::int64_t>(i)) / rate - t.tau;
            const double ph = 2.0 * kPi * t.nu * tmt;
            y.samples[static_cast<std::size_t>(s + static_cast<std::int64_t>(i) - lo)] +=
                t.gain * t.sig.samples[i] * cd{std::cos(ph), std::sin(ph)};
        }
    }
    return y;
}

SampledSignal add_awgn(const SampledSignal& x, double snr_db, std::uint64_t seed) {
    if (snr_db == kNoiseless) return x;
    const double p_sig = x.power();
    if (p_sig <= 0.0)
        throw std::invalid_argument("add_awgn: zero-energy input with finite snr");
    const double p_noise = p_sig / std::pow(10.0, snr_db / 10.0);
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, std::sqrt(p_noise / 2.0));
    SampledSignal y = x;
    for (cd& v : y.samples) v += cd{gauss(rng), gauss(rng)};
    return y;
}

EsddChannel per_symbol_channel(const EsddChannel& chan, int m, double symbol_interval) {
    if (m < 0) throw std::invalid_argument("per_symbol_channel: m must be >= 0");
    EsddChannel out = chan;
    const double fres = chan.grid.doppler_res();
    for (auto& p : out.paths) {
        const double ph = 2.0 * kPi * (p.k * fres) * m * symbol_interval;
        p.gain *= cd{std::cos(ph), std::sin(ph)};
    }
    return out;
}

}  // namespace oddm
