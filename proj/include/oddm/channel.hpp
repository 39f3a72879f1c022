#ifndef ODDM_CHANNEL_HPP
#define ODDM_CHANNEL_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "oddm/grid.hpp"
#include "oddm/signal.hpp"

namespace oddm {

/// Physical (off-grid) path list: y(t) = sum_p gain_p x(t - tau_p) e^{j2pi nu_p (t - tau_p)}.
struct OffGridChannel {
    struct Path {
        double tau = 0.0;  // seconds, >= 0
        double nu = 0.0;   // Hz
        cd gain{0.0, 0.0};
    };
    std::vector<Path> paths;

    void validate() const;
    double max_delay() const;
    double max_doppler() const;
};

/// On-grid channel: integer delay bins l (spacing T0/M) and Doppler bins k
/// (spacing 1/(N*T0)). Distinct (l, k) pairs.
struct EsddChannel {
    struct Path {
        int l = 0;
        int k = 0;
        cd gain{0.0, 0.0};
    };
    GridParams grid;
    std::vector<Path> paths;

    int L() const;  // max l + 1
    int K() const;  // max |k|
    void validate() const;
};

/// Writes columns (l, k, gain_re, gain_im).
void write_esdd_csv(const EsddChannel& c, const std::string& path);

struct TapProfile {
    std::vector<double> delays_ns;
    std::vector<double> powers_db;  // relative
};

/// 3GPP Extended Vehicular A power-delay profile (TR 36.104 Annex B.2):
/// delays {0,30,150,310,370,710,1090,1730,2510} ns,
/// powers {0,-1.5,-1.4,-3.6,-0.6,-9.1,-7.0,-12.0,-16.9} dB.
const TapProfile& eva_profile();

/// Draws per-tap complex Gaussian gains scaled to the profile power (total
/// average power normalized to 1) and a single Jakes Doppler per tap,
/// nu_p = nu_max cos(phi_p) with phi_p uniform on [-pi, pi] and
/// nu_max = fc * v / c. Returns the physical channel and its on-grid
/// rounding l = round(tau M/T0), k = round(nu N T0), ties toward zero.
/// Deterministic under seed.
std::pair<OffGridChannel, EsddChannel> make_esdd(const TapProfile& profile,
                                                 const GridParams& grid,
                                                 double speed_kmh, double fc_hz,
                                                 std::uint64_t seed);

/// On-grid channel as an OffGridChannel (for waveform application).
OffGridChannel to_offgrid(const EsddChannel& chan);

/// LTV channel application per the superposition above. Integer-sample
/// delays use index shifts, fractional delays band-limited interpolation.
/// The output span covers the input extended by the maximum delay.
SampledSignal apply_ltv(const SampledSignal& x, const OffGridChannel& chan);

inline constexpr double kNoiseless = std::numeric_limits<double>::infinity();

/// Adds circularly-symmetric complex Gaussian noise calibrated against the
/// measured signal power so that signal power / noise power hits snr_db.
/// snr_db = kNoiseless passes the signal through. Deterministic under seed.
SampledSignal add_awgn(const SampledSignal& x, double snr_db, std::uint64_t seed);

/// The ESDD channel seen by symbol m (symbol interval symbol_interval):
/// every gain rotated by e^{j2pi nu_p m symbol_interval}.
EsddChannel per_symbol_channel(const EsddChannel& chan, int m, double symbol_interval);

}  // namespace oddm

#endif
