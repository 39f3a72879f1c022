#ifndef ODDM_METRICS_HPP
#define ODDM_METRICS_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "oddm/channel.hpp"
#include "oddm/pulses.hpp"
#include "oddm/receiver.hpp"
#include "oddm/signal.hpp"
#include "oddm/waveforms.hpp"

namespace oddm {

struct Spectrum {
    std::vector<double> freqs;  // Hz, strictly increasing
    std::vector<double> psd_db;
};

/// Averaged windowed periodogram, normalized so a unit-power signal
/// integrates to 0 dB total power. window: "hann" | "hamming" | "rect".
Spectrum welch_psd(const SampledSignal& x, int seg_len, double overlap,
                   const std::string& window);

/// Writes columns (freq_hz, psd_db).
void write_psd_csv(const Spectrum& s, const std::string& path);

/// 10 log10( sum |x_hat - x|^2 / sum |x|^2 ) over the union span (equal
/// rates required, signals aligned by their time axes). Floor -300 dB.
double nmse_db(const SampledSignal& x_hat, const SampledSignal& x);

enum class EffScheme { Tdm, Fdm, CpOfdm, Oddm, CpOddm };

EffScheme eff_scheme_from_string(const std::string& s);
std::string to_string(EffScheme s);

/// Bandwidth-efficiency closed forms. Fields irrelevant to the scheme must
/// stay unset; a set-but-unused or missing-but-needed field is an error.
///   TDM:     1 / ((1+rho)(1 + (2Q-1)/(MN)))
///   FDM:     1 / (1 + (2K-1)/(MN))
///   CP-OFDM: 1 / ((1 + (2K-1)/M)(1 + L/M))
///   ODDM:    1 / ((1 + rho + (N-1)/(MN))(1 + (2DM + L + 2Q - 1)/(MN)))
///   CP-ODDM: 1 / ((1 + rho + (N-1)/(MN))(1 + (L + 2Q - 1)/(MN)))
struct EfficiencyParams {
    EffScheme scheme = EffScheme::Tdm;
    int M = 0, N = 0;
    std::optional<double> rho;
    std::optional<int> Q;
    std::optional<int> L;
    std::optional<int> K_lobes;
    std::optional<int> D;
};

double efficiency(const EfficiencyParams& p);

/// Monte-Carlo link-level BER measurement.
/// snr_db is the post-demodulation symbol SNR Es/N0 (unit-energy
/// constellation, unit-energy receive pulse); the harness converts it to the
/// waveform-level target for the AWGN generator.
struct BerConfig {
    GridParams grid;
    RrcParams rrc;
    int extension = kAutoExtension;
    Scheme scheme = Scheme::OddmExact;
    Detector detector = Detector::Mp;
    MpConfig mp;
    std::vector<double> snr_db;
    int frames = 100;
    std::uint64_t seed = 1;
    std::string constellation = "4qam";

    // channel: fixed identity, explicit on-grid paths, or EVA-derived
    // (rounded on-grid when on_grid). speed/fc used by EVA.
    enum class ChannelKind { Identity, Explicit, Eva } channel = ChannelKind::Identity;
    std::vector<EsddChannel::Path> explicit_paths;
    double speed_kmh = 0.0;
    double fc_hz = 5e9;
    bool on_grid = true;
};

struct BerRow {
    double snr_db = 0.0;
    std::int64_t frames = 0;
    std::int64_t bits = 0;
    std::int64_t bit_errors = 0;
    double ber = 0.0;
    std::int64_t erased_frames = 0;  // non-converged detections, logged not fatal
};

std::vector<BerRow> ber_harness(const BerConfig& cfg);

/// Writes columns (snr_db, frames, bits, bit_errors, ber).
void write_ber_csv(const std::vector<BerRow>& rows, const std::string& path);

/// Analytic Gray 4-QAM AWGN bit error rate at symbol SNR Es/N0.
double qam4_awgn_ber(double snr_db);

}  // namespace oddm

#endif
