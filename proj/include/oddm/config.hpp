#ifndef ODDM_CONFIG_HPP
#define ODDM_CONFIG_HPP

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "oddm/metrics.hpp"

namespace oddm {

/// Nested key-value experiment description, INI-style sections:
///   [grid] M, N, T0_us
///   [pulse] rho, Q, oversample, D (auto | integer)
///   [channel] profile (identity | eva | custom), speed_kmh, fc_ghz, seed,
///             taps (l:k:re:im, ...), on_grid
///   [sim] scheme, detector, snr_db (list), frames, mp_iters, mp_damping, mp_tol
///   [output] dir
struct ExperimentConfig {
    // grid
    int M = 0, N = 0;
    double T0_us = 0.0;
    // pulse
    double rho = 0.1;
    int Q = 16;
    int oversample = 8;
    int D = kAutoExtension;  // kAutoExtension = auto
    // channel
    std::string profile = "identity";
    double speed_kmh = 0.0;
    double fc_ghz = 5.0;
    std::uint64_t seed = 1;
    std::vector<EsddChannel::Path> taps;
    bool on_grid = true;
    // sim
    std::string scheme = "oddm-exact";
    std::string detector = "mp";
    std::vector<double> snr_db;
    int frames = 100;
    MpConfig mp;
    // output
    std::string out_dir;  // resolved by the CLI: config > ODDM_OUTDIR > "out"

    GridParams grid() const { return GridParams(M, N, T0_us * 1e-6); }
    RrcParams pulse() const { return RrcParams(rho, Q, oversample); }
};

/// Parses an INI-style config file. Unknown keys and invalid values raise
/// std::invalid_argument with a message naming the offending key
/// ("grid.M", "sim.frames", ...).
ExperimentConfig parse_config_file(const std::string& path);
ExperimentConfig parse_config_text(const std::string& text);

/// Serializes the full resolved config; parsing it back reproduces the run.
/// `derived` entries (D, L, K, nu_max, ...) are echoed as comments.
std::string render_manifest(const ExperimentConfig& cfg,
                            const std::vector<std::pair<std::string, std::string>>& derived);

/// Atomic write: temp file in the same directory, then rename.
void write_file_atomic(const std::string& path, const std::string& contents);

}  // namespace oddm

#endif
