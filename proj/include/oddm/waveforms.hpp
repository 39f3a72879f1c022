#ifndef ODDM_WAVEFORMS_HPP
#define ODDM_WAVEFORMS_HPP

#include <string>
#include <vector>

#include "oddm/constellation.hpp"
#include "oddm/grid.hpp"
#include "oddm/pulses.hpp"
#include "oddm/signal.hpp"

namespace oddm {

/// M x N delay-Doppler symbol frame, X[m, n] stored row-major with
/// n = 0..N-1. The synthesis equations index subcarriers -N/2..N/2-1 and
/// read X[m, [n]_N], so the stored frame stays a plain matrix.
struct DdFrame {
    GridParams grid;
    std::vector<cd> symbols;  // size M*N, row-major
    std::string constellation = "raw";

    cd& at(int m, int n) { return symbols[static_cast<std::size_t>(m) * grid.N + n]; }
    cd at(int m, int n) const { return symbols[static_cast<std::size_t>(m) * grid.N + n]; }
};

DdFrame random_frame(const GridParams& grid, const Constellation& c, std::uint64_t seed);

enum class Scheme { OddmExact, OddmApproxA, OddmApproxB, Otfs, CpOfdm };

Scheme scheme_from_string(const std::string& s);
std::string to_string(Scheme s);

struct FrameConfig {
    double cp = 0.0;       // seconds
    double cs = 0.0;       // seconds
    Scheme scheme = Scheme::OddmExact;
    int vacant_edges = 0;  // CP-OFDM only
};

/// Exact ODDM synthesis: x(t) = sum_m sum_n X[m,[n]_N] u_ce(t - m T0/M)
/// e^{j2pi n (t - m T0/M)/(N T0)}, n = -N/2..N/2-1. For ODDM the cyclic
/// subpulse extension is the CP/CS mechanism, so cfg.cp/cs are realized as
/// ceil(cp/T0) extra leading / trailing subpulses on every train.
SampledSignal modulate_oddm_exact(const DdFrame& frame, const Ddop& pulse,
                                  const FrameConfig& cfg);

enum class ApproxVariant { A, B };

/// Filtered-OFDM approximation: N-point IDFT per delay branch (T0-spaced
/// samples, cyclically extended by D), T0/M time multiplex, subpulse filter.
/// Variant A filters each branch before the multiplex; variant B multiplexes
/// the digital samples first and runs one wideband filter.
SampledSignal modulate_oddm_approx(const DdFrame& frame, const RrcParams& rrc,
                                   ApproxVariant variant, const FrameConfig& cfg);

/// ISFFT precoder (DD -> TF) feeding CP-free OFDM with the rectangular
/// prototype, M subcarriers spaced 1/T0, N symbols; frame CP prepended.
SampledSignal modulate_otfs(const DdFrame& frame, const FrameConfig& cfg,
                            int oversample = 8);

/// The ISFFT alone: X[m,n] (M x N) -> TF grid values [n_hat, m_hat] (N x M).
std::vector<cd> isfft(const std::vector<cd>& dd, int M, int N);

/// Standard CP-OFDM synthesis with vacant edge subcarriers and optional DC
/// null. `symbols` is Mbar x Nbar row-major (Mbar OFDM symbols of Nbar loaded
/// subcarriers); the DFT size is Nbar + 2*vacant_edges + (dc_null ? 1 : 0)
/// and the waveform is synthesized at `oversample` samples per DFT bin.
SampledSignal modulate_cp_ofdm(const std::vector<cd>& symbols, int Mbar, int Nbar,
                               double T0, double cp, int vacant_edges, bool dc_null,
                               int oversample = 4);

/// Matched CP-OFDM receiver (CP strip + DFT), returning the Mbar x Nbar
/// loaded-subcarrier estimates. Test/reference helper for the synthesis above.
std::vector<cd> demodulate_cp_ofdm(const SampledSignal& y, int Mbar, int Nbar,
                                   double T0, double cp, int vacant_edges, bool dc_null,
                                   int oversample = 4);

}  // namespace oddm

#endif
