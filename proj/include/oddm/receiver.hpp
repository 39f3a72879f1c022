#ifndef ODDM_RECEIVER_HPP
#define ODDM_RECEIVER_HPP

#include <map>
#include <string>
#include <vector>

#include "oddm/channel.hpp"
#include "oddm/constellation.hpp"
#include "oddm/pulses.hpp"
#include "oddm/signal.hpp"

namespace oddm {

/// Matched-filter demodulation onto the DD grid using the D = 0 receive
/// train: Y[m,n] = <y, u(t - m T0/M) e^{j2pi n (t - m T0/M)/(N T0)}>,
/// subcarriers indexed -N/2..N/2-1 and stored at [n]_N. Alignment uses the
/// signal's own time axis; `cp` only states how much pre-frame signal must
/// be present (y must cover the frame span plus cp).
std::vector<cd> demodulate(const SampledSignal& y, const Ddop& pulse,
                           const GridParams& grid, double cp);

/// Sparse DD-domain channel matrix: block-row m, block-column [m - l]_M holds
/// H_l^m = sum_k theta(k, l) e^{j2pi k (m - l)/(MN)} C^k, with wrapped blocks
/// (m < l) right-multiplied by D = diag{e^{-j2pi n/N}}.
struct DdChannelMatrix {
    GridParams grid;
    EsddChannel chan;

    struct Block {
        int m = 0;       // block-row
        int l = 0;       // delay bin; block-column is [m-l]_M
        bool wrap = false;
        // per Doppler bin k: gain * e^{j2pi k (m-l)/(MN)}
        std::vector<std::pair<int, cd>> taps;
    };
    std::vector<Block> blocks;  // M * (#distinct delays), row-major by m

    std::size_t dim() const { return static_cast<std::size_t>(grid.M) * grid.N; }

    /// y = H x without densification. x, y are vec([X[0,:], X[1,:], ...]).
    std::vector<cd> matvec(const std::vector<cd>& x) const;

    /// Dense export, refused above MN = 4096.
    std::vector<cd> dense() const;

    /// Number of nonzero scalar entries (<= P * M * N).
    std::size_t nnz() const;

    /// Columns of the sparse matrix, as (row, value) lists; used by detectors.
    std::vector<std::vector<std::pair<int, cd>>> columns() const;
};

DdChannelMatrix build_H(const EsddChannel& chan);

/// Writes the dense matrix as (row, col, re, im); small instances only.
void write_dense_csv(const DdChannelMatrix& H, const std::string& path);

enum class Detector { Ml, Mmse, Mp };

Detector detector_from_string(const std::string& s);
std::string to_string(Detector d);

struct MpConfig {
    int iters = 30;
    double damping = 0.6;
    double tol = 1e-4;
};

struct DetectionResult {
    std::vector<int> indices;   // constellation point index per DD cell
    std::vector<cd> symbols;    // decided points
    int iterations = 0;
    bool converged = true;
};

/// ML enumerates every candidate frame (budget MN * log2(|constellation|)
/// <= 20 bits, else refused); MMSE solves (H^H H + noise_var I) x = H^H y and
/// slices; MP runs symbol-wise Gaussian-approximation message passing on the
/// sparse factor graph with damping, deterministic row-major schedule.
DetectionResult detect(const std::vector<cd>& Y, const DdChannelMatrix& H,
                       const Constellation& constellation, double noise_var,
                       Detector strategy, const MpConfig& mp_cfg = {});

}  // namespace oddm

#endif
