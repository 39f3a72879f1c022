#ifndef ODDM_AMBIGUITY_HPP
#define ODDM_AMBIGUITY_HPP

#include <string>
#include <vector>

#include "oddm/grid.hpp"
#include "oddm/signal.hpp"

namespace oddm {

/// A_{g,gamma}(tau, nu) = integral g(t) gamma*(t - tau) e^{-j2pi nu (t - tau)} dt,
/// evaluated by Riemann sum. Shifts that land on the sample grid use index
/// shifting; fractional shifts use band-limited interpolation.
cd cross_ambiguity(const SampledSignal& g, const SampledSignal& gamma,
                   double tau, double nu);

/// Cross-ambiguity sampled on the WH-subset grid (m*T0/M, n/(N*T0)) for
/// |m| <= M-1, |n| <= N-1.
struct AmbiguityGridReport {
    GridParams grid;
    // values[(m + M - 1) * (2N - 1) + (n + N - 1)], row-major over (m, n)
    std::vector<cd> values;
    double max_offorigin = 0.0;

    cd at(int m, int n) const;
    cd origin() const { return at(0, 0); }
};

AmbiguityGridReport orthogonality_grid(const SampledSignal& g, const SampledSignal& gamma,
                                       const GridParams& grid);

/// Writes columns (m, n, abs, re, im).
void write_ambiguity_csv(const AmbiguityGridReport& r, const std::string& path);

/// Sampled and continuous integrated side-lobe levels of A_{g,g} over the
/// region [0, L/W] x [-K/T, K/T] (W = M/T0, T = N*T0).
///   sisl: grid samples (m/W, n/T), (m,n) != (0,0), normalized by |A(0,0)|^2.
///   isl:  |A|^2 integrated over the region minus the origin cell
///         (|tau| < 1/(2W), |nu| < 1/(2T)), normalized by area * |A(0,0)|^2.
struct SidelobeMetrics {
    double isl = 0.0;
    double sisl = 0.0;
};

SidelobeMetrics sidelobe_metrics(const SampledSignal& g, const GridParams& grid,
                                 int L, int K);

}  // namespace oddm

#endif
