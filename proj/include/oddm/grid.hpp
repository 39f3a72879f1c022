#ifndef ODDM_GRID_HPP
#define ODDM_GRID_HPP

#include <stdexcept>

namespace oddm {

/// Delay-Doppler frame geometry: M symbols spaced T0/M, N subcarriers spaced
/// 1/(N*T0). A frame carries exactly M*N digital symbols.
struct GridParams {
    int M = 0;       // symbols per frame
    int N = 0;       // subcarriers / subpulses
    double T0 = 0.0; // subpulse spacing, seconds

    GridParams() = default;
    GridParams(int m, int n, double t0) : M(m), N(n), T0(t0) { validate(); }

    void validate() const {
        if (M <= 1) throw std::invalid_argument("GridParams: M must be > 1");
        // N = 1 is the degenerate single-carrier case; pulse construction
        // accepts it, frame-level machinery wants N > 1
        if (N < 1) throw std::invalid_argument("GridParams: N must be >= 1");
        if (!(T0 > 0.0)) throw std::invalid_argument("GridParams: T0 must be > 0");
    }

    double delay_res() const { return T0 / M; }            // seconds
    double doppler_res() const { return 1.0 / (N * T0); }  // Hz
    double bandwidth() const { return M / T0; }            // sampling rate W
    double frame_duration() const { return N * T0; }       // core duration
};

}  // namespace oddm

#endif
