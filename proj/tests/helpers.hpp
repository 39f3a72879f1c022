#ifndef ODDM_TEST_HELPERS_HPP
#define ODDM_TEST_HELPERS_HPP

#include <random>

#include "oddm/channel.hpp"
#include "oddm/signal.hpp"

namespace oddm::test {

inline SampledSignal random_signal(std::size_t n, double rate, std::uint64_t seed,
                                   double t0 = 0.0) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> g(0.0, 1.0);
    SampledSignal s;
    s.rate = rate;
    s.t0 = t0;
    s.samples.resize(n);
    for (cd& v : s.samples) v = cd{g(rng), g(rng)};
    const double e = s.energy();
    scale(s, 1.0 / std::sqrt(e));
    return s;
}

inline EsddChannel random_ongrid_channel(const GridParams& grid, int pmax, int lmax, int kmax,
                                         std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<int> pd(1, pmax), ld(0, lmax), kd(-kmax, kmax);
    std::normal_distribution<double> gs(0.0, 1.0);
    EsddChannel chan;
    chan.grid = grid;
    const int P = pd(rng);
    for (int i = 0; i < P; ++i) {
        int l = 0, k = 0;
        bool dup = true;
        while (dup) {
            l = ld(rng);
            k = kd(rng);
            dup = false;
            for (const auto& q : chan.paths)
                if (q.l == l && q.k == k) dup = true;
        }
        chan.paths.push_back({l, k, cd{gs(rng), gs(rng)} / std::sqrt(2.0)});
    }
    return chan;
}

}  // namespace oddm::test

#endif
