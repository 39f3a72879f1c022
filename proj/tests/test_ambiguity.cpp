#include "doctest.h"

#include <cmath>

#include "oddm/ambiguity.hpp"
#include "oddm/pulses.hpp"
#include "helpers.hpp"

using namespace oddm;

TEST_CASE("self ambiguity at the origin is the energy") {
    const SampledSignal g = test::random_signal(512, 256.0, 5);
    CHECK(std::abs(cross_ambiguity(g, g, 0.0, 0.0)) == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("rectangular pulse has the triangular autocorrelation") {
    const double T = 1.0;
    SampledSignal r;
    r.rate = 4096.0;
    r.t0 = 0.0;
    r.samples.assign(4096, cd{1.0, 0.0});  // unit energy over [0, 1]
    for (double tau : {0.0, 0.125, 0.25, 0.5, 0.7501220703125, 0.33}) {
        const double expect = 1.0 - std::abs(tau) / T;
        // 0.33 * 4096 is fractional: exercises the band-limited interpolation
        CHECK(std::abs(cross_ambiguity(r, r, tau, 0.0)) ==
              doctest::Approx(expect).epsilon(2e-3));
    }
}

TEST_CASE("cross_ambiguity rejects mismatched rates") {
    const SampledSignal a = test::random_signal(64, 64.0, 1);
    const SampledSignal b = test::random_signal(64, 128.0, 2);
    CHECK_THROWS_AS(cross_ambiguity(a, b, 0.0, 0.0), std::invalid_argument);
}

TEST_CASE("conjugate symmetry identity of the self-ambiguity") {
    const SampledSignal g = test::random_signal(256, 256.0, 17);
    for (auto [tau, nu] : {std::pair{0.125, 3.0}, {0.0625, -7.0}, {-0.25, 1.0}}) {
        const cd lhs = cross_ambiguity(g, g, -tau, -nu);
        const cd rhs = std::conj(cross_ambiguity(g, g, tau, nu)) *
                       std::exp(cd{0.0, 2.0 * M_PI * nu * tau});
        CHECK(std::abs(lhs - rhs) < 1e-9);
    }
}

TEST_CASE("unit-energy ambiguity is bounded by one") {
    const SampledSignal g = test::random_signal(256, 256.0, 23);
    const SampledSignal h = test::random_signal(256, 256.0, 29);
    for (double tau : {0.0, 0.1015625, 0.25})
        for (double nu : {0.0, 2.0, -5.0})
            CHECK(std::abs(cross_ambiguity(g, h, tau, nu)) <= 1.0 + 1e-9);
}

TEST_CASE("DDOP biorthogonality on the WH subset") {
    // the acceptance battery runs the full (32, 8, 20, 0.1) surface; keep a smaller
    // lattice point here for speed
    const GridParams g(16, 4, 1e-3);
    const Ddop d = make_ddop(g, RrcParams(0.5, 8, 8));
    const SampledSignal u = d.receive_pulse();
    const AmbiguityGridReport r = orthogonality_grid(d.realization, u, g);
    CHECK(std::abs(r.origin()) == doctest::Approx(1.0).epsilon(1e-6));
    CHECK(r.max_offorigin <= 1e-6);
}

TEST_CASE("classic OFDM orthogonality of the rectangular prototype") {
    // rect of duration T0 on the (T0, 1/T0) grid: complete sinusoid cycles
    // integrate to zero
    const double T0 = 1.0;
    SampledSignal r;
    r.rate = 1024.0;
    r.t0 = 0.0;
    r.samples.assign(1024, cd{1.0, 0.0});
    const double e = r.energy();
    scale(r, 1.0 / std::sqrt(e));
    for (int m = -2; m <= 2; ++m)
        for (int n = -3; n <= 3; ++n) {
            const double expect = (m == 0 && n == 0) ? 1.0 : 0.0;
            CHECK(std::abs(cross_ambiguity(r, r, m * T0, n / T0)) ==
                  doctest::Approx(expect).epsilon(1e-6));
        }
}

TEST_CASE("rectangular prototype fails on the DD grid") {
    const int M = 32;
    const double T0 = 1.0;
    SampledSignal r;
    r.rate = 1024.0;
    r.t0 = 0.0;
    r.samples.assign(1024, cd{1.0, 0.0});
    const double e = r.energy();
    scale(r, 1.0 / std::sqrt(e));
    // one delay-resolution step leaves the overlap 1 - 1/M
    const cd v = cross_ambiguity(r, r, T0 / M, 0.0);
    CHECK(std::abs(v) == doctest::Approx(1.0 - 1.0 / M).epsilon(1e-9));
}

TEST_CASE("orthogonality_grid report layout") {
    const GridParams g(4, 2, 1e-3);
    const Ddop d = make_ddop(g, RrcParams(1.0, 2, 8));
    const SampledSignal u = d.receive_pulse();
    const AmbiguityGridReport r = orthogonality_grid(d.realization, u, g);
    CHECK(r.values.size() == (2u * 4 - 1) * (2u * 2 - 1));
    CHECK(r.at(0, 0) == r.origin());
    CHECK_THROWS_AS(r.at(4, 0), std::out_of_range);
}

TEST_CASE("sidelobe metrics separate the DDOP from the long rectangle") {
    const GridParams g(64, 8, 1e-3);
    const Ddop d = make_ddop(g, RrcParams(0.5, 16, 8), 0);
    const SampledSignal u = d.realization;
    const SidelobeMetrics ddop = sidelobe_metrics(u, g, 8, 3);
    CHECK(ddop.sisl <= 1e-10);

    SampledSignal r;  // rect over the whole frame duration N*T0
    r.rate = u.rate;
    r.t0 = 0.0;
    r.samples.assign(static_cast<std::size_t>(std::llround(g.N * g.T0 * u.rate)), cd{1.0, 0.0});
    const double e = r.energy();
    scale(r, 1.0 / std::sqrt(e));
    const SidelobeMetrics rect = sidelobe_metrics(r, g, 8, 3);
    CHECK(rect.sisl > 0.1);
    // brute-force oracle: the delay-axis samples alone already exceed 0.1
    double oracle = 0.0;
    for (int m = 1; m <= 7; ++m) {
        const double tri = 1.0 - m / (g.bandwidth() * g.frame_duration());
        oracle += tri * tri;
    }
    CHECK(rect.sisl >= oracle - 1e-3);
    CHECK(rect.isl > 0.1);
}

TEST_CASE("sidelobe metrics reject degenerate input") {
    const GridParams g(16, 4, 1e-3);
    SampledSignal z;
    z.rate = 64000.0;
    z.t0 = 0.0;
    z.samples.assign(256, cd{0.0, 0.0});
    CHECK_THROWS_AS(sidelobe_metrics(z, g, 4, 1), std::invalid_argument);
    const SampledSignal s = test::random_signal(256, 64000.0, 3);
    CHECK_THROWS_AS(sidelobe_metrics(s, g, 17, 1), std::invalid_argument);
    CHECK_THROWS_AS(sidelobe_metrics(s, g, 4, 4), std::invalid_argument);
}
