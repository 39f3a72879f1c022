#include "doctest.h"

#include <cmath>
#include <random>

#include "oddm/receiver.hpp"
#include "oddm/waveforms.hpp"
#include "helpers.hpp"

using namespace oddm;

namespace {

double pipeline_vs_matrix(const GridParams& g, const Ddop& pulse, const EsddChannel& chan,
                          const DdFrame& frame) {
    const SampledSignal x = modulate_oddm_exact(frame, pulse, FrameConfig{});
    const SampledSignal y = apply_ltv(x, to_offgrid(chan));
    const std::vector<cd> Y = demodulate(y, pulse, g, 0.0);
    const std::vector<cd> ym = build_H(chan).matvec(frame.symbols);
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < ym.size(); ++i) {
        num += std::norm(Y[i] - ym[i]);
        den += std::norm(ym[i]);
    }
    return std::sqrt(num / den);
}

}  // namespace

TEST_CASE("identity-channel round trip recovers the frame") {
    const GridParams g(32, 8, 1e-3);
    const Ddop pulse = make_ddop(g, RrcParams(0.1, 20, 8));
    const DdFrame f = random_frame(g, qam4(), 5);
    const SampledSignal x = modulate_oddm_exact(f, pulse, FrameConfig{});
    const std::vector<cd> Y = demodulate(x, pulse, g, 0.0);
    double worst = 0.0;
    for (std::size_t i = 0; i < Y.size(); ++i)
        worst = std::max(worst, std::abs(Y[i] - f.symbols[i]));
    CHECK(worst <= 1e-6);
}

TEST_CASE("pure delay shifts the frame along the delay axis") {
    // with the pulse-anchored matched filter of the demodulator, an on-grid
    // delay leaves no residual subcarrier phase: Y[m,n] = X[m-l,n]; this is
    // the convention the DD channel matrix encodes, and the waveform oracle
    // below pins it
    const GridParams g(32, 8, 1e-3);
    const Ddop pulse = make_ddop(g, RrcParams(1.0, 16, 8));
    const DdFrame f = random_frame(g, qam4(), 6);
    const int l = 3;
    const SampledSignal x = modulate_oddm_exact(f, pulse, FrameConfig{});
    OffGridChannel chan;
    chan.paths = {{l * g.delay_res(), 0.0, cd{1.0, 0.0}}};
    const SampledSignal y = apply_ltv(x, chan);
    const std::vector<cd> Y = demodulate(y, pulse, g, 0.0);
    double worst = 0.0;
    for (int m = l; m < g.M; ++m)  // interior symbols
        for (int n = 0; n < g.N; ++n)
            worst = std::max(worst, std::abs(Y[static_cast<std::size_t>(m) * g.N + n] -
                                             f.at(m - l, n)));
    CHECK(worst <= 1e-5);
}

TEST_CASE("zero input demodulates to the zero matrix") {
    const GridParams g(16, 4, 1e-3);
    const Ddop pulse = make_ddop(g, RrcParams(0.5, 8, 8));
    SampledSignal z = modulate_oddm_exact(random_frame(g, qam4(), 1), pulse, FrameConfig{});
    for (cd& v : z.samples) v = cd{0.0, 0.0};
    for (const cd& v : demodulate(z, pulse, g, 0.0)) CHECK(std::abs(v) == 0.0);
}

TEST_CASE("demodulate rejects a signal that misses the frame span") {
    const GridParams g(16, 4, 1e-3);
    const Ddop pulse = make_ddop(g, RrcParams(0.5, 8, 8));
    SampledSignal x = modulate_oddm_exact(random_frame(g, qam4(), 2), pulse, FrameConfig{});
    x.samples.resize(x.size() / 2);
    CHECK_THROWS_AS(demodulate(x, pulse, g, 0.0), std::invalid_argument);
}

TEST_CASE("H of the trivial channel is the identity") {
    const GridParams g(8, 4, 1e-3);
    EsddChannel chan;
    chan.grid = g;
    chan.paths = {{0, 0, cd{1.0, 0.0}}};
    const DdChannelMatrix H = build_H(chan);
    const std::vector<cd> dense = H.dense();
    const std::size_t n = H.dim();
    for (std::size_t r = 0; r < n; ++r)
        for (std::size_t c = 0; c < n; ++c)
            CHECK(std::abs(dense[r * n + c] - (r == c ? cd{1.0, 0.0} : cd{0.0, 0.0})) < 1e-15);
}

TEST_CASE("single Doppler path produces phased cyclic-shift blocks") {
    const int M = 8, N = 4;
    const GridParams g(M, N, 1e-3);
    EsddChannel chan;
    chan.grid = g;
    chan.paths = {{0, 1, cd{1.0, 0.0}}};
    const std::vector<cd> dense = build_H(chan).dense();
    const std::size_t dim = static_cast<std::size_t>(M) * N;
    for (std::size_t r = 0; r < dim; ++r)
        for (std::size_t c = 0; c < dim; ++c) {
            const int m = static_cast<int>(r) / N, n = static_cast<int>(r) % N;
            const int mp = static_cast<int>(c) / N, np = static_cast<int>(c) % N;
            cd expect{0.0, 0.0};
            if (m == mp && np == ((n - 1) % N + N) % N) {
                const double ph = 2.0 * M_PI * m / (static_cast<double>(M) * N);
                expect = std::exp(cd{0.0, ph});
                CHECK(std::abs(std::abs(dense[r * dim + c]) - 1.0) < 1e-12);
            }
            CHECK(std::abs(dense[r * dim + c] - expect) < 1e-12);
        }
}

TEST_CASE("delay wrap blocks carry the unit-modulus diagonal correction") {
    const int M = 8, N = 4;
    const GridParams g(M, N, 1e-3);
    EsddChannel chan;
    chan.grid = g;
    chan.paths = {{2, 0, cd{1.0, 0.0}}};
    const std::vector<cd> dense = build_H(chan).dense();
    const std::size_t dim = static_cast<std::size_t>(M) * N;
    // block-rows 0 and 1 read the wrapped columns [m-2]_M with D applied
    for (int m = 0; m < 2; ++m)
        for (int n = 0; n < N; ++n) {
            const std::size_t r = static_cast<std::size_t>(m) * N + static_cast<std::size_t>(n);
            const std::size_t c = static_cast<std::size_t>(((m - 2) % M + M) % M) * N +
                                  static_cast<std::size_t>(n);
            const cd expect = std::exp(cd{0.0, -2.0 * M_PI * n / N});  // D diagonal
            CHECK(std::abs(dense[r * dim + c] - expect) < 1e-12);
            CHECK(std::abs(std::abs(dense[r * dim + c]) - 1.0) < 1e-12);
        }

    // and the waveform-domain oracle agrees with the wrapped structure
    const Ddop pulse = make_ddop(g, RrcParams(1.0, 4, 8));
    const DdFrame f = random_frame(g, qam4(), 21);
    CHECK(pipeline_vs_matrix(g, pulse, chan, f) <= 1e-3);
}

TEST_CASE("column pattern matches the sparse block structure") {
    const GridParams g(8, 4, 1e-3);
    const EsddChannel chan = test::random_ongrid_channel(g, 4, 5, 2, 31);
    const DdChannelMatrix H = build_H(chan);
    const std::vector<cd> dense = H.dense();
    const auto cols = H.columns();
    const std::size_t dim = H.dim();
    double worst = 0.0;
    std::vector<cd> rebuilt(dim * dim, cd{0.0, 0.0});
    for (std::size_t c = 0; c < dim; ++c)
        for (const auto& [row, v] : cols[c]) rebuilt[static_cast<std::size_t>(row) * dim + c] += v;
    for (std::size_t i = 0; i < dense.size(); ++i)
        worst = std::max(worst, std::abs(dense[i] - rebuilt[i]));
    CHECK(worst < 1e-12);
    CHECK(H.nnz() <= chan.paths.size() * static_cast<std::size_t>(g.M) * g.N);
    // one nonzero block per distinct delay per block-row
    std::size_t distinct = 0;
    {
        std::vector<int> ls;
        for (const auto& p : chan.paths)
            if (std::find(ls.begin(), ls.end(), p.l) == ls.end()) ls.push_back(p.l);
        distinct = ls.size();
    }
    CHECK(H.blocks.size() == distinct * static_cast<std::size_t>(g.M));
}

TEST_CASE("matrix-waveform equivalence on random on-grid channels") {
    const GridParams g(32, 8, 1e-3);
    const Ddop pulse = make_ddop(g, RrcParams(1.0, 16, 8));
    for (std::uint64_t seed = 0; seed < 6; ++seed) {
        const EsddChannel chan = test::random_ongrid_channel(g, 6, 7, 3, 100 + seed);
        const DdFrame f = random_frame(g, qam4(), 200 + seed);
        CAPTURE(seed);
        CHECK(pipeline_vs_matrix(g, pulse, chan, f) <= 1e-3);
    }
}

TEST_CASE("detectors recover a noise-free frame") {
    const GridParams g(8, 4, 1e-3);
    const Constellation c = qam4();
    const EsddChannel chan = test::random_ongrid_channel(g, 3, 3, 1, 8);
    const DdChannelMatrix H = build_H(chan);
    const DdFrame f = random_frame(g, c, 9);
    const std::vector<cd> y = H.matvec(f.symbols);
    for (Detector det : {Detector::Mmse, Detector::Mp}) {
        const DetectionResult r = detect(y, H, c, 1e-6, det);
        CAPTURE(to_string(det));
        for (std::size_t i = 0; i < y.size(); ++i) CHECK(r.symbols[i] == f.symbols[i]);
    }
}

TEST_CASE("MP collapses to the slicer on a single-path channel") {
    const GridParams g(8, 4, 1e-3);
    const Constellation c = qam4();
    EsddChannel chan;
    chan.grid = g;
    chan.paths = {{0, 0, cd{0.9, 0.1}}};
    const DdChannelMatrix H = build_H(chan);
    const DdFrame f = random_frame(g, c, 10);
    std::vector<cd> y = H.matvec(f.symbols);
    std::mt19937_64 rng(3);
    std::normal_distribution<double> gs(0.0, 0.05);
    for (cd& v : y) v += cd{gs(rng), gs(rng)};
    MpConfig mp;
    mp.damping = 1.0;  // undamped: single-path messages settle immediately
    const DetectionResult r = detect(y, H, c, 0.05 * 0.05 * 2, Detector::Mp, mp);
    CHECK(r.converged);
    CHECK(r.iterations <= 2);
    for (std::size_t i = 0; i < y.size(); ++i) {
        const int s = c.slice(y[i] / chan.paths[0].gain);
        CHECK(r.indices[i] == s);
    }
}

TEST_CASE("ML refuses oversized enumeration budgets") {
    const GridParams g(8, 4, 1e-3);  // 32 cells * 2 bits = 64 bits
    const EsddChannel chan = test::random_ongrid_channel(g, 2, 2, 1, 77);
    const DdChannelMatrix H = build_H(chan);
    const std::vector<cd> y(H.dim(), cd{0.0, 0.0});
    CHECK_THROWS_AS(detect(y, H, qam4(), 0.01, Detector::Ml), std::invalid_argument);
}

TEST_CASE("ML lower-bounds MMSE and MP over random channels") {
    const GridParams g(4, 2, 1e-3);
    const Constellation c = qam4();
    const double snr_db = 12.0;
    const double nv = std::pow(10.0, -snr_db / 10.0);
    std::mt19937_64 rng(123);
    std::normal_distribution<double> gs(0.0, std::sqrt(nv / 2.0));
    int errs_ml = 0, errs_mmse = 0, errs_mp = 0;
    for (int trial = 0; trial < 150; ++trial) {
        const EsddChannel chan = test::random_ongrid_channel(g, 3, 3, 1, 500 + trial);
        const DdChannelMatrix H = build_H(chan);
        const DdFrame f = random_frame(g, c, 900 + trial);
        std::vector<cd> y = H.matvec(f.symbols);
        for (cd& v : y) v += cd{gs(rng), gs(rng)};
        const auto bits_wrong = [&](const DetectionResult& r) {
            int e = 0;
            for (std::size_t i = 0; i < y.size(); ++i) {
                const int tx = c.slice(f.symbols[i]);
                e += __builtin_popcount(static_cast<unsigned>(tx ^ r.indices[i]));
            }
            return e;
        };
        errs_ml += bits_wrong(detect(y, H, c, nv, Detector::Ml));
        errs_mmse += bits_wrong(detect(y, H, c, nv, Detector::Mmse));
        errs_mp += bits_wrong(detect(y, H, c, nv, Detector::Mp));
    }
    CHECK(errs_ml <= errs_mmse);
    CHECK(errs_ml <= errs_mp);
}

TEST_CASE("MMSE survives the zero-noise corner") {
    const GridParams g(4, 2, 1e-3);
    const EsddChannel chan = test::random_ongrid_channel(g, 3, 3, 1, 4);
    const DdChannelMatrix H = build_H(chan);
    const DdFrame f = random_frame(g, qam4(), 5);
    const std::vector<cd> y = H.matvec(f.symbols);
    const DetectionResult r = detect(y, H, qam4(), 0.0, Detector::Mmse);
    for (std::size_t i = 0; i < y.size(); ++i) CHECK(r.symbols[i] == f.symbols[i]);
}

TEST_CASE("dense export is refused above the size cap") {
    const GridParams g(512, 32, 1e-3);  // MN = 16384
    EsddChannel chan;
    chan.grid = g;
    chan.paths = {{0, 0, cd{1.0, 0.0}}};
    const DdChannelMatrix H = build_H(chan);
    CHECK_THROWS_AS(H.dense(), std::invalid_argument);
}
