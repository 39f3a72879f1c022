#include "oddm/receiver.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <bit>
#include <cmath>
#include <fstream>
#include <numbers>

#include "oddm/fft.hpp"

namespace oddm {
namespace {

constexpr double kPi = std::numbers::pi;

int centered_subcarrier(int n, int N) { return (n < (N + 1) / 2) ? n : n - N; }

}  // namespace

std::vector<cd> demodulate(const SampledSignal& y, const Ddop& pulse,
                           const GridParams& grid, double cp) {
    grid.validate();
    if (cp < 0.0) throw std::invalid_argument("demodulate: cp must be >= 0");
    const int M = grid.M, N = grid.N;
    const int k = pulse.rrc.oversample;
    const double rate = pulse.subpulse.rate;
    if (std::abs(y.rate - rate) > 1e-9 * rate)
        throw std::invalid_argument("demodulate: sample rate mismatch");

    const SampledSignal u = pulse.receive_pulse();  // D = 0 train, unit energy
    const std::int64_t u_start = u.start_index();
    const std::int64_t y_start = y.start_index();
    const std::int64_t y_end = y_start + static_cast<std::int64_t>(y.size());

    // the frame windows span [-Q Delta, (M-1) Delta + (N-1) T0 + Q Delta];
    // y must also provide cp seconds of pre-frame signal
    const std::int64_t cp_samp = static_cast<std::int64_t>(std::ceil(cp * rate - 1e-9));
    const std::int64_t first = u_start - cp_samp;
    const std::int64_t last = u_start + static_cast<std::int64_t>(M - 1) * k +
                              static_cast<std::int64_t>(u.size());
    if (y_start > first || y_end < last)
        throw std::invalid_argument("demodulate: signal shorter than frame span");

    const std::size_t G = static_cast<std::size_t>(N) * M * k;  // samples per NT0
    std::vector<cd> out(static_cast<std::size_t>(M) * N);
    std::vector<cd> buf(G);
    for (int m = 0; m < M; ++m) {
        std::fill(buf.begin(), buf.end(), cd{0.0, 0.0});
        const std::int64_t win_start = u_start + static_cast<std::int64_t>(m) * k;
        for (std::size_t i = 0; i < u.size(); ++i) {
            const std::int64_t abs_idx = win_start + static_cast<std::int64_t>(i);
            const std::int64_t local = abs_idx - static_cast<std::int64_t>(m) * k;  // t - m*Delta
            const std::size_t slot = static_cast<std::size_t>(
                (local % static_cast<std::int64_t>(G) + static_cast<std::int64_t>(G)) %
                static_cast<std::int64_t>(G));
            buf[slot] += y.samples[static_cast<std::size_t>(abs_idx - y_start)] *
                         std::conj(u.samples[i]);
        }
        fft_inplace(buf);
        for (int n = 0; n < N; ++n) {
            const int nc = centered_subcarrier(n, N);
            const std::size_t bin = static_cast<std::size_t>(
                (nc % static_cast<int>(G) + static_cast<int>(G)) % static_cast<int>(G));
            out[static_cast<std::size_t>(m) * N + n] = buf[bin] / rate;
        }
    }
    return out;
}

DdChannelMatrix build_H(const EsddChannel& chan) {
    chan.validate();
    DdChannelMatrix H;
    H.grid = chan.grid;
    H.chan = chan;
    const int M = chan.grid.M, N = chan.grid.N;

    std::vector<int> delays;
    for (const auto& p : chan.paths)
        if (std::find(delays.begin(), delays.end(), p.l) == delays.end())
            delays.push_back(p.l);
    std::sort(delays.begin(), delays.end());

    H.blocks.reserve(static_cast<std::size_t>(M) * delays.size());
    for (int m = 0; m < M; ++m) {
        for (int l : delays) {
            DdChannelMatrix::Block b;
            b.m = m;
            b.l = l;
            b.wrap = m < l;
            for (const auto& p : chan.paths) {
                if (p.l != l) continue;
                const double ph = 2.0 * kPi * p.k * (m - l) / (static_cast<double>(M) * N);
                b.taps.emplace_back(p.k, p.gain * cd{std::cos(ph), std::sin(ph)});
            }
            H.blocks.push_back(std::move(b));
        }
    }
    return H;
}

std::vector<cd> DdChannelMatrix::matvec(const std::vector<cd>& x) const {
    const int M = grid.M, N = grid.N;
    if (x.size() != dim()) throw std::invalid_argument("matvec: dimension mismatch");
    std::vector<cd> y(dim(), cd{0.0, 0.0});
    for (const Block& b : blocks) {
        const int col_block = ((b.m - b.l) % M + M) % M;
        const cd* xs = x.data() + static_cast<std::ptrdiff_t>(col_block) * N;
        cd* ys = y.data() + static_cast<std::ptrdiff_t>(b.m) * N;
        for (const auto& [k, v] : b.taps) {
            for (int n = 0; n < N; ++n) {
                const int src = ((n - k) % N + N) % N;
                cd xv = xs[src];
                if (b.wrap) {
                    const double ph = -2.0 * kPi * src / N;  // D = diag{e^{-j2pi n/N}}
                    xv *= cd{std::cos(ph), std::sin(ph)};
                }
                ys[n] += v * xv;
            }
        }
    }
    return y;
}

std::vector<cd> DdChannelMatrix::dense() const {
    if (dim() > 4096) throw std::invalid_argument("dense export limited to MN <= 4096");
    const std::size_t d = dim();
    std::vector<cd> out(d * d, cd{0.0, 0.0});
    std::vector<cd> e(d, cd{0.0, 0.0});
    for (std::size_t c = 0; c < d; ++c) {
        e[c] = 1.0;
        const std::vector<cd> col = matvec(e);
        e[c] = 0.0;
        for (std::size_t r = 0; r < d; ++r) out[r * d + c] = col[r];
    }
    return out;
}

std::size_t DdChannelMatrix::nnz() const {
    std::size_t count = 0;
    for (const Block& b : blocks) count += b.taps.size() * static_cast<std::size_t>(grid.N);
    return count;
}

std::vector<std::vector<std::pair<int, cd>>> DdChannelMatrix::columns() const {
    const int M = grid.M, N = grid.N;
    std::vector<std::vector<std::pair<int, cd>>> cols(dim());
    for (int mp = 0; mp < M; ++mp) {
        for (int np = 0; np < N; ++np) {
            auto& col = cols[static_cast<std::size_t>(mp) * N + np];
            for (const auto& p : chan.paths) {
                const int m = (mp + p.l) % M;
                const bool wrap = mp + p.l >= M;
                const int n = ((np + p.k) % N + N) % N;
                double ph = 2.0 * kPi * p.k * (m - p.l) / (static_cast<double>(M) * N);
                if (wrap) ph -= 2.0 * kPi * np / N;
                col.emplace_back(m * N + n, p.gain * cd{std::cos(ph), std::sin(ph)});
            }
        }
    }
    return cols;
}

void write_dense_csv(const DdChannelMatrix& H, const std::string& path) {
    const std::vector<cd> d = H.dense();
    const std::size_t n = H.dim();
    std::ofstream f(path);
    if (!f) throw std::runtime_error("cannot open " + path);
    f << "row,col,re,im\n";
    f.precision(17);
    for (std::size_t r = 0; r < n; ++r)
        for (std::size_t c = 0; c < n; ++c) {
            const cd v = d[r * n + c];
            if (std::abs(v) == 0.0) continue;
            f << r << ',' << c << ',' << v.real() << ',' << v.imag() << '\n';
        }
}

Detector detector_from_string(const std::string& s) {
    if (s == "ml") return Detector::Ml;
    if (s == "mmse") return Detector::Mmse;
    if (s == "mp") return Detector::Mp;
    throw std::invalid_argument("unknown detector: " + s);
}

std::string to_string(Detector d) {
    switch (d) {
        case Detector::Ml: return "ml";
        case Detector::Mmse: return "mmse";
        case Detector::Mp: return "mp";
    }
    return "?";
}

namespace {

DetectionResult detect_ml(const std::vector<cd>& Y, const DdChannelMatrix& H,
                          const Constellation& cst) {
    const std::size_t dim = H.dim();
    const int bps = cst.bits_per_symbol();
    const std::size_t total_bits = dim * static_cast<std::size_t>(bps);
    if (total_bits > 20)
        throw std::invalid_argument("ML budget exceeded: MN*log2(|constellation|) > 20 bits");
    const auto cols = H.columns();

    std::vector<int> idx(dim, 0);
    std::vector<cd> r = Y;
    for (std::size_t c = 0; c < dim; ++c)
        for (const auto& [row, v] : cols[c]) r[static_cast<std::size_t>(row)] -= v * cst.points[0];
    double norm2 = 0.0;
    for (const cd& v : r) norm2 += std::norm(v);

    std::vector<int> best_idx = idx;
    double best = norm2;
    std::vector<int> gray(dim, 0);  // per-cell current bit pattern (gray-decoded index)

    const std::uint64_t count = 1ull << total_bits;
    for (std::uint64_t i = 1; i < count; ++i) {
        const int bit = std::countr_zero(i);
        const std::size_t cell = static_cast<std::size_t>(bit) / static_cast<std::size_t>(bps);
        const int b = bit % bps;
        const int old = gray[cell];
        const int next = old ^ (1 << b);
        gray[cell] = next;
        const cd delta = cst.points[static_cast<std::size_t>(next)] -
                         cst.points[static_cast<std::size_t>(old)];
        for (const auto& [row, v] : cols[cell]) {
            auto& rr = r[static_cast<std::size_t>(row)];
            norm2 -= std::norm(rr);
            rr -= v * delta;
            norm2 += std::norm(rr);
        }
        if (norm2 < best) {
            best = norm2;
            best_idx = gray;
        }
    }
    DetectionResult res;
    res.indices = best_idx;
    res.symbols.resize(dim);
    for (std::size_t c = 0; c < dim; ++c)
        res.symbols[c] = cst.points[static_cast<std::size_t>(best_idx[c])];
    res.iterations = 1;
    res.converged = true;
    return res;
}

DetectionResult detect_mmse(const std::vector<cd>& Y, const DdChannelMatrix& H,
                            const Constellation& cst, double noise_var) {
    const std::size_t n = H.dim();
    if (n > 4096) throw std::invalid_argument("MMSE limited to MN <= 4096");
    const std::vector<cd> hd = H.dense();
    Eigen::MatrixXcd A(n, n);
    for (std::size_t r = 0; r < n; ++r)
        for (std::size_t c = 0; c < n; ++c) A(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = hd[r * n + c];
    Eigen::VectorXcd y(n);
    for (std::size_t i = 0; i < n; ++i) y(static_cast<Eigen::Index>(i)) = Y[i];
    const double reg = std::max(noise_var, 1e-12);
    Eigen::MatrixXcd G = A.adjoint() * A;
    G.diagonal().array() += reg;
    const Eigen::VectorXcd x = G.ldlt().solve(A.adjoint() * y);

    DetectionResult res;
    res.indices.resize(n);
    res.symbols.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        const int s = cst.slice(x(static_cast<Eigen::Index>(i)));
        res.indices[i] = s;
        res.symbols[i] = cst.points[static_cast<std::size_t>(s)];
    }
    res.iterations = 1;
    res.converged = true;
    return res;
}

// Symbol-wise Gaussian-approximation message passing on the sparse factor
// graph of H. Deterministic row-major schedule; damping weights the new
// message.
DetectionResult detect_mp(const std::vector<cd>& Y, const DdChannelMatrix& H,
                          const Constellation& cst, double noise_var, const MpConfig& cfg) {
    const std::size_t dim = H.dim();
    const std::size_t S = cst.points.size();
    const double nv = std::max(noise_var, 1e-12);
    const auto cols = H.columns();

    // edge list: per column c, its observation rows; per row, incident edges
    struct Edge { std::size_t var, obs; cd h; };
    std::vector<Edge> edges;
    std::vector<std::vector<std::size_t>> var_edges(dim), obs_edges(dim);
    for (std::size_t c = 0; c < dim; ++c)
        for (const auto& [row, v] : cols[c]) {
            var_edges[c].push_back(edges.size());
            obs_edges[static_cast<std::size_t>(row)].push_back(edges.size());
            edges.push_back({c, static_cast<std::size_t>(row), v});
        }

    // p[e][s]: message var -> obs
    std::vector<std::vector<double>> p(edges.size(), std::vector<double>(S, 1.0 / static_cast<double>(S)));
    std::vector<double> mom1_re(edges.size()), mom1_im(edges.size()), mom2(edges.size());

    auto moments = [&](std::size_t e) {
        cd mean{0.0, 0.0};
        double e2 = 0.0;
        for (std::size_t s = 0; s < S; ++s) {
            mean += p[e][s] * cst.points[s];
            e2 += p[e][s] * std::norm(cst.points[s]);
        }
        mom1_re[e] = mean.real();
        mom1_im[e] = mean.imag();
        mom2[e] = e2;
    };

    int it = 0;
    bool converged = false;
    std::vector<double> logp(S);
    for (it = 1; it <= cfg.iters; ++it) {
        for (std::size_t e = 0; e < edges.size(); ++e) moments(e);

        // per observation: totals, then leave-one-out means/vars per edge
        std::vector<cd> tot_mean(dim, cd{0.0, 0.0});
        std::vector<double> tot_var(dim, nv);
        for (std::size_t e = 0; e < edges.size(); ++e) {
            const cd m{mom1_re[e], mom1_im[e]};
            tot_mean[edges[e].obs] += edges[e].h * m;
            tot_var[edges[e].obs] += std::norm(edges[e].h) * (mom2[e] - std::norm(m));
        }

        // variable update with damping; mu/var snapshots are synchronous
        double max_delta = 0.0;
        for (std::size_t c = 0; c < dim; ++c) {
            // outgoing message p[c -> d] built from the other observations
            for (std::size_t eout : var_edges[c]) {
                std::fill(logp.begin(), logp.end(), 0.0);
                for (std::size_t ein : var_edges[c]) {
                    if (ein == eout) continue;
                    const std::size_t o = edges[ein].obs;
                    const cd m{mom1_re[ein], mom1_im[ein]};
                    const cd mu = tot_mean[o] - edges[ein].h * m;
                    const double var = std::max(
                        tot_var[o] - std::norm(edges[ein].h) * (mom2[ein] - std::norm(m)), 1e-12);
                    for (std::size_t s = 0; s < S; ++s)
                        logp[s] -= std::norm(Y[o] - mu - edges[ein].h * cst.points[s]) / var;
                }
                double mx = logp[0];
                for (std::size_t s = 1; s < S; ++s) mx = std::max(mx, logp[s]);
                double sum = 0.0;
                for (std::size_t s = 0; s < S; ++s) sum += std::exp(logp[s] - mx);
                for (std::size_t s = 0; s < S; ++s) {
                    const double pn = std::exp(logp[s] - mx) / sum;
                    const double mixed = cfg.damping * pn + (1.0 - cfg.damping) * p[eout][s];
                    max_delta = std::max(max_delta, std::abs(mixed - p[eout][s]));
                    p[eout][s] = mixed;
                }
            }
        }
        if (max_delta < cfg.tol) { converged = true; break; }
    }

    // beliefs from all observations
    DetectionResult res;
    res.indices.resize(dim);
    res.symbols.resize(dim);
    for (std::size_t e = 0; e < edges.size(); ++e) moments(e);
    std::vector<cd> tot_mean(dim, cd{0.0, 0.0});
    std::vector<double> tot_var(dim, nv);
    for (std::size_t e = 0; e < edges.size(); ++e) {
        const cd m{mom1_re[e], mom1_im[e]};
        tot_mean[edges[e].obs] += edges[e].h * m;
        tot_var[edges[e].obs] += std::norm(edges[e].h) * (mom2[e] - std::norm(m));
    }
    for (std::size_t c = 0; c < dim; ++c) {
        std::fill(logp.begin(), logp.end(), 0.0);
        for (std::size_t ein : var_edges[c]) {
            const std::size_t o = edges[ein].obs;
            const cd m{mom1_re[ein], mom1_im[ein]};
            const cd mu = tot_mean[o] - edges[ein].h * m;
            const double var = std::max(
                tot_var[o] - std::norm(edges[ein].h) * (mom2[ein] - std::norm(m)), 1e-12);
            for (std::size_t s = 0; s < S; ++s)
                logp[s] -= std::norm(Y[o] - mu - edges[ein].h * cst.points[s]) / var;
        }
        std::size_t best = 0;
        for (std::size_t s = 1; s < S; ++s)
            if (logp[s] > logp[best]) best = s;
        res.indices[c] = static_cast<int>(best);
        res.symbols[c] = cst.points[best];
    }
    res.iterations = std::min(it, cfg.iters);
    res.converged = converged;
    return res;
}

}  // namespace

DetectionResult detect(const std::vector<cd>& Y, const DdChannelMatrix& H,
                       const Constellation& constellation, double noise_var,
                       Detector strategy, const MpConfig& mp_cfg) {
    if (Y.size() != H.dim()) throw std::invalid_argument("detect: dimension mismatch");
    switch (strategy) {
        case Detector::Ml: return detect_ml(Y, H, constellation);
        case Detector::Mmse: return detect_mmse(Y, H, constellation, noise_var);
        case Detector::Mp: return detect_mp(Y, H, constellation, noise_var, mp_cfg);
    }
    throw std::invalid_argument("detect: unknown strategy");
}

}  // namespace oddm
