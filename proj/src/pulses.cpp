#include "oddm/pulses.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <numbers>

#include "oddm/fft.hpp"

namespace oddm {
namespace {

constexpr double kPi = std::numbers::pi;

// closed-form RRC impulse response, unit zero-ISI interval
double rrc_closed_form(double t, double rho) {
    if (std::abs(t) < 1e-12) return 1.0 - rho + 4.0 * rho / kPi;
    if (rho > 0.0 && std::abs(std::abs(t) - 1.0 / (4.0 * rho)) < 1e-9) {
        return (rho / std::sqrt(2.0)) *
               ((1.0 + 2.0 / kPi) * std::sin(kPi / (4.0 * rho)) +
                (1.0 - 2.0 / kPi) * std::cos(kPi / (4.0 * rho)));
    }
    const double num = std::sin(kPi * t * (1.0 - rho)) +
                       4.0 * rho * t * std::cos(kPi * t * (1.0 + rho));
    const double den = kPi * t * (1.0 - std::pow(4.0 * rho * t, 2.0));
    return num / den;
}

double sinc(double x) {
    if (std::abs(x) < 1e-12) return 1.0;
    return std::sin(kPi * x) / (kPi * x);
}

// Damped Newton projection of the truncated seed onto the discrete
// root-Nyquist constraint set. Works on the symmetric half h = a[c..].
// Constraints: autocorrelation zeros at lags m*k (m=1..2Q-1), zero
// endpoints, unit energy. The Levenberg damping shrinks as progress is
// made, which keeps the correction local instead of shooting along the
// ill-conditioned large-lag directions.
std::vector<double> refine_zero_isi(std::vector<double> a, int Q, int k) {
    const int L = static_cast<int>(a.size());  // 2Qk + 1
    const int c = Q * k;
    const int nh = c + 1;
    const int nc = (2 * Q - 1) + 2;  // ISI lags + endpoint + energy

    auto fold = [&](const Eigen::VectorXd& row) {
        Eigen::VectorXd out(nh);
        out[0] = row[c];
        for (int j = 1; j < nh; ++j) out[j] = row[c + j] + row[c - j];
        return out;
    };

    Eigen::VectorXd h(nh);
    for (int j = 0; j < nh; ++j) h[j] = a[c + j];

    auto unfold = [&](const Eigen::VectorXd& hh) {
        std::vector<double> full(L);
        for (int j = 0; j < nh; ++j) {
            full[c + j] = hh[j];
            full[c - j] = hh[j];
        }
        return full;
    };

    double mu = 1e-2;
    double prev = std::numeric_limits<double>::infinity();
    for (int it = 0; it < 4000; ++it) {
        const std::vector<double> af = unfold(h);
        Eigen::VectorXd g(nc);
        Eigen::MatrixXd J(nc, nh);
        int r = 0;
        for (int m = 1; m <= 2 * Q - 1; ++m, ++r) {
            const int lag = m * k;
            double acc = 0.0;
            Eigen::VectorXd row = Eigen::VectorXd::Zero(L);
            for (int i = lag; i < L; ++i) {
                acc += af[i] * af[i - lag];
                row[i] += af[i - lag];
                row[i - lag] += af[i];
            }
            g[r] = acc / k;
            J.row(r) = fold(row / k);
        }
        {
            g[r] = af[0];
            Eigen::VectorXd row = Eigen::VectorXd::Zero(L);
            row[0] = 1.0;
            J.row(r) = fold(row);
            ++r;
        }
        {
            double e = 0.0;
            for (double v : af) e += v * v;
            g[r] = e / k - 1.0;
            Eigen::VectorXd row(L);
            for (int i = 0; i < L; ++i) row[i] = 2.0 * af[i] / k;
            J.row(r) = fold(row);
        }
        const double res = g.cwiseAbs().maxCoeff();
        if (res < 5e-12) break;
        if (res > 0.7 * prev) mu = std::max(mu * 0.3, 1e-12);
        prev = res;

        Eigen::MatrixXd JJt = J * J.transpose();
        JJt.diagonal().array() += mu * JJt.trace() / nc;
        const Eigen::VectorXd lam = JJt.ldlt().solve(-g);
        h += J.transpose() * lam;
    }
    return unfold(h);
}

}  // namespace

SampledSignal rrc_subpulse(double delay_res, const RrcParams& p) {
    if (!(delay_res > 0.0)) throw std::invalid_argument("rrc_subpulse: delay_res must be > 0");
    p.validate();
    const int k = p.oversample;
    const int L = 2 * p.Q * k + 1;
    std::vector<double> a(static_cast<std::size_t>(L));
    for (int i = 0; i < L; ++i) {
        const double t = static_cast<double>(i - p.Q * k) / k;  // in delay_res units
        a[static_cast<std::size_t>(i)] = (p.rho == 0.0) ? sinc(t) : rrc_closed_form(t, p.rho);
    }
    // unit energy on the normalized grid (rate k per delay_res)
    double e = 0.0;
    for (double v : a) e += v * v;
    const double s0 = 1.0 / std::sqrt(e / k);
    for (double& v : a) v *= s0;

    a = refine_zero_isi(std::move(a), p.Q, k);

    const double rate = k / delay_res;
    SampledSignal out;
    out.rate = rate;
    out.t0 = -static_cast<double>(p.Q * k) / rate;
    out.samples.assign(a.begin(), a.end());
    const double en = out.energy();
    scale(out, 1.0 / std::sqrt(en));
    return out;
}

SampledSignal Ddop::receive_pulse() const {
    const double T0 = grid.T0;
    const double rate = subpulse.rate;
    const auto spd = static_cast<std::int64_t>(std::llround(T0 * rate));
    const std::int64_t La = static_cast<std::int64_t>(subpulse.size());
    const std::int64_t total = static_cast<std::int64_t>(grid.N - 1) * spd + La;
    SampledSignal u;
    u.rate = rate;
    u.t0 = subpulse.t0;  // subpulse 0 centered at t = 0
    u.samples.assign(static_cast<std::size_t>(total), cd{0.0, 0.0});
    for (int n = 0; n < grid.N; ++n)
        for (std::int64_t i = 0; i < La; ++i)
            u.samples[static_cast<std::size_t>(n * spd + i)] += subpulse.samples[static_cast<std::size_t>(i)];
    return u;
}

Ddop make_ddop(const GridParams& grid, const RrcParams& rrc, int extension) {
    grid.validate();
    rrc.validate();
    if (grid.N < 1) throw std::invalid_argument("make_ddop: N must be >= 1");
    int D = extension;
    if (extension == kAutoExtension)
        D = static_cast<int>(std::ceil(2.0 * rrc.Q / grid.M));
    if (D < 0) throw std::invalid_argument("make_ddop: extension must be >= 0");

    Ddop d;
    d.grid = grid;
    d.rrc = rrc;
    d.D = D;
    d.subpulse = rrc_subpulse(grid.delay_res(), rrc);

    // scale the subpulse so the D = 0 train has unit energy
    const double eu = d.receive_pulse().energy();
    scale(d.subpulse, 1.0 / std::sqrt(eu));

    // realization: N + 2D subpulses, first centered at -D*T0
    const double rate = d.subpulse.rate;
    const auto spd = static_cast<std::int64_t>(std::llround(grid.T0 * rate));
    const std::int64_t La = static_cast<std::int64_t>(d.subpulse.size());
    const std::int64_t total = static_cast<std::int64_t>(grid.N - 1 + 2 * D) * spd + La;
    d.realization.rate = rate;
    d.realization.t0 = -static_cast<double>(D) * grid.T0 + d.subpulse.t0;
    d.realization.samples.assign(static_cast<std::size_t>(total), cd{0.0, 0.0});
    for (int n = 0; n < grid.N + 2 * D; ++n)
        for (std::int64_t i = 0; i < La; ++i)
            d.realization.samples[static_cast<std::size_t>(n * spd + i)] +=
                d.subpulse.samples[static_cast<std::size_t>(i)];
    return d;
}

SampledSignal periodic_prototype(double T, int N, const SampledSignal& segment) {
    if (N < 1) throw std::invalid_argument("periodic_prototype: N must be >= 1");
    if (!(T > 0.0)) throw std::invalid_argument("periodic_prototype: T must be > 0");
    const double seg_T = segment.duration();
    const double want = T / N;
    if (std::abs(seg_T - want) > 1.0 / segment.rate + 1e-12)
        throw std::invalid_argument("periodic_prototype: segment duration != T/N");
    if (segment.energy() <= 0.0)
        throw std::invalid_argument("periodic_prototype: segment has zero energy");
    SampledSignal out;
    out.rate = segment.rate;
    out.t0 = segment.t0;
    out.samples.reserve(segment.size() * static_cast<std::size_t>(N));
    for (int i = 0; i < N; ++i)
        out.samples.insert(out.samples.end(), segment.samples.begin(), segment.samples.end());
    const double e = out.energy();
    scale(out, 1.0 / std::sqrt(e));
    return out;
}

std::vector<cd> ddop_spectrum(const GridParams& grid, const RrcParams& rrc,
                              const std::vector<double>& freqs) {
    if (freqs.empty()) throw std::invalid_argument("ddop_spectrum: empty frequency list");
    grid.validate();
    rrc.validate();
    const int N = grid.N;
    const double T0 = grid.T0;
    // subpulse already scaled so the D = 0 train has unit energy
    const SampledSignal a = make_ddop(grid, rrc, 0).subpulse;

    double fmin = freqs.front(), fmax = freqs.front();
    for (double f : freqs) { fmin = std::min(fmin, f); fmax = std::max(fmax, f); }
    // sinc(f N T0 - m N) main lobe near m = f T0; pad by the 2N-zero-crossing
    // guard (2/T0 in frequency) and keep extending until the alternating tail
    // bound drops under 1e-5 relative
    int m_lo = static_cast<int>(std::floor(fmin * T0)) - 2;
    int m_hi = static_cast<int>(std::ceil(fmax * T0)) + 2;
    while (1.0 / (kPi * N * (m_hi - fmax * T0)) > 1e-5) ++m_hi;
    while (1.0 / (kPi * N * (fmin * T0 - m_lo)) > 1e-5) --m_lo;

    std::vector<cd> out(freqs.size());
    for (std::size_t i = 0; i < freqs.size(); ++i) {
        const double f = freqs[i];
        // exact DTFT of the sampled centered subpulse
        cd A{0.0, 0.0};
        for (std::size_t j = 0; j < a.size(); ++j) {
            const double t = a.t0 + static_cast<double>(j) / a.rate;
            const double ph = -2.0 * kPi * f * t;
            A += a.samples[j] * cd{std::cos(ph), std::sin(ph)};
        }
        A /= a.rate;
        double dir = 0.0;
        for (int m = m_lo; m <= m_hi; ++m) {
            const double v = sinc(f * N * T0 - static_cast<double>(m) * N) * N;
            // e^{j pi m (N-1)} is +1 or -1
            const double sgn = (std::abs(static_cast<std::int64_t>(m) * (N - 1)) % 2 == 0) ? 1.0 : -1.0;
            dir += sgn * v;
        }
        // train of N subpulses centered at n*T0, n = 0..N-1
        const double ph = -kPi * f * (N - 1) * T0;
        out[i] = A * cd{std::cos(ph), std::sin(ph)} * dir;
    }
    return out;
}

}  // namespace oddm
