// Python bindings for the delay-Doppler multicarrier laboratory.

#include <pybind11/complex.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "oddm/ambiguity.hpp"
#include "oddm/channel.hpp"
#include "oddm/metrics.hpp"
#include "oddm/pulses.hpp"
#include "oddm/receiver.hpp"
#include "oddm/waveforms.hpp"

namespace py = pybind11;
using namespace oddm;

namespace {

py::array_t<cd> to_array(const std::vector<cd>& v) {
    return py::array_t<cd>(static_cast<py::ssize_t>(v.size()), v.data());
}

py::array_t<cd> to_matrix(const std::vector<cd>& v, int rows, int cols) {
    py::array_t<cd> out(py::array::ShapeContainer{rows, cols}, v.data());
    return out;
}

std::vector<cd> from_array(const py::array_t<cd, py::array::c_style | py::array::forcecast>& a) {
    return {a.data(), a.data() + a.size()};
}

DdFrame frame_from_array(const GridParams& g,
                         const py::array_t<cd, py::array::c_style | py::array::forcecast>& a) {
    if (a.ndim() != 2 || a.shape(0) != g.M || a.shape(1) != g.N)
        throw std::invalid_argument("frame must be an M x N complex array");
    DdFrame f;
    f.grid = g;
    f.symbols = from_array(a);
    return f;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "delay-Doppler multicarrier simulation laboratory";

    py::class_<GridParams>(m, "GridParams")
        .def(py::init<int, int, double>(), py::arg("M"), py::arg("N"), py::arg("T0"))
        .def_readonly("M", &GridParams::M)
        .def_readonly("N", &GridParams::N)
        .def_readonly("T0", &GridParams::T0)
        .def_property_readonly("delay_res", &GridParams::delay_res)
        .def_property_readonly("doppler_res", &GridParams::doppler_res);

    py::class_<RrcParams>(m, "RrcParams")
        .def(py::init<double, int, int>(), py::arg("rho"), py::arg("Q"),
             py::arg("oversample") = 8)
        .def_readonly("rho", &RrcParams::rho)
        .def_readonly("Q", &RrcParams::Q)
        .def_readonly("oversample", &RrcParams::oversample);

    py::class_<SampledSignal>(m, "SampledSignal")
        .def(py::init([](const py::array_t<cd, py::array::c_style | py::array::forcecast>& s,
                         double rate, double t0) {
                 return SampledSignal(from_array(s), rate, t0);
             }),
             py::arg("samples"), py::arg("rate"), py::arg("t0") = 0.0)
        .def_property_readonly("samples",
                               [](const SampledSignal& s) { return to_array(s.samples); })
        .def_readonly("rate", &SampledSignal::rate)
        .def_readonly("t0", &SampledSignal::t0)
        .def("energy", &SampledSignal::energy)
        .def("power", &SampledSignal::power)
        .def("__len__", [](const SampledSignal& s) { return s.size(); });

    py::class_<Ddop>(m, "Ddop")
        .def_readonly("grid", &Ddop::grid)
        .def_readonly("rrc", &Ddop::rrc)
        .def_readonly("D", &Ddop::D)
        .def_readonly("subpulse", &Ddop::subpulse)
        .def_readonly("realization", &Ddop::realization)
        .def("receive_pulse", &Ddop::receive_pulse);

    m.def("rrc_subpulse", &rrc_subpulse, py::arg("delay_res"), py::arg("params"));
    m.def("make_ddop", &make_ddop, py::arg("grid"), py::arg("rrc"),
          py::arg("extension") = kAutoExtension);
    m.def("periodic_prototype", &periodic_prototype, py::arg("T"), py::arg("N"),
          py::arg("segment"));
    m.def("ddop_spectrum", &ddop_spectrum, py::arg("grid"), py::arg("rrc"), py::arg("freqs"));

    m.def("cross_ambiguity", &cross_ambiguity, py::arg("g"), py::arg("gamma"), py::arg("tau"),
          py::arg("nu"));
    m.def(
        "orthogonality_grid",
        [](const SampledSignal& g, const SampledSignal& gamma, const GridParams& grid) {
            const AmbiguityGridReport r = orthogonality_grid(g, gamma, grid);
            return py::make_tuple(to_matrix(r.values, 2 * grid.M - 1, 2 * grid.N - 1),
                                  r.max_offorigin);
        },
        py::arg("g"), py::arg("gamma"), py::arg("grid"),
        "returns (values[(2M-1) x (2N-1)], max_offorigin)");
    m.def(
        "sidelobe_metrics",
        [](const SampledSignal& g, const GridParams& grid, int L, int K) {
            const SidelobeMetrics s = sidelobe_metrics(g, grid, L, K);
            return py::make_tuple(s.isl, s.sisl);
        },
        py::arg("g"), py::arg("grid"), py::arg("L"), py::arg("K"), "returns (isl, sisl)");

    py::class_<EsddChannel>(m, "EsddChannel")
        .def(py::init([](const GridParams& g,
                         const std::vector<std::tuple<int, int, cd>>& paths) {
                 EsddChannel c;
                 c.grid = g;
                 for (const auto& [l, k, h] : paths) c.paths.push_back({l, k, h});
                 c.validate();
                 return c;
             }),
             py::arg("grid"), py::arg("paths"))
        .def_property_readonly("paths",
                               [](const EsddChannel& c) {
                                   std::vector<std::tuple<int, int, cd>> out;
                                   for (const auto& p : c.paths)
                                       out.emplace_back(p.l, p.k, p.gain);
                                   return out;
                               })
        .def("L", &EsddChannel::L)
        .def("K", &EsddChannel::K);

    m.def(
        "make_esdd",
        [](const GridParams& g, double speed_kmh, double fc_hz, std::uint64_t seed) {
            auto [off, on] = make_esdd(eva_profile(), g, speed_kmh, fc_hz, seed);
            std::vector<std::tuple<double, double, cd>> phys;
            for (const auto& p : off.paths) phys.emplace_back(p.tau, p.nu, p.gain);
            return py::make_tuple(phys, on);
        },
        py::arg("grid"), py::arg("speed_kmh"), py::arg("fc_hz"), py::arg("seed"),
        "EVA profile; returns ([(tau, nu, gain)], EsddChannel)");

    m.def(
        "apply_ltv",
        [](const SampledSignal& x, const std::vector<std::tuple<double, double, cd>>& paths) {
            OffGridChannel c;
            for (const auto& [tau, nu, h] : paths) c.paths.push_back({tau, nu, h});
            return apply_ltv(x, c);
        },
        py::arg("x"), py::arg("paths"), "paths: [(tau_s, nu_hz, gain)]");
    m.def(
        "apply_esdd",
        [](const SampledSignal& x, const EsddChannel& chan) {
            return apply_ltv(x, to_offgrid(chan));
        },
        py::arg("x"), py::arg("chan"));
    m.def("add_awgn", &add_awgn, py::arg("x"), py::arg("snr_db"), py::arg("seed"));
    m.def("per_symbol_channel", &per_symbol_channel, py::arg("chan"), py::arg("m"),
          py::arg("symbol_interval"));

    m.def(
        "modulate_oddm_exact",
        [](const py::array_t<cd, py::array::c_style | py::array::forcecast>& X,
           const Ddop& pulse, double cp, double cs) {
            FrameConfig fc;
            fc.cp = cp;
            fc.cs = cs;
            return modulate_oddm_exact(frame_from_array(pulse.grid, X), pulse, fc);
        },
        py::arg("X"), py::arg("pulse"), py::arg("cp") = 0.0, py::arg("cs") = 0.0);
    m.def(
        "modulate_oddm_approx",
        [](const py::array_t<cd, py::array::c_style | py::array::forcecast>& X,
           const GridParams& g, const RrcParams& rrc, const std::string& variant, double cp) {
            FrameConfig fc;
            fc.cp = cp;
            const ApproxVariant v = variant == "a" || variant == "A" ? ApproxVariant::A
                                                                     : ApproxVariant::B;
            return modulate_oddm_approx(frame_from_array(g, X), rrc, v, fc);
        },
        py::arg("X"), py::arg("grid"), py::arg("rrc"), py::arg("variant") = "a",
        py::arg("cp") = 0.0);
    m.def(
        "modulate_otfs",
        [](const py::array_t<cd, py::array::c_style | py::array::forcecast>& X,
           const GridParams& g, double cp, int oversample) {
            FrameConfig fc;
            fc.cp = cp;
            return modulate_otfs(frame_from_array(g, X), fc, oversample);
        },
        py::arg("X"), py::arg("grid"), py::arg("cp") = 0.0, py::arg("oversample") = 8);
    m.def(
        "demodulate",
        [](const SampledSignal& y, const Ddop& pulse, double cp) {
            return to_matrix(demodulate(y, pulse, pulse.grid, cp), pulse.grid.M, pulse.grid.N);
        },
        py::arg("y"), py::arg("pulse"), py::arg("cp") = 0.0);

    py::class_<DdChannelMatrix>(m, "DdChannelMatrix")
        .def("matvec",
             [](const DdChannelMatrix& H,
                const py::array_t<cd, py::array::c_style | py::array::forcecast>& x) {
                 return to_array(H.matvec(from_array(x)));
             })
        .def("dense",
             [](const DdChannelMatrix& H) {
                 const int n = static_cast<int>(H.dim());
                 return to_matrix(H.dense(), n, n);
             })
        .def("nnz", &DdChannelMatrix::nnz)
        .def_property_readonly("dim", &DdChannelMatrix::dim);

    m.def("build_H", &build_H, py::arg("chan"));

    m.def(
        "detect",
        [](const py::array_t<cd, py::array::c_style | py::array::forcecast>& Y,
           const DdChannelMatrix& H, double noise_var, const std::string& strategy, int iters,
           double damping, double tol) {
            MpConfig mp{iters, damping, tol};
            const DetectionResult r =
                detect(from_array(Y), H, qam4(), noise_var, detector_from_string(strategy), mp);
            return py::make_tuple(to_array(r.symbols), r.indices, r.iterations, r.converged);
        },
        py::arg("Y"), py::arg("H"), py::arg("noise_var"), py::arg("strategy") = "mp",
        py::arg("iters") = 30, py::arg("damping") = 0.6, py::arg("tol") = 1e-4,
        "4-QAM detection; returns (symbols, indices, iterations, converged)");

    m.def(
        "welch_psd",
        [](const SampledSignal& x, int seg_len, double overlap, const std::string& window) {
            const Spectrum s = welch_psd(x, seg_len, overlap, window);
            return py::make_tuple(s.freqs, s.psd_db);
        },
        py::arg("x"), py::arg("seg_len"), py::arg("overlap") = 0.5, py::arg("window") = "hann");
    m.def("nmse_db", &nmse_db, py::arg("x_hat"), py::arg("x"));
    m.def(
        "efficiency",
        [](const std::string& scheme, int M, int N, std::optional<double> rho,
           std::optional<int> Q, std::optional<int> L, std::optional<int> K_lobes,
           std::optional<int> D) {
            EfficiencyParams p;
            p.scheme = eff_scheme_from_string(scheme);
            p.M = M;
            p.N = N;
            p.rho = rho;
            p.Q = Q;
            p.L = L;
            p.K_lobes = K_lobes;
            p.D = D;
            return efficiency(p);
        },
        py::arg("scheme"), py::arg("M"), py::arg("N"), py::arg("rho") = std::nullopt,
        py::arg("Q") = std::nullopt, py::arg("L") = std::nullopt,
        py::arg("K_lobes") = std::nullopt, py::arg("D") = std::nullopt);

    m.def("qam4_points", [] {
        return to_array(qam4().points);
    });
    m.def("qam4_awgn_ber", &qam4_awgn_ber, py::arg("snr_db"));
}
