#include <pybind11/complex.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "lcqkd/channels.hpp"
#include "lcqkd/detection.hpp"
#include "lcqkd/line_control.hpp"
#include "lcqkd/postprocess.hpp"
#include "lcqkd/protocol.hpp"
#include "lcqkd/security.hpp"
#include "lcqkd/signal.hpp"
#include "lcqkd/sweep.hpp"

namespace py = pybind11;
using namespace lcqkd;

PYBIND11_MODULE(_core, m) {
    m.doc() = "Key-rate analysis for an amplified QKD line with physical loss control";

    py::class_<ChannelPair>(m, "ChannelPair")
        .def(py::init<>())
        .def(py::init([](double t, double g) {
                 return ChannelPair{t, g};
             }),
             py::arg("transmission"), py::arg("gain"))
        .def_readwrite("transmission", &ChannelPair::transmission)
        .def_readwrite("gain", &ChannelPair::gain)
        .def("__repr__", [](const ChannelPair& p) {
            std::ostringstream s;
            s << "ChannelPair(transmission=" << p.transmission << ", gain=" << p.gain << ")";
            return s.str();
        });

    py::class_<LineGeometry>(m, "LineGeometry")
        .def(py::init([](double dab, double dae, double spacing, double attenuation,
                         double r_e) {
                 return LineGeometry{dab, dae, spacing, attenuation, r_e};
             }),
             py::arg("dist_ab"), py::arg("dist_ae"), py::arg("spacing") = 50.0,
             py::arg("attenuation") = 1.0 / 50.0, py::arg("r_e") = 0.0)
        .def_readwrite("dist_ab", &LineGeometry::dist_ab)
        .def_readwrite("dist_ae", &LineGeometry::dist_ae)
        .def_readwrite("spacing", &LineGeometry::spacing)
        .def_readwrite("attenuation", &LineGeometry::attenuation)
        .def_readwrite("r_e", &LineGeometry::r_e);

    py::class_<SegmentParams>(m, "SegmentParams")
        .def_readonly("before_eve", &SegmentParams::before_eve)
        .def_readonly("after_eve", &SegmentParams::after_eve)
        .def_readonly("stages_before", &SegmentParams::stages_before)
        .def_readonly("stages_after", &SegmentParams::stages_after)
        .def_readonly("stage_transmission", &SegmentParams::stage_transmission);

    m.def("swap_amp_loss", &swap_amp_loss, py::arg("gain_before"),
          py::arg("transmission_after"));
    m.def("reduce_chain", &reduce_chain, py::arg("gain"), py::arg("transmission"),
          py::arg("stages"));
    m.def("reduce_chain_preserving", &reduce_chain_preserving, py::arg("transmission"),
          py::arg("stages"));
    m.def("segment_params", &segment_params, py::arg("line"));

    py::class_<GaussianSignal>(m, "GaussianSignal")
        .def(py::init([](std::complex<double> center, double p_var) {
                 return GaussianSignal{center, p_var};
             }),
             py::arg("center"), py::arg("p_var") = 0.0)
        .def_readwrite("center", &GaussianSignal::center)
        .def_readwrite("p_var", &GaussianSignal::p_var);

    m.def("propagate",
          py::overload_cast<const GaussianSignal&, const ChannelPair&>(&propagate),
          py::arg("signal"), py::arg("pair"));
    m.def("propagate_amplitude",
          py::overload_cast<std::complex<double>, const ChannelPair&>(&propagate),
          py::arg("amplitude"), py::arg("pair"));
    m.def("photon_mean", &photon_mean, py::arg("signal"));
    m.def("photon_variance", &photon_variance, py::arg("signal"));
    m.def("chain_photon_variance", &chain_photon_variance, py::arg("photons"),
          py::arg("transmission"), py::arg("stages"));
    m.def("photon_number_pmf", &photon_number_pmf, py::arg("signal"), py::arg("cutoff"));

    py::enum_<Outcome>(m, "Outcome")
        .value("bit0", Outcome::bit0)
        .value("bit1", Outcome::bit1)
        .value("inconclusive", Outcome::inconclusive);

    py::class_<OutcomeProbs>(m, "OutcomeProbs")
        .def_readonly("p00", &OutcomeProbs::p00)
        .def_readonly("p10", &OutcomeProbs::p10)
        .def_readonly("p01", &OutcomeProbs::p01)
        .def_readonly("p11", &OutcomeProbs::p11)
        .def_readonly("p_ok", &OutcomeProbs::p_ok);

    m.def("classify", &classify, py::arg("q"), py::arg("threshold"));
    m.def("outcome_probs", &outcome_probs, py::arg("gamma"), py::arg("before_eve"),
          py::arg("after_eve"), py::arg("r_e"), py::arg("threshold"));

    py::class_<LinkModel>(m, "LinkModel")
        .def_readonly("before_eve", &LinkModel::before_eve)
        .def_readonly("after_eve", &LinkModel::after_eve)
        .def_readonly("r_e", &LinkModel::r_e);

    m.def("link_model", &link_model, py::arg("line"));
    m.def("binary_entropy", &binary_entropy, py::arg("p"));
    m.def("eve_exp_term", &eve_exp_term, py::arg("gamma"), py::arg("link"),
          py::arg("threshold"));
    m.def("eve_info_bound", &eve_info_bound, py::arg("gamma"), py::arg("link"),
          py::arg("threshold"));

    py::class_<KeyRateReport>(m, "KeyRateReport")
        .def_readonly("p_ok", &KeyRateReport::p_ok)
        .def_readonly("eve_bound", &KeyRateReport::eve_bound)
        .def_readonly("bob_entropy", &KeyRateReport::bob_entropy)
        .def_readonly("raw_fraction", &KeyRateReport::raw_fraction)
        .def_readonly("fraction", &KeyRateReport::fraction)
        .def_readonly("conclusive_underflow", &KeyRateReport::conclusive_underflow);

    py::class_<SecurityReport, KeyRateReport>(m, "SecurityReport")
        .def_readonly("gamma_opt", &SecurityReport::gamma_opt)
        .def_readonly("theta_opt", &SecurityReport::theta_opt);

    m.def("key_fraction", &key_fraction, py::arg("gamma"), py::arg("link"),
          py::arg("threshold"));
    m.def("optimize_key_fraction", &optimize_key_fraction, py::arg("link"),
          py::arg("fixed_gamma") = std::optional<double>{},
          py::arg("fixed_theta") = std::optional<double>{});

    m.def("test_pulse_photons", &test_pulse_photons, py::arg("pulse"));
    m.def("min_detectable_leakage", &min_detectable_leakage, py::arg("photons"),
          py::arg("transmission"), py::arg("stages"));
    m.def("infer_r_e", &infer_r_e, py::arg("r_intrinsic"), py::arg("r_total"));

    py::class_<TestPulseSpec>(m, "TestPulseSpec")
        .def(py::init([](double p, double t, double f) {
                 return TestPulseSpec{p, t, f};
             }),
             py::arg("power_watts"), py::arg("duration_s"), py::arg("frequency_hz"))
        .def_readwrite("power_watts", &TestPulseSpec::power_watts)
        .def_readwrite("duration_s", &TestPulseSpec::duration_s)
        .def_readwrite("frequency_hz", &TestPulseSpec::frequency_hz);

    m.def("parity_mismatch_rate", &parity_mismatch_rate, py::arg("ber"),
          py::arg("block_size"));
    m.def(
        "invert_parity_mismatch",
        [](double mismatch, std::size_t block) {
            const auto inv = invert_parity_mismatch(mismatch, block);
            return py::make_tuple(inv.ber, inv.saturated);
        },
        py::arg("mismatch"), py::arg("block_size"));
    m.def("toeplitz_hash", &toeplitz_hash, py::arg("bits"), py::arg("diagonal_bits"),
          py::arg("out_len"));

    py::class_<SimConfig>(m, "SimConfig")
        .def(py::init<>())
        .def_readwrite("line", &SimConfig::line)
        .def_readwrite("gamma", &SimConfig::gamma)
        .def_readwrite("theta", &SimConfig::theta)
        .def_readwrite("auto_optimize", &SimConfig::auto_optimize)
        .def_readwrite("rounds", &SimConfig::rounds)
        .def_readwrite("seed", &SimConfig::seed)
        .def_readwrite("batch", &SimConfig::batch)
        .def_readwrite("chunk", &SimConfig::chunk)
        .def_readwrite("disclose", &SimConfig::disclose);

    py::class_<BerEstimate>(m, "BerEstimate")
        .def_readonly("estimate", &BerEstimate::estimate)
        .def_readonly("lower95", &BerEstimate::lower95)
        .def_readonly("upper95", &BerEstimate::upper95)
        .def_readonly("sample_size", &BerEstimate::sample_size)
        .def_readonly("mismatches", &BerEstimate::mismatches);

    py::class_<SessionResult>(m, "SessionResult")
        .def_readonly("gamma", &SessionResult::gamma)
        .def_readonly("theta", &SessionResult::theta)
        .def_readonly("n_alice0", &SessionResult::n_alice0)
        .def_readonly("n_alice1", &SessionResult::n_alice1)
        .def_readonly("sifted_len", &SessionResult::sifted_len)
        .def_readonly("error_count", &SessionResult::error_count)
        .def_readonly("disclosure", &SessionResult::disclosure)
        .def_readonly("disclosed_bits", &SessionResult::disclosed_bits)
        .def_readonly("syndrome_bits", &SessionResult::syndrome_bits)
        .def_readonly("chunks_total", &SessionResult::chunks_total)
        .def_readonly("chunks_failed", &SessionResult::chunks_failed)
        .def_readonly("reconciled_len", &SessionResult::reconciled_len)
        .def_readonly("leaked_bits", &SessionResult::leaked_bits)
        .def_readonly("removed_bits", &SessionResult::removed_bits)
        .def_readonly("final_len", &SessionResult::final_len)
        .def_readonly("key_a", &SessionResult::key_a)
        .def_readonly("key_b_final", &SessionResult::key_b_final)
        .def_readonly("keys_match", &SessionResult::keys_match)
        .def_readonly("analytic_p", &SessionResult::analytic_p)
        .def_readonly("analytic_rate", &SessionResult::analytic_rate)
        .def_readonly("analytic_ber", &SessionResult::analytic_ber)
        .def_readonly("empirical_fraction", &SessionResult::empirical_fraction);

    py::class_<ComparisonRow>(m, "ComparisonRow")
        .def_readonly("quantity", &ComparisonRow::quantity)
        .def_readonly("analytic", &ComparisonRow::analytic)
        .def_readonly("empirical", &ComparisonRow::empirical)
        .def_readonly("std_error", &ComparisonRow::std_error)
        .def_readonly("z", &ComparisonRow::z);

    m.def("run_session", &run_session, py::arg("config"),
          py::call_guard<py::gil_scoped_release>());
    m.def("empirical_vs_analytic", &empirical_vs_analytic, py::arg("result"));
    m.def("session_snapshot", [](const SessionResult& result) {
        std::ostringstream out;
        write_snapshot(out, result);
        return out.str();
    });
}
