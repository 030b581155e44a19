#include <pybind11/complex.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "osrf/channel.hpp"
#include "osrf/eval.hpp"
#include "osrf/features.hpp"
#include "osrf/nn.hpp"
#include "osrf/openset.hpp"
#include "osrf/waveform.hpp"

namespace py = pybind11;
using namespace osrf;

namespace {

py::array_t<std::complex<double>> to_array(const std::vector<cd>& samples) {
  py::array_t<std::complex<double>> arr(static_cast<py::ssize_t>(samples.size()));
  std::copy(samples.begin(), samples.end(), arr.mutable_data());
  return arr;
}

std::vector<cd> from_array(const py::array_t<std::complex<double>, py::array::c_style | py::array::forcecast>& arr) {
  if (arr.ndim() != 1) throw std::invalid_argument("expected a 1-D complex array");
  return {arr.data(), arr.data() + arr.size()};
}

IqSignal signal_from_array(const py::array_t<std::complex<double>, py::array::c_style | py::array::forcecast>& arr,
                           double sample_rate_hz) {
  IqSignal sig;
  sig.samples = from_array(arr);
  sig.sample_rate_hz = sample_rate_hz;
  return sig;
}

py::array_t<double> features_to_array(const FeatureTensor& f) {
  py::array_t<double> arr({static_cast<py::ssize_t>(f.rows), static_cast<py::ssize_t>(f.cols)});
  std::copy(f.values.begin(), f.values.end(), arr.mutable_data());
  return arr;
}

}  // namespace

PYBIND11_MODULE(_osrf, m) {
  m.doc() = "Open-set RF standard classification: waveform synthesis, channel impairments, "
            "STFT features, classifier inference, and sigmoid-threshold rejection.";

  m.def("class_names", []() {
    std::vector<std::string> names;
    for (int i = 0; i < kNumClassIds; ++i) names.push_back(to_string(static_cast<ClassId>(i)));
    return names;
  });
  m.def("known_class_names", []() {
    std::vector<std::string> names;
    for (ClassId id : all_known_classes()) names.push_back(to_string(id));
    return names;
  });

  m.def(
      "generate",
      [](const std::string& class_name, double duration_s, std::uint64_t seed, double sample_rate_hz) {
        const IqSignal sig = gen_class_signal(class_id_from_string(class_name), duration_s, seed, sample_rate_hz);
        return to_array(sig.samples);
      },
      py::arg("class_name"), py::arg("duration_s") = 0.01, py::arg("seed") = 0,
      py::arg("sample_rate_hz") = 3.84e6,
      "Draw a spec from the class's parameter family and synthesize the baseband signal.");

  m.def(
      "augment",
      [](const py::array_t<std::complex<double>, py::array::c_style | py::array::forcecast>& samples,
         double sample_rate_hz, double snr_db, std::uint64_t seed, const std::string& fading) {
        ImpairmentConfig cfg;
        cfg.snr_db = snr_db;
        cfg.seed = seed;
        if (fading == "none") {
          cfg.profile.fading = FadingKind::None;
        } else if (fading == "rayleigh") {
          cfg.profile.fading = FadingKind::Rayleigh;
        } else if (fading == "rician") {
          cfg.profile.fading = FadingKind::Rician;
        } else if (fading == "mix") {
          cfg.profile.fading = FadingKind::Rayleigh;
          cfg.mix_fading = true;
        } else {
          throw std::invalid_argument("fading must be none|rayleigh|rician|mix");
        }
        return to_array(augment(signal_from_array(samples, sample_rate_hz), cfg).samples);
      },
      py::arg("samples"), py::arg("sample_rate_hz") = 3.84e6, py::arg("snr_db") = 10.0, py::arg("seed") = 0,
      py::arg("fading") = "mix",
      "Apply the impairment chain (fading, I/Q imbalance, frequency offset, AWGN).");

  m.def(
      "preprocess",
      [](const py::array_t<std::complex<double>, py::array::c_style | py::array::forcecast>& samples,
         std::size_t n_segments) {
        const std::vector<cd> s = from_array(samples);
        if (n_segments == 0 || s.size() % n_segments != 0)
          throw std::invalid_argument("sample count must be divisible by n_segments");
        SliceConfig cfg;
        cfg.n_segments = n_segments;
        cfg.fft_len = s.size() / n_segments;
        cfg.slice_len = s.size();
        cfg.n_slices_per_signal = 1;
        IqSignal sig;
        sig.samples = s;
        sig.sample_rate_hz = 1.0;
        return features_to_array(preprocess(sig, cfg));
      },
      py::arg("samples"), py::arg("n_segments") = 2,
      "STFT magnitude normalized to [0, 1]; rows are segments.");

  m.def(
      "decide",
      [](const std::vector<double>& activations, double threshold) {
        const Decision d = decide(activations, threshold);
        py::dict out;
        out["known"] = d.known;
        if (d.known) {
          out["class_index"] = d.class_index;
          out["confidence"] = d.confidence;
        }
        return out;
      },
      py::arg("activations"), py::arg("threshold") = 0.9999,
      "Sigmoid-threshold verdict: Known(argmax) when any activation reaches the threshold.");

  py::class_<nn::Model>(m, "Model")
      .def_static("load", &nn::load_model, py::arg("path"))
      .def_property_readonly("classes", &nn::Model::class_names)
      .def_property_readonly("input_shape", &nn::Model::input_shape)
      .def(
          "predict",
          [](const nn::Model& model,
             const py::array_t<double, py::array::c_style | py::array::forcecast>& features) {
            if (features.ndim() != 2) throw std::invalid_argument("expected a 2-D feature array");
            FeatureTensor f;
            f.rows = static_cast<std::size_t>(features.shape(0));
            f.cols = static_cast<std::size_t>(features.shape(1));
            f.values.assign(features.data(), features.data() + features.size());
            const nn::Activations a = model.predict(f);
            return py::make_tuple(a.logits, a.sigmoids);
          },
          py::arg("features"), "Forward pass; returns (logits, sigmoids).");
}
