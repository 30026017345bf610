#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <cstring>
#include <string>
#include <utility>
#include <vector>

#include "hodg/bench.hpp"
#include "hodg/config.hpp"
#include "hodg/descriptors.hpp"
#include "hodg/errors.hpp"
#include "hodg/fisher.hpp"
#include "hodg/gmm.hpp"
#include "hodg/io.hpp"
#include "hodg/metrics.hpp"
#include "hodg/motion.hpp"
#include "hodg/pipeline.hpp"
#include "hodg/svm.hpp"
#include "hodg/synth.hpp"

namespace py = pybind11;
using namespace hodg;

namespace {

Matrix to_matrix(const std::vector<std::vector<double>>& rows) {
    Matrix m;
    if (rows.empty()) return m;
    m.cols = rows.front().size();
    for (const auto& r : rows) {
        if (r.size() != m.cols) throw DataError("ragged sample rows");
        m.append_row(r);
    }
    return m;
}

std::vector<std::vector<double>> from_matrix(const Matrix& m) {
    std::vector<std::vector<double>> rows(m.rows);
    for (std::size_t i = 0; i < m.rows; ++i) rows[i].assign(m.row(i), m.row(i) + m.cols);
    return rows;
}

std::vector<std::vector<double>> grid(const std::vector<double>& flat, int rows, int cols) {
    std::vector<std::vector<double>> out(rows);
    for (int i = 0; i < rows; ++i)
        out[i].assign(flat.begin() + std::size_t(i) * cols, flat.begin() + std::size_t(i + 1) * cols);
    return out;
}

GrayFrame gray_from_bytes(const py::bytes& data, int width, int height) {
    std::string buf = data;
    if (static_cast<std::size_t>(width) * height != buf.size())
        throw DataError("frame buffer is " + std::to_string(buf.size()) + " bytes, expected " +
                        std::to_string(std::size_t(width) * height));
    GrayFrame g;
    g.width = width;
    g.height = height;
    g.data.resize(buf.size());
    std::memcpy(g.data.data(), buf.data(), buf.size());
    return g;
}

PipelineConfig config_from_json(const std::string& text) {
    return text.empty() ? PipelineConfig{} : parse_config_json(text, "python");
}

SynthSpec make_spec(const std::string& class_id, int frames, int size, double magnitude,
                    std::uint64_t texture_seed) {
    SynthSpec spec;
    spec.class_id = class_id;
    spec.frames = frames;
    spec.size = size;
    spec.magnitude = magnitude;
    spec.texture_seed = texture_seed;
    return spec;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Compressed-domain RGBD action recognition: motion fields, trajectory "
              "descriptors, Fisher vectors, linear SVM.";

    const auto base = py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
    py::register_exception<ConfigError>(m, "ConfigError", base.ptr());
    py::register_exception<DataError>(m, "DataError", base.ptr());
    py::register_exception<NumericError>(m, "NumericError", base.ptr());

    // ---- motion ----

    py::class_<MotionField>(m, "MotionField")
        .def_readonly("blocks_x", &MotionField::blocks_x)
        .def_readonly("blocks_y", &MotionField::blocks_y)
        .def_readonly("block_size", &MotionField::block_size)
        .def_property_readonly("vectors",
                               [](const MotionField& f) {
                                   std::vector<std::pair<int, int>> out;
                                   out.reserve(f.vectors.size());
                                   for (const MotionVec& v : f.vectors) out.emplace_back(v.dx, v.dy);
                                   return out;
                               })
        .def("at",
             [](const MotionField& f, int bx, int by) {
                 if (bx < 0 || by < 0 || bx >= f.blocks_x || by >= f.blocks_y)
                     throw ConfigError("block index out of range");
                 const MotionVec v = f.at(bx, by);
                 return std::make_pair(v.dx, v.dy);
             },
             py::arg("bx"), py::arg("by"));

    m.def(
        "estimate_motion",
        [](const py::bytes& prev, const py::bytes& cur, int width, int height, int block_size,
           int search_range) {
            return estimate_motion(gray_from_bytes(prev, width, height),
                                   gray_from_bytes(cur, width, height), block_size, search_range);
        },
        py::arg("prev"), py::arg("cur"), py::arg("width"), py::arg("height"),
        py::arg("block_size") = 16, py::arg("search_range") = 7,
        "Block-matching motion field between two grayscale frames given as raw "
        "row-major bytes.");

    m.def(
        "select_interest_points",
        [](const MotionField& field, double tau) {
            std::vector<std::pair<int, int>> out;
            for (const PointI& p : select_interest_points(field, tau)) out.emplace_back(p.x, p.y);
            return out;
        },
        py::arg("field"), py::arg("tau"),
        "Block centers whose motion magnitude reaches tau.");

    // ---- descriptors ----

    m.def(
        "extract_sequence",
        [](const std::filesystem::path& manifest_path, const std::string& config_json) {
            const PipelineConfig cfg = config_from_json(config_json);
            cfg.validate();
            const ChannelSet channels = ChannelSet::parse(cfg.channels);
            const SequenceData data = extract_sequence(open_sequence(manifest_path), cfg);
            const bool on[kNumChannels] = {channels.hog, channels.hof, channels.mbhx,
                                           channels.mbhy, channels.hodg};
            py::dict out;
            for (int c = 0; c < kNumChannels; ++c)
                if (on[c]) out[kChannelNames[c]] = from_matrix(channel_matrix(data.descriptors, c));
            return out;
        },
        py::arg("manifest_path"), py::arg("config_json") = std::string(),
        "Runs motion estimation, trajectory building and descriptor extraction over "
        "one sequence; returns {channel: rows}.");

    // ---- gmm + fisher ----

    py::class_<GmmCodebook>(m, "GmmCodebook")
        .def_readonly("k", &GmmCodebook::k)
        .def_readonly("d", &GmmCodebook::d)
        .def_readonly("weights", &GmmCodebook::weights)
        .def_readonly("channel", &GmmCodebook::channel)
        .def_property_readonly("means",
                               [](const GmmCodebook& cb) { return grid(cb.means, cb.k, cb.d); })
        .def_property_readonly("variances",
                               [](const GmmCodebook& cb) { return grid(cb.variances, cb.k, cb.d); });

    m.def(
        "train_gmm",
        [](const std::vector<std::vector<double>>& samples, int k, std::uint64_t seed, int max_iter,
           double variance_floor) { return train_gmm(to_matrix(samples), k, seed, max_iter, variance_floor); },
        py::arg("samples"), py::arg("k"), py::arg("seed") = 42, py::arg("max_iter") = 100,
        py::arg("variance_floor") = 0.0,
        "Seeded k-means++ initialization followed by diagonal EM.");

    m.def("log_likelihood",
          [](const GmmCodebook& cb, const std::vector<std::vector<double>>& samples) {
              return log_likelihood(cb, to_matrix(samples));
          },
          py::arg("codebook"), py::arg("samples"));

    m.def("posteriors",
          [](const GmmCodebook& cb, const std::vector<double>& x) {
              return posteriors(cb, std::span<const double>(x));
          },
          py::arg("codebook"), py::arg("x"));

    m.def("save_codebook", &save_codebook, py::arg("path"), py::arg("codebook"));
    m.def("load_codebook", &load_codebook, py::arg("path"));

    m.def("fisher_encode",
          [](const GmmCodebook& cb, const std::vector<std::vector<double>>& samples) {
              return fisher_encode(cb, to_matrix(samples));
          },
          py::arg("codebook"), py::arg("samples"),
          "First-order Fisher vector with signed square root and global l2 norm.");

    m.def("fisher_encode_raw",
          [](const GmmCodebook& cb, const std::vector<std::vector<double>>& samples) {
              return fisher_encode_raw(cb, to_matrix(samples));
          },
          py::arg("codebook"), py::arg("samples"));

    m.def("concat_channels", &concat_channels, py::arg("names"), py::arg("vectors"),
          "Concatenates per-channel vectors in canonical channel order.");

    // ---- svm + metrics ----

    py::class_<SvmModel>(m, "SvmModel")
        .def_readonly("classes", &SvmModel::classes)
        .def_readonly("weights", &SvmModel::weights)
        .def_readonly("biases", &SvmModel::biases);

    m.def(
        "train_svm",
        [](const std::vector<std::vector<double>>& features, const std::vector<std::string>& labels,
           double c, std::uint64_t seed, int epochs) {
            return train_svm(to_matrix(features), labels, c, seed, epochs);
        },
        py::arg("features"), py::arg("labels"), py::arg("c") = 100.0, py::arg("seed") = 42,
        py::arg("epochs") = 200,
        "One-vs-rest linear SVM trained by dual coordinate descent.");

    m.def("predict_scores",
          [](const SvmModel& model, const std::vector<double>& x) {
              return predict_scores(model, std::span<const double>(x));
          },
          py::arg("model"), py::arg("x"));

    m.def("predict_class",
          [](const SvmModel& model, const std::vector<double>& x) {
              return model.classes[predict_class(model, std::span<const double>(x))];
          },
          py::arg("model"), py::arg("x"), "Label with the highest score.");

    m.def("save_svm", &save_svm, py::arg("path"), py::arg("model"));
    m.def("load_svm", &load_svm, py::arg("path"));

    py::class_<EvalReport>(m, "EvalReport")
        .def_readonly("classes", &EvalReport::classes)
        .def_readonly("per_class_ap", &EvalReport::per_class_ap)
        .def_readonly("map", &EvalReport::map)
        .def_readonly("warnings", &EvalReport::warnings)
        .def_property_readonly("scores",
                               [](const EvalReport& r) { return from_matrix(r.scores); });

    m.def("average_precision", &average_precision, py::arg("scores"), py::arg("positives"));

    m.def("evaluate",
          [](const SvmModel& model, const std::vector<std::vector<double>>& features,
             const std::vector<std::string>& labels) {
              return evaluate(model, to_matrix(features), labels);
          },
          py::arg("model"), py::arg("features"), py::arg("labels"));

    m.def("format_report_table", &format_report_table, py::arg("report"));

    // ---- synthetic data, pipeline, bench ----

    m.def(
        "synth_sequence",
        [](const std::filesystem::path& out_dir, const std::string& class_id, int frames, int size,
           double magnitude, std::uint64_t texture_seed, std::uint64_t seed) {
            synth_sequence(make_spec(class_id, frames, size, magnitude, texture_seed), seed, out_dir);
            return out_dir / "manifest.json";
        },
        py::arg("out_dir"), py::arg("class_id") = "translate", py::arg("frames") = 40,
        py::arg("size") = 128, py::arg("magnitude") = 2.0, py::arg("texture_seed") = 0,
        py::arg("seed") = 0,
        "Renders a deterministic synthetic RGBD sequence; returns the manifest path.");

    m.def(
        "synth_corpus",
        [](const std::filesystem::path& out_dir, int per_class_train, int per_class_test,
           std::uint64_t seed, int frames, int size, double magnitude) {
            return synth_corpus(out_dir, per_class_train, per_class_test, seed,
                                make_spec("translate", frames, size, magnitude, 0));
        },
        py::arg("out_dir"), py::arg("per_class_train"), py::arg("per_class_test"),
        py::arg("seed") = 42, py::arg("frames") = 40, py::arg("size") = 128,
        py::arg("magnitude") = 2.0,
        "Three-class corpus plus split.json; returns the split path.");

    m.def(
        "run_pipeline",
        [](const std::filesystem::path& split_path, const std::filesystem::path& out_dir,
           const std::string& config_json) {
            return run_pipeline(config_from_json(config_json), split_path, out_dir);
        },
        py::arg("split_path"), py::arg("out_dir"), py::arg("config_json") = std::string(),
        "extract -> train_gmm -> encode -> train_svm -> evaluate, artifacts under out_dir.");

    py::class_<FpsReport>(m, "FpsReport")
        .def_readonly("pipeline", &FpsReport::pipeline)
        .def_readonly("frames_processed", &FpsReport::frames_processed)
        .def_readonly("wall_seconds", &FpsReport::wall_seconds)
        .def_readonly("fps", &FpsReport::fps)
        .def_readonly("repeats", &FpsReport::repeats)
        .def_readonly("warmup", &FpsReport::warmup)
        .def_readonly("load_seconds", &FpsReport::load_seconds)
        .def_readonly("motion_precompute_seconds", &FpsReport::motion_precompute_seconds)
        .def_readonly("trajectories", &FpsReport::trajectories)
        .def_readonly("descriptor_values", &FpsReport::descriptor_values);

    m.def(
        "measure_fps",
        [](const std::filesystem::path& manifest_path, const std::string& pipeline, int repeats,
           int warmup, const std::string& config_json) {
            return measure_fps(open_sequence(manifest_path), pipeline, repeats, warmup,
                               config_from_json(config_json));
        },
        py::arg("manifest_path"), py::arg("pipeline") = "hodg", py::arg("repeats") = 3,
        py::arg("warmup") = 1, py::arg("config_json") = std::string(),
        "Times descriptor extraction on a preloaded sequence; reports the median run.");

    // ---- config ----

    m.def("default_config_json", [] { return config_to_json(PipelineConfig{}); },
          "Effective defaults as a JSON document.");

    m.def("validate_config_json",
          [](const std::string& text) {
              const PipelineConfig cfg = parse_config_json(text, "python");
              cfg.validate();
              return config_to_json(cfg);
          },
          py::arg("text"), "Parses, validates and re-serializes a config document.");
}
