#include <cstdio>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "hodg/bench.hpp"
#include "hodg/config.hpp"
#include "hodg/errors.hpp"
#include "hodg/fisher.hpp"
#include "hodg/io.hpp"
#include "hodg/metrics.hpp"
#include "hodg/motion.hpp"
#include "hodg/pipeline.hpp"
#include "hodg/rng.hpp"
#include "hodg/svm.hpp"

namespace {

using namespace hodg;

// Config file first, then flag overrides on top.
struct ConfigArgs {
    std::string config_path;
    std::vector<std::pair<std::string, std::string>> overrides;

    template <typename T>
    void named_override(CLI::App* cmd, const std::string& flag, const std::string& key,
                        const std::string& help) {
        cmd->add_option_function<T>(
            flag, [this, key](T v) { overrides.emplace_back(key, nlohmann::json(v).dump()); },
            help);
    }

    void attach(CLI::App* cmd) {
        cmd->add_option("--config", config_path, "pipeline config JSON");
        cmd->add_option("--set", overrides,
                        "override a config key, e.g. --set gmm_k 32 (repeatable)")
            ->type_size(2);
        named_override<int>(cmd, "--block-size", "block_size", "motion block size (px)");
        named_override<int>(cmd, "--search-range", "search_range", "motion search range (px)");
        named_override<double>(cmd, "--tau", "tau", "interest-point magnitude threshold");
        named_override<int>(cmd, "--stride", "stride", "frames between trajectory starts");
    }

    PipelineConfig resolve() const {
        PipelineConfig cfg;
        if (!config_path.empty()) cfg = load_config(config_path);
        if (overrides.empty()) return cfg;
        nlohmann::ordered_json doc = nlohmann::ordered_json::parse(config_to_json(cfg));
        for (const auto& [key, value] : overrides) {
            if (!doc.contains(key)) throw ConfigError("--set: unknown config key \"" + key + "\"");
            nlohmann::json parsed;
            try {
                parsed = nlohmann::json::parse(value);
            } catch (const nlohmann::json::parse_error&) {
                parsed = value;  // bare strings like channel names
            }
            doc[key] = parsed;
        }
        return parse_config_json(doc.dump(), "cli overrides");
    }
};

int run_synth(const std::string& out_dir, const SynthSpec& spec, std::uint64_t seed, int corpus_train,
              int corpus_test) {
    if (corpus_train > 0 || corpus_test > 0) {
        if (corpus_train < 1 || corpus_test < 1)
            throw ConfigError("synth: --corpus-train and --corpus-test must both be >= 1");
        const std::filesystem::path split = synth_corpus(out_dir, corpus_train, corpus_test, seed, spec);
        std::cout << split.string() << '\n';
        return 0;
    }
    const SequenceManifest manifest = synth_sequence(spec, seed, out_dir);
    std::cout << (std::filesystem::path(out_dir) / "manifest.json").string() << '\n';
    std::cout << manifest.frame_count << " frames, label " << manifest.label << '\n';
    return 0;
}

int run_extract(const std::string& manifest_path, const std::string& motion_path,
                const std::string& out_path, const ConfigArgs& cargs) {
    PipelineConfig cfg = cargs.resolve();
    cfg.channels = "rgb+hodg";  // dumps carry all five channels; selection happens at encode
    const SequenceManifest manifest = open_sequence(manifest_path);
    std::vector<MotionField> sidecar;
    const SequenceData data =
        motion_path.empty()
            ? extract_sequence(manifest, cfg)
            : (sidecar = parse_motion_sidecar(motion_path), extract_sequence(manifest, cfg, &sidecar));
    write_descriptor_dump(out_path, data.descriptors, cfg.descriptor);
    std::cout << data.descriptors.size() << " descriptors -> " << out_path << '\n';
    return 0;
}

int run_motion_estimate(const std::string& manifest_path, const std::string& out_path,
                        const ConfigArgs& cargs) {
    const PipelineConfig cfg = cargs.resolve();
    const SequenceManifest manifest = open_sequence(manifest_path);
    std::vector<GrayFrame> gray;
    for (const std::string& p : manifest.rgb_paths) gray.push_back(to_gray(load_rgb_frame(p)));
    std::vector<MotionField> fields;
    for (std::size_t f = 0; f + 1 < gray.size(); ++f)
        fields.push_back(estimate_motion(gray[f], gray[f + 1], cfg.block_size, cfg.search_range));
    write_motion_sidecar(out_path, fields);
    std::cout << fields.size() << " motion fields -> " << out_path << '\n';
    return 0;
}

int run_train_gmm(const std::vector<std::string>& dumps, const std::string& channel,
                  const std::string& out_path, const ConfigArgs& cargs) {
    const PipelineConfig cfg = cargs.resolve();
    int channel_idx = -1;
    for (int c = 0; c < kNumChannels; ++c)
        if (channel == kChannelNames[c]) channel_idx = c;
    if (channel_idx < 0) throw ConfigError("train-gmm: unknown channel \"" + channel + "\"");

    Matrix pool;
    for (const std::string& dump : dumps) {
        const Matrix m = channel_matrix(read_descriptor_dump(dump), channel_idx);
        if (m.rows == 0)
            throw DataError(dump + ": no " + channel + " descriptors in dump");
        if (pool.cols == 0) pool.cols = m.cols;
        for (std::size_t i = 0; i < m.rows; ++i) pool.append_row(m.row_span(i));
    }
    const Matrix samples = subsample_rows(pool, cfg.subsample_cap, cfg.seed + channel_idx);
    GmmCodebook cb = train_gmm(samples, cfg.gmm_k, splitmix64(cfg.seed) + channel_idx,
                               cfg.gmm_max_iter, cfg.variance_floor);
    cb.channel = channel;
    save_codebook(out_path, cb);
    std::cout << "codebook K=" << cb.k << " D=" << cb.d << " from " << samples.rows
              << " descriptors -> " << out_path << '\n';
    return 0;
}

int run_encode(const std::string& split_path, const std::string& part,
               const std::string& descriptor_dir, const std::string& codebook_dir,
               const std::string& out_path, const ConfigArgs& cargs) {
    const PipelineConfig cfg = cargs.resolve();
    const ChannelSet channels = ChannelSet::parse(cfg.channels);
    const SplitManifest split = load_split(split_path);
    const std::vector<std::string>* list = nullptr;
    if (part == "train")
        list = &split.train;
    else if (part == "test")
        list = &split.test;
    else
        throw ConfigError("encode: --part must be train or test");

    std::vector<int> active;
    for (int c = 0; c < kNumChannels; ++c) {
        const bool on = (c == 0 && channels.hog) || (c == 1 && channels.hof) ||
                        (c == 2 && channels.mbhx) || (c == 3 && channels.mbhy) ||
                        (c == 4 && channels.hodg);
        if (on) active.push_back(c);
    }
    std::map<int, GmmCodebook> codebooks;
    for (const int c : active)
        codebooks.emplace(c, load_codebook(std::filesystem::path(codebook_dir) /
                                           (std::string("codebook_") + kChannelNames[c] + ".json")));

    EncodedSet set;
    for (const std::string& manifest_path : *list) {
        const SequenceManifest manifest = open_sequence(manifest_path);
        // Dumps are looked up by the sequence directory's name.
        const std::string seq_id =
            std::filesystem::path(manifest_path).parent_path().filename().string();
        const std::filesystem::path dump =
            std::filesystem::path(descriptor_dir) / (seq_id + ".desc");
        const std::vector<TrajectoryDescriptor> descriptors = read_descriptor_dump(dump);
        std::vector<std::string> names;
        std::vector<std::vector<double>> fvs;
        for (const int c : active) {
            const Matrix m = channel_matrix(descriptors, c);
            if (m.rows == 0) throw NumericError(dump.string() + ": no descriptors for channel " +
                                                kChannelNames[c]);
            names.push_back(kChannelNames[c]);
            fvs.push_back(fisher_encode(codebooks.at(c), m));
        }
        const std::vector<double> row = concat_channels(names, fvs);
        if (set.features.cols == 0) set.features.cols = row.size();
        set.features.append_row(row);
        set.labels.push_back(manifest.label);
    }
    write_fv_dump(out_path, set);
    std::cout << set.features.rows << " vectors of dim " << set.features.cols << " -> " << out_path
              << '\n';
    return 0;
}

int run_train_svm(const std::string& train_path, const std::string& out_path,
                  const ConfigArgs& cargs) {
    const PipelineConfig cfg = cargs.resolve();
    const EncodedSet train = read_fv_dump(train_path);
    const SvmModel model =
        train_svm(train.features, train.labels, cfg.svm_c, splitmix64(cfg.seed + 1), cfg.svm_epochs);
    save_svm(out_path, model);
    std::cout << model.classes.size() << "-class model, dim " << model.dim() << " -> " << out_path
              << '\n';
    return 0;
}

int run_eval(const std::string& model_path, const std::string& test_path,
             const std::string& out_path) {
    const SvmModel model = load_svm(model_path);
    const EncodedSet test = read_fv_dump(test_path);
    const EvalReport report = evaluate(model, test.features, test.labels);
    if (!out_path.empty()) save_report(out_path, report);
    std::cout << format_report_table(report);
    return 0;
}

int run_bench(const std::string& manifest_path, const std::string& pipeline, int repeats,
              int warmup, int workers, const std::string& json_path, const ConfigArgs& cargs) {
    PipelineConfig cfg = cargs.resolve();
    cfg.workers = workers;
    const SequenceManifest manifest = open_sequence(manifest_path);
    const FpsReport report = measure_fps(manifest, pipeline, repeats, warmup, cfg);
    if (!json_path.empty()) save_fps_report(json_path, report);
    std::cout << format_fps_table(report);
    return 0;
}

int run_full(const std::string& split_path, const std::string& out_dir, const ConfigArgs& cargs) {
    const PipelineConfig cfg = cargs.resolve();
    const EvalReport report = run_pipeline(cfg, split_path, out_dir);
    std::cout << format_report_table(report);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Compressed-domain RGBD action recognition pipeline"};
    app.require_subcommand(1);

    // synth
    auto* synth = app.add_subcommand("synth", "generate a synthetic RGBD sequence or corpus");
    SynthSpec spec;
    std::string synth_out;
    std::uint64_t synth_seed = 42;
    int corpus_train = 0, corpus_test = 0;
    synth->add_option("--class", spec.class_id, "translate | rotate | approach");
    synth->add_option("--frames", spec.frames, "frame count (>= 15)");
    synth->add_option("--size", spec.size, "square frame size (>= 64)");
    synth->add_option("--magnitude", spec.magnitude, "px/frame, or deg/frame for rotate");
    synth->add_option("--texture-seed", spec.texture_seed, "extra texture seed");
    synth->add_option("--seed", synth_seed, "master seed");
    synth->add_option("--corpus-train", corpus_train, "per-class train count (corpus mode)");
    synth->add_option("--corpus-test", corpus_test, "per-class test count (corpus mode)");
    synth->add_option("--out", synth_out, "output directory")->required();

    // extract
    auto* extract = app.add_subcommand("extract", "extract trajectory descriptors to a dump");
    std::string ex_manifest, ex_motion, ex_out;
    ConfigArgs ex_cfg;
    extract->add_option("--manifest", ex_manifest, "sequence manifest JSON")->required();
    extract->add_option("--motion", ex_motion, "motion sidecar (default: built-in block matching)");
    extract->add_option("--out", ex_out, "descriptor dump path")->required();
    ex_cfg.attach(extract);

    // motion-estimate
    auto* motion = app.add_subcommand("motion-estimate", "write block motion fields as a sidecar");
    std::string mo_manifest, mo_out;
    ConfigArgs mo_cfg;
    motion->add_option("--manifest", mo_manifest, "sequence manifest JSON")->required();
    motion->add_option("--out", mo_out, "sidecar output path")->required();
    mo_cfg.attach(motion);

    // train-gmm
    auto* gmm = app.add_subcommand("train-gmm", "train a per-channel GMM codebook");
    std::vector<std::string> gmm_dumps;
    std::string gmm_channel, gmm_out;
    ConfigArgs gmm_cfg;
    gmm->add_option("dumps", gmm_dumps, "descriptor dump files")->required();
    gmm->add_option("--channel", gmm_channel, "hog | hof | mbhx | mbhy | hodg")->required();
    gmm->add_option("--out", gmm_out, "codebook JSON path")->required();
    gmm_cfg.attach(gmm);

    // encode
    auto* encode = app.add_subcommand("encode", "encode sequences as Fisher vectors");
    std::string en_split, en_part = "train", en_desc_dir, en_cb_dir, en_out;
    ConfigArgs en_cfg;
    encode->add_option("--split", en_split, "split manifest JSON")->required();
    encode->add_option("--part", en_part, "train | test");
    encode->add_option("--descriptor-dir", en_desc_dir, "directory of <seq>.desc dumps")->required();
    encode->add_option("--codebook-dir", en_cb_dir, "directory of codebook_<channel>.json")->required();
    encode->add_option("--out", en_out, "FV dump output path")->required();
    en_cfg.attach(encode);

    // train-svm
    auto* svm = app.add_subcommand("train-svm", "train the one-vs-rest linear SVM");
    std::string sv_train, sv_out;
    ConfigArgs sv_cfg;
    svm->add_option("--train", sv_train, "training FV dump")->required();
    svm->add_option("--out", sv_out, "model JSON path")->required();
    sv_cfg.attach(svm);

    // eval
    auto* eval = app.add_subcommand("eval", "evaluate a model on a test FV dump");
    std::string ev_model, ev_test, ev_out;
    eval->add_option("--model", ev_model, "model JSON")->required();
    eval->add_option("--test", ev_test, "test FV dump")->required();
    eval->add_option("--out", ev_out, "report JSON path");

    // bench
    auto* bench = app.add_subcommand("bench", "measure descriptor extraction throughput");
    std::string be_manifest, be_pipeline = "combined", be_json;
    int be_repeats = 5, be_warmup = 1, be_workers = 1;
    ConfigArgs be_cfg;
    bench->add_option("--manifest", be_manifest, "sequence manifest JSON")->required();
    bench->add_option("--pipeline", be_pipeline, "rgb-trio | hodg | combined");
    bench->add_option("--repeats", be_repeats, "timed repetitions");
    bench->add_option("--warmup", be_warmup, "untimed warmup runs");
    bench->add_option("--workers", be_workers, "extraction worker threads");
    bench->add_option("--json", be_json, "also write a JSON report here");
    be_cfg.attach(bench);

    // run
    auto* run = app.add_subcommand("run", "full pipeline: extract, train, encode, evaluate");
    std::string ru_split, ru_out;
    ConfigArgs ru_cfg;
    run->add_option("--split", ru_split, "split manifest JSON")->required();
    run->add_option("--out", ru_out, "artifact output directory")->required();
    ru_cfg.attach(run);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);  // prints the message or help text
        return code == 0 ? 0 : 2;      // bad flags are config errors
    }

    try {
        if (synth->parsed())
            return run_synth(synth_out, spec, synth_seed, corpus_train, corpus_test);
        if (extract->parsed()) return run_extract(ex_manifest, ex_motion, ex_out, ex_cfg);
        if (motion->parsed()) return run_motion_estimate(mo_manifest, mo_out, mo_cfg);
        if (gmm->parsed()) return run_train_gmm(gmm_dumps, gmm_channel, gmm_out, gmm_cfg);
        if (encode->parsed())
            return run_encode(en_split, en_part, en_desc_dir, en_cb_dir, en_out, en_cfg);
        if (svm->parsed()) return run_train_svm(sv_train, sv_out, sv_cfg);
        if (eval->parsed()) return run_eval(ev_model, ev_test, ev_out);
        if (bench->parsed())
            return run_bench(be_manifest, be_pipeline, be_repeats, be_warmup, be_workers, be_json,
                             be_cfg);
        if (run->parsed()) return run_full(ru_split, ru_out, ru_cfg);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return 2;
    } catch (const NumericError& e) {
        std::cerr << "numeric error: " << e.what() << '\n';
        return 4;
    } catch (const DataError& e) {
        std::cerr << "data error: " << e.what() << '\n';
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 3;
    }
    return 0;
}
