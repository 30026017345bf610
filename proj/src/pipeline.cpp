#include "hodg/pipeline.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <numeric>

#include <json.hpp>

#include "hodg/errors.hpp"
#include "hodg/io.hpp"
#include "hodg/motion.hpp"
#include "hodg/rng.hpp"
#include "hodg/svm.hpp"

namespace hodg {

namespace {

// Rethrows the active exception with "<stage>: " prefixed, preserving the
// error class so CLI exit codes survive.
[[noreturn]] void rethrow_with_stage(const std::string& stage) {
    try {
        throw;
    } catch (const ConfigError& e) {
        throw ConfigError(stage + ": " + e.what());
    } catch (const NumericError& e) {
        throw NumericError(stage + ": " + e.what());
    } catch (const DataError& e) {
        throw DataError(stage + ": " + e.what());
    }
}

std::vector<std::string> resolve_list(const nlohmann::json& doc, const char* key,
                                      const std::filesystem::path& base,
                                      const std::string& origin) {
    if (!doc.contains(key) || !doc.at(key).is_array())
        throw DataError(origin + ": missing \"" + key + "\" list");
    std::vector<std::string> out;
    for (const auto& entry : doc.at(key)) {
        if (!entry.is_string()) throw DataError(origin + ": \"" + key + "\" entries must be strings");
        std::filesystem::path p = entry.get<std::string>();
        if (p.is_relative()) p = base / p;
        out.push_back(std::filesystem::weakly_canonical(p).string());
    }
    return out;
}

}  // namespace

SplitManifest load_split(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw DataError(path.string() + ": cannot open split manifest");
    nlohmann::json doc;
    try {
        in >> doc;
    } catch (const nlohmann::json::parse_error& e) {
        throw DataError(path.string() + ": invalid JSON: " + e.what());
    }
    if (doc.value("format", "") != "hodg-split")
        throw DataError(path.string() + ": not a split manifest (format field mismatch)");
    if (doc.value("version", 0) != 1)
        throw DataError(path.string() + ": unsupported split manifest version");
    const std::filesystem::path base = std::filesystem::absolute(path).parent_path();
    SplitManifest split;
    split.train = resolve_list(doc, "train", base, path.string());
    split.test = resolve_list(doc, "test", base, path.string());
    if (split.train.empty()) throw DataError(path.string() + ": empty train list");
    if (split.test.empty()) throw DataError(path.string() + ": empty test list");
    return split;
}

void save_split(const std::filesystem::path& path, const SplitManifest& split) {
    const std::filesystem::path base = std::filesystem::absolute(path).parent_path();
    const auto relativize = [&](const std::vector<std::string>& paths) {
        std::vector<std::string> out;
        for (const std::string& p : paths) {
            const std::filesystem::path rel = std::filesystem::path(p).lexically_relative(base);
            out.push_back(rel.empty() ? p : rel.string());
        }
        return out;
    };
    nlohmann::ordered_json doc;
    doc["format"] = "hodg-split";
    doc["version"] = 1;
    doc["train"] = relativize(split.train);
    doc["test"] = relativize(split.test);
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw DataError(path.string() + ": cannot open for writing");
    out << doc.dump(2) << '\n';
    if (!out) throw DataError(path.string() + ": write failed");
}

SequenceData extract_sequence(const SequenceManifest& manifest, const PipelineConfig& config,
                              const std::vector<MotionField>* sidecar) {
    const ChannelSet channels = ChannelSet::parse(config.channels);

    std::vector<GrayFrame> gray;
    std::vector<DepthFrame> depth;
    gray.reserve(manifest.frame_count);
    depth.reserve(manifest.frame_count);
    for (int f = 0; f < manifest.frame_count; ++f) {
        gray.push_back(to_gray(load_rgb_frame(manifest.rgb_paths[f])));
        depth.push_back(load_depth_frame(manifest.depth_paths[f]));
    }

    std::vector<MotionField> fields;
    if (sidecar) {
        if (static_cast<int>(sidecar->size()) != manifest.frame_count - 1)
            throw DataError("motion sidecar has " + std::to_string(sidecar->size()) +
                            " fields for " + std::to_string(manifest.frame_count) + " frames");
        fields = *sidecar;
    } else {
        fields.reserve(manifest.frame_count - 1);
        for (int f = 0; f + 1 < manifest.frame_count; ++f)
            fields.push_back(estimate_motion(gray[f], gray[f + 1], config.block_size,
                                             config.search_range));
    }

    const std::vector<Trajectory> trajectories =
        build_trajectories(fields, gray[0].width, gray[0].height, config.stride, config.tau,
                           config.descriptor.traj_len, config.descriptor.window);

    SequenceData data;
    data.manifest = manifest;
    data.descriptors =
        extract_descriptors(trajectories, gray, depth, fields, config.descriptor, channels,
                            config.workers);
    return data;
}

Matrix channel_matrix(const std::vector<TrajectoryDescriptor>& descriptors, int channel_idx) {
    Matrix m;
    for (const TrajectoryDescriptor& d : descriptors) {
        const std::vector<double>& v = d.channel(channel_idx);
        if (v.empty()) continue;
        if (m.cols == 0) m.cols = v.size();
        if (v.size() != m.cols)
            throw DataError("channel_matrix: inconsistent descriptor lengths in channel " +
                            std::string(kChannelNames[channel_idx]));
        m.append_row(v);
    }
    return m;
}

Matrix subsample_rows(const Matrix& samples, std::uint64_t cap, std::uint64_t seed) {
    if (samples.rows <= cap) return samples;
    std::vector<std::size_t> idx(samples.rows);
    std::iota(idx.begin(), idx.end(), 0);
    Rng rng(splitmix64(seed));
    shuffle(idx, rng);
    idx.resize(cap);
    std::sort(idx.begin(), idx.end());
    Matrix out(0, samples.cols);
    out.data.reserve(cap * samples.cols);
    for (const std::size_t i : idx) out.append_row(samples.row_span(i));
    return out;
}

EvalReport run_pipeline(const PipelineConfig& config, const std::filesystem::path& split_path,
                        const std::filesystem::path& out_dir) {
    config.validate();
    const ChannelSet channels = ChannelSet::parse(config.channels);
    std::error_code ec;
    std::filesystem::create_directories(out_dir, ec);
    if (ec) throw DataError(out_dir.string() + ": cannot create directory: " + ec.message());
    save_config(out_dir / "config.json", config);

    SplitManifest split;
    std::vector<SequenceData> train, test;
    try {
        split = load_split(split_path);
        for (const std::string& p : split.train)
            train.push_back(extract_sequence(open_sequence(p), config));
        for (const std::string& p : split.test)
            test.push_back(extract_sequence(open_sequence(p), config));
    } catch (...) {
        rethrow_with_stage("extract");
    }

    std::vector<int> active;
    for (int c = 0; c < kNumChannels; ++c) {
        const bool on = (c == 0 && channels.hog) || (c == 1 && channels.hof) ||
                        (c == 2 && channels.mbhx) || (c == 3 && channels.mbhy) ||
                        (c == 4 && channels.hodg);
        if (on) active.push_back(c);
    }

    std::map<int, GmmCodebook> codebooks;
    try {
        for (const int c : active) {
            Matrix pool;
            for (const SequenceData& seq : train) {
                const Matrix m = channel_matrix(seq.descriptors, c);
                if (pool.cols == 0) pool.cols = m.cols;
                for (std::size_t i = 0; i < m.rows; ++i) pool.append_row(m.row_span(i));
            }
            if (pool.rows == 0)
                throw NumericError(std::string("no descriptors extracted for channel ") +
                                   kChannelNames[c]);
            pool = subsample_rows(pool, config.subsample_cap, config.seed + c);
            GmmCodebook cb = train_gmm(pool, config.gmm_k, splitmix64(config.seed) + c,
                                       config.gmm_max_iter, config.variance_floor);
            cb.channel = kChannelNames[c];
            save_codebook(out_dir / (std::string("codebook_") + kChannelNames[c] + ".json"), cb);
            codebooks.emplace(c, std::move(cb));
        }
    } catch (...) {
        rethrow_with_stage("train-gmm");
    }

    EncodedSet train_set, test_set;
    try {
        const auto encode_set = [&](const std::vector<SequenceData>& seqs, EncodedSet& set) {
            for (const SequenceData& seq : seqs) {
                std::vector<std::string> names;
                std::vector<std::vector<double>> fvs;
                for (const int c : active) {
                    const Matrix m = channel_matrix(seq.descriptors, c);
                    if (m.rows == 0)
                        throw NumericError("sequence with no descriptors: " +
                                           (seq.manifest.rgb_paths.empty()
                                                ? std::string("<unknown>")
                                                : seq.manifest.rgb_paths[0]));
                    names.push_back(kChannelNames[c]);
                    fvs.push_back(fisher_encode(codebooks.at(c), m));
                }
                const std::vector<double> row = concat_channels(names, fvs);
                if (set.features.cols == 0) set.features.cols = row.size();
                set.features.append_row(row);
                set.labels.push_back(seq.manifest.label);
            }
        };
        encode_set(train, train_set);
        encode_set(test, test_set);
        write_fv_dump(out_dir / "train.fvec", train_set);
        write_fv_dump(out_dir / "test.fvec", test_set);
    } catch (...) {
        rethrow_with_stage("encode");
    }

    SvmModel model;
    try {
        model = train_svm(train_set.features, train_set.labels, config.svm_c,
                          splitmix64(config.seed + 1), config.svm_epochs);
        save_svm(out_dir / "model.json", model);
    } catch (...) {
        rethrow_with_stage("train-svm");
    }

    try {
        const EvalReport report = evaluate(model, test_set.features, test_set.labels);
        save_report(out_dir / "report.json", report);
        return report;
    } catch (...) {
        rethrow_with_stage("eval");
    }
}

std::filesystem::path synth_corpus(const std::filesystem::path& out_dir, int per_class_train,
                                   int per_class_test, std::uint64_t seed, const SynthSpec& base) {
    if (per_class_train < 1 || per_class_test < 1)
        throw ConfigError("synth_corpus: per-class counts must be >= 1");
    const char* classes[3] = {"translate", "rotate", "approach"};
    SplitManifest split;
    int seq_index = 0;
    for (const char* cls : classes) {
        for (int i = 0; i < per_class_train + per_class_test; ++i, ++seq_index) {
            SynthSpec spec = base;
            spec.class_id = cls;
            spec.texture_seed = splitmix64(seed + seq_index);
            char name[48];
            std::snprintf(name, sizeof name, "%s_%02d", cls, i);
            const std::filesystem::path dir = out_dir / name;
            synth_sequence(spec, seed + seq_index, dir);
            const std::string manifest = std::filesystem::absolute(dir / "manifest.json").string();
            (i < per_class_train ? split.train : split.test).push_back(manifest);
        }
    }
    const std::filesystem::path split_path = out_dir / "split.json";
    save_split(split_path, split);
    return split_path;
}

}  // namespace hodg
