#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "hodg/config.hpp"
#include "hodg/descriptors.hpp"
#include "hodg/fisher.hpp"
#include "hodg/gmm.hpp"
#include "hodg/metrics.hpp"
#include "hodg/synth.hpp"

namespace hodg {

// Train/test split: lists of sequence manifest paths. On disk the lists are
// stored relative to the split file; loading resolves them absolute.
struct SplitManifest {
    std::vector<std::string> train;
    std::vector<std::string> test;
};

SplitManifest load_split(const std::filesystem::path& path);
void save_split(const std::filesystem::path& path, const SplitManifest& split);

// One fully extracted sequence.
struct SequenceData {
    SequenceManifest manifest;
    std::vector<TrajectoryDescriptor> descriptors;
};

// Loads frames, estimates motion per frame pair (or uses `sidecar` fields
// when given), builds trajectories and extracts descriptors.
SequenceData extract_sequence(const SequenceManifest& manifest, const PipelineConfig& config,
                              const std::vector<MotionField>* sidecar = nullptr);

// Stacks one channel of every descriptor into a sample matrix.
Matrix channel_matrix(const std::vector<TrajectoryDescriptor>& descriptors, int channel_idx);

// Seeded uniform subsample without replacement down to at most `cap` rows
// (row order preserved); identity when the matrix is small enough.
Matrix subsample_rows(const Matrix& samples, std::uint64_t cap, std::uint64_t seed);

// extract -> train_gmm (train split only) -> encode -> train_svm -> evaluate.
// Writes codebooks, FV dumps, the SVM model, the eval report and the
// effective config into out_dir. Stage failures rethrow with the stage name
// prefixed to the message.
EvalReport run_pipeline(const PipelineConfig& config, const std::filesystem::path& split_path,
                        const std::filesystem::path& out_dir);

// Synthetic 3-class corpus (translate, rotate, approach): per_class_train +
// per_class_test sequences per class under out_dir, one directory each, plus
// a split.json. Returns the split path. Sequence seeds derive from `seed`.
std::filesystem::path synth_corpus(const std::filesystem::path& out_dir, int per_class_train,
                                   int per_class_test, std::uint64_t seed,
                                   const SynthSpec& base = SynthSpec{});

}  // namespace hodg
