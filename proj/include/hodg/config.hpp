#pragma once

#include <cstdint>
#include <filesystem>
#include <string>

#include "hodg/descriptors.hpp"

namespace hodg {

// Every tunable of the pipeline in one place. Serialized as a flat JSON
// object; parsing rejects unknown keys so typos fail loudly.
struct PipelineConfig {
    // motion
    int block_size = 16;
    int search_range = 7;
    double tau = 1.0;
    int stride = 5;
    // descriptors
    DescriptorConfig descriptor;
    std::string channels = "rgb+hodg";  // rgb-trio | hodg | rgb+hodg
    // encoding
    int gmm_k = 64;
    int gmm_max_iter = 100;
    double variance_floor = 0.0;        // <= 0 resolves to 1e-4 x mean sample variance
    std::uint64_t subsample_cap = 200000;
    int pca_dim = 0;                    // 0 keeps PCA off
    // classify
    double svm_c = 100.0;
    int svm_epochs = 200;
    // determinism + execution
    std::uint64_t seed = 42;
    int workers = 1;

    void validate() const;
    bool operator==(const PipelineConfig&) const = default;
};

PipelineConfig load_config(const std::filesystem::path& path);
void save_config(const std::filesystem::path& path, const PipelineConfig& config);

// JSON-string forms used by both the file round trip and the CLI.
PipelineConfig parse_config_json(const std::string& text, const std::string& origin);
std::string config_to_json(const PipelineConfig& config);

}  // namespace hodg
