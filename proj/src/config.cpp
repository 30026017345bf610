#include "hodg/config.hpp"

#include <fstream>
#include <set>

#include <json.hpp>

#include "hodg/errors.hpp"

namespace hodg {

void PipelineConfig::validate() const {
    if (block_size < 4) throw ConfigError("config: block_size must be >= 4");
    if (search_range < 1) throw ConfigError("config: search_range must be >= 1");
    if (tau < 0.0) throw ConfigError("config: tau must be >= 0");
    if (stride < 1) throw ConfigError("config: stride must be >= 1");
    descriptor.validate();
    ChannelSet::parse(channels);  // throws on an unknown selection
    if (gmm_k < 1) throw ConfigError("config: gmm_k must be >= 1");
    if (gmm_max_iter < 1) throw ConfigError("config: gmm_max_iter must be >= 1");
    if (subsample_cap < 1) throw ConfigError("config: subsample_cap must be >= 1");
    if (pca_dim < 0) throw ConfigError("config: pca_dim must be >= 0");
    if (svm_c <= 0.0) throw ConfigError("config: svm_c must be > 0");
    if (svm_epochs < 1) throw ConfigError("config: svm_epochs must be >= 1");
    if (workers < 1) throw ConfigError("config: workers must be >= 1");
}

namespace {

const std::set<std::string> kKnownKeys = {
    "block_size", "search_range", "tau",          "stride",        "window",
    "traj_len",   "grid_x",       "grid_y",       "grid_t",        "orient_bins",
    "epsilon_zero_flow",          "channels",     "gmm_k",         "gmm_max_iter",
    "variance_floor",             "subsample_cap", "pca_dim",      "svm_c",
    "svm_epochs", "seed",         "workers"};

template <typename T>
void read_key(const nlohmann::json& doc, const char* key, T& out, const std::string& origin) {
    if (!doc.contains(key)) return;
    try {
        out = doc.at(key).get<T>();
    } catch (const nlohmann::json::exception&) {
        throw ConfigError(origin + ": key \"" + std::string(key) + "\" has the wrong type");
    }
}

}  // namespace

PipelineConfig parse_config_json(const std::string& text, const std::string& origin) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw ConfigError(origin + ": invalid JSON: " + e.what());
    }
    if (!doc.is_object()) throw ConfigError(origin + ": config root must be a JSON object");
    for (const auto& [key, value] : doc.items())
        if (!kKnownKeys.count(key)) throw ConfigError(origin + ": unknown config key \"" + key + "\"");

    PipelineConfig cfg;
    read_key(doc, "block_size", cfg.block_size, origin);
    read_key(doc, "search_range", cfg.search_range, origin);
    read_key(doc, "tau", cfg.tau, origin);
    read_key(doc, "stride", cfg.stride, origin);
    read_key(doc, "window", cfg.descriptor.window, origin);
    read_key(doc, "traj_len", cfg.descriptor.traj_len, origin);
    read_key(doc, "grid_x", cfg.descriptor.grid_x, origin);
    read_key(doc, "grid_y", cfg.descriptor.grid_y, origin);
    read_key(doc, "grid_t", cfg.descriptor.grid_t, origin);
    read_key(doc, "orient_bins", cfg.descriptor.orient_bins, origin);
    read_key(doc, "epsilon_zero_flow", cfg.descriptor.epsilon_zero_flow, origin);
    read_key(doc, "channels", cfg.channels, origin);
    read_key(doc, "gmm_k", cfg.gmm_k, origin);
    read_key(doc, "gmm_max_iter", cfg.gmm_max_iter, origin);
    read_key(doc, "variance_floor", cfg.variance_floor, origin);
    read_key(doc, "subsample_cap", cfg.subsample_cap, origin);
    read_key(doc, "pca_dim", cfg.pca_dim, origin);
    read_key(doc, "svm_c", cfg.svm_c, origin);
    read_key(doc, "svm_epochs", cfg.svm_epochs, origin);
    read_key(doc, "seed", cfg.seed, origin);
    read_key(doc, "workers", cfg.workers, origin);
    cfg.validate();
    return cfg;
}

std::string config_to_json(const PipelineConfig& cfg) {
    nlohmann::ordered_json doc;
    doc["block_size"] = cfg.block_size;
    doc["search_range"] = cfg.search_range;
    doc["tau"] = cfg.tau;
    doc["stride"] = cfg.stride;
    doc["window"] = cfg.descriptor.window;
    doc["traj_len"] = cfg.descriptor.traj_len;
    doc["grid_x"] = cfg.descriptor.grid_x;
    doc["grid_y"] = cfg.descriptor.grid_y;
    doc["grid_t"] = cfg.descriptor.grid_t;
    doc["orient_bins"] = cfg.descriptor.orient_bins;
    doc["epsilon_zero_flow"] = cfg.descriptor.epsilon_zero_flow;
    doc["channels"] = cfg.channels;
    doc["gmm_k"] = cfg.gmm_k;
    doc["gmm_max_iter"] = cfg.gmm_max_iter;
    doc["variance_floor"] = cfg.variance_floor;
    doc["subsample_cap"] = cfg.subsample_cap;
    doc["pca_dim"] = cfg.pca_dim;
    doc["svm_c"] = cfg.svm_c;
    doc["svm_epochs"] = cfg.svm_epochs;
    doc["seed"] = cfg.seed;
    doc["workers"] = cfg.workers;
    return doc.dump(2) + "\n";
}

PipelineConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError(path.string() + ": cannot open config file");
    std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return parse_config_json(text, path.string());
}

void save_config(const std::filesystem::path& path, const PipelineConfig& config) {
    config.validate();
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw DataError(path.string() + ": cannot open for writing");
    out << config_to_json(config);
    if (!out) throw DataError(path.string() + ": write failed");
}

}  // namespace hodg
