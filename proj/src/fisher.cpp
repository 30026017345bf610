#include "hodg/fisher.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <set>

#include <json.hpp>

#include "hodg/binary_io.hpp"
#include "hodg/descriptors.hpp"
#include "hodg/errors.hpp"

namespace hodg {

std::vector<double> fisher_encode_raw(const GmmCodebook& cb, const Matrix& samples) {
    if (samples.rows == 0) throw NumericError("fisher_encode: empty descriptor set");
    if (static_cast<int>(samples.cols) != cb.d)
        throw DataError("fisher_encode: descriptor dimension " + std::to_string(samples.cols) +
                        " does not match codebook D=" + std::to_string(cb.d));

    const std::size_t n = samples.rows;
    std::vector<double> fv(static_cast<std::size_t>(cb.k) * cb.d, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        const double* x = samples.row(i);
        const std::vector<double> gamma = posteriors(cb, {x, static_cast<std::size_t>(cb.d)});
        for (int c = 0; c < cb.k; ++c) {
            if (gamma[c] == 0.0) continue;
            double* out = &fv[static_cast<std::size_t>(c) * cb.d];
            for (int j = 0; j < cb.d; ++j)
                out[j] += gamma[c] * (x[j] - cb.mean(c, j)) / std::sqrt(cb.variance(c, j));
        }
    }
    for (int c = 0; c < cb.k; ++c) {
        const double scale = 1.0 / (static_cast<double>(n) * std::sqrt(cb.weights[c]));
        double* out = &fv[static_cast<std::size_t>(c) * cb.d];
        for (int j = 0; j < cb.d; ++j) out[j] *= scale;
    }
    return fv;
}

std::vector<double> fisher_encode(const GmmCodebook& cb, const Matrix& samples) {
    std::vector<double> fv = fisher_encode_raw(cb, samples);
    double norm2 = 0.0;
    for (double& v : fv) {
        v = (v < 0.0 ? -std::sqrt(-v) : std::sqrt(v));
        norm2 += v * v;
    }
    if (norm2 > 0.0) {
        const double inv = 1.0 / std::sqrt(norm2);
        for (double& v : fv) v *= inv;
    }
    return fv;
}

std::vector<double> concat_channels(const std::vector<std::string>& names,
                                    const std::vector<std::vector<double>>& vectors) {
    if (names.size() != vectors.size())
        throw ConfigError("concat_channels: names and vectors differ in length");
    std::map<int, const std::vector<double>*> by_order;
    for (std::size_t i = 0; i < names.size(); ++i) {
        int order = -1;
        for (int c = 0; c < kNumChannels; ++c)
            if (names[i] == kChannelNames[c]) order = c;
        if (order < 0) throw ConfigError("concat_channels: unknown channel \"" + names[i] + "\"");
        if (!by_order.emplace(order, &vectors[i]).second)
            throw ConfigError("concat_channels: duplicate channel \"" + names[i] + "\"");
    }
    if (by_order.empty()) throw NumericError("concat_channels: no channels given");
    std::vector<double> out;
    for (const auto& [order, vec] : by_order) out.insert(out.end(), vec->begin(), vec->end());
    return out;
}

void write_fv_dump(const std::filesystem::path& path, const EncodedSet& set) {
    if (set.labels.size() != set.features.rows)
        throw DataError("write_fv_dump: label count does not match feature rows");

    std::vector<std::string> unique(set.labels.begin(), set.labels.end());
    std::sort(unique.begin(), unique.end());
    unique.erase(std::unique(unique.begin(), unique.end()), unique.end());
    if (unique.size() > 0xFFFF) throw DataError("write_fv_dump: more than 65535 distinct labels");
    std::map<std::string, std::uint16_t> ids;
    for (std::size_t i = 0; i < unique.size(); ++i) ids[unique[i]] = static_cast<std::uint16_t>(i);

    std::string buf = "FVEC1";
    bin::put_u32(buf, static_cast<std::uint32_t>(set.features.rows));
    bin::put_u32(buf, static_cast<std::uint32_t>(set.features.cols));
    for (std::size_t i = 0; i < set.features.rows; ++i) {
        bin::put_u16(buf, ids.at(set.labels[i]));
        const double* row = set.features.row(i);
        for (std::size_t j = 0; j < set.features.cols; ++j)
            bin::put_f32(buf, static_cast<float>(row[j]));
    }
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw DataError(path.string() + ": cannot open for writing");
    out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
    if (!out) throw DataError(path.string() + ": write failed");

    nlohmann::ordered_json doc;
    doc["format"] = "hodg-labels";
    doc["version"] = 1;
    doc["labels"] = unique;
    const std::filesystem::path side = path.string() + ".labels.json";
    std::ofstream sout(side, std::ios::trunc);
    if (!sout) throw DataError(side.string() + ": cannot open for writing");
    sout << doc.dump(2) << '\n';
    if (!sout) throw DataError(side.string() + ": write failed");
}

EncodedSet read_fv_dump(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError(path.string() + ": cannot open file");
    std::string buf((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    bin::Reader rd{buf, 0, path.string()};
    rd.expect_magic("FVEC1");
    const std::uint32_t rows = rd.u32("row count");
    const std::uint32_t dim = rd.u32("dimension");

    const std::filesystem::path side = path.string() + ".labels.json";
    std::ifstream sin(side);
    if (!sin) throw DataError(side.string() + ": cannot open label sidecar");
    nlohmann::json doc;
    try {
        sin >> doc;
    } catch (const nlohmann::json::parse_error& e) {
        throw DataError(side.string() + ": invalid JSON: " + e.what());
    }
    if (doc.value("format", "") != "hodg-labels")
        throw DataError(side.string() + ": not a label sidecar (format field mismatch)");
    const auto table = doc.at("labels").get<std::vector<std::string>>();

    EncodedSet set;
    set.features = Matrix(rows, dim);
    set.labels.reserve(rows);
    for (std::uint32_t i = 0; i < rows; ++i) {
        const std::uint16_t id = rd.u16("label id");
        if (id >= table.size())
            throw DataError(path.string() + ": label id " + std::to_string(id) +
                            " out of range for sidecar table of size " + std::to_string(table.size()));
        set.labels.push_back(table[id]);
        double* row = set.features.row(i);
        for (std::uint32_t j = 0; j < dim; ++j) row[j] = rd.f32("feature value");
    }
    if (rd.pos != buf.size())
        throw DataError(path.string() + ": " + std::to_string(buf.size() - rd.pos) +
                        " trailing bytes after last record");
    return set;
}

}  // namespace hodg
