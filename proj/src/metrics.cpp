#include "hodg/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <numeric>
#include <set>
#include <sstream>

#include <json.hpp>

#include "hodg/errors.hpp"

namespace hodg {

double average_precision(const std::vector<double>& scores, const std::vector<bool>& positives) {
    if (scores.size() != positives.size())
        throw DataError("average_precision: scores and positives differ in length");
    const std::size_t n = scores.size();
    std::size_t n_pos = 0;
    for (const bool p : positives) n_pos += p ? 1 : 0;
    if (n_pos == 0) throw DataError("average_precision: no positive samples");

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        if (scores[a] != scores[b]) return scores[a] > scores[b];
        return a < b;
    });

    double ap = 0.0;
    std::size_t hits = 0;
    for (std::size_t rank = 0; rank < n; ++rank) {
        if (!positives[order[rank]]) continue;
        ++hits;
        ap += static_cast<double>(hits) / static_cast<double>(rank + 1);
    }
    return ap / static_cast<double>(n_pos);
}

EvalReport evaluate(const SvmModel& model, const Matrix& features,
                    const std::vector<std::string>& labels) {
    if (labels.size() != features.rows)
        throw DataError("evaluate: label count does not match feature rows");
    if (features.rows == 0) throw DataError("evaluate: empty test set");

    EvalReport report;
    report.scores = Matrix(features.rows, model.classes.size());
    for (std::size_t i = 0; i < features.rows; ++i) {
        const std::vector<double> s = predict_scores(model, features.row_span(i));
        std::copy(s.begin(), s.end(), report.scores.row(i));
    }

    const std::set<std::string> present(labels.begin(), labels.end());
    for (std::size_t cls = 0; cls < model.classes.size(); ++cls) {
        if (!present.count(model.classes[cls])) {
            report.warnings.push_back("class \"" + model.classes[cls] +
                                      "\" absent from test labels; excluded from mAP");
            continue;
        }
        std::vector<double> col(features.rows);
        std::vector<bool> pos(features.rows);
        for (std::size_t i = 0; i < features.rows; ++i) {
            col[i] = report.scores.at(i, cls);
            pos[i] = labels[i] == model.classes[cls];
        }
        report.classes.push_back(model.classes[cls]);
        report.per_class_ap.push_back(average_precision(col, pos));
    }
    if (report.classes.empty())
        throw DataError("evaluate: no model class appears in the test labels");
    report.map = std::accumulate(report.per_class_ap.begin(), report.per_class_ap.end(), 0.0) /
                 static_cast<double>(report.per_class_ap.size());
    return report;
}

void save_report(const std::filesystem::path& path, const EvalReport& report) {
    nlohmann::ordered_json doc;
    doc["format"] = "hodg-eval";
    doc["version"] = 1;
    nlohmann::ordered_json per_class = nlohmann::ordered_json::object();
    for (std::size_t i = 0; i < report.classes.size(); ++i)
        per_class[report.classes[i]] = report.per_class_ap[i];
    doc["per_class_ap"] = per_class;
    doc["map"] = report.map;
    doc["warnings"] = report.warnings;
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw DataError(path.string() + ": cannot open for writing");
    out << doc.dump(2) << '\n';
    if (!out) throw DataError(path.string() + ": write failed");
}

EvalReport load_report(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw DataError(path.string() + ": cannot open file");
    nlohmann::json doc;
    try {
        in >> doc;
    } catch (const nlohmann::json::parse_error& e) {
        throw DataError(path.string() + ": invalid JSON: " + e.what());
    }
    if (doc.value("format", "") != "hodg-eval")
        throw DataError(path.string() + ": not an eval report (format field mismatch)");
    EvalReport report;
    for (const auto& [name, ap] : doc.at("per_class_ap").items()) {
        report.classes.push_back(name);
        report.per_class_ap.push_back(ap.get<double>());
    }
    report.map = doc.at("map").get<double>();
    report.warnings = doc.at("warnings").get<std::vector<std::string>>();
    return report;
}

std::string format_report_table(const EvalReport& report) {
    std::size_t width = 5;  // "class"
    for (const std::string& c : report.classes) width = std::max(width, c.size());

    std::ostringstream out;
    out << std::fixed << std::setprecision(4);
    out << std::left << std::setw(static_cast<int>(width)) << "class" << "  AP\n";
    for (std::size_t i = 0; i < report.classes.size(); ++i)
        out << std::left << std::setw(static_cast<int>(width)) << report.classes[i] << "  "
            << report.per_class_ap[i] << '\n';
    out << std::left << std::setw(static_cast<int>(width)) << "mAP" << "  " << report.map << '\n';
    for (const std::string& w : report.warnings) out << "warning: " << w << '\n';
    return out.str();
}

}  // namespace hodg
