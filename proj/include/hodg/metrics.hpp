#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "hodg/matrix.hpp"
#include "hodg/svm.hpp"

namespace hodg {

struct EvalReport {
    std::vector<std::string> classes;   // classes that received an AP
    std::vector<double> per_class_ap;   // parallel to classes
    double map = 0.0;                   // arithmetic mean of per_class_ap
    std::vector<std::string> warnings;  // e.g. classes absent from the test set
    Matrix scores;                      // n_test x n_model_classes, kept for audit
};

// AP with ranks formed by sorting scores descending, ties broken by original
// index ascending; AP = mean over positives of precision at their rank.
// Throws DataError when sizes differ or no positive is present.
double average_precision(const std::vector<double>& scores, const std::vector<bool>& positives);

// One-vs-rest evaluation: per-class AP over the model's score columns and
// their mean. Model classes absent from `labels` are skipped with a warning
// recorded in the report instead of contributing an AP.
EvalReport evaluate(const SvmModel& model, const Matrix& features,
                    const std::vector<std::string>& labels);

// JSON report (format/version fields, per-class AP map, mAP, warnings).
void save_report(const std::filesystem::path& path, const EvalReport& report);
EvalReport load_report(const std::filesystem::path& path);

// Aligned two-column text table (class, AP) with a mAP footer row.
std::string format_report_table(const EvalReport& report);

}  // namespace hodg
