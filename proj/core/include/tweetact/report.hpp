#pragma once

#include <string>
#include <string_view>

#include "tweetact/metrics.hpp"

namespace tweetact {

enum class ReportFormat { kTable, kCsv };

ReportFormat parse_report_format(std::string_view name);

// Full-precision values plus a "rounded" section at two decimals.
std::string report_to_json(const MetricsReport& report);
// Accepts what report_to_json writes. Throws kMalformedReport.
MetricsReport report_from_json(std::string_view json_text);

// Table: one "<class> P R F1 support" line per class, then Acc, M-F1, W-F1.
// CSV: columns scope,precision,recall,f1,support,accuracy,macro_f1,weighted_f1
// with one row per class and a final "aggregate" row.
std::string render_report(const MetricsReport& report, ReportFormat format);
std::string render_report(std::string_view json_text, ReportFormat format);

// Header `gold\pred,<classes>`; rows are gold classes.
std::string confusion_to_csv(const ConfusionMatrix& cm);

}  // namespace tweetact
