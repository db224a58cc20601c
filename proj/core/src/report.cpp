#include "tweetact/report.hpp"

#include <cstdio>
#include <iomanip>
#include <sstream>

#include "json.hpp"
#include "tweetact/error.hpp"
#include "tweetact/io.hpp"

namespace tweetact {
namespace {

using ojson = nlohmann::ordered_json;

std::string fixed2(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", round2(v));
  return buf;
}

}  // namespace

ReportFormat parse_report_format(std::string_view name) {
  if (name == "table") return ReportFormat::kTable;
  if (name == "csv") return ReportFormat::kCsv;
  fail(ErrorKind::kInvalidArgument, "unknown report format '" + std::string(name) + "'");
}

std::string report_to_json(const MetricsReport& report) {
  ojson doc;
  doc["classes"] = report.classes;
  doc["total"] = report.total;
  ojson per = ojson::array();
  ojson per_rounded = ojson::array();
  for (std::size_t c = 0; c < report.per_class.size(); ++c) {
    const auto& m = report.per_class[c];
    per.push_back({{"class", report.classes[c]},
                   {"precision", m.precision},
                   {"recall", m.recall},
                   {"f1", m.f1},
                   {"support", m.support}});
    per_rounded.push_back({{"class", report.classes[c]},
                           {"precision", round2(m.precision)},
                           {"recall", round2(m.recall)},
                           {"f1", round2(m.f1)},
                           {"support", m.support}});
  }
  doc["per_class"] = per;
  doc["accuracy"] = report.overall.accuracy;
  doc["macro_f1"] = report.overall.macro_f1;
  doc["weighted_f1"] = report.overall.weighted_f1;
  doc["rounded"] = {{"per_class", per_rounded},
                    {"accuracy", round2(report.overall.accuracy)},
                    {"macro_f1", round2(report.overall.macro_f1)},
                    {"weighted_f1", round2(report.overall.weighted_f1)}};
  if (report.confusion.size() == report.classes.size() && !report.classes.empty()) {
    ojson rows = ojson::array();
    for (std::size_t g = 0; g < report.confusion.size(); ++g) {
      ojson row = ojson::array();
      for (std::size_t p = 0; p < report.confusion.size(); ++p) row.push_back(report.confusion.at(g, p));
      rows.push_back(row);
    }
    doc["confusion"] = rows;
  }
  return doc.dump(2) + "\n";
}

MetricsReport report_from_json(std::string_view json_text) {
  ojson doc;
  try {
    doc = ojson::parse(json_text);
  } catch (const ojson::exception& e) {
    fail(ErrorKind::kMalformedReport, e.what());
  }
  MetricsReport report;
  try {
    if (!doc.is_object()) fail(ErrorKind::kMalformedReport, "report must be a JSON object");
    if (!doc.contains("per_class") || !doc["per_class"].is_array() || doc["per_class"].empty()) {
      fail(ErrorKind::kMalformedReport, "report has no per-class section");
    }
    for (const auto& row : doc["per_class"]) {
      report.classes.push_back(row.at("class").get<std::string>());
      ClassMetrics m;
      m.precision = row.at("precision").get<double>();
      m.recall = row.at("recall").get<double>();
      m.f1 = row.at("f1").get<double>();
      m.support = row.at("support").get<std::uint64_t>();
      report.per_class.push_back(m);
    }
    report.overall.accuracy = doc.at("accuracy").get<double>();
    report.overall.macro_f1 = doc.at("macro_f1").get<double>();
    report.overall.weighted_f1 = doc.at("weighted_f1").get<double>();
    report.total = doc.value("total", std::uint64_t{0});
    if (report.total == 0) {
      for (const auto& m : report.per_class) report.total += m.support;
    }
    if (auto it = doc.find("confusion"); it != doc.end()) {
      std::vector<std::uint64_t> cells;
      for (const auto& row : *it) {
        if (row.size() != report.classes.size()) {
          fail(ErrorKind::kMalformedReport, "confusion row width differs from class count");
        }
        for (const auto& v : row) cells.push_back(v.get<std::uint64_t>());
      }
      if (cells.size() != report.classes.size() * report.classes.size()) {
        fail(ErrorKind::kMalformedReport, "confusion matrix is not square");
      }
      report.confusion = ConfusionMatrix(Taxonomy(report.classes), std::move(cells));
    }
  } catch (const ojson::exception& e) {
    fail(ErrorKind::kMalformedReport, e.what());
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::kMalformedReport) throw;
    fail(ErrorKind::kMalformedReport, e.what());
  }
  return report;
}

std::string render_report(const MetricsReport& report, ReportFormat format) {
  if (report.per_class.empty()) fail(ErrorKind::kMalformedReport, "report has no per-class section");
  std::ostringstream out;
  if (format == ReportFormat::kCsv) {
    out << "scope,precision,recall,f1,support,accuracy,macro_f1,weighted_f1\n";
    for (std::size_t c = 0; c < report.per_class.size(); ++c) {
      const auto& m = report.per_class[c];
      out << csv_escape(report.classes[c]) << ',' << fixed2(m.precision) << ',' << fixed2(m.recall)
          << ',' << fixed2(m.f1) << ',' << m.support << ",,,\n";
    }
    out << "aggregate,,,," << report.total << ',' << fixed2(report.overall.accuracy) << ','
        << fixed2(report.overall.macro_f1) << ',' << fixed2(report.overall.weighted_f1) << '\n';
    return out.str();
  }

  std::size_t name_width = 5;
  for (const auto& n : report.classes) name_width = std::max(name_width, n.size());
  auto cell = [](const std::string& s) {
    std::ostringstream c;
    c << std::right << std::setw(6) << s;
    return c.str();
  };
  out << std::left << std::setw(static_cast<int>(name_width)) << "" << cell("P") << cell("R")
      << cell("F1") << std::setw(9) << std::right << "support" << '\n';
  for (std::size_t c = 0; c < report.per_class.size(); ++c) {
    const auto& m = report.per_class[c];
    out << std::left << std::setw(static_cast<int>(name_width)) << report.classes[c]
        << cell(fixed2(m.precision)) << cell(fixed2(m.recall)) << cell(fixed2(m.f1))
        << std::setw(9) << std::right << m.support << '\n';
  }
  out << '\n';
  out << std::left << std::setw(static_cast<int>(name_width)) << "Acc"
      << cell(fixed2(report.overall.accuracy)) << std::setw(9) << std::right << report.total << '\n';
  out << std::left << std::setw(static_cast<int>(name_width)) << "M-F1"
      << cell(fixed2(report.overall.macro_f1)) << '\n';
  out << std::left << std::setw(static_cast<int>(name_width)) << "W-F1"
      << cell(fixed2(report.overall.weighted_f1)) << '\n';
  return out.str();
}

std::string render_report(std::string_view json_text, ReportFormat format) {
  return render_report(report_from_json(json_text), format);
}

std::string confusion_to_csv(const ConfusionMatrix& cm) {
  std::ostringstream out;
  out << "gold\\pred";
  for (const auto& n : cm.taxonomy().names()) out << ',' << csv_escape(n);
  out << '\n';
  for (std::size_t g = 0; g < cm.size(); ++g) {
    out << csv_escape(cm.taxonomy().names()[g]);
    for (std::size_t p = 0; p < cm.size(); ++p) out << ',' << cm.at(g, p);
    out << '\n';
  }
  return out.str();
}

}  // namespace tweetact
