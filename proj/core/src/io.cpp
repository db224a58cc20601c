#include "tweetact/io.hpp"

#include <charconv>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <unordered_map>

#include "json.hpp"
#include "tweetact/error.hpp"

namespace tweetact {
namespace {

using json = nlohmann::json;

std::ifstream open_in(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorKind::kIo, "cannot open '" + path + "' for reading");
  return in;
}

std::ofstream open_out(const std::string& path) {
  const std::filesystem::path p(path);
  if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) fail(ErrorKind::kIo, "cannot open '" + path + "' for writing");
  return out;
}

void finish(std::ostream& out, const std::string& path) {
  out.flush();
  if (!out) fail(ErrorKind::kIo, "write to '" + path + "' failed");
}

std::string where(std::string_view source, std::size_t line) {
  return std::string(source) + ":" + std::to_string(line);
}

// Dump with invalid UTF-8 replaced instead of throwing.
std::string dump_line(const json& j) {
  return j.dump(-1, ' ', false, json::error_handler_t::replace);
}

template <typename Fn>
void for_each_json_line(std::istream& in, std::string_view source, Fn&& fn) {
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    json j;
    try {
      j = json::parse(line);
    } catch (const json::exception& e) {
      fail(ErrorKind::kParse, where(source, lineno) + ": " + e.what());
    }
    if (!j.is_object()) fail(ErrorKind::kParse, where(source, lineno) + ": expected an object");
    try {
      fn(j, lineno);
    } catch (const json::exception& e) {
      fail(ErrorKind::kParse, where(source, lineno) + ": " + e.what());
    }
  }
}

std::string required_string(const json& j, const char* key, std::string_view source,
                            std::size_t lineno) {
  auto it = j.find(key);
  if (it == j.end() || !it->is_string()) {
    fail(ErrorKind::kParse,
         where(source, lineno) + ": field '" + key + "' missing or not a string");
  }
  return it->get<std::string>();
}

double parse_double(std::string_view field, std::string_view context) {
  double value = 0.0;
  const auto* begin = field.data();
  const auto* end = field.data() + field.size();
  while (begin < end && (*begin == ' ' || *begin == '\t')) ++begin;
  while (end > begin && (end[-1] == ' ' || end[-1] == '\t')) --end;
  if (begin < end && *begin == '+') ++begin;
  const auto [ptr, ec] = std::from_chars(begin, end, value);
  if (ec != std::errc() || ptr != end || begin == end) {
    fail(ErrorKind::kParse, std::string(context) + ": '" + std::string(field) + "' is not a number");
  }
  return value;
}

}  // namespace

std::vector<RawTweet> read_tweets_jsonl(std::istream& in, std::string_view source) {
  std::vector<RawTweet> out;
  for_each_json_line(in, source, [&](const json& j, std::size_t lineno) {
    RawTweet t;
    t.id = required_string(j, "id", source, lineno);
    if (t.id.empty()) fail(ErrorKind::kParse, where(source, lineno) + ": empty id");
    t.text = required_string(j, "text", source, lineno);
    if (auto it = j.find("label"); it != j.end() && !it->is_null()) t.label = it->get<std::string>();
    if (auto it = j.find("votes"); it != j.end() && !it->is_null()) {
      t.votes = it->get<std::vector<std::string>>();
    }
    out.push_back(std::move(t));
  });
  return out;
}

std::vector<RawTweet> read_tweets_jsonl(const std::string& path) {
  auto in = open_in(path);
  return read_tweets_jsonl(in, path);
}

void write_tweets_jsonl(std::ostream& out, std::span<const RawTweet> tweets) {
  for (const auto& t : tweets) {
    json j = {{"id", t.id}, {"text", t.text}};
    if (t.label) j["label"] = *t.label;
    if (!t.votes.empty()) j["votes"] = t.votes;
    out << dump_line(j) << '\n';
  }
}

void write_tweets_jsonl(const std::string& path, std::span<const RawTweet> tweets) {
  auto out = open_out(path);
  write_tweets_jsonl(out, tweets);
  finish(out, path);
}

void write_normalized_jsonl(std::ostream& out, std::span<const NormalizedTweet> tweets) {
  for (const auto& t : tweets) {
    std::string text;
    for (std::size_t i = 0; i < t.tokens.size(); ++i) {
      if (i) text.push_back(' ');
      text += t.tokens[i];
    }
    json j = {{"id", t.id}, {"text", text}};
    if (t.label) j["label"] = *t.label;
    if (!t.votes.empty()) j["votes"] = t.votes;
    out << dump_line(j) << '\n';
  }
}

void write_normalized_jsonl(const std::string& path, std::span<const NormalizedTweet> tweets) {
  auto out = open_out(path);
  write_normalized_jsonl(out, tweets);
  finish(out, path);
}

LabeledDataset read_labeled_jsonl(std::istream& in, const Taxonomy& taxonomy,
                                  std::string_view source) {
  LabeledDataset ds{taxonomy, {}};
  std::unordered_map<std::string, std::size_t> seen;
  for_each_json_line(in, source, [&](const json& j, std::size_t lineno) {
    LabeledItem item;
    item.id = required_string(j, "id", source, lineno);
    item.tokens = split_whitespace(required_string(j, "text", source, lineno));
    const auto label = required_string(j, "label", source, lineno);
    const auto c = taxonomy.find(label);
    if (!c) {
      fail(ErrorKind::kUnknownLabel,
           where(source, lineno) + ": label '" + label + "' is not in the taxonomy");
    }
    item.label = *c;
    if (auto it = j.find("source_id"); it != j.end() && !it->is_null()) {
      item.source_id = it->get<std::string>();
    }
    if (!seen.emplace(item.id, lineno).second) {
      fail(ErrorKind::kDuplicateId, where(source, lineno) + ": id '" + item.id + "' repeated");
    }
    ds.items.push_back(std::move(item));
  });
  return ds;
}

LabeledDataset read_labeled_jsonl(const std::string& path, const Taxonomy& taxonomy) {
  auto in = open_in(path);
  return read_labeled_jsonl(in, taxonomy, path);
}

void write_labeled_jsonl(std::ostream& out, const LabeledDataset& dataset) {
  for (const auto& item : dataset.items) {
    std::string text;
    for (std::size_t i = 0; i < item.tokens.size(); ++i) {
      if (i) text.push_back(' ');
      text += item.tokens[i];
    }
    json j = {{"id", item.id}, {"text", text}, {"label", dataset.taxonomy.name(item.label)}};
    if (item.source_id) j["source_id"] = *item.source_id;
    out << dump_line(j) << '\n';
  }
}

void write_labeled_jsonl(const std::string& path, const LabeledDataset& dataset) {
  auto out = open_out(path);
  write_labeled_jsonl(out, dataset);
  finish(out, path);
}

std::vector<std::string> parse_csv_line(std::string_view line) {
  std::vector<std::string> fields;
  std::string field;
  bool quoted = false;
  bool field_started_quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char ch = line[i];
    if (quoted) {
      if (ch == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          field.push_back('"');
          ++i;
        } else {
          quoted = false;
        }
      } else {
        field.push_back(ch);
      }
    } else if (ch == '"' && field.empty() && !field_started_quoted) {
      quoted = true;
      field_started_quoted = true;
    } else if (ch == ',') {
      fields.push_back(std::move(field));
      field.clear();
      field_started_quoted = false;
    } else {
      field.push_back(ch);
    }
  }
  if (quoted) fail(ErrorKind::kParse, "unterminated quoted CSV field");
  fields.push_back(std::move(field));
  return fields;
}

std::string csv_escape(std::string_view field) {
  if (field.find_first_of(",\"\n\r") == std::string_view::npos) return std::string(field);
  std::string out = "\"";
  for (char ch : field) {
    if (ch == '"') out.push_back('"');
    out.push_back(ch);
  }
  out.push_back('"');
  return out;
}

std::string format_double(double value) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, value);
  if (ec != std::errc()) fail(ErrorKind::kInvalidArgument, "cannot format number");
  return std::string(buf, ptr);
}

ProbabilityMatrix read_probability_csv(std::istream& in, std::string model_id) {
  std::string line;
  std::size_t lineno = 0;
  std::vector<std::string> header;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (!line.empty()) break;
  }
  if (line.empty()) fail(ErrorKind::kParse, "probability CSV for '" + model_id + "' is empty");
  if (line.rfind("\xEF\xBB\xBF", 0) == 0) line.erase(0, 3);
  header = parse_csv_line(line);
  if (header.size() < 2 || header.front() != "id") {
    fail(ErrorKind::kParse, "probability CSV header must be id,<class1>,...");
  }
  ProbabilityMatrix m(std::move(model_id), {header.begin() + 1, header.end()});
  std::vector<double> row(m.cols());
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto fields = parse_csv_line(line);
    const auto ctx = "probability CSV line " + std::to_string(lineno);
    if (fields.size() != header.size()) {
      fail(ErrorKind::kParse, ctx + ": expected " + std::to_string(header.size()) +
                                  " fields, got " + std::to_string(fields.size()));
    }
    for (std::size_t c = 0; c < m.cols(); ++c) row[c] = parse_double(fields[c + 1], ctx);
    m.add_row(fields[0], row);
  }
  return m;
}

ProbabilityMatrix read_probability_csv(const std::string& path, std::string model_id) {
  auto in = open_in(path);
  if (model_id.empty()) model_id = std::filesystem::path(path).stem().string();
  try {
    return read_probability_csv(in, std::move(model_id));
  } catch (const Error& e) {
    fail(e.kind(), path + ": " + e.what());
  }
}

void write_probability_csv(std::ostream& out, const ProbabilityMatrix& matrix) {
  out << "id";
  for (const auto& c : matrix.class_names()) out << ',' << csv_escape(c);
  out << '\n';
  for (std::size_t i = 0; i < matrix.rows(); ++i) {
    out << csv_escape(matrix.ids()[i]);
    for (double p : matrix.row(i)) out << ',' << format_double(p);
    out << '\n';
  }
}

void write_probability_csv(const std::string& path, const ProbabilityMatrix& matrix) {
  auto out = open_out(path);
  write_probability_csv(out, matrix);
  finish(out, path);
}

std::vector<Prediction> read_predictions_tsv(std::istream& in, const Taxonomy& taxonomy) {
  std::vector<Prediction> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto t1 = line.find('\t');
    const auto t2 = t1 == std::string::npos ? t1 : line.find('\t', t1 + 1);
    if (t2 == std::string::npos) {
      fail(ErrorKind::kParse, "predictions line " + std::to_string(lineno) +
                                  ": expected id<TAB>label<TAB>score");
    }
    Prediction p;
    p.id = line.substr(0, t1);
    const auto label = line.substr(t1 + 1, t2 - t1 - 1);
    p.label = taxonomy.index_of(label);
    p.score = parse_double(std::string_view(line).substr(t2 + 1),
                           "predictions line " + std::to_string(lineno));
    out.push_back(std::move(p));
  }
  return out;
}

std::vector<Prediction> read_predictions_tsv(const std::string& path, const Taxonomy& taxonomy) {
  auto in = open_in(path);
  return read_predictions_tsv(in, taxonomy);
}

void write_predictions_tsv(std::ostream& out, std::span<const Prediction> predictions,
                           const Taxonomy& taxonomy) {
  for (const auto& p : predictions) {
    out << p.id << '\t' << taxonomy.name(p.label) << '\t' << format_double(p.score) << '\n';
  }
}

void write_predictions_tsv(const std::string& path, std::span<const Prediction> predictions,
                           const Taxonomy& taxonomy) {
  auto out = open_out(path);
  write_predictions_tsv(out, predictions, taxonomy);
  finish(out, path);
}

std::vector<std::string> split_whitespace(std::string_view text) {
  std::vector<std::string> out;
  std::size_t i = 0;
  auto is_ws = [](char c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v'; };
  while (i < text.size()) {
    while (i < text.size() && is_ws(text[i])) ++i;
    std::size_t j = i;
    while (j < text.size() && !is_ws(text[j])) ++j;
    if (j > i) out.emplace_back(text.substr(i, j - i));
    i = j;
  }
  return out;
}

std::string read_file(const std::string& path) {
  auto in = open_in(path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_file(const std::string& path, std::string_view content) {
  auto out = open_out(path);
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
  finish(out, path);
}

}  // namespace tweetact
