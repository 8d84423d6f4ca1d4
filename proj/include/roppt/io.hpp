#pragma once

#include <charconv>
#include <fstream>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "roppt/corpus.hpp"
#include "roppt/error.hpp"

namespace roppt {

enum class CorpusFormat { jsonl, conllu };

inline CorpusFormat parse_format(std::string_view s) {
  if (s == "jsonl") return CorpusFormat::jsonl;
  if (s == "conllu") return CorpusFormat::conllu;
  throw std::invalid_argument("unknown corpus format '" + std::string(s) +
                              "' (expected jsonl or conllu)");
}

inline nlohmann::ordered_json instance_to_json(const Instance& ins) {
  nlohmann::ordered_json j;
  j["tokens"] = ins.forms;
  j["heads"] = ins.heads;
  j["target_idx"] = ins.target_idx;
  j["label"] = ins.label;
  return j;
}

inline Instance instance_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw std::invalid_argument("record is not a JSON object");
  for (const char* key : {"tokens", "heads", "target_idx", "label"})
    if (!j.contains(key)) throw std::invalid_argument(std::string("missing field '") + key + "'");
  Instance ins;
  ins.forms = j.at("tokens").get<std::vector<std::string>>();
  ins.heads = j.at("heads").get<std::vector<int>>();
  ins.target_idx = j.at("target_idx").get<int>();
  ins.label = j.at("label").get<int>();
  return ins;
}

// One JSON record per line:
//   {"tokens": [...], "heads": [...], "target_idx": K, "label": 0|1}
// heads use -1 for the root token. Order is preserved.
inline Corpus load_jsonl(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError(path + ": cannot open file");
  Corpus corpus;
  corpus.name = path;
  std::string line;
  long line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    auto fail = [&](const std::string& what) -> ParseError {
      return ParseError(path + ":" + std::to_string(line_no) + ": " + what);
    };
    Instance ins;
    try {
      ins = instance_from_json(nlohmann::json::parse(line));
    } catch (const nlohmann::json::exception& e) {
      throw fail(std::string("invalid JSON: ") + e.what());
    } catch (const std::invalid_argument& e) {
      throw fail(e.what());
    }
    if (auto err = check_instance(ins)) throw fail(*err);
    corpus.instances.push_back(std::move(ins));
  }
  return corpus;
}

inline void save_jsonl(const Corpus& corpus, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw ParseError(path + ": cannot open file for writing");
  for (const Instance& ins : corpus.instances) out << instance_to_json(ins).dump() << "\n";
  if (!out) throw ParseError(path + ": write failed");
}

namespace detail {

inline std::vector<std::string_view> split_tabs(std::string_view line) {
  std::vector<std::string_view> cols;
  std::size_t start = 0;
  while (true) {
    std::size_t tab = line.find('\t', start);
    if (tab == std::string_view::npos) {
      cols.push_back(line.substr(start));
      break;
    }
    cols.push_back(line.substr(start, tab - start));
    start = tab + 1;
  }
  return cols;
}

inline bool parse_plain_int(std::string_view s, int& out) {
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc() && ptr == s.data() + s.size();
}

// "# key = value" comment; returns value when key matches.
inline bool comment_value(std::string_view line, std::string_view key, std::string_view& out) {
  std::size_t pos = 1;  // past '#'
  while (pos < line.size() && line[pos] == ' ') ++pos;
  if (line.substr(pos, key.size()) != key) return false;
  pos += key.size();
  while (pos < line.size() && line[pos] == ' ') ++pos;
  if (pos >= line.size() || line[pos] != '=') return false;
  ++pos;
  while (pos < line.size() && line[pos] == ' ') ++pos;
  out = line.substr(pos);
  while (!out.empty() && (out.back() == ' ' || out.back() == '\r')) out.remove_suffix(1);
  return true;
}

}  // namespace detail

// 10-column CoNLL-U, reading only ID, FORM and HEAD. Sentences are separated
// by blank lines; multiword-token ranges ("3-4") and empty nodes ("3.1") are
// skipped. Supervision rides on two per-sentence comments:
//   # target_idx = K
//   # label = 0|1
inline Corpus load_conllu(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError(path + ": cannot open file");
  Corpus corpus;
  corpus.name = path;

  Instance cur;
  int target = -1, label = -1;
  long line_no = 0, sent_start = 0;
  auto fail = [&](long ln, const std::string& what) -> ParseError {
    return ParseError(path + ":" + std::to_string(ln) + ": " + what);
  };
  auto flush = [&]() {
    if (cur.forms.empty()) {
      target = label = -1;
      return;
    }
    if (target < 0) throw fail(sent_start, "missing '# target_idx = K' comment");
    if (label < 0) throw fail(sent_start, "missing '# label = 0|1' comment");
    cur.target_idx = target;
    cur.label = label;
    if (auto err = check_instance(cur)) throw fail(sent_start, *err);
    corpus.instances.push_back(std::move(cur));
    cur = Instance{};
    target = label = -1;
  };

  std::string line;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) {
      flush();
      continue;
    }
    if (line[0] == '#') {
      std::string_view value;
      int v = 0;
      if (detail::comment_value(line, "target_idx", value)) {
        if (!detail::parse_plain_int(value, v)) throw fail(line_no, "bad target_idx comment");
        target = v;
      } else if (detail::comment_value(line, "label", value)) {
        if (!detail::parse_plain_int(value, v)) throw fail(line_no, "bad label comment");
        label = v;
      }
      continue;
    }
    if (cur.forms.empty()) sent_start = line_no;
    auto cols = detail::split_tabs(line);
    if (cols.size() < 8) throw fail(line_no, "expected at least 8 tab-separated columns");
    int id = 0;
    if (!detail::parse_plain_int(cols[0], id)) continue;  // range or empty-node ID
    if (id != static_cast<int>(cur.forms.size()) + 1)
      throw fail(line_no, "non-consecutive token ID " + std::string(cols[0]));
    int head = 0;
    if (!detail::parse_plain_int(cols[6], head) || head < 0)
      throw fail(line_no, "bad HEAD value '" + std::string(cols[6]) + "'");
    cur.forms.emplace_back(cols[1]);
    cur.heads.push_back(head == 0 ? kRootHead : head - 1);
  }
  flush();
  return corpus;
}

inline Corpus load_instances(const std::string& path, CorpusFormat format) {
  return format == CorpusFormat::jsonl ? load_jsonl(path) : load_conllu(path);
}

}  // namespace roppt
