#include "kfol/clause_file.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

namespace kfol {

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

// Strips a '#' comment, ignoring '#' inside quoted identifiers.
std::string_view strip_comment(std::string_view line) {
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    if (line[i] == '"') quoted = !quoted;
    if (line[i] == '#' && !quoted) return line.substr(0, i);
  }
  return line;
}

void parse_options(std::string_view options, ClauseEntry& entry, std::size_t line) {
  std::size_t start = 0;
  while (start <= options.size()) {
    const auto comma = options.find(',', start);
    const std::string_view item = trim(options.substr(start, comma == std::string_view::npos ? std::string_view::npos
                                                                                            : comma - start));
    start = comma == std::string_view::npos ? options.size() + 1 : comma + 1;
    if (item.empty()) continue;
    const auto eq = item.find('=');
    if (eq == std::string_view::npos) {
      throw Error(Errc::SyntaxError, "line " + std::to_string(line) + ": clause option without '='");
    }
    const std::string_view key = trim(item.substr(0, eq));
    const std::string_view value = trim(item.substr(eq + 1));
    if (key == "w") {
      double w = 0;
      const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), w);
      if (ec != std::errc{} || ptr != value.data() + value.size() || !std::isfinite(w) || w < 0) {
        throw Error(Errc::SyntaxError, "line " + std::to_string(line) + ": clause weight must be a non-negative number");
      }
      entry.weight = w;
    } else if (key == "guard") {
      entry.guard = std::string(value);
    } else if (key == "name") {
      entry.name = std::string(value);
    } else {
      throw Error(Errc::SyntaxError, "line " + std::to_string(line) + ": unknown clause option '" + std::string(key) + "'");
    }
  }
}

}  // namespace

std::vector<ClauseEntry> parse_clause_file(std::string_view text, const std::vector<PredicateSignature>& signatures) {
  std::vector<ClauseEntry> entries;
  std::set<std::string> names;
  std::size_t line_no = 0;
  std::size_t begin = 0;
  while (begin <= text.size()) {
    const auto end = text.find('\n', begin);
    std::string_view line = text.substr(begin, end == std::string_view::npos ? std::string_view::npos : end - begin);
    begin = end == std::string_view::npos ? text.size() + 1 : end + 1;
    ++line_no;

    line = trim(strip_comment(line));
    if (line.empty()) continue;

    ClauseEntry entry;
    entry.line = line_no;
    if (line.front() == '[') {
      const auto close = line.find(']');
      if (close == std::string_view::npos) {
        throw Error(Errc::SyntaxError, "line " + std::to_string(line_no) + ": unterminated option prefix");
      }
      parse_options(line.substr(1, close - 1), entry, line_no);
      line = trim(line.substr(close + 1));
    }
    if (entry.name.empty()) entry.name = "c" + std::to_string(entries.size() + 1);
    if (!names.insert(entry.name).second) {
      throw Error(Errc::SyntaxError, "line " + std::to_string(line_no) + ": duplicate clause name '" + entry.name + "'");
    }
    entry.source = std::string(line);
    try {
      entry.ast = parse_clause(line, signatures);
    } catch (const Error& e) {
      throw Error(e.code(), "line " + std::to_string(line_no) + ": " + e.what(), e.position());
    }
    entries.push_back(std::move(entry));
  }
  return entries;
}

std::vector<ClauseEntry> read_clause_file(const std::string& path, const std::vector<PredicateSignature>& signatures) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::MissingFile, "cannot open clause file '" + path + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_clause_file(buffer.str(), signatures);
}

}  // namespace kfol
