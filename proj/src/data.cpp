#include "kfol/data.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

namespace kfol {

SampleId SampleSet::add(std::span<const double> features) {
  if (features.size() != dimension_ || dimension_ == 0) {
    throw Error(Errc::DimensionMismatch, "sample " + std::to_string(size()) + " has " + std::to_string(features.size()) +
                                             " features, expected " + std::to_string(dimension_));
  }
  const SampleId id = size();
  values_.insert(values_.end(), features.begin(), features.end());
  return id;
}

void SampleSet::check_ids(std::span<const SampleId> ids, std::string_view where) const {
  for (const SampleId id : ids) {
    if (!contains(id)) {
      throw Error(Errc::DanglingSampleId, std::string(where) + " references sample id " + std::to_string(id) +
                                              " but only " + std::to_string(size()) + " samples exist");
    }
  }
}

std::vector<SampleId> pool_samples(std::span<const LabeledSet> labeled, std::span<const SampleId> unlabeled) {
  std::vector<SampleId> ids(unlabeled.begin(), unlabeled.end());
  for (const auto& set : labeled) {
    for (const auto& ex : set.examples) ids.insert(ids.end(), ex.args.begin(), ex.args.end());
  }
  std::sort(ids.begin(), ids.end());
  ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
  return ids;
}

std::string format_double(double value) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, ptr);
}

double parse_double(std::string_view text) {
  double value = 0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc{} || ptr != text.data() + text.size()) {
    throw Error(Errc::MalformedInput, "not a number: '" + std::string(text) + "'");
  }
  return value;
}

namespace {

struct Row {
  std::size_t line;
  std::vector<std::string_view> fields;
};

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::vector<Row> split_rows(std::string_view text) {
  std::vector<Row> rows;
  std::size_t begin = 0;
  std::size_t line = 0;
  while (begin < text.size()) {
    const auto end = text.find('\n', begin);
    const std::string_view raw = trim(text.substr(begin, end == std::string_view::npos ? std::string_view::npos : end - begin));
    begin = end == std::string_view::npos ? text.size() : end + 1;
    ++line;
    if (raw.empty() || raw.front() == '#') continue;
    Row row{line, {}};
    std::size_t start = 0;
    while (true) {
      const auto comma = raw.find(',', start);
      row.fields.push_back(trim(raw.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start)));
      if (comma == std::string_view::npos) break;
      start = comma + 1;
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

[[noreturn]] void malformed(const Row& row, const std::string& what) {
  throw Error(Errc::MalformedInput, "line " + std::to_string(row.line) + ": " + what);
}

SampleId parse_id(const Row& row, std::string_view field) {
  SampleId id = 0;
  const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), id);
  if (ec != std::errc{} || ptr != field.data() + field.size()) malformed(row, "bad sample id '" + std::string(field) + "'");
  return id;
}

double parse_value(const Row& row, std::string_view field) {
  double v = 0;
  const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
  if (ec != std::errc{} || ptr != field.data() + field.size() || !std::isfinite(v)) {
    malformed(row, "bad number '" + std::string(field) + "'");
  }
  return v;
}

std::vector<std::pair<IdTuple, double>> parse_tuple_rows(std::string_view text, std::size_t arity) {
  std::vector<std::pair<IdTuple, double>> out;
  for (const auto& row : split_rows(text)) {
    if (row.fields.size() != arity + 1) {
      malformed(row, "expected " + std::to_string(arity) + " ids and one value, got " + std::to_string(row.fields.size()) +
                         " fields");
    }
    IdTuple args;
    for (std::size_t i = 0; i < arity; ++i) args.push_back(parse_id(row, row.fields[i]));
    out.emplace_back(std::move(args), parse_value(row, row.fields[arity]));
  }
  return out;
}

}  // namespace

SampleSet parse_samples_csv(std::string_view text) {
  const auto rows = split_rows(text);
  if (rows.empty()) throw Error(Errc::MalformedInput, "samples file contains no rows");
  const std::size_t m = rows.front().fields.size() - 1;
  if (m == 0) malformed(rows.front(), "sample rows need an id and at least one feature");

  std::vector<const Row*> by_id(rows.size(), nullptr);
  for (const auto& row : rows) {
    if (row.fields.size() != m + 1) {
      throw Error(Errc::DimensionMismatch, "line " + std::to_string(row.line) + ": expected " + std::to_string(m) +
                                               " features, got " + std::to_string(row.fields.size() - 1));
    }
    const SampleId id = parse_id(row, row.fields[0]);
    if (id >= rows.size()) malformed(row, "sample ids must be dense 0.." + std::to_string(rows.size() - 1));
    if (by_id[id]) throw Error(Errc::DuplicateSampleId, "line " + std::to_string(row.line) + ": id " + std::to_string(id));
    by_id[id] = &row;
  }

  SampleSet samples(m);
  std::vector<double> features(m);
  for (const Row* row : by_id) {
    for (std::size_t j = 0; j < m; ++j) features[j] = parse_value(*row, row->fields[j + 1]);
    samples.add(features);
  }
  return samples;
}

LabeledSet parse_labeled_csv(std::string_view text, std::string predicate, std::size_t arity) {
  LabeledSet set{std::move(predicate), {}};
  for (auto& [args, y] : parse_tuple_rows(text, arity)) {
    if (y != 0.0 && y != 1.0) {
      throw Error(Errc::MalformedInput, "labels for '" + set.predicate + "' must be 0 or 1, got " + format_double(y));
    }
    set.examples.push_back({std::move(args), y});
  }
  return set;
}

KnownPredicateTable parse_known_csv(std::string_view text, std::string predicate, std::size_t arity,
                                    double default_value) {
  if (!(default_value >= 0 && default_value <= 1)) {
    throw Error(Errc::InvalidConfig, "default value of '" + predicate + "' must lie in [0,1]");
  }
  KnownPredicateTable table{std::move(predicate), arity, {}, default_value};
  for (auto& [args, v] : parse_tuple_rows(text, arity)) {
    if (v < 0 || v > 1) {
      throw Error(Errc::MalformedInput, "values of '" + table.predicate + "' must lie in [0,1], got " + format_double(v));
    }
    if (!table.entries.emplace(std::move(args), v).second) {
      throw Error(Errc::MalformedInput, "duplicate tuple in table for '" + table.predicate + "'");
    }
  }
  return table;
}

std::vector<SampleId> parse_id_list(std::string_view text) {
  std::vector<SampleId> ids;
  for (const auto& row : split_rows(text)) {
    if (row.fields.size() != 1) malformed(row, "expected a single id per line");
    ids.push_back(parse_id(row, row.fields[0]));
  }
  return ids;
}

std::string samples_to_csv(const SampleSet& samples) {
  std::string out;
  for (SampleId id = 0; id < samples.size(); ++id) {
    out += std::to_string(id);
    for (const double x : samples[id]) {
      out += ',';
      out += format_double(x);
    }
    out += '\n';
  }
  return out;
}

namespace {

void append_tuple_row(std::string& out, const IdTuple& args, double value) {
  for (const SampleId id : args) {
    out += std::to_string(id);
    out += ',';
  }
  out += format_double(value);
  out += '\n';
}

}  // namespace

std::string labeled_to_csv(const LabeledSet& set) {
  std::string out;
  for (const auto& ex : set.examples) append_tuple_row(out, ex.args, ex.target);
  return out;
}

std::string known_to_csv(const KnownPredicateTable& table) {
  std::string out;
  for (const auto& [args, v] : table.entries) append_tuple_row(out, args, v);
  return out;
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::MissingFile, "cannot open '" + path + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

void write_text_file(const std::string& path, std::string_view contents) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(Errc::MissingFile, "cannot write '" + path + "'");
  out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
  if (!out) throw Error(Errc::MissingFile, "failed writing '" + path + "'");
}

}  // namespace kfol
