#pragma once

#include <cstddef>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "kfol/error.hpp"

namespace kfol {

using SampleId = std::size_t;
using IdTuple = std::vector<SampleId>;

/// Feature vectors in R^m with dense ids 0..size()-1. Stored row-major.
class SampleSet {
 public:
  SampleSet() = default;
  explicit SampleSet(std::size_t dimension) : dimension_(dimension) {}

  /// Appends a vector; its id is the previous size().
  SampleId add(std::span<const double> features);

  std::size_t dimension() const noexcept { return dimension_; }
  std::size_t size() const noexcept { return dimension_ == 0 ? 0 : values_.size() / dimension_; }
  bool contains(SampleId id) const noexcept { return id < size(); }

  std::span<const double> operator[](SampleId id) const {
    return {values_.data() + id * dimension_, dimension_};
  }

  /// Throws DanglingSampleId naming `where` if any id is out of range.
  void check_ids(std::span<const SampleId> ids, std::string_view where) const;

 private:
  std::size_t dimension_ = 0;
  std::vector<double> values_;
};

struct LabeledExample {
  IdTuple args;
  double target = 0;  // exactly 0 or 1
};

struct LabeledSet {
  std::string predicate;
  std::vector<LabeledExample> examples;
};

/// Tabulated truth values of a known predicate; absent tuples take `default_value`.
struct KnownPredicateTable {
  std::string predicate;
  std::size_t arity = 1;
  std::map<IdTuple, double> entries;
  double default_value = 0;

  double value(const IdTuple& args) const {
    const auto it = entries.find(args);
    return it == entries.end() ? default_value : it->second;
  }
};

/// Sorted, duplicate-free union of every argument id in `labeled` and `unlabeled`.
std::vector<SampleId> pool_samples(std::span<const LabeledSet> labeled, std::span<const SampleId> unlabeled);

// CSV formats (comma separated, no header, '#' comment lines and blank lines skipped):
//   samples:  id, x_1, ..., x_m          ids must be exactly 0..N-1 in any order
//   labeled:  id_1, ..., id_n, target    target in {0, 1}
//   known:    id_1, ..., id_n, value     value in [0, 1]
//   id list:  id                         one per line
SampleSet parse_samples_csv(std::string_view text);
LabeledSet parse_labeled_csv(std::string_view text, std::string predicate, std::size_t arity);
KnownPredicateTable parse_known_csv(std::string_view text, std::string predicate, std::size_t arity,
                                    double default_value);
std::vector<SampleId> parse_id_list(std::string_view text);

std::string samples_to_csv(const SampleSet& samples);
std::string labeled_to_csv(const LabeledSet& set);
std::string known_to_csv(const KnownPredicateTable& table);

/// Shortest decimal representation that round-trips to the same double.
std::string format_double(double value);
double parse_double(std::string_view text);

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, std::string_view contents);

}  // namespace kfol
