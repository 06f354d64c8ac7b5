#include "kfol/model_io.hpp"

#include <cmath>
#include <set>
#include <sstream>

namespace kfol {

std::string model_to_text(std::span<const KernelExpansion> expansions) {
  std::string out = "kfol-model 1\n";
  for (const auto& e : expansions) {
    const std::size_t arity = e.support.empty() ? 0 : e.support.front().size();
    out += "predicate " + e.predicate + " arity " + std::to_string(arity) + " support " +
           std::to_string(e.support.size()) + "\n";
    out += "kernel " + to_string(e.kernel) + "\n";
    for (std::size_t i = 0; i < e.support.size(); ++i) {
      for (const SampleId id : e.support[i]) out += std::to_string(id) + ' ';
      out += format_double(e.weights[static_cast<Eigen::Index>(i)]);
      out += '\n';
    }
  }
  return out;
}

namespace {

[[noreturn]] void bad_model(std::size_t line, const std::string& what) {
  throw Error(Errc::MalformedInput, "model line " + std::to_string(line) + ": " + what);
}

}  // namespace

std::vector<KernelExpansion> parse_model(std::string_view text) {
  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t line_no = 1;
  if (!std::getline(in, line) || line != "kfol-model 1") bad_model(line_no, "missing 'kfol-model 1' header");

  std::vector<KernelExpansion> out;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    // the name may contain spaces, so the numeric fields are read from the right
    const auto at = line.rfind(" arity ");
    if (line.rfind("predicate ", 0) != 0 || at == std::string::npos || at < 10) {
      bad_model(line_no, "expected 'predicate <name> arity <n> support <count>'");
    }
    std::istringstream header(line.substr(at));
    std::string arity_tag, support_tag, extra;
    std::size_t arity = 0, count = 0;
    if (!(header >> arity_tag >> arity >> support_tag >> count) || support_tag != "support" || (header >> extra)) {
      bad_model(line_no, "expected 'predicate <name> arity <n> support <count>'");
    }
    const std::string name = line.substr(10, at - 10);
    KernelExpansion e;
    e.predicate = name;
    if (!std::getline(in, line) || line.rfind("kernel ", 0) != 0) bad_model(line_no + 1, "expected kernel line");
    ++line_no;
    try {
      e.kernel = parse_kernel_spec(line.substr(7));
    } catch (const Error& err) {
      bad_model(line_no, err.what());
    }
    e.weights.resize(static_cast<Eigen::Index>(count));
    for (std::size_t i = 0; i < count; ++i) {
      if (!std::getline(in, line)) bad_model(line_no, "truncated support list");
      ++line_no;
      std::istringstream row(line);
      std::vector<std::string> fields;
      for (std::string f; row >> f;) fields.push_back(f);
      if (fields.size() != arity + 1) bad_model(line_no, "expected " + std::to_string(arity) + " ids and a weight");
      IdTuple t;
      for (std::size_t j = 0; j < arity; ++j) {
        const double id = parse_double(fields[j]);
        if (id < 0 || id != std::floor(id)) bad_model(line_no, "bad sample id");
        t.push_back(static_cast<SampleId>(id));
      }
      const double w = parse_double(fields[arity]);
      if (!std::isfinite(w)) bad_model(line_no, "non-finite weight");
      e.weights[static_cast<Eigen::Index>(i)] = w;
      e.support.push_back(std::move(t));
    }
    std::set<IdTuple> unique(e.support.begin(), e.support.end());
    if (unique.size() != e.support.size()) bad_model(line_no, "duplicate support tuple");
    out.push_back(std::move(e));
  }
  return out;
}

void save_model(const std::string& path, std::span<const KernelExpansion> expansions) {
  write_text_file(path, model_to_text(expansions));
}

std::vector<KernelExpansion> load_model(const std::string& path) { return parse_model(read_text_file(path)); }

}  // namespace kfol
