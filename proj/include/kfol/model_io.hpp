#pragma once

#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "kfol/kernel.hpp"

namespace kfol {

// Plain-text checkpoint of trained kernel expansions. The samples file the
// model was trained with must accompany it, since support tuples are ids.
//
//   kfol-model 1
//   predicate <name> arity <n> support <count>
//   kernel <kernel spec>
//   <id_1> ... <id_n> <weight>        (count lines)
//   ... next predicate ...
//
// Weights are written in shortest round-trip decimal form.
std::string model_to_text(std::span<const KernelExpansion> expansions);
std::vector<KernelExpansion> parse_model(std::string_view text);

void save_model(const std::string& path, std::span<const KernelExpansion> expansions);
std::vector<KernelExpansion> load_model(const std::string& path);

}  // namespace kfol
