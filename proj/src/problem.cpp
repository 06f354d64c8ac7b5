#include "kfol/problem.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <set>

#include <json.hpp>

namespace kfol {

namespace fs = std::filesystem;
using nlohmann::json;

double ObjectiveConfig::fitting_weight(const std::string& predicate) const {
  const auto it = lambda_pi.find(predicate);
  return it == lambda_pi.end() ? 1.0 : it->second;
}

double ObjectiveConfig::norm_weight(const std::string& predicate) const {
  const auto it = lambda_r.find(predicate);
  return it == lambda_r.end() ? 0.1 : it->second;
}

double ObjectiveConfig::clause_weight(const std::string& clause) const {
  const auto it = lambda_v.find(clause);
  return it == lambda_v.end() ? 1.0 : it->second;
}

void TrainConfig::validate() const {
  if (!(learning_rate > 0) || !std::isfinite(learning_rate)) throw Error(Errc::InvalidConfig, "learning_rate must be > 0");
  if (max_epochs_stage1 == 0 || max_epochs_stage2 == 0) throw Error(Errc::InvalidConfig, "epoch limits must be positive");
  if (!(grad_tol > 0)) throw Error(Errc::InvalidConfig, "grad_tol must be > 0");
}

const LearnablePredicate* Problem::find_learnable(const std::string& name) const {
  const auto it = std::find_if(learnable.begin(), learnable.end(),
                               [&](const LearnablePredicate& p) { return p.signature.name == name; });
  return it == learnable.end() ? nullptr : &*it;
}

std::vector<LabeledSet> Problem::labeled_sets() const {
  std::vector<LabeledSet> out;
  for (const auto& p : learnable) out.push_back(p.labels);
  return out;
}

namespace {

template <typename T>
T get_or(const json& j, const char* key, T fallback) {
  return j.contains(key) ? j.at(key).get<T>() : fallback;
}

void require_positive(double v, const std::string& what, bool allow_zero) {
  if (!std::isfinite(v) || v < 0 || (!allow_zero && v == 0)) {
    throw Error(Errc::InvalidConfig, what + (allow_zero ? " must be >= 0" : " must be > 0"));
  }
}

LossKind parse_loss(const std::string& s) {
  if (s == "squared") return LossKind::Squared;
  if (s == "hinge") return LossKind::Hinge;
  throw Error(Errc::InvalidConfig, "unknown loss '" + s + "' (expected squared or hinge)");
}

std::string resolve(const fs::path& base, const std::string& file) {
  const fs::path p(file);
  return (p.is_absolute() ? p : base / p).string();
}

Problem parse_config(const json& cfg, const fs::path& base) {
  Problem problem;
  problem.samples = parse_samples_csv(read_text_file(resolve(base, cfg.at("samples").get<std::string>())));

  if (cfg.contains("unlabeled")) {
    problem.unlabeled = parse_id_list(read_text_file(resolve(base, cfg.at("unlabeled").get<std::string>())));
  } else {
    problem.unlabeled.resize(problem.samples.size());
    for (SampleId i = 0; i < problem.samples.size(); ++i) problem.unlabeled[i] = i;
  }

  const json objective = cfg.value("objective", json::object());
  problem.objective.loss = parse_loss(get_or<std::string>(objective, "loss", "squared"));
  const double default_lambda_v = get_or<double>(objective, "lambda_v", 1.0);

  std::set<std::string> names;
  for (const auto& p : cfg.at("predicates")) {
    PredicateSignature sig;
    sig.name = p.at("name").get<std::string>();
    sig.arity = p.at("arity").get<std::size_t>();
    const std::string kind = get_or<std::string>(p, "kind", "learnable");
    if (sig.arity < 1) throw Error(Errc::InvalidConfig, "predicate '" + sig.name + "' must have arity >= 1");
    if (!names.insert(sig.name).second) throw Error(Errc::InvalidConfig, "duplicate predicate '" + sig.name + "'");

    if (kind == "known") {
      sig.kind = PredicateKind::Known;
      const double def = get_or<double>(p, "default", 0.0);
      const std::string text = p.contains("table") ? read_text_file(resolve(base, p.at("table").get<std::string>())) : "";
      problem.known.emplace(sig.name, parse_known_csv(text, sig.name, sig.arity, def));
    } else if (kind == "learnable") {
      LearnablePredicate lp;
      lp.kernel = parse_kernel_spec(get_or<std::string>(p, "kernel", "rbf gamma=1"));
      lp.labels.predicate = sig.name;
      if (p.contains("labels")) {
        lp.labels = parse_labeled_csv(read_text_file(resolve(base, p.at("labels").get<std::string>())), sig.name, sig.arity);
      }
      const double lpi = get_or<double>(p, "lambda_pi", lp.labels.examples.empty() ? 0.0 : 1.0);
      problem.objective.lambda_pi[sig.name] = lpi;
      problem.objective.lambda_r[sig.name] = get_or<double>(p, "lambda_r", 0.1);
      sig.kind = PredicateKind::Learnable;
      lp.signature = sig;
      problem.learnable.push_back(std::move(lp));
    } else {
      throw Error(Errc::InvalidConfig, "predicate '" + sig.name + "' has unknown kind '" + kind + "'");
    }
    problem.signatures.push_back(sig);
  }

  if (cfg.contains("clauses")) {
    problem.clauses = read_clause_file(resolve(base, cfg.at("clauses").get<std::string>()), problem.signatures);
  }
  for (const auto& c : problem.clauses) problem.objective.lambda_v[c.name] = c.weight.value_or(default_lambda_v);

  const json train = cfg.value("train", json::object());
  TrainConfig& t = problem.train;
  t.learning_rate = get_or<double>(train, "learning_rate", t.learning_rate);
  t.max_epochs_stage1 = get_or<std::size_t>(train, "max_epochs_stage1", t.max_epochs_stage1);
  t.max_epochs_stage2 = get_or<std::size_t>(train, "max_epochs_stage2", t.max_epochs_stage2);
  t.grad_tol = get_or<double>(train, "grad_tol", t.grad_tol);
  t.constraint_ramp_epochs = get_or<std::size_t>(train, "constraint_ramp_epochs", t.constraint_ramp_epochs);
  t.seed = get_or<std::uint64_t>(train, "seed", t.seed);
  t.max_backtracks = get_or<std::size_t>(train, "max_backtracks", t.max_backtracks);

  const json grounding = cfg.value("grounding", json::object());
  problem.grounding.max_groundings = get_or<std::size_t>(grounding, "max_groundings", problem.grounding.max_groundings);
  problem.grounding.subsample = get_or<std::size_t>(grounding, "subsample", 0);
  problem.grounding.seed = t.seed;
  problem.support_cap = get_or<std::size_t>(grounding, "support_cap", problem.support_cap);
  return problem;
}

}  // namespace

void finalize_problem(Problem& problem) {
  problem.samples.check_ids(problem.unlabeled, "unlabeled set");
  for (const auto& p : problem.learnable) {
    p.kernel.validate();
    for (const auto& ex : p.labels.examples) {
      if (ex.args.size() != p.signature.arity) {
        throw Error(Errc::ArityMismatch, "labels of '" + p.signature.name + "' have the wrong arity");
      }
      problem.samples.check_ids(ex.args, "labels of '" + p.signature.name + "'");
    }
    require_positive(problem.objective.fitting_weight(p.signature.name), "lambda_pi of '" + p.signature.name + "'", true);
    require_positive(problem.objective.norm_weight(p.signature.name), "lambda_r of '" + p.signature.name + "'", false);
  }
  for (const auto& [name, table] : problem.known) {
    for (const auto& [args, v] : table.entries) problem.samples.check_ids(args, "table of '" + name + "'");
  }
  for (const auto& c : problem.clauses) {
    require_positive(problem.objective.clause_weight(c.name), "lambda_v of clause '" + c.name + "'", true);
    if (c.guard && !problem.known.count(*c.guard)) {
      throw Error(Errc::UnknownGuardPredicate, "clause '" + c.name + "' names guard '" + *c.guard +
                                                   "', which is not a known predicate");
    }
  }
  problem.train.validate();
  const auto labeled = problem.labeled_sets();
  problem.domain = pool_samples(labeled, problem.unlabeled);
}

Problem load_problem(const std::string& config_path) {
  json cfg;
  try {
    cfg = json::parse(read_text_file(config_path));
  } catch (const json::exception& e) {
    throw Error(Errc::InvalidConfig, config_path + ": " + e.what());
  }
  Problem problem;
  try {
    problem = parse_config(cfg, fs::path(config_path).parent_path());
  } catch (const json::exception& e) {
    throw Error(Errc::InvalidConfig, config_path + ": " + e.what());
  }
  finalize_problem(problem);
  return problem;
}

void save_problem(const Problem& problem, const std::string& dir) {
  const fs::path base(dir);
  fs::create_directories(base);
  json cfg;
  cfg["samples"] = "samples.csv";
  write_text_file((base / "samples.csv").string(), samples_to_csv(problem.samples));

  std::string unlabeled;
  for (const SampleId id : problem.unlabeled) unlabeled += std::to_string(id) + '\n';
  cfg["unlabeled"] = "unlabeled.csv";
  write_text_file((base / "unlabeled.csv").string(), unlabeled);

  json predicates = json::array();
  for (const auto& sig : problem.signatures) {
    json p{{"name", sig.name}, {"arity", sig.arity}};
    if (sig.kind == PredicateKind::Known) {
      const auto& table = problem.known.at(sig.name);
      p["kind"] = "known";
      p["default"] = table.default_value;
      p["table"] = sig.name + ".known.csv";
      write_text_file((base / (sig.name + ".known.csv")).string(), known_to_csv(table));
    } else {
      const auto* lp = problem.find_learnable(sig.name);
      p["kind"] = "learnable";
      p["kernel"] = to_string(lp->kernel);
      p["lambda_pi"] = problem.objective.fitting_weight(sig.name);
      p["lambda_r"] = problem.objective.norm_weight(sig.name);
      p["labels"] = sig.name + ".labels.csv";
      write_text_file((base / (sig.name + ".labels.csv")).string(), labeled_to_csv(lp->labels));
    }
    predicates.push_back(std::move(p));
  }
  cfg["predicates"] = std::move(predicates);

  std::string clauses;
  for (const auto& c : problem.clauses) {
    clauses += "[name=" + c.name + ", w=" + format_double(problem.objective.clause_weight(c.name));
    if (c.guard) clauses += ", guard=" + *c.guard;
    clauses += "] " + to_string(c.ast) + '\n';
  }
  cfg["clauses"] = "clauses.txt";
  write_text_file((base / "clauses.txt").string(), clauses);

  cfg["objective"] = {{"loss", problem.objective.loss == LossKind::Squared ? "squared" : "hinge"}};
  const TrainConfig& t = problem.train;
  cfg["train"] = {{"learning_rate", t.learning_rate},
                  {"max_epochs_stage1", t.max_epochs_stage1},
                  {"max_epochs_stage2", t.max_epochs_stage2},
                  {"grad_tol", t.grad_tol},
                  {"constraint_ramp_epochs", t.constraint_ramp_epochs},
                  {"seed", t.seed},
                  {"max_backtracks", t.max_backtracks}};
  cfg["grounding"] = {{"max_groundings", problem.grounding.max_groundings},
                      {"subsample", problem.grounding.subsample},
                      {"support_cap", problem.support_cap}};
  write_text_file((base / "problem.json").string(), cfg.dump(2) + '\n');
}

}  // namespace kfol
