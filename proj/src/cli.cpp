#include "kfol/cli.hpp"

#include <algorithm>
#include <filesystem>
#include <map>
#include <set>

#include <CLI11.hpp>

#include "kfol/model_io.hpp"
#include "kfol/trainer.hpp"

namespace kfol {

namespace fs = std::filesystem;

namespace {

struct Options {
  std::string config;
  std::string out;
  std::string model;
  std::string predicate;
  std::string ids;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> max_epochs;
  std::vector<std::string> lambda_v;
  std::size_t top_k = 10;
  bool dump_graph = false;
};

// Failures in inputs (config, clauses, data, model) exit 2; failures while
// running exit 1.
struct ValidationFailure {
  Error error;
};

Problem load_with_overrides(const Options& opt) {
  try {
    Problem problem = load_problem(opt.config);
    if (opt.seed) {
      problem.train.seed = *opt.seed;
      problem.grounding.seed = *opt.seed;
    }
    if (opt.max_epochs) {
      problem.train.max_epochs_stage1 = *opt.max_epochs;
      problem.train.max_epochs_stage2 = *opt.max_epochs;
    }
    for (const auto& item : opt.lambda_v) {
      const auto eq = item.find('=');
      if (eq == std::string::npos) throw Error(Errc::InvalidConfig, "--lambda-v expects NAME=VALUE, got '" + item + "'");
      const std::string name = item.substr(0, eq);
      if (!problem.objective.lambda_v.count(name)) throw Error(Errc::InvalidConfig, "no clause named '" + name + "'");
      problem.objective.lambda_v[name] = parse_double(item.substr(eq + 1));
    }
    finalize_problem(problem);
    return problem;
  } catch (const Error& e) {
    throw ValidationFailure{e};
  }
}

void write_graph_dumps(const std::vector<CompiledClause>& clauses, const std::vector<GraphValues>* values,
                       const std::string& out_dir, std::ostream& out) {
  for (std::size_t h = 0; h < clauses.size(); ++h) {
    const std::string text = dump_graph(clauses[h].graph, values ? &(*values)[h] : nullptr);
    if (out_dir.empty()) {
      out << "# graph " << clauses[h].name << '\n' << text;
    } else {
      write_text_file((fs::path(out_dir) / ("graph_" + clauses[h].name + ".txt")).string(), text);
    }
  }
}

int cmd_check(const Options& opt, std::ostream& out) {
  const Problem problem = load_with_overrides(opt);
  std::vector<CompiledClause> clauses;
  std::vector<std::vector<IdTuple>> supports;
  try {
    clauses = compile_clauses(problem);
    supports = build_supports(problem, clauses);
  } catch (const Error& e) {
    throw ValidationFailure{e};
  }
  out << "samples=" << problem.samples.size() << " dimension=" << problem.samples.dimension()
      << " domain=" << problem.domain.size() << '\n';
  for (std::size_t k = 0; k < problem.learnable.size(); ++k) {
    const auto& p = problem.learnable[k];
    out << "predicate " << p.signature.name << " arity=" << p.signature.arity << " labels=" << p.labels.examples.size()
        << " support=" << supports[k].size() << '\n';
  }
  for (std::size_t h = 0; h < clauses.size(); ++h) {
    const auto& g = clauses[h].graph;
    out << "clause " << clauses[h].name << " groundings=" << g.groundings().size()
        << " instantiations=" << g.instantiations() << " atoms=" << g.atoms().size() << " nodes=" << g.nodes().size()
        << " : " << to_string(problem.clauses[h].ast) << '\n';
  }
  if (opt.dump_graph) {
    if (!opt.out.empty()) fs::create_directories(opt.out);
    write_graph_dumps(clauses, nullptr, opt.out, out);
  }
  out << "OK\n";
  return 0;
}

int cmd_train(const Options& opt, std::ostream& out) {
  if (opt.out.empty()) throw ValidationFailure{Error(Errc::InvalidConfig, "train requires --out")};
  const Problem problem = load_with_overrides(opt);
  std::optional<Objective> objective;
  try {
    objective.emplace(make_objective(problem));
  } catch (const Error& e) {
    throw ValidationFailure{e};
  }
  const TrainState state = train(*objective, problem.train);

  fs::create_directories(opt.out);
  const fs::path dir(opt.out);
  save_model((dir / "model.txt").string(), state.expansions);
  write_text_file((dir / "trace.csv").string(), trace_to_csv(state.trace));

  const Evaluation& ev = state.final_evaluation;
  std::string summary;
  summary += "stage1_epochs=" + std::to_string(state.stage2_begin) + '\n';
  summary += "stage2_epochs=" + std::to_string(state.trace.size() - state.stage2_begin) + '\n';
  summary += "R=" + format_double(ev.risk) + '\n';
  summary += "N=" + format_double(ev.norm) + '\n';
  summary += "V=" + format_double(ev.penalty) + '\n';
  summary += "E=" + format_double(ev.risk + ev.norm + ev.penalty) + '\n';
  summary += "grad_norm=" + format_double(ev.gradient_norm) + '\n';
  for (std::size_t h = 0; h < ev.clause_penalties.size(); ++h) {
    summary += "penalty." + std::string(objective->clauses()[h].name) + '=' + format_double(ev.clause_penalties[h]) + '\n';
  }
  write_text_file((dir / "summary.txt").string(), summary);
  out << summary;

  if (opt.dump_graph) {
    std::vector<Eigen::VectorXd> weights;
    for (const auto& e : state.expansions) weights.push_back(e.weights);
    const auto values = objective->clause_values(weights);
    std::vector<CompiledClause> clauses(objective->clauses().begin(), objective->clauses().end());
    write_graph_dumps(clauses, &values, opt.out, out);
  }
  return 0;
}

std::vector<KernelExpansion> load_matching_model(const Options& opt, const Problem& problem) {
  if (opt.model.empty()) throw ValidationFailure{Error(Errc::InvalidConfig, "--model is required")};
  try {
    auto model = load_model(opt.model);
    std::set<std::string> seen;
    for (const auto& e : model) {
      const auto* p = problem.find_learnable(e.predicate);
      if (!p) throw Error(Errc::ModelMismatch, "model predicate '" + e.predicate + "' is not learnable in the problem");
      if (!(p->kernel == e.kernel)) throw Error(Errc::ModelMismatch, "kernel of '" + e.predicate + "' differs");
      for (const auto& t : e.support) {
        if (t.size() != p->signature.arity) throw Error(Errc::ModelMismatch, "support arity of '" + e.predicate + "' differs");
        for (const SampleId id : t) {
          if (!problem.samples.contains(id)) throw Error(Errc::ModelMismatch, "model references missing sample " + std::to_string(id));
        }
      }
      seen.insert(e.predicate);
    }
    for (const auto& p : problem.learnable) {
      if (!seen.count(p.signature.name)) throw Error(Errc::ModelMismatch, "model lacks predicate '" + p.signature.name + "'");
    }
    return model;
  } catch (const Error& e) {
    throw ValidationFailure{e};
  }
}

IdTuple parse_ids(const std::string& text) {
  IdTuple ids;
  std::size_t start = 0;
  while (start <= text.size()) {
    const auto comma = text.find(',', start);
    const std::string field = text.substr(start, comma == std::string::npos ? std::string::npos : comma - start);
    const double v = parse_double(field);
    if (v < 0 || v != static_cast<double>(static_cast<SampleId>(v))) {
      throw Error(Errc::MalformedInput, "bad sample id '" + field + "'");
    }
    ids.push_back(static_cast<SampleId>(v));
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return ids;
}

int cmd_predict(const Options& opt, std::ostream& out) {
  const Problem problem = load_with_overrides(opt);
  const auto model = load_matching_model(opt, problem);
  const auto* p = problem.find_learnable(opt.predicate);
  if (!p) throw ValidationFailure{Error(Errc::UnknownPredicate, "no learnable predicate '" + opt.predicate + "'")};

  std::vector<IdTuple> queries;
  try {
    if (!opt.ids.empty()) {
      queries.push_back(parse_ids(opt.ids));
      if (queries.back().size() != p->signature.arity) {
        throw Error(Errc::ArityMismatch, opt.predicate + " expects " + std::to_string(p->signature.arity) + " ids");
      }
      problem.samples.check_ids(queries.back(), "--ids");
    } else if (p->signature.arity == 1) {
      for (const SampleId id : problem.domain) queries.push_back({id});
    } else {
      for (const auto& e : model) {
        if (e.predicate == opt.predicate) queries = e.support;
      }
    }
  } catch (const Error& e) {
    throw ValidationFailure{e};
  }

  std::string csv;
  for (std::size_t j = 0; j < p->signature.arity; ++j) csv += "id" + std::to_string(j + 1) + ',';
  csv += "raw,truth\n";
  for (const auto& q : queries) {
    const auto [raw, truth] = predict(model, opt.predicate, q, problem.samples);
    for (const SampleId id : q) csv += std::to_string(id) + ',';
    csv += format_double(raw) + ',' + format_double(truth) + '\n';
  }
  if (!opt.out.empty()) {
    fs::create_directories(opt.out);
    write_text_file((fs::path(opt.out) / ("predictions_" + opt.predicate + ".csv")).string(), csv);
  }
  out << csv;
  return 0;
}

int cmd_penalty_report(const Options& opt, std::ostream& out) {
  const Problem problem = load_with_overrides(opt);
  const auto model = load_matching_model(opt, problem);
  std::vector<CompiledClause> clauses;
  try {
    clauses = compile_clauses(problem);
  } catch (const Error& e) {
    throw ValidationFailure{e};
  }

  std::map<std::string, const KernelExpansion*> by_name;
  for (const auto& e : model) by_name[e.predicate] = &e;
  const AtomEvaluator eval = [&](const AtomRef& atom) -> std::optional<double> {
    const auto it = by_name.find(atom.predicate);
    if (it == by_name.end()) return std::nullopt;
    return expansion_eval(*it->second, atom.args, problem.samples);
  };

  std::string report;
  std::vector<GraphValues> all_values;
  double total = 0;
  for (const auto& c : clauses) {
    const GraphValues values = eval_graph(c.graph, eval);
    const double weight = problem.objective.clause_weight(c.name);
    total += weight * values.penalty;
    report += "clause " + c.name + " penalty=" + format_double(values.penalty) + " weight=" + format_double(weight) +
              " groundings=" + std::to_string(c.graph.groundings().size()) + '\n';

    struct Worst {
      const GroundedGraph::Grounding* grounding;
      double truth;
      double contribution;
    };
    std::vector<Worst> worst;
    for (const auto& g : c.graph.groundings()) {
      const double truth = values.node_values[g.truth];
      if (1.0 - truth > 0) worst.push_back({&g, truth, 1.0 - truth});
    }
    std::stable_sort(worst.begin(), worst.end(),
                     [](const Worst& a, const Worst& b) { return a.contribution > b.contribution; });
    if (worst.size() > opt.top_k) worst.resize(opt.top_k);
    const auto vars = c.graph.grounding_variables();
    for (const auto& w : worst) {
      report += "  worst";
      for (std::size_t i = 0; i < vars.size(); ++i) {
        report += ' ' + vars[i] + '=' + std::to_string(w.grounding->ids[i]);
      }
      report += " truth=" + format_double(w.truth) + " contribution=" + format_double(w.contribution) + '\n';
    }
    all_values.push_back(values);
  }
  report += "V=" + format_double(total) + '\n';
  if (!opt.out.empty()) {
    fs::create_directories(opt.out);
    write_text_file((fs::path(opt.out) / "penalty_report.txt").string(), report);
    if (opt.dump_graph) write_graph_dumps(clauses, &all_values, opt.out, out);
  } else if (opt.dump_graph) {
    write_graph_dumps(clauses, &all_values, "", out);
  }
  out << report;
  return 0;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Kernel machines with first-order logic constraints", "kfol"};
  app.require_subcommand(1);
  Options opt;

  auto common = [&](CLI::App* sub) {
    sub->add_option("--config", opt.config, "problem JSON")->required();
    sub->add_option("--out", opt.out, "output directory");
    sub->add_option("--seed", opt.seed, "override the config seed");
    sub->add_option("--lambda-v", opt.lambda_v, "override a clause weight, NAME=VALUE (repeatable)");
    sub->add_option("--max-epochs", opt.max_epochs, "override both stage epoch caps");
    sub->add_flag("--dump-graph", opt.dump_graph, "write grounded graph listings");
  };
  auto* check = app.add_subcommand("check", "validate the problem and report grounding sizes");
  common(check);
  auto* train_cmd = app.add_subcommand("train", "run both training stages and write model, trace and summary");
  common(train_cmd);
  auto* predict_cmd = app.add_subcommand("predict", "evaluate a trained predicate");
  common(predict_cmd);
  predict_cmd->add_option("--model", opt.model, "model checkpoint")->required();
  predict_cmd->add_option("--predicate", opt.predicate, "predicate name")->required();
  predict_cmd->add_option("--ids", opt.ids, "comma separated sample ids (default: every domain sample)");
  auto* report_cmd = app.add_subcommand("penalty-report", "per-clause penalties and worst groundings");
  common(report_cmd);
  report_cmd->add_option("--model", opt.model, "model checkpoint")->required();
  report_cmd->add_option("--top-k", opt.top_k, "groundings listed per clause");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    err << e.what() << '\n';
    return 2;
  }

  try {
    if (*check) return cmd_check(opt, out);
    if (*train_cmd) return cmd_train(opt, out);
    if (*predict_cmd) return cmd_predict(opt, out);
    if (*report_cmd) return cmd_penalty_report(opt, out);
  } catch (const ValidationFailure& f) {
    err << "error: " << f.error.what() << '\n';
    return 2;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
  return 2;
}

}  // namespace kfol
