// Command-line front end: world generation, single-target planning, batch
// benchmarking, exhaustive oracle enumeration, and a single-reaction judge
// probe.
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "larc/harness/bench.hpp"
#include "larc/harness/oracle.hpp"
#include "larc/harness/task.hpp"
#include "larc/harness/world.hpp"

namespace fs = std::filesystem;
using namespace larc;

namespace {

struct CommonArgs {
  PlannerConfig cfg;
  std::string judge = "rule";
  std::string stock_path;
  std::string reactions_path;
  std::string hazards_dir;
  std::string out_dir;
  int jobs = 1;
};

void add_planner_flags(CLI::App* cmd, CommonArgs& args) {
  cmd->add_option("--lambda", args.cfg.lambda, "constraint weight (default 2)");
  cmd->add_option("--k", args.cfg.k, "simulations per iteration (default 5)");
  cmd->add_option("--max-expansions", args.cfg.n_exp,
                  "expansion limit (default 500)");
  cmd->add_option("--max-evaluations", args.cfg.n_eval,
                  "evaluation limit (default 300)");
  cmd->add_option("--ucb-scale", args.cfg.ucb_scale,
                  "UCB exploration constant (default 4)");
  cmd->add_option("--default-score", args.cfg.default_score,
                  "optimistic default score (default 5)");
  cmd->add_option("--seed", args.cfg.seed, "random seed");
  cmd->add_option("--judge", args.judge,
                  "judge mode: rule | llm | always1..always5");
  cmd->add_option("--value-backend", args.cfg.value_backend,
                  "base value heuristic id (default: default)");
}

void add_world_file_flags(CLI::App* cmd, CommonArgs& args, bool required) {
  auto* s = cmd->add_option("--stock", args.stock_path, "stock file");
  auto* r = cmd->add_option("--reactions", args.reactions_path,
                            "reaction database (JSON lines)");
  auto* h = cmd->add_option(
      "--hazards", args.hazards_dir,
      "directory holding carcinogens.tsv and pyrophorics.tsv");
  if (required) {
    s->required();
    r->required();
    h->required();
  }
}

struct LoadedWorld {
  synthesizer::ReactionDb db;
  synthesizer::Stock stock;
  toolbox::HazardList carcinogens{"carcinogens"};
  toolbox::HazardList pyrophorics{"pyrophorics"};
};

LoadedWorld load_world_files(const CommonArgs& args) {
  LoadedWorld w;
  w.db = synthesizer::ReactionDb::load(args.reactions_path);
  w.stock = synthesizer::Stock::load(args.stock_path);
  const fs::path dir = args.hazards_dir;
  w.carcinogens = toolbox::HazardList::load((dir / "carcinogens.tsv").string(),
                                            "carcinogens", true);
  w.pyrophorics = toolbox::HazardList::load((dir / "pyrophorics.tsv").string(),
                                            "pyrophorics", true);
  return w;
}

evaluator::Constraint make_constraint(const std::string& kind,
                                      const std::string& payload) {
  evaluator::Constraint c;
  c.kind = evaluator::constraint_kind_from_string(kind);
  if (!payload.empty()) c.payload = chem::canonicalize(payload);
  c.validate();
  return c;
}

nlohmann::json route_to_json(const synthesizer::Route& route) {
  nlohmann::json j;
  j["target"] = route.target.text;
  j["length"] = route.length();
  auto& reactions = j["reactions"] = nlohmann::json::array();
  for (std::size_t i = 0; i < route.reactions.size(); ++i) {
    const auto& r = route.reactions[i];
    nlohmann::json rj;
    rj["id"] = r.id;
    std::vector<std::string> rs;
    for (const auto& m : r.reactants) rs.push_back(m.text);
    rj["reactants"] = rs;
    rj["product"] = r.product.text;
    if (i < route.scores.size()) {
      rj["score"] = {{"raw", route.scores[i].raw},
                     {"normalized", route.scores[i].normalized},
                     {"provenance",
                      std::string(evaluator::to_string(route.scores[i].provenance))}};
    }
    reactions.push_back(rj);
  }
  std::vector<std::string> leaves;
  for (const auto& m : route.leaves) leaves.push_back(m.text);
  j["leaves"] = leaves;
  return j;
}

int cmd_gen_world(std::uint64_t seed, harness::WorldParams params,
                  const std::string& constraint_kind, const std::string& out) {
  auto world = harness::generate_world(seed, params);
  const fs::path dir = out;
  world.write(dir);
  harness::Task task;
  task.id = "w" + std::to_string(seed);
  task.target = world.target.text;
  task.constraint.kind = evaluator::constraint_kind_from_string(constraint_kind);
  if (task.constraint.kind == evaluator::ConstraintKind::AvoidSubstance) {
    // Avoid the decoy hazard when present, else the first carcinogen.
    if (!world.carcinogens.empty())
      task.constraint.payload = world.carcinogens.entries().front().smiles;
    else
      throw std::runtime_error(
          "avoid_substance task needs a hazard in the world");
  }
  harness::save_tasks((dir / "tasks.jsonl").string(), {task});
  std::cout << "world written to " << dir.string() << " (target "
            << world.target.text << ", " << world.db.size() << " reactions, "
            << world.stock.size() << " stock)\n";
  return 0;
}

int cmd_plan(const CommonArgs& args, const std::string& target,
             const std::string& kind, const std::string& payload) {
  auto world = load_world_files(args);
  auto constraint = make_constraint(kind, payload);

  harness::BenchInputs inputs;
  inputs.db = &world.db;
  inputs.stock = &world.stock;
  inputs.carcinogens = &world.carcinogens;
  inputs.pyrophorics = &world.pyrophorics;
  inputs.tasks = {harness::Task{"plan", target, constraint, ""}};

  harness::BenchOptions opt;
  opt.cfg = args.cfg;
  opt.judge = args.judge;
  if (!args.out_dir.empty()) opt.out_dir = args.out_dir;
  auto result = harness::run_bench(inputs, opt);
  const auto& out = result.outcomes[0];

  nlohmann::json j;
  j["target"] = target;
  j["constraint"] = constraint.fingerprint();
  j["found"] = out.route.has_value();
  if (out.route) j["route"] = route_to_json(*out.route);
  j["report"] = {{"presence", out.report.presence},
                 {"connectivity", out.report.connectivity},
                 {"reachability", out.report.reachability},
                 {"availability", out.report.availability},
                 {"molecule_validity", out.report.molecule_validity},
                 {"constraint", out.report.constraint_ok},
                 {"success", out.report.success()}};
  j["stats"] = {{"iterations", out.stats.iterations},
                {"expansions", out.stats.expansions},
                {"evaluations", out.stats.judge_invocations},
                {"trivial", out.stats.trivial}};
  if (!out.error.empty()) j["error"] = out.error;
  std::cout << j.dump(2) << '\n';
  return 0;
}

int cmd_bench(const CommonArgs& args, const std::string& tasks_path) {
  auto world = load_world_files(args);
  harness::BenchInputs inputs;
  inputs.db = &world.db;
  inputs.stock = &world.stock;
  inputs.carcinogens = &world.carcinogens;
  inputs.pyrophorics = &world.pyrophorics;
  inputs.tasks = harness::load_tasks(tasks_path);

  harness::BenchOptions opt;
  opt.cfg = args.cfg;
  opt.judge = args.judge;
  opt.jobs = args.jobs;
  if (!args.out_dir.empty()) opt.out_dir = args.out_dir;
  auto result = harness::run_bench(inputs, opt);

  std::cout << "tasks " << result.overall.n_total << ": presence "
            << validation::format_rate(result.overall.presence_rate())
            << "%, validity "
            << validation::format_rate(result.overall.validity_rate())
            << "%, success "
            << validation::format_rate(result.overall.success_rate()) << "%\n";
  for (const auto& [kind, m] : result.by_kind) {
    std::cout << "  " << kind << " (n=" << m.n_total << "): success "
              << validation::format_rate(m.success_rate()) << "%\n";
  }
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.2f", result.mean_minutes_per_success);
  std::cout << "mean minutes per successful route: " << buf << "\n";
  if (!args.out_dir.empty())
    std::cout << "artifacts in " << args.out_dir << "\n";
  return 0;
}

int cmd_oracle(const CommonArgs& args, const std::string& target, int max_depth,
               std::size_t cap) {
  auto world = load_world_files(args);
  auto routes =
      harness::oracle_routes(chem::canonicalize(target), world.db, world.stock,
                             world.carcinogens, world.pyrophorics, max_depth, cap);
  nlohmann::json j;
  j["target"] = target;
  j["count"] = routes.size();
  auto& arr = j["routes"] = nlohmann::json::array();
  for (const auto& r : routes) {
    nlohmann::json rj;
    rj["length"] = r.length();
    rj["hazard_free"] = r.hazard_free();
    rj["hits_carcinogen"] = r.hits_carcinogen;
    rj["hits_pyrophoric"] = r.hits_pyrophoric;
    std::vector<std::string> ids;
    for (const auto& rx : r.reactions) ids.push_back(rx.id);
    rj["reactions"] = ids;
    arr.push_back(rj);
  }
  std::cout << j.dump(2) << '\n';
  return 0;
}

int cmd_eval(const CommonArgs& args, const std::string& reaction_text,
             const std::string& kind, const std::string& payload) {
  auto constraint = make_constraint(kind, payload);
  const auto sep = reaction_text.find(">>");
  if (sep == std::string::npos)
    throw std::runtime_error("reaction must be written reactants>>product");
  std::vector<std::string> reactants;
  std::string lhs = reaction_text.substr(0, sep);
  std::size_t start = 0;
  while (start <= lhs.size()) {
    auto dot = lhs.find('.', start);
    if (dot == std::string::npos) dot = lhs.size();
    if (dot > start) reactants.push_back(lhs.substr(start, dot - start));
    start = dot + 1;
  }
  auto reaction = synthesizer::make_reaction("probe", reactants,
                                             reaction_text.substr(sep + 2));

  LoadedWorld world;
  if (!args.hazards_dir.empty()) {
    const fs::path dir = args.hazards_dir;
    world.carcinogens = toolbox::HazardList::load(
        (dir / "carcinogens.tsv").string(), "carcinogens", true);
    world.pyrophorics = toolbox::HazardList::load(
        (dir / "pyrophorics.tsv").string(), "pyrophorics", true);
  }
  toolbox::LookupCarcinogenBackend backend(&world.carcinogens);
  toolbox::ToolRegistry env;
  env.carcinogens = &backend;
  env.pyrophorics = &world.pyrophorics;

  std::unique_ptr<evaluator::Judge> judge;
  if (args.judge == "rule") {
    judge = std::make_unique<evaluator::RuleJudge>(env);
  } else if (args.judge == "llm") {
    judge = std::make_unique<evaluator::LlmJudge>(
        evaluator::HttpChatTransport(
            evaluator::HttpChatTransport::Config::from_env()),
        env);
  } else {
    throw std::runtime_error("eval supports --judge rule or llm");
  }

  auto plan = judge->plan(constraint);
  auto verdict = judge->evaluate(reaction, plan);
  nlohmann::json j;
  j["reaction"] = reaction.key();
  j["constraint"] = constraint.fingerprint();
  j["raw"] = verdict.raw;
  j["normalized"] = evaluator::normalize_score(verdict.raw);
  j["fallback"] = verdict.fallback;
  j["transcript"] = verdict.transcript;
  std::cout << j.dump(2) << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"constrained retrosynthesis planning engine"};
  app.require_subcommand(1);

  CommonArgs args;

  // gen-world
  std::uint64_t gw_seed = 1;
  harness::WorldParams gw_params;
  std::string gw_constraint = "avoid_carcinogens";
  std::string gw_out = "world";
  auto* gen = app.add_subcommand("gen-world", "generate a synthetic world");
  gen->add_option("--seed", gw_seed, "world seed");
  gen->add_option("--molecules", gw_params.n_molecules, "molecule count");
  gen->add_option("--reactions", gw_params.n_reactions, "reaction count");
  gen->add_option("--max-reactants", gw_params.max_reactants,
                  "max reactants per reaction");
  gen->add_option("--stock-fraction", gw_params.stock_fraction,
                  "fraction of molecules in stock");
  gen->add_option("--hazard-fraction", gw_params.hazard_fraction,
                  "fraction of molecules marked hazardous");
  gen->add_flag("--no-guarantee{false}", gw_params.guarantee_safe_route,
                "do not plant a guaranteed hazard-free route")
      ->default_val(true);
  gen->add_flag("--plant-decoy", gw_params.plant_decoy,
                "plant a shorter hazardous decoy route");
  gen->add_option("--constraint", gw_constraint,
                  "task constraint kind for tasks.jsonl");
  gen->add_option("--out-dir", gw_out, "output directory")->required();

  // plan
  std::string plan_target, plan_kind = "avoid_carcinogens", plan_payload;
  auto* plan = app.add_subcommand("plan", "plan one constrained route");
  plan->add_option("--target", plan_target, "target molecule SMILES")->required();
  plan->add_option("--constraint", plan_kind, "constraint kind");
  plan->add_option("--payload", plan_payload,
                   "substance SMILES for avoid_substance");
  add_world_file_flags(plan, args, true);
  add_planner_flags(plan, args);
  plan->add_option("--out-dir", args.out_dir, "artifact directory (optional)");

  // bench
  std::string bench_tasks;
  auto* bench = app.add_subcommand("bench", "run a task suite");
  bench->add_option("--tasks", bench_tasks, "tasks.jsonl file")->required();
  add_world_file_flags(bench, args, true);
  add_planner_flags(bench, args);
  bench->add_option("--out-dir", args.out_dir, "artifact directory")->required();
  bench->add_option("--jobs", args.jobs, "parallel planners (default 1)");

  // oracle
  std::string oracle_target;
  int oracle_depth = 10;
  std::size_t oracle_cap = 1000000;
  auto* oracle = app.add_subcommand("oracle", "enumerate all complete routes");
  oracle->add_option("--target", oracle_target, "target molecule SMILES")
      ->required();
  oracle->add_option("--max-depth", oracle_depth, "chain depth bound");
  oracle->add_option("--cap", oracle_cap, "enumeration cap");
  add_world_file_flags(oracle, args, true);

  // eval
  std::string eval_reaction, eval_kind = "avoid_carcinogens", eval_payload;
  auto* eval = app.add_subcommand("eval", "judge a single reaction");
  eval->add_option("--reaction", eval_reaction,
                   "reaction as reactants>>product (dots separate reactants)")
      ->required();
  eval->add_option("--constraint", eval_kind, "constraint kind");
  eval->add_option("--payload", eval_payload,
                   "substance SMILES for avoid_substance");
  eval->add_option("--hazards", args.hazards_dir, "hazard list directory");
  eval->add_option("--judge", args.judge, "rule | llm");

  CLI11_PARSE(app, argc, argv);

  try {
    if (gen->parsed())
      return cmd_gen_world(gw_seed, gw_params, gw_constraint, gw_out);
    if (plan->parsed())
      return cmd_plan(args, plan_target, plan_kind, plan_payload);
    if (bench->parsed()) return cmd_bench(args, bench_tasks);
    if (oracle->parsed())
      return cmd_oracle(args, oracle_target, oracle_depth, oracle_cap);
    if (eval->parsed())
      return cmd_eval(args, eval_reaction, eval_kind, eval_payload);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
