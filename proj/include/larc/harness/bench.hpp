// Batch benchmarking: plan every task, validate every emitted route against
// ground truth, aggregate rates overall and per constraint kind, and write
// the run artifacts. Route JSON, decision logs and the summary/metrics CSVs
// are byte-reproducible for fixed inputs; wall-clock timing is segregated
// into timing.csv.
#pragma once

#include <atomic>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <mutex>
#include <optional>
#include <sstream>
#include <thread>
#include <vector>

#include <nlohmann/json.hpp>

#include "larc/evaluator/judge.hpp"
#include "larc/evaluator/llm_judge.hpp"
#include "larc/harness/task.hpp"
#include "larc/synthesizer/planner.hpp"
#include "larc/validation/report.hpp"

namespace larc::harness {

// Wraps a judge to emit one JSON-lines record per evaluation: reaction key,
// plan fingerprint, transcript (tool calls and results), raw score,
// provenance and wall time.
class LoggingJudge : public evaluator::Judge {
public:
  LoggingJudge(evaluator::Judge& inner, std::ostream* sink)
      : inner_(inner), sink_(sink) {}

  evaluator::EvaluationPlan plan(const evaluator::Constraint& c) override {
    return inner_.plan(c);
  }

  evaluator::JudgeVerdict evaluate(const synthesizer::Reaction& r,
                                   const evaluator::EvaluationPlan& plan) override {
    const auto t0 = std::chrono::steady_clock::now();
    auto verdict = inner_.evaluate(r, plan);
    const double ms = std::chrono::duration<double, std::milli>(
                          std::chrono::steady_clock::now() - t0)
                          .count();
    if (sink_) {
      nlohmann::json j;
      j["reaction"] = r.key();
      j["plan"] = plan.constraint.fingerprint();
      j["raw"] = verdict.raw;
      j["provenance"] = verdict.fallback ? "fallback" : "evaluated";
      j["wall_ms"] = ms;
      j["transcript"] = verdict.transcript;
      std::lock_guard<std::mutex> lock(mu_);
      (*sink_) << j.dump() << '\n';
    }
    return verdict;
  }

  std::string_view mode() const override { return inner_.mode(); }

private:
  evaluator::Judge& inner_;
  std::ostream* sink_;
  std::mutex mu_;
};

struct BenchInputs {
  const synthesizer::ReactionDb* db = nullptr;
  const synthesizer::Stock* stock = nullptr;
  const toolbox::HazardList* carcinogens = nullptr;
  const toolbox::HazardList* pyrophorics = nullptr;
  std::vector<Task> tasks;
};

struct BenchOptions {
  PlannerConfig cfg;
  std::string judge = "rule";  // rule | llm | always1 .. always5
  int jobs = 1;
  std::filesystem::path out_dir;            // empty: nothing written
  evaluator::ChatTransport llm_transport;   // test override for judge=llm
};

struct TaskOutcome {
  Task task;
  std::optional<synthesizer::Route> route;
  synthesizer::PlanStats stats;
  validation::RouteReport report;
  std::string decision_log;
  std::string evaluation_log;
  std::string error;  // per-task failure, run continues
};

struct BenchResult {
  std::vector<TaskOutcome> outcomes;  // task order
  validation::Metrics overall;
  std::map<std::string, validation::Metrics> by_kind;
  double mean_minutes_per_success = 0.0;
};

namespace detail {

inline std::unique_ptr<evaluator::Judge> make_judge(
    const BenchOptions& opt, const toolbox::CarcinogenBackend& carcinogens,
    const toolbox::HazardList& pyrophorics) {
  toolbox::ToolRegistry env;
  env.carcinogens = &carcinogens;
  env.pyrophorics = &pyrophorics;
  if (opt.judge == "rule")
    return std::make_unique<evaluator::RuleJudge>(env);
  if (opt.judge == "llm") {
    evaluator::ChatTransport transport = opt.llm_transport;
    if (!transport)
      transport = evaluator::HttpChatTransport(
          evaluator::HttpChatTransport::Config::from_env());
    return std::make_unique<evaluator::LlmJudge>(std::move(transport), env);
  }
  if (opt.judge.rfind("always", 0) == 0 && opt.judge.size() == 7) {
    const int raw = opt.judge[6] - '0';
    if (raw >= 1 && raw <= 5)
      return std::make_unique<evaluator::FixedJudge>(raw);
  }
  throw std::invalid_argument("unknown judge mode: " + opt.judge);
}

inline std::vector<validation::RawReaction> to_raw(
    const synthesizer::Route& route) {
  std::vector<validation::RawReaction> raw;
  for (const auto& r : route.reactions) {
    validation::RawReaction rr;
    for (const auto& m : r.reactants) rr.reactants.push_back(m.text);
    rr.product = r.product.text;
    raw.push_back(std::move(rr));
  }
  return raw;
}

inline nlohmann::json route_json(const TaskOutcome& out) {
  nlohmann::json j;
  j["task"] = out.task.id;
  j["target"] = out.task.target;
  j["constraint"] = out.task.constraint.fingerprint();
  auto& reactions = j["reactions"] = nlohmann::json::array();
  if (out.route) {
    for (std::size_t i = 0; i < out.route->reactions.size(); ++i) {
      const auto& r = out.route->reactions[i];
      nlohmann::json rj;
      rj["id"] = r.id;
      std::vector<std::string> rs;
      for (const auto& m : r.reactants) rs.push_back(m.text);
      rj["reactants"] = rs;
      rj["product"] = r.product.text;
      if (i < out.route->scores.size()) {
        const auto& s = out.route->scores[i];
        rj["score"] = {{"raw", s.raw},
                       {"normalized", s.normalized},
                       {"provenance", std::string(evaluator::to_string(s.provenance))}};
      }
      reactions.push_back(std::move(rj));
    }
    std::vector<std::string> leaves;
    for (const auto& m : out.route->leaves) leaves.push_back(m.text);
    j["leaves"] = leaves;
  }
  j["report"] = {{"presence", out.report.presence},
                 {"connectivity", out.report.connectivity},
                 {"reachability", out.report.reachability},
                 {"availability", out.report.availability},
                 {"molecule_validity", out.report.molecule_validity},
                 {"constraint", out.report.constraint_ok},
                 {"success", out.report.success()},
                 {"length", out.report.length},
                 {"evaluations", out.report.evaluations}};
  if (!out.error.empty()) j["error"] = out.error;
  return j;
}

}  // namespace detail

inline BenchResult run_bench(const BenchInputs& inputs, const BenchOptions& opt) {
  if (!inputs.db || !inputs.stock || !inputs.carcinogens || !inputs.pyrophorics)
    throw std::invalid_argument("bench inputs incomplete");
  if (inputs.tasks.empty()) throw std::invalid_argument("no tasks to run");
  opt.cfg.validate();

  BenchResult result;
  result.outcomes.resize(inputs.tasks.size());

  toolbox::LookupCarcinogenBackend lookup(inputs.carcinogens);
  validation::HazardTruth truth{inputs.carcinogens, inputs.pyrophorics};

  // One cache serves the whole run when sequential; parallel runs use
  // per-task caches so outputs stay schedule-independent.
  const bool share_cache = opt.jobs <= 1;
  evaluator::EvaluationCache shared_cache;

  const auto run_task = [&](std::size_t index) {
    const Task& task = inputs.tasks[index];
    TaskOutcome& out = result.outcomes[index];
    out.task = task;
    std::ostringstream eval_log;
    const auto t0 = std::chrono::steady_clock::now();
    try {
      auto judge = detail::make_judge(opt, lookup, *inputs.pyrophorics);
      LoggingJudge logging(*judge, &eval_log);
      if (share_cache) shared_cache.reset_invocations();
      synthesizer::DefaultValueBackend values;
      synthesizer::Planner planner(*inputs.db, *inputs.stock, opt.cfg, logging,
                                   values,
                                   share_cache ? &shared_cache : nullptr);
      auto plan_result =
          planner.plan(chem::canonicalize(task.target), task.constraint);
      out.route = std::move(plan_result.route);
      out.stats = plan_result.stats;
      out.decision_log = std::move(plan_result.decision_log);
    } catch (const std::exception& e) {
      out.error = e.what();
    }
    const double seconds = std::chrono::duration<double>(
                               std::chrono::steady_clock::now() - t0)
                               .count();
    out.evaluation_log = eval_log.str();
    out.report = validation::check_route(
        out.route ? detail::to_raw(*out.route)
                  : std::vector<validation::RawReaction>{},
        task.target, *inputs.stock, task.constraint, truth);
    out.report.task_id = task.id;
    out.report.seconds = seconds;
    out.report.evaluations = out.stats.judge_invocations;
  };

  if (opt.jobs <= 1) {
    for (std::size_t i = 0; i < inputs.tasks.size(); ++i) run_task(i);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> workers;
    const int n_workers = std::min<int>(opt.jobs, static_cast<int>(inputs.tasks.size()));
    for (int w = 0; w < n_workers; ++w) {
      workers.emplace_back([&] {
        for (;;) {
          const std::size_t i = next.fetch_add(1);
          if (i >= inputs.tasks.size()) return;
          run_task(i);
        }
      });
    }
    for (auto& t : workers) t.join();
  }

  std::vector<validation::RouteReport> reports;
  std::map<std::string, std::vector<validation::RouteReport>> kind_reports;
  double success_seconds = 0;
  int successes = 0;
  for (const auto& out : result.outcomes) {
    reports.push_back(out.report);
    kind_reports[std::string(evaluator::to_string(out.task.constraint.kind))]
        .push_back(out.report);
    if (out.report.success()) {
      success_seconds += out.report.seconds;
      ++successes;
    }
  }
  result.overall = validation::aggregate_metrics(reports);
  for (const auto& [kind, rs] : kind_reports)
    result.by_kind[kind] = validation::aggregate_metrics(rs);
  result.mean_minutes_per_success =
      successes ? success_seconds / 60.0 / successes : 0.0;

  if (!opt.out_dir.empty()) {
    namespace fs = std::filesystem;
    fs::create_directories(opt.out_dir / "routes");
    fs::create_directories(opt.out_dir / "logs");
    fs::create_directories(opt.out_dir / "evaluations");

    std::ofstream summary(opt.out_dir / "summary.csv");
    summary << "task,presence,connectivity,reachability,availability,"
               "molecule_validity,constraint,success,length,evaluations\n";
    for (const auto& out : result.outcomes) {
      const auto& r = out.report;
      summary << out.task.id << ',' << r.presence << ',' << r.connectivity
              << ',' << r.reachability << ',' << r.availability << ','
              << r.molecule_validity << ',' << r.constraint_ok << ','
              << r.success() << ',' << r.length << ',' << r.evaluations
              << '\n';
    }

    std::ofstream metrics(opt.out_dir / "metrics.csv");
    metrics << "scope,n,presence_rate,validity_rate,success_rate\n";
    auto metric_row = [&metrics](const std::string& scope,
                                 const validation::Metrics& m) {
      metrics << scope << ',' << m.n_total << ','
              << validation::format_rate(m.presence_rate()) << ','
              << validation::format_rate(m.validity_rate()) << ','
              << validation::format_rate(m.success_rate()) << '\n';
    };
    metric_row("overall", result.overall);
    for (const auto& [kind, m] : result.by_kind) metric_row(kind, m);

    std::ofstream timing(opt.out_dir / "timing.csv");
    timing << "task,seconds\n";
    char buf[64];
    for (const auto& out : result.outcomes) {
      std::snprintf(buf, sizeof(buf), "%.3f", out.report.seconds);
      timing << out.task.id << ',' << buf << '\n';
    }
    std::snprintf(buf, sizeof(buf), "%.3f", result.mean_minutes_per_success);
    timing << "mean_minutes_per_success," << buf << '\n';

    for (const auto& out : result.outcomes) {
      std::ofstream rj(opt.out_dir / "routes" / (out.task.id + ".json"));
      rj << detail::route_json(out).dump(2) << '\n';
      std::ofstream lg(opt.out_dir / "logs" / (out.task.id + ".jsonl"));
      lg << out.decision_log;
      std::ofstream ev(opt.out_dir / "evaluations" / (out.task.id + ".jsonl"));
      ev << out.evaluation_log;
    }
  }
  return result;
}

}  // namespace larc::harness
