// cotforge: annotate, execute, select and analyse chain-of-thought corpora.

#include <iostream>

#include "CLI11.hpp"

#include "commands.hpp"
#include "cotforge/provider.hpp"

using namespace cotforge;
using namespace cotforge::cli;

namespace {

// Flag values; an option only overrides the config when it was given.
struct Flags {
  std::string config;
  std::string questions, seeds, out;
  std::vector<std::string> cots, outcomes, scores, allow;
  std::uint64_t seed = 0;
  int parallelism = 0;
  std::int64_t timeout_ms = 0;
  double tolerance = 0;
  std::string provider, script, transcript, method;
  int max_rounds = 0, k = 0;
  bool pooled = false, record_timing = false, filter_null = false, no_filter_null = false;
  std::size_t trials = 0;
  std::vector<std::size_t> ks;
};

// Subcommands register options under shared names; only the parsed one has
// counts, so a name counts as given if any of its options was seen.
struct Opts {
  std::map<std::string, std::vector<CLI::Option*>> by_name;
  void add(const std::string& name, CLI::Option* opt) { by_name[name].push_back(opt); }
  bool given(const std::string& name) const {
    auto it = by_name.find(name);
    if (it == by_name.end()) return false;
    for (const auto* opt : it->second) {
      if (opt->count() > 0) return true;
    }
    return false;
  }
};

void add_common(CLI::App& app, Flags& f, Opts& o) {
  app.add_option("-c,--config", f.config, "JSON config file")->check(CLI::ExistingFile);
  o.add("questions", app.add_option("--questions", f.questions, "questions JSONL (paths.questions)"));
  o.add("out", app.add_option("-o,--out", f.out, "output directory (paths.output_dir)"));
  o.add("seed", app.add_option("--seed", f.seed, "random seed (seed)"));
  o.add("parallelism", app.add_option("-j,--parallelism", f.parallelism, "worker threads (pipeline.parallelism)"));
  o.add("tolerance", app.add_option("--tolerance", f.tolerance, "numeric tolerance (pipeline.tolerance)"));
}

void add_cots(CLI::App& app, Flags& f, Opts& o) {
  o.add("cots", app.add_option("--cots", f.cots, "CoTs JSONL, repeatable (paths.cots)"));
  o.add("outcomes", app.add_option("--outcomes", f.outcomes, "outcomes JSONL, repeatable (paths.outcomes)"));
}

void add_filter(CLI::App& app, Flags& f, Opts& o) {
  auto* on = app.add_flag("--filter-null", f.filter_null, "drop null results before selection (filter_null)");
  auto* off = app.add_flag("--no-filter-null", f.no_filter_null, "keep null results");
  on->excludes(off);
  o.add("filter-null", on);
  o.add("no-filter-null", off);
}

RunConfig build_config(const Flags& f, const Opts& o) {
  RunConfig cfg = f.config.empty() ? RunConfig{} : load_config(f.config);
  if (o.given("questions")) cfg.questions = f.questions;
  if (o.given("seeds")) cfg.seeds = f.seeds;
  if (o.given("out")) cfg.output_dir = f.out;
  if (o.given("cots")) cfg.cots = f.cots;
  if (o.given("outcomes")) cfg.outcomes = f.outcomes;
  if (o.given("scores")) cfg.scores = f.scores;
  if (o.given("allow")) cfg.allowlist = f.allow;
  if (o.given("seed")) cfg.seed = f.seed;
  if (o.given("parallelism")) cfg.pipeline.parallelism = f.parallelism;
  if (o.given("timeout-ms")) cfg.pipeline.exec_timeout_ms = f.timeout_ms;
  if (o.given("tolerance")) cfg.pipeline.tolerance = f.tolerance;
  if (o.given("provider")) cfg.provider.name = f.provider;
  if (o.given("script")) cfg.provider.script = f.script;
  if (o.given("transcript")) cfg.provider.transcript = f.transcript;
  if (o.given("method")) cfg.method = f.method;
  if (o.given("max-rounds")) cfg.pipeline.max_rounds = f.max_rounds;
  if (o.given("k")) cfg.pipeline.retrieval_k = f.k;
  if (o.given("pooled")) cfg.pooled = f.pooled;
  if (o.given("record-timing")) cfg.record_timing = f.record_timing;
  if (o.given("filter-null")) cfg.filter_null = true;
  if (o.given("no-filter-null")) cfg.filter_null = false;
  if (o.given("trials")) cfg.stats.trials = f.trials;
  if (o.given("ks")) cfg.stats.ks = f.ks;
  return cfg;
}

const std::vector<std::string> kPipelineKeys{"pipeline.tolerance", "pipeline.exec_timeout_ms", "pipeline.parallelism",
                                             "pipeline.max_choice_letter"};

std::vector<std::string> with(std::vector<std::string> base, const std::vector<std::string>& more) {
  base.insert(base.end(), more.begin(), more.end());
  return base;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Annotate, execute, select and analyse chain-of-thought corpora"};
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all", "Expand all subcommand help");

  Flags f;
  Opts o;
  int code = kExitOk;

  auto* annotate = app.add_subcommand("annotate", "Grow verified annotations from seeds with an LLM provider");
  add_common(*annotate, f, o);
  o.add("seeds", annotate->add_option("--seeds", f.seeds, "seed CoTs JSONL (paths.seeds)"));
  o.add("provider", annotate->add_option("--provider", f.provider, "mock | http | replay (provider.name)"));
  o.add("script", annotate->add_option("--script", f.script, "mock response script (provider.script)"));
  o.add("transcript", annotate->add_option("--transcript", f.transcript, "replay transcript (provider.transcript)"));
  o.add("max-rounds", annotate->add_option("--max-rounds", f.max_rounds, "pipeline.max_rounds"));
  o.add("k", annotate->add_option("-k,--retrieval-k", f.k, "pipeline.retrieval_k"));
  o.add("timeout-ms", annotate->add_option("--timeout-ms", f.timeout_ms, "pipeline.exec_timeout_ms"));
  annotate->footer(keys_help(with(kPipelineKeys, {"pipeline.retrieval_k", "pipeline.max_rounds", "paths.questions",
                                                  "paths.seeds", "paths.output_dir", "provider.name",
                                                  "provider.endpoint", "provider.model", "provider.embedding_model",
                                                  "provider.temperature", "provider.script", "provider.transcript",
                                                  "provider.max_attempts", "provider.backoff_ms",
                                                  "provider.max_concurrency", "provider.embedding_dim", "allowlist",
                                                  "shim_command", "seed"})) +
                   "The API key for provider.name = http is read from COTFORGE_PROVIDER_KEY.\n"
                   "Exit codes: 0 all annotated, 2 invalid input, 3 residual left, 4 provider failure.");
  annotate->callback([&] { code = cmd_annotate(build_config(f, o)); });

  auto* exec = app.add_subcommand("exec", "Execute CoTs and write outcomes");
  add_common(*exec, f, o);
  add_cots(*exec, f, o);
  o.add("allow", exec->add_option("--allow", f.allow, "importable modules for py programs (allowlist)")->delimiter(','));
  o.add("timeout-ms", exec->add_option("--timeout-ms", f.timeout_ms, "pipeline.exec_timeout_ms"));
  o.add("record-timing", exec->add_flag("--record-timing", f.record_timing, "record_timing"));
  exec->footer(keys_help(with(kPipelineKeys, {"paths.questions", "paths.cots", "paths.outcomes", "paths.output_dir",
                                              "allowlist", "shim_command", "record_timing", "seed"})));
  exec->callback([&] { code = cmd_exec(build_config(f, o)); });

  auto* sel = app.add_subcommand("select", "Pick one answer per question");
  add_common(*sel, f, o);
  add_cots(*sel, f, o);
  add_filter(*sel, f, o);
  o.add("scores", sel->add_option("--scores", f.scores, "reward scores JSONL (paths.scores)"));
  o.add("method", sel->add_option("-m,--method", f.method, "vote | rerank | weighted (select.method)")
                            ->check(CLI::IsMember({"vote", "rerank", "weighted"})));
  o.add("pooled", sel->add_flag("--pooled", f.pooled, "pool all CoT types (select.pooled)"));
  sel->footer(keys_help(with(kPipelineKeys, {"paths.questions", "paths.cots", "paths.outcomes", "paths.scores",
                                             "paths.output_dir", "filter_null", "select.method", "select.pooled",
                                             "seed"})));
  sel->callback([&] { code = cmd_select(build_config(f, o)); });

  auto* stats = app.add_subcommand("stats", "Write the sampling statistics report");
  add_common(*stats, f, o);
  add_cots(*stats, f, o);
  add_filter(*stats, f, o);
  o.add("scores", stats->add_option("--scores", f.scores, "reward scores JSONL (paths.scores)"));
  o.add("trials", stats->add_option("--trials", f.trials, "stats.trials"));
  o.add("ks", stats->add_option("--ks", f.ks, "stats.ks")->delimiter(','));
  stats->footer(keys_help(with(kPipelineKeys, {"paths.questions", "paths.cots", "paths.outcomes", "paths.scores",
                                               "paths.output_dir", "filter_null", "stats.ks", "stats.trials",
                                               "stats.buckets", "seed"})));
  stats->callback([&] { code = cmd_stats(build_config(f, o)); });

  auto* labels = app.add_subcommand("rm-labels", "Build reward-model training labels");
  add_common(*labels, f, o);
  add_cots(*labels, f, o);
  labels->footer(keys_help(with(kPipelineKeys, {"paths.questions", "paths.cots", "paths.outcomes",
                                                "paths.output_dir", "seed"})));
  labels->callback([&] { code = cmd_rm_labels(build_config(f, o)); });

  ReplOptions repl_opts;
  std::string repl_file;
  auto* repl = app.add_subcommand("repl", "Evaluate wolfram-dialect programs");
  auto* file_opt = repl->add_option("file", repl_file, "program file; stdin when omitted");
  repl->add_flag("--tokens", repl_opts.tokens, "print tokens");
  repl->add_flag("--ast", repl_opts.ast, "print the parse tree");
  repl->add_option("--timeout-ms", repl_opts.timeout_ms, "evaluation time limit");
  repl->footer("Prints {\"env\": {...}, \"answer\": ...} as JSON.\nReads no config keys. Exit code 2 when a program fails to parse or evaluate.");
  repl->callback([&] {
    if (file_opt->count()) repl_opts.file = repl_file;
    code = cmd_repl(repl_opts);
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  } catch (const ProviderError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitProvider;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  }
  return code;
}
