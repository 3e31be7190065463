#include "stagecraft/cli.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include "stagecraft/embeddings.hpp"
#include "stagecraft/evaluator.hpp"
#include "stagecraft/harness.hpp"
#include "stagecraft/logic.hpp"
#include "stagecraft/reduction.hpp"
#include "stagecraft/staged.hpp"
#include "stagecraft/syntax.hpp"
#include "stagecraft/typing.hpp"

namespace stagecraft {

namespace {

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Raised for outcomes that are reported on stdout but still fail the command.
struct DomainFailure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string read_input(const std::string& path) {
  std::ostringstream ss;
  if (path == "-") {
    ss << std::cin.rdbuf();
    return ss.str();
  }
  std::ifstream in(path);
  if (!in) throw UsageError("cannot read '" + path + "'");
  ss << in.rdbuf();
  return ss.str();
}

std::uint64_t default_seed() {
  if (const char* env = std::getenv("STAGECRAFT_SEED")) {
    try {
      return std::stoull(env);
    } catch (const std::exception&) {
      throw UsageError(std::string("STAGECRAFT_SEED is not a number: ") + env);
    }
  }
  return 1;
}

void report_eval(std::ostream& out, EvalResult::Kind kind, const std::string& value, std::size_t steps) {
  switch (kind) {
    case EvalResult::Kind::Value: out << value << "\n"; return;
    case EvalResult::Kind::Err: throw DomainFailure("err after " + std::to_string(steps) + " steps");
    case EvalResult::Kind::FuelExhausted: throw DomainFailure("fuel exhausted after " + std::to_string(steps) + " steps");
  }
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Typed multi-stage calculus toolkit", "stagecraft"};
  app.require_subcommand(1);
  std::function<void()> action;

  std::string file, stage, context, env;
  std::size_t fuel = 1000000;

  auto* typecheck_cmd = app.add_subcommand("typecheck", "print the type of a term");
  bool staged = false;
  typecheck_cmd->add_option("file", file, "term file (.mt), - for stdin")->required();
  typecheck_cmd->add_option("--stage", stage, "stage as a variable list");
  typecheck_cmd->add_flag("--staged", staged, "use the staged type system");
  typecheck_cmd->add_option("--context", context, "typing context, e.g. \"x : int @ [a]\"");
  typecheck_cmd->add_option("--env", env, "transition environment for --staged, e.g. \"a @ [], b @ [a]\"");
  typecheck_cmd->callback([&] {
    action = [&] {
      Term m = parse_term(read_input(file));
      TypingContext g = parse_context(context);
      Transition a = parse_transition(stage);
      Type t = staged ? staged_typecheck(g, parse_transition_env(env), a, m) : typecheck(g, a, m);
      out << to_string(t) << "\n";
    };
  });

  auto* eval_cmd = app.add_subcommand("eval", "evaluate a term");
  eval_cmd->add_option("file", file, "term file, - for stdin")->required();
  eval_cmd->add_option("--stage", stage, "stage as a variable list");
  eval_cmd->add_option("--fuel", fuel, "maximum number of rule applications");
  eval_cmd->callback([&] {
    action = [&] {
      auto r = eval(parse_transition(stage), parse_term(read_input(file)), fuel);
      report_eval(out, r.kind, r.value ? to_string(*r.value) : "", r.steps);
    };
  });

  auto* normalize_cmd = app.add_subcommand("normalize", "reduce leftmost-outermost to normal form");
  bool trace_paths = false;
  normalize_cmd->add_option("file", file, "term file, - for stdin")->required();
  normalize_cmd->add_option("--fuel", fuel, "maximum number of steps");
  normalize_cmd->add_flag("--trace-paths", trace_paths, "print the annotation path of every step");
  normalize_cmd->callback([&] {
    action = [&] {
      auto r = normalize(parse_term(read_input(file)), fuel);
      if (trace_paths)
        for (const auto& st : r.trace) out << to_string(st.path) << "\n";
      if (!r.normal_form) throw DomainFailure("no normal form within " + std::to_string(fuel) + " steps");
      out << to_string(*r.normal_form) << "\n";
    };
  });

  auto* erase_cmd = app.add_subcommand("erase", "drop transition annotations");
  erase_cmd->add_option("file", file, "term file, - for stdin")->required();
  erase_cmd->callback([&] { action = [&] { out << to_string(erase(parse_term(read_input(file)))) << "\n"; }; });

  auto* erased_eval_cmd = app.add_subcommand("erased-eval", "evaluate the erased term at stage 0");
  erased_eval_cmd->add_option("file", file, "term file, - for stdin")->required();
  erased_eval_cmd->add_option("--fuel", fuel, "maximum number of rule applications");
  erased_eval_cmd->callback([&] {
    action = [&] {
      auto r = erased_eval(0, erase(parse_term(read_input(file))), fuel);
      report_eval(out, r.kind, r.value ? to_string(*r.value) : "", r.steps);
    };
  });

  auto* embed_cmd = app.add_subcommand("embed", "translate a source-calculus term");
  std::string from, transition = "a";
  bool embed_type = false;
  embed_cmd->add_option("file", file, "source file, - for stdin")->required();
  embed_cmd->add_option("--from", from, "circle, box or lambda-i")
      ->required()
      ->check(CLI::IsMember({"circle", "box", "lambda-i"}));
  embed_cmd->add_option("--transition", transition, "transition variable for circle");
  embed_cmd->add_option("--stage", stage, "box: one variable per stack level above the first");
  embed_cmd->add_flag("--type", embed_type, "the input is a type");
  embed_cmd->callback([&] {
    action = [&] {
      Dialect d = *dialect_from_name(from);
      std::string src = read_input(file);
      TransitionVar a = TransitionVar::free(transition);
      if (embed_type) {
        SourceType t = parse_source_type(d, src);
        Type r = d == Dialect::Circle ? embed_circle(t, a) : d == Dialect::Box ? embed_box(t) : embed_lambda_i(t);
        out << to_string(r) << "\n";
        return;
      }
      SourceTerm m = parse_source_term(d, src);
      Term r = d == Dialect::Circle ? embed_circle(m, a)
               : d == Dialect::Box  ? embed_box(m, parse_transition(stage))
                                    : embed_lambda_i(m);
      out << to_string(r) << "\n";
    };
  });

  auto* proof_cmd = app.add_subcommand("proof", "natural-deduction derivations");
  proof_cmd->require_subcommand(1);
  auto* proof_check = proof_cmd->add_subcommand("check", "check a derivation and print its judgment");
  std::string mode = "any-stage";
  proof_check->add_option("file", file, "derivation file (.prf), - for stdin")->required();
  proof_check->add_option("--mode", mode, "bottom elimination rule")
      ->check(CLI::IsMember({"any-stage", "same-stage"}));
  proof_check->callback([&] {
    action = [&] {
      ClassicalMode m = mode == "same-stage" ? ClassicalMode::SameStage : ClassicalMode::AnyStage;
      out << to_string(check_derivation(parse_derivation(read_input(file)), m)) << "\n";
    };
  });

  auto* model_cmd = app.add_subcommand("model", "finite Kripke models");
  model_cmd->require_subcommand(1);
  auto* model_check = model_cmd->add_subcommand("check", "check a proposition in every state and valuation");
  std::string model_file, formula_file;
  bool partial = false;
  model_check->add_option("--model", model_file, "model file (.kmodel)")->required();
  model_check->add_option("--formula", formula_file, "proposition file")->required();
  model_check->add_flag("--partial", partial, "read transitions as partial functions");
  model_check->callback([&] {
    action = [&] {
      KripkeModel m = parse_model(read_input(model_file));
      if (partial) m.partial = true;
      Prop p = parse_type(read_input(formula_file));
      if (!holds_locally(m, {}, p)) throw DomainFailure("fails: " + prop_to_string(p));
      out << "holds: " << prop_to_string(p) << "\n";
    };
  });

  auto* harness_cmd = app.add_subcommand("harness", "randomized property suites");
  harness_cmd->require_subcommand(1);
  auto* harness_run = harness_cmd->add_subcommand("run", "run one suite, or all");
  std::string suite;
  std::optional<std::uint64_t> seed;
  std::size_t cases = 100;
  bool serial = false;
  std::string corpus;
  std::vector<std::string> suite_choices = harness::suite_names();
  suite_choices.push_back("all");
  harness_run->add_option("--suite", suite, "suite name")->required()->check(CLI::IsMember(suite_choices));
  harness_run->add_option("--seed", seed, "base seed (default STAGECRAFT_SEED or 1)");
  harness_run->add_option("--cases", cases, "number of cases");
  harness_run->add_option("--corpus", corpus, "corpus directory for the proof suite");
  harness_run->add_flag("--serial", serial, "run cases on one thread");
  harness_run->callback([&] {
    action = [&] {
      harness::Options opts{corpus.empty() ? harness::default_corpus_dir() : corpus, !serial};
      std::uint64_t s = seed ? *seed : default_seed();
      std::vector<std::string> names = suite == "all" ? harness::suite_names() : std::vector<std::string>{suite};
      std::size_t violations = 0;
      for (const auto& n : names) {
        auto rep = harness::run_suite(n, s, cases, opts);
        out << harness::format_report(rep);
        violations += rep.violations;
      }
      if (violations) throw DomainFailure(std::to_string(violations) + " violations");
    };
  });

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp& e) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "usage error: " << e.what() << "\n";
    return kExitUsageError;
  }

  try {
    action();
    return kExitOk;
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << "\n";
    return kExitUsageError;
  } catch (const ParseError& e) {
    err << "syntax error: " << e.what() << "\n";
    return kExitUsageError;
  } catch (const TypeError& e) {
    err << "type error: " << e.what() << "\n";
  } catch (const EmbedError& e) {
    err << "embedding error: " << e.what() << "\n";
  } catch (const DerivationError& e) {
    err << "derivation error: " << e.what() << "\n";
  } catch (const UnboundTransitionVar& e) {
    err << "model error: " << e.what() << "\n";
  } catch (const DomainFailure& e) {
    err << e.what() << "\n";
  }
  return kExitDomainError;
}

}  // namespace stagecraft
