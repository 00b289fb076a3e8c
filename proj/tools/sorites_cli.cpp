#include <iostream>
#include <map>

#include "CLI11.hpp"
#include "commands.hpp"

int main(int argc, char** argv) {
  using namespace sorites;
  CLI::App app{"sorites: exact checks of chained-correlation assumptions"};
  app.require_subcommand(1);

  cli::CommonOptions opt;
  std::string mode = "auto";
  const std::map<std::string, io::NumericMode> modes{
      {"auto", io::NumericMode::Auto}, {"exact", io::NumericMode::Exact}, {"float", io::NumericMode::Float}};
  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--mode", mode, "exact, float or auto")->check(CLI::IsMember({"auto", "exact", "float"}));
    sub->add_option("--tolerance", opt.tolerance, "equality tolerance");
    sub->add_option("--out", opt.out, "output file");
  };

  int n = 45;
  bool simplified = false;
  auto* chain = app.add_subcommand("chain-report", "CSV of mismatch probabilities over the chain");
  chain->add_option("--n", n, "number of solid links (odd)");
  chain->add_flag("--simplified", simplified, "use the simplified mismatch law");
  chain->add_option("--out", opt.out, "output file");

  std::string model_path;
  std::vector<std::string> assumptions;
  std::string reference = "simplified";
  auto* check = app.add_subcommand("check", "check assumptions on a hidden-variable model");
  check->add_option("model", model_path, "model file")->required();
  check->add_option("--assumptions", assumptions, "assumptions to check")->delimiter(',')->required();
  check->add_option("--reference", reference, "QM reference law")->check(CLI::IsMember({"simplified", "full"}));
  add_common(check);

  std::string which;
  auto* theorem = app.add_subcommand("theorem", "run a derivation on a model");
  theorem->add_option("which", which, "stronger or bell")->required()->check(CLI::IsMember({"stronger", "bell"}));
  theorem->add_option("model", model_path, "model file")->required();
  add_common(theorem);

  int sn = 3;
  auto* strategies = app.add_subcommand("strategies", "enumerate deterministic local strategies");
  strategies->add_option("--n", sn, "number of solid links (odd)");

  std::string ghz_sub;
  auto* ghz = app.add_subcommand("ghz", "GHZ checks");
  ghz->add_option("action", ghz_sub, "verify, enumerate or counterexample")
      ->required()
      ->check(CLI::IsMember({"verify", "enumerate", "counterexample"}));

  std::string pair;
  std::uint64_t trials = 100000;
  std::uint64_t seed = 42;
  auto* simulate = app.add_subcommand("simulate", "sample experiments of one setting pair");
  simulate->add_option("model", model_path, "model file")->required();
  simulate->add_option("--pair", pair, "setting pair in degrees, e.g. (30,0)")->required();
  simulate->add_option("--trials", trials, "number of trials");
  simulate->add_option("--seed", seed, "generator seed");
  add_common(simulate);

  std::string kind;
  int en = 3;
  auto* emit = app.add_subcommand("emit-model", "write a ready-made model file");
  emit->add_option("kind", kind,
                   "trivial-lift, qm-full, deterministic, strictness-weak-ha, strictness-ip or zero-dashed")
      ->required();
  emit->add_option("--n", en, "number of solid links (odd)");
  emit->add_option("--out", opt.out, "output file");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : cli::kExitInput;
  }
  opt.mode = modes.at(mode);

  if (chain->parsed()) return cli::cmd_chain_report(n, simplified, opt.out, std::cout, std::cerr);
  if (check->parsed())
    return cli::cmd_check(model_path, assumptions, reference == "simplified", opt, std::cout, std::cerr);
  if (theorem->parsed()) return cli::cmd_theorem(model_path, which, opt, std::cout, std::cerr);
  if (strategies->parsed()) return cli::cmd_strategies(sn, std::cout, std::cerr);
  if (ghz->parsed()) return cli::cmd_ghz(ghz_sub, std::cout, std::cerr);
  if (simulate->parsed()) return cli::cmd_simulate(model_path, pair, trials, seed, opt, std::cout, std::cerr);
  if (emit->parsed()) return cli::cmd_emit_model(kind, en, opt.out, std::cout, std::cerr);
  return cli::kExitInput;
}
