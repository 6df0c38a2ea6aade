#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "tmunfold/cli.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Build and check primary unfoldings of simple spaces"};
  app.require_subcommand(1);

  std::string config;
  std::size_t samples = 0;
  double tol = 0.0, fd_step = 0.0;
  std::uint64_t seed = 0;
  std::string format = "text";
  tmunfold::Flags flags;

  for (const auto& name : tmunfold::commands()) {
    CLI::App* sub = app.add_subcommand(name);
    sub->add_option("--config", config, "configuration file")->required();
    sub->add_option("--samples", samples, "samples per check")->check(CLI::PositiveNumber);
    sub->add_option("--tol", tol, "tolerance for algebraic identities")->check(CLI::PositiveNumber);
    sub->add_option("--fd-step", fd_step, "finite-difference step")->check(CLI::PositiveNumber);
    sub->add_option("--seed", seed, "sampling seed");
    sub->add_option("--format", format, "report format")->check(CLI::IsMember({"text", "json"}));
    sub->add_option("--out", flags.out, "report path (CSV path for export)");
    sub->add_option("--id", flags.id, "restrict to one object");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : tmunfold::kExitConfig;
  }

  CLI::App* sub = app.get_subcommands().front();
  if (sub->count("--samples")) flags.samples = samples;
  if (sub->count("--tol")) flags.tol = tol;
  if (sub->count("--fd-step")) flags.fd_step = fd_step;
  if (sub->count("--seed")) flags.seed = seed;
  flags.format = format == "json" ? tmunfold::Format::json : tmunfold::Format::text;

  return tmunfold::run_file(sub->get_name(), config, flags, std::cout, std::cerr);
}
