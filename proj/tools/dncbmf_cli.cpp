// Batch CLI for DNCB matrix factorization: fit a chain, score a holdout,
// generate synthetic data from the model prior, or export embeddings.

#include <CLI11.hpp>
#include <iostream>

#include "dncb/commands.hpp"

namespace {

void add_hyper_flags(CLI::App* cmd, dncb::cli::RunConfig& config) {
  cmd->add_option("--k", config.hyper.K, "Component count");
  cmd->add_option("--eps1", config.hyper.eps1, "DNCB shape epsilon_1");
  cmd->add_option("--eps2", config.hyper.eps2, "DNCB shape epsilon_2");
  cmd->add_option("--a0", config.hyper.a0, "Theta prior shape");
  cmd->add_option("--b0", config.hyper.b0, "Theta prior rate");
  cmd->add_option("--e0", config.hyper.e0, "Phi prior shape");
  cmd->add_option("--f0", config.hyper.f0, "Phi prior rate");
}

void add_input_flags(CLI::App* cmd, dncb::cli::RunConfig& config) {
  cmd->add_option("--input", config.input, "Beta-value matrix (TSV)");
  cmd->add_option("--reads-methylated", config.reads_meth,
                  "Methylated read counts (TSV); with --reads-unmethylated, "
                  "replaces --input");
  cmd->add_option("--reads-unmethylated", config.reads_unmeth,
                  "Unmethylated read counts (TSV)");
  cmd->add_option("--s0", config.s0, "Read smoothing term");
  cmd->add_option("--top-variance", config.top_variance,
                  "Keep only the N highest-variance columns");
}

void add_mask_flags(CLI::App* cmd, dncb::cli::RunConfig& config) {
  cmd->add_option("--mask-fraction", config.mask_fraction,
                  "Hold out this fraction of cells");
  cmd->add_option("--mask-seed", config.mask_seed, "Mask RNG seed");
  cmd->add_option("--mask-file", config.mask_file, "Explicit mask file");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Doubly non-central beta matrix factorization"};
  app.require_subcommand(1);
  dncb::cli::RunConfig config;

  auto* fit = app.add_subcommand("fit", "Run the Gibbs sampler");
  add_input_flags(fit, config);
  add_hyper_flags(fit, config);
  add_mask_flags(fit, config);
  fit->add_option("--output", config.output, "Output directory")->required();
  fit->add_option("--burnin", config.sampler.burnin, "Burn-in sweeps");
  fit->add_option("--total", config.sampler.total, "Post-burn-in sweeps");
  fit->add_option("--thin", config.sampler.thin, "Snapshot interval");
  fit->add_option("--seed", config.sampler.seed, "RNG seed");
  fit->add_flag("--parallel", config.sampler.parallel,
                "Data-parallel sweeps (reproducible for a fixed seed)");
  fit->add_option("--workers", config.sampler.workers, "Worker thread count");

  auto* evaluate = app.add_subcommand("evaluate", "Score held-out cells");
  add_input_flags(evaluate, config);
  add_mask_flags(evaluate, config);
  evaluate->add_option("--chain", config.chain_dir, "Fit output directory")
      ->required();
  evaluate->add_option("--output", config.output, "Output directory")->required();
  evaluate->add_flag("--per-cell", config.per_cell, "Emit per-cell log densities");

  auto* generate = app.add_subcommand("generate",
                                      "Draw a synthetic dataset from the prior");
  add_hyper_flags(generate, config);
  generate->add_option("--rows", config.gen_rows, "Sample count")->required();
  generate->add_option("--cols", config.gen_cols, "Gene count")->required();
  generate->add_option("--seed", config.sampler.seed, "RNG seed");
  generate->add_option("--output", config.output, "Output directory")->required();

  auto* embed = app.add_subcommand("embed", "Export the posterior-mean embedding");
  embed->add_option("--chain", config.chain_dir, "Fit output directory")
      ->required();
  embed->add_option("--output", config.output, "Output directory")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (fit->parsed()) dncb::cli::cmd_fit(config);
    if (evaluate->parsed()) dncb::cli::cmd_evaluate(config);
    if (generate->parsed()) dncb::cli::cmd_generate(config);
    if (embed->parsed()) dncb::cli::cmd_embed(config);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
