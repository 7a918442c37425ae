#ifndef DNCB_COMMANDS_HPP
#define DNCB_COMMANDS_HPP

#include <filesystem>
#include <optional>
#include <string>

#include "dncb/gibbs.hpp"
#include "dncb/model.hpp"

namespace dncb::cli {

// Fully resolved run configuration: flags override config-file keys
// override the defaults below.
struct RunConfig {
  model::Hyperparams hyper;
  gibbs::SamplerConfig sampler;

  std::filesystem::path input;         // beta-value matrix
  std::filesystem::path reads_meth;    // optional read-count inputs
  std::filesystem::path reads_unmeth;
  double s0 = 0.1;

  std::filesystem::path output;
  std::filesystem::path chain_dir;     // existing fit output (evaluate/embed)

  double mask_fraction = 0.0;          // 0 = no generated mask
  std::uint64_t mask_seed = 0;
  std::filesystem::path mask_file;

  long top_variance = 0;               // 0 = keep all columns

  long gen_rows = 0;                   // generate only
  long gen_cols = 0;

  bool per_cell = false;               // evaluate: emit per-cell logs
};

// Each command writes its outputs into a temp directory and promotes it
// to config.output atomically on success.  Errors are thrown.
void cmd_fit(const RunConfig& config);
void cmd_evaluate(const RunConfig& config);
void cmd_generate(const RunConfig& config);
void cmd_embed(const RunConfig& config);

// Shared ingestion path: reads or beta matrix, plus optional variance filter.
model::BetaMatrix load_input(const RunConfig& config);

// Posterior-mean embedding across a chain's snapshots.
model::Matrix mean_embedding(const gibbs::PosteriorChain& chain);

}  // namespace dncb::cli

#endif
