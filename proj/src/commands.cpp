#include "dncb/commands.hpp"

#include <chrono>
#include <cmath>
#include <fstream>
#include <stdexcept>

#include "dncb/eval.hpp"
#include "dncb/io.hpp"
#include "dncb/randist.hpp"

namespace dncb::cli {

namespace fs = std::filesystem;

namespace {

// Staging directory promoted to `target` by a single rename on success.
class OutputStage {
 public:
  explicit OutputStage(const fs::path& target)
      : target_(target), tmp_(target.string() + ".tmp") {
    if (target_.empty()) throw std::domain_error("output path is required");
    if (fs::exists(target_)) {
      throw std::runtime_error("output already exists: " + target_.string());
    }
    fs::remove_all(tmp_);
    fs::create_directories(tmp_);
  }
  ~OutputStage() {
    if (!promoted_) {
      std::error_code ec;
      fs::remove_all(tmp_, ec);
    }
  }
  const fs::path& dir() const { return tmp_; }
  void promote() {
    fs::rename(tmp_, target_);
    promoted_ = true;
  }

 private:
  fs::path target_;
  fs::path tmp_;
  bool promoted_ = false;
};

std::map<std::string, std::string> base_manifest(const RunConfig& c,
                                                 const std::string& command) {
  std::map<std::string, std::string> m;
  m["command"] = command;
  m["eps1"] = io::format_double(c.hyper.eps1);
  m["eps2"] = io::format_double(c.hyper.eps2);
  m["a0"] = io::format_double(c.hyper.a0);
  m["b0"] = io::format_double(c.hyper.b0);
  m["e0"] = io::format_double(c.hyper.e0);
  m["f0"] = io::format_double(c.hyper.f0);
  m["K"] = std::to_string(c.hyper.K);
  m["burnin"] = std::to_string(c.sampler.burnin);
  m["total"] = std::to_string(c.sampler.total);
  m["thin"] = std::to_string(c.sampler.thin);
  m["seed"] = std::to_string(c.sampler.seed);
  m["parallel"] = c.sampler.parallel ? "1" : "0";
  return m;
}

std::optional<eval::HoldoutMask> resolve_mask(const RunConfig& c, long n, long m) {
  if (!c.mask_file.empty()) {
    auto mask = io::read_mask(c.mask_file);
    for (const auto& [i, j] : mask.held_out) {
      if (i < 0 || i >= n || j < 0 || j >= m) {
        throw std::domain_error("mask cell outside the data matrix");
      }
    }
    return mask;
  }
  if (c.mask_fraction > 0.0) {
    return eval::make_mask(n, m, c.mask_fraction, c.mask_seed);
  }
  return std::nullopt;
}

std::vector<std::string> component_labels(int k) {
  std::vector<std::string> labels;
  for (int c = 0; c < k; ++c) labels.push_back("k" + std::to_string(c));
  return labels;
}

}  // namespace

model::BetaMatrix load_input(const RunConfig& config) {
  model::BetaMatrix beta;
  if (!config.reads_meth.empty() || !config.reads_unmeth.empty()) {
    if (config.reads_meth.empty() || config.reads_unmeth.empty()) {
      throw std::domain_error(
          "both --reads-methylated and --reads-unmethylated are required");
    }
    const auto meth = io::read_matrix(config.reads_meth);
    const auto unmeth = io::read_matrix(config.reads_unmeth);
    io::ReadCounts rc;
    rc.methylated = meth.values.round().cast<std::int64_t>();
    rc.unmethylated = unmeth.values.round().cast<std::int64_t>();
    rc.row_ids = meth.row_ids;
    rc.col_ids = meth.col_ids;
    rc.s0 = config.s0;
    beta = io::betas_from_reads(rc);
  } else {
    if (config.input.empty()) throw std::domain_error("input path is required");
    beta = io::ingest_matrix(config.input);
  }
  if (config.top_variance > 0) {
    beta = io::filter_top_variance(beta, config.top_variance);
  }
  return beta;
}

model::Matrix mean_embedding(const gibbs::PosteriorChain& chain) {
  model::Matrix acc;
  for (const auto& [sweep, state] : chain.snapshots) {
    (void)sweep;
    const auto rho = model::embedding(state).rho;
    if (acc.size() == 0) {
      acc = rho;
    } else {
      acc += rho;
    }
  }
  return acc / static_cast<double>(chain.snapshots.size());
}

void cmd_fit(const RunConfig& config) {
  config.hyper.validate();
  config.sampler.validate();
  const auto t0 = std::chrono::steady_clock::now();
  auto beta = load_input(config);
  const auto mask = resolve_mask(config, beta.rows(), beta.cols());

  OutputStage stage(config.output);
  const auto chain = gibbs::run(beta, mask ? &*mask : nullptr, config.hyper,
                                config.sampler);
  io::write_chain(stage.dir() / "chain", chain, beta.row_ids, beta.col_ids);
  if (mask) io::write_mask(stage.dir() / "mask.tsv", *mask);

  // Final embedding (posterior mean across snapshots).
  io::write_matrix(stage.dir() / "embedding.tsv", mean_embedding(chain),
                   beta.row_ids, component_labels(config.hyper.K));

  {
    std::ofstream trace(stage.dir() / "logjoint.tsv");
    trace << "sweep\tlog_joint\n";
    for (std::size_t s = 0; s < chain.log_joint_trace.size(); ++s) {
      trace << (s + 1) << '\t' << io::format_double(chain.log_joint_trace[s])
            << '\n';
    }
  }

  auto manifest = base_manifest(config, "fit");
  if (!config.input.empty()) {
    manifest["input"] = config.input.string();
    manifest["input_digest"] = io::file_digest(config.input);
  }
  if (!config.reads_meth.empty()) {
    manifest["reads_methylated"] = config.reads_meth.string();
    manifest["reads_unmethylated"] = config.reads_unmeth.string();
    manifest["s0"] = io::format_double(config.s0);
  }
  if (config.top_variance > 0) {
    manifest["top_variance"] = std::to_string(config.top_variance);
  }
  if (mask) {
    manifest["mask_cells"] = std::to_string(mask->held_out.size());
    if (!config.mask_file.empty()) {
      manifest["mask_file"] = config.mask_file.string();
    } else {
      manifest["mask_fraction"] = io::format_double(config.mask_fraction);
      manifest["mask_seed"] = std::to_string(config.mask_seed);
    }
  }
  manifest["clamped_cells"] = std::to_string(beta.clamped_count);
  manifest["snapshots"] = std::to_string(chain.snapshots.size());
  const auto t1 = std::chrono::steady_clock::now();
  manifest["wall_time_sec"] = io::format_double(
      std::chrono::duration<double>(t1 - t0).count());
  io::write_manifest(stage.dir() / "manifest.txt", manifest);
  stage.promote();
}

void cmd_evaluate(const RunConfig& config) {
  if (config.chain_dir.empty()) {
    throw std::domain_error("evaluate requires --chain");
  }
  auto beta = load_input(config);
  const auto chain = io::read_chain(config.chain_dir / "chain");
  auto mask = resolve_mask(config, beta.rows(), beta.cols());
  if (!mask) {
    // Fall back to the mask saved by the fit.
    const auto saved = config.chain_dir / "mask.tsv";
    if (fs::exists(saved)) mask = io::read_mask(saved);
  }
  if (!mask || mask->held_out.empty()) {
    throw std::domain_error("evaluate requires a non-empty holdout mask");
  }

  const auto report = eval::ppd(chain, beta, *mask, chain.hyper);

  OutputStage stage(config.output);
  {
    std::ofstream out(stage.dir() / "ppd.txt");
    out << "log_ppd_total\t" << io::format_double(report.log_ppd_total) << '\n'
        << "scaled_ppd\t" << io::format_double(report.scaled_ppd) << '\n'
        << "held_out_cells\t" << mask->held_out.size() << '\n'
        << "convergence_failures\t" << report.convergence_failures << '\n'
        << "clamped_cells\t" << beta.clamped_count << '\n';
  }
  if (config.per_cell) {
    std::ofstream out(stage.dir() / "per_cell_log.tsv");
    out << "row\tcol\tlog_density\n";
    for (std::size_t c = 0; c < mask->held_out.size(); ++c) {
      out << mask->held_out[c].first << '\t' << mask->held_out[c].second
          << '\t' << io::format_double(report.per_cell_log[c]) << '\n';
    }
  }
  auto manifest = base_manifest(config, "evaluate");
  manifest["chain"] = config.chain_dir.string();
  if (!config.input.empty()) {
    manifest["input"] = config.input.string();
    manifest["input_digest"] = io::file_digest(config.input);
  }
  io::write_manifest(stage.dir() / "manifest.txt", manifest);
  stage.promote();
}

void cmd_generate(const RunConfig& config) {
  config.hyper.validate();
  if (config.gen_rows < 1 || config.gen_cols < 1) {
    throw std::domain_error("generate requires --rows and --cols >= 1");
  }
  const long n = config.gen_rows;
  const long m = config.gen_cols;
  const int k = config.hyper.K;

  randist::RngStream base(config.sampler.seed, 0);
  auto rng = base.substream(0);
  model::FactorState truth;
  truth.theta1 = model::Matrix::Zero(n, k);
  truth.theta2 = model::Matrix::Zero(n, k);
  truth.phi = model::Matrix::Zero(k, m);
  for (long i = 0; i < n; ++i) {
    for (int c = 0; c < k; ++c) {
      truth.theta1(i, c) =
          randist::sample_gamma(config.hyper.a0, config.hyper.b0, rng);
      truth.theta2(i, c) =
          randist::sample_gamma(config.hyper.a0, config.hyper.b0, rng);
    }
  }
  for (int c = 0; c < k; ++c) {
    for (long j = 0; j < m; ++j) {
      truth.phi(c, j) =
          randist::sample_gamma(config.hyper.e0, config.hyper.f0, rng);
    }
  }
  const model::Matrix lam1 = (truth.theta1.matrix() * truth.phi.matrix()).array();
  const model::Matrix lam2 = (truth.theta2.matrix() * truth.phi.matrix()).array();
  model::Matrix beta(n, m);
  long clamped_count = 0;
  for (long i = 0; i < n; ++i) {
    for (long j = 0; j < m; ++j) {
      const auto y1 = randist::sample_poisson(lam1(i, j), rng);
      const auto y2 = randist::sample_poisson(lam2(i, j), rng);
      const double b = randist::sample_beta(
          config.hyper.eps1 + static_cast<double>(y1),
          config.hyper.eps2 + static_cast<double>(y2), rng);
      bool clamped = false;
      beta(i, j) = model::clamp_beta(b, clamped);
      if (clamped) ++clamped_count;
    }
  }

  std::vector<std::string> row_ids, col_ids;
  for (long i = 0; i < n; ++i) row_ids.push_back("sample" + std::to_string(i));
  for (long j = 0; j < m; ++j) col_ids.push_back("gene" + std::to_string(j));
  const auto comp = component_labels(k);

  OutputStage stage(config.output);
  io::write_matrix(stage.dir() / "data.tsv", beta, row_ids, col_ids);
  io::write_matrix(stage.dir() / "truth_theta1.tsv", truth.theta1, row_ids, comp);
  io::write_matrix(stage.dir() / "truth_theta2.tsv", truth.theta2, row_ids, comp);
  io::write_matrix(stage.dir() / "truth_phi.tsv", truth.phi, comp, col_ids);
  auto manifest = base_manifest(config, "generate");
  manifest["rows"] = std::to_string(n);
  manifest["cols"] = std::to_string(m);
  manifest["clamped_cells"] = std::to_string(clamped_count);
  io::write_manifest(stage.dir() / "manifest.txt", manifest);
  stage.promote();
}

void cmd_embed(const RunConfig& config) {
  if (config.chain_dir.empty()) {
    throw std::domain_error("embed requires --chain");
  }
  const auto chain = io::read_chain(config.chain_dir / "chain");
  // Row labels come from the persisted snapshots.
  const auto first =
      io::read_matrix(config.chain_dir / "chain" /
                      ("snapshot_" + std::to_string(chain.snapshots[0].first) +
                       "_theta1.tsv"));
  OutputStage stage(config.output);
  io::write_matrix(stage.dir() / "embedding.tsv", mean_embedding(chain),
                   first.row_ids, component_labels(chain.hyper.K));
  auto manifest = base_manifest(config, "embed");
  manifest["chain"] = config.chain_dir.string();
  manifest["snapshots"] = std::to_string(chain.snapshots.size());
  io::write_manifest(stage.dir() / "manifest.txt", manifest);
  stage.promote();
}

}  // namespace dncb::cli
