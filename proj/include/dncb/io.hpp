#ifndef DNCB_IO_HPP
#define DNCB_IO_HPP

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "dncb/gibbs.hpp"
#include "dncb/mask.hpp"
#include "dncb/model.hpp"

namespace dncb::io {

struct ParseError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// A labeled matrix as stored on disk: tab-delimited, one header row of
// column labels, one leading column of row labels, full-precision floats.
struct LabeledMatrix {
  model::Matrix values;
  std::vector<std::string> row_ids;
  std::vector<std::string> col_ids;
};

LabeledMatrix read_matrix(const std::filesystem::path& path);
void write_matrix(const std::filesystem::path& path, const model::Matrix& values,
                  const std::vector<std::string>& row_ids,
                  const std::vector<std::string>& col_ids);

// Parse + validate + clamp into a BetaMatrix; values outside [0,1] are a
// hard error, values at the boundary are clamped and counted.
model::BetaMatrix ingest_matrix(const std::filesystem::path& path);
model::BetaMatrix to_beta_matrix(const LabeledMatrix& raw);

// Keep only the top_n columns by sample variance.
model::BetaMatrix filter_top_variance(const model::BetaMatrix& beta, long top_n);

// Read-count smoothing: beta = (s0 + methylated) / (2 s0 + methylated + unmethylated).
struct ReadCounts {
  model::CountMatrix methylated;
  model::CountMatrix unmethylated;
  std::vector<std::string> row_ids;
  std::vector<std::string> col_ids;
  double s0 = 0.1;
};
model::BetaMatrix betas_from_reads(const ReadCounts& rc);

// Mask file: header line, then one "row<TAB>col" pair per line.
void write_mask(const std::filesystem::path& path, const eval::HoldoutMask& mask);
eval::HoldoutMask read_mask(const std::filesystem::path& path);

// Flat key-value manifest, one "key<TAB>value" per line.
void write_manifest(const std::filesystem::path& path,
                    const std::map<std::string, std::string>& entries);
std::map<std::string, std::string> read_manifest(const std::filesystem::path& path);

// Chain persistence: a directory with chain.txt (schedule + sweep list)
// and per-snapshot factor matrices.
void write_chain(const std::filesystem::path& dir, const gibbs::PosteriorChain& chain,
                 const std::vector<std::string>& row_ids,
                 const std::vector<std::string>& col_ids);
gibbs::PosteriorChain read_chain(const std::filesystem::path& dir);

std::string format_double(double x);

// FNV-1a digest of the raw bytes; recorded in manifests for input
// provenance.
std::string file_digest(const std::filesystem::path& path);

}  // namespace dncb::io

#endif
