#include "dncb/io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

namespace dncb::io {

namespace fs = std::filesystem;

namespace {

std::vector<std::string> split_tabs(const std::string& line) {
  std::vector<std::string> fields;
  std::size_t start = 0;
  for (;;) {
    const std::size_t tab = line.find('\t', start);
    if (tab == std::string::npos) {
      fields.push_back(line.substr(start));
      return fields;
    }
    fields.push_back(line.substr(start, tab - start));
    start = tab + 1;
  }
}

double parse_double(const std::string& s, const std::string& where) {
  try {
    std::size_t pos = 0;
    const double v = std::stod(s, &pos);
    if (pos != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw ParseError("not a number at " + where + ": '" + s + "'");
  }
}

std::ifstream open_input(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open " + path.string());
  return in;
}

std::ofstream open_output(const fs::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  return out;
}

}  // namespace

std::string format_double(double x) {
  // Shortest representation that round-trips exactly.
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), x);
  return std::string(buf, res.ptr);
}

LabeledMatrix read_matrix(const fs::path& path) {
  auto in = open_input(path);
  std::string line;
  if (!std::getline(in, line)) throw ParseError(path.string() + ": empty file");
  auto header = split_tabs(line);
  if (header.size() < 2) {
    throw ParseError(path.string() + ": header must name at least one column");
  }
  LabeledMatrix out;
  out.col_ids.assign(header.begin() + 1, header.end());
  const auto m = static_cast<long>(out.col_ids.size());
  std::vector<std::vector<double>> rows;
  long line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    auto fields = split_tabs(line);
    if (static_cast<long>(fields.size()) != m + 1) {
      throw ParseError(path.string() + ":" + std::to_string(line_no) +
                       ": expected " + std::to_string(m + 1) + " fields, got " +
                       std::to_string(fields.size()));
    }
    out.row_ids.push_back(fields[0]);
    std::vector<double> row(static_cast<std::size_t>(m));
    for (long j = 0; j < m; ++j) {
      row[static_cast<std::size_t>(j)] = parse_double(
          fields[static_cast<std::size_t>(j + 1)],
          path.string() + ":" + std::to_string(line_no) + " column " +
              out.col_ids[static_cast<std::size_t>(j)]);
    }
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw ParseError(path.string() + ": no data rows");
  out.values.resize(static_cast<long>(rows.size()), m);
  for (long i = 0; i < out.values.rows(); ++i) {
    for (long j = 0; j < m; ++j) {
      out.values(i, j) =
          rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
    }
  }
  return out;
}

void write_matrix(const fs::path& path, const model::Matrix& values,
                  const std::vector<std::string>& row_ids,
                  const std::vector<std::string>& col_ids) {
  auto out = open_output(path);
  out << "id";
  for (const auto& c : col_ids) out << '\t' << c;
  out << '\n';
  for (long i = 0; i < values.rows(); ++i) {
    out << row_ids[static_cast<std::size_t>(i)];
    for (long j = 0; j < values.cols(); ++j) {
      out << '\t' << format_double(values(i, j));
    }
    out << '\n';
  }
}

model::BetaMatrix to_beta_matrix(const LabeledMatrix& raw) {
  model::BetaMatrix beta;
  beta.row_ids = raw.row_ids;
  beta.col_ids = raw.col_ids;
  beta.values = raw.values;
  for (long i = 0; i < beta.values.rows(); ++i) {
    for (long j = 0; j < beta.values.cols(); ++j) {
      const double v = beta.values(i, j);
      if (v < 0.0 || v > 1.0 || !std::isfinite(v)) {
        throw ParseError("value outside [0,1] at row " +
                         beta.row_ids[static_cast<std::size_t>(i)] +
                         ", column " +
                         beta.col_ids[static_cast<std::size_t>(j)] + ": " +
                         format_double(v));
      }
      bool clamped = false;
      beta.values(i, j) = model::clamp_beta(v, clamped);
      if (clamped) ++beta.clamped_count;
    }
  }
  beta.validate();
  return beta;
}

model::BetaMatrix ingest_matrix(const fs::path& path) {
  return to_beta_matrix(read_matrix(path));
}

model::BetaMatrix filter_top_variance(const model::BetaMatrix& beta, long top_n) {
  if (top_n < 1) throw std::domain_error("filter_top_variance: top_n must be >= 1");
  const long m = beta.cols();
  if (top_n >= m) return beta;
  const long n = beta.rows();
  std::vector<std::pair<double, long>> ranked;
  for (long j = 0; j < m; ++j) {
    const double mean = beta.values.col(j).mean();
    // Sample variance (n-1 denominator).
    const double ss = (beta.values.col(j) - mean).square().sum();
    ranked.emplace_back(n > 1 ? ss / static_cast<double>(n - 1) : 0.0, j);
  }
  std::stable_sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) {
    return a.first > b.first;
  });
  std::vector<long> keep;
  for (long r = 0; r < top_n; ++r) keep.push_back(ranked[static_cast<std::size_t>(r)].second);
  std::sort(keep.begin(), keep.end());
  model::BetaMatrix out;
  out.row_ids = beta.row_ids;
  out.clamped_count = beta.clamped_count;
  out.values.resize(n, top_n);
  for (long r = 0; r < top_n; ++r) {
    const long j = keep[static_cast<std::size_t>(r)];
    out.values.col(r) = beta.values.col(j);
    out.col_ids.push_back(beta.col_ids[static_cast<std::size_t>(j)]);
  }
  return out;
}

model::BetaMatrix betas_from_reads(const ReadCounts& rc) {
  if (!(rc.s0 > 0.0)) throw std::domain_error("betas_from_reads: s0 must be > 0");
  if (rc.methylated.rows() != rc.unmethylated.rows() ||
      rc.methylated.cols() != rc.unmethylated.cols()) {
    throw std::domain_error("betas_from_reads: read matrices disagree in shape");
  }
  if ((rc.methylated < 0).any() || (rc.unmethylated < 0).any()) {
    throw std::domain_error("betas_from_reads: negative read count");
  }
  model::BetaMatrix beta;
  beta.row_ids = rc.row_ids;
  beta.col_ids = rc.col_ids;
  beta.values = (rc.s0 + rc.methylated.cast<double>()) /
                (2.0 * rc.s0 + (rc.methylated + rc.unmethylated).cast<double>());
  for (long i = 0; i < beta.values.rows(); ++i) {
    for (long j = 0; j < beta.values.cols(); ++j) {
      bool clamped = false;
      beta.values(i, j) = model::clamp_beta(beta.values(i, j), clamped);
      if (clamped) ++beta.clamped_count;
    }
  }
  beta.validate();
  return beta;
}

void write_mask(const fs::path& path, const eval::HoldoutMask& mask) {
  auto out = open_output(path);
  out << "row\tcol\n";
  for (const auto& [i, j] : mask.held_out) out << i << '\t' << j << '\n';
}

eval::HoldoutMask read_mask(const fs::path& path) {
  auto in = open_input(path);
  std::string line;
  if (!std::getline(in, line) || split_tabs(line).size() != 2) {
    throw ParseError(path.string() + ": expected a two-column mask header");
  }
  eval::HoldoutMask mask;
  long line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    auto fields = split_tabs(line);
    if (fields.size() != 2) {
      throw ParseError(path.string() + ":" + std::to_string(line_no) +
                       ": expected two fields");
    }
    const auto where = path.string() + ":" + std::to_string(line_no);
    mask.held_out.emplace_back(
        static_cast<long>(parse_double(fields[0], where)),
        static_cast<long>(parse_double(fields[1], where)));
  }
  return mask;
}

void write_manifest(const fs::path& path,
                    const std::map<std::string, std::string>& entries) {
  auto out = open_output(path);
  for (const auto& [k, v] : entries) out << k << '\t' << v << '\n';
}

std::map<std::string, std::string> read_manifest(const fs::path& path) {
  auto in = open_input(path);
  std::map<std::string, std::string> entries;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    auto fields = split_tabs(line);
    if (fields.size() != 2) {
      throw ParseError(path.string() + ": malformed manifest line: " + line);
    }
    entries[fields[0]] = fields[1];
  }
  return entries;
}

namespace {

std::vector<std::string> index_labels(const char* prefix, long count) {
  std::vector<std::string> labels;
  for (long c = 0; c < count; ++c) {
    labels.push_back(prefix + std::to_string(c));
  }
  return labels;
}

}  // namespace

void write_chain(const fs::path& dir, const gibbs::PosteriorChain& chain,
                 const std::vector<std::string>& row_ids,
                 const std::vector<std::string>& col_ids) {
  fs::create_directories(dir);
  {
    auto out = open_output(dir / "chain.txt");
    out << "burnin\t" << chain.config.burnin << '\n'
        << "total\t" << chain.config.total << '\n'
        << "thin\t" << chain.config.thin << '\n'
        << "seed\t" << chain.config.seed << '\n'
        << "parallel\t" << (chain.config.parallel ? 1 : 0) << '\n'
        << "eps1\t" << format_double(chain.hyper.eps1) << '\n'
        << "eps2\t" << format_double(chain.hyper.eps2) << '\n'
        << "a0\t" << format_double(chain.hyper.a0) << '\n'
        << "b0\t" << format_double(chain.hyper.b0) << '\n'
        << "e0\t" << format_double(chain.hyper.e0) << '\n'
        << "f0\t" << format_double(chain.hyper.f0) << '\n'
        << "K\t" << chain.hyper.K << '\n';
    out << "sweeps\t";
    bool first = true;
    for (const auto& [sweep, state] : chain.snapshots) {
      (void)state;
      if (!first) out << ' ';
      out << sweep;
      first = false;
    }
    out << '\n';
  }
  const auto comp = index_labels("k", chain.hyper.K);
  for (const auto& [sweep, state] : chain.snapshots) {
    const std::string tag = "snapshot_" + std::to_string(sweep);
    write_matrix(dir / (tag + "_theta1.tsv"), state.theta1, row_ids, comp);
    write_matrix(dir / (tag + "_theta2.tsv"), state.theta2, row_ids, comp);
    write_matrix(dir / (tag + "_phi.tsv"), state.phi, comp, col_ids);
  }
}

gibbs::PosteriorChain read_chain(const fs::path& dir) {
  const auto meta = read_manifest(dir / "chain.txt");
  gibbs::PosteriorChain chain;
  chain.config.burnin = std::stol(meta.at("burnin"));
  chain.config.total = std::stol(meta.at("total"));
  chain.config.thin = std::stol(meta.at("thin"));
  chain.config.seed = std::stoull(meta.at("seed"));
  chain.config.parallel = meta.at("parallel") == "1";
  chain.hyper.eps1 = std::stod(meta.at("eps1"));
  chain.hyper.eps2 = std::stod(meta.at("eps2"));
  chain.hyper.a0 = std::stod(meta.at("a0"));
  chain.hyper.b0 = std::stod(meta.at("b0"));
  chain.hyper.e0 = std::stod(meta.at("e0"));
  chain.hyper.f0 = std::stod(meta.at("f0"));
  chain.hyper.K = std::stoi(meta.at("K"));
  std::istringstream sweeps(meta.at("sweeps"));
  long sweep = 0;
  while (sweeps >> sweep) {
    const std::string tag = "snapshot_" + std::to_string(sweep);
    model::FactorState state;
    state.theta1 = read_matrix(dir / (tag + "_theta1.tsv")).values;
    state.theta2 = read_matrix(dir / (tag + "_theta2.tsv")).values;
    state.phi = read_matrix(dir / (tag + "_phi.tsv")).values;
    chain.snapshots.emplace_back(sweep, std::move(state));
  }
  if (chain.snapshots.empty()) {
    throw ParseError(dir.string() + ": chain has no snapshots");
  }
  return chain;
}

std::string file_digest(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open " + path.string());
  std::uint64_t hash = 0xCBF29CE484222325ULL;
  char c;
  while (in.get(c)) {
    hash ^= static_cast<unsigned char>(c);
    hash *= 0x100000001B3ULL;
  }
  std::ostringstream out;
  out << std::hex << hash;
  return out.str();
}

}  // namespace dncb::io
