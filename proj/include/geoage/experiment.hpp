#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "geoage/analysis.hpp"
#include "geoage/geometry.hpp"
#include "geoage/io.hpp"
#include "geoage/params.hpp"
#include "geoage/policy.hpp"
#include "geoage/simulator.hpp"

namespace geoage {

struct SimSection {
  double window = 2000.0;
  Boundary wrap = Boundary::torus;
  std::uint64_t slots = 20000;
  std::optional<std::uint64_t> warmup;  // default_warmup(slots) when unset
  int realizations = 200;
  std::uint64_t seed = 1;
  bool dominant = false;
  bool guard = false;
  Inclusion inclusion = Inclusion::stable_only;

  std::uint64_t resolved_warmup() const;
};

struct SweepSection {
  std::string parameter;  // "xi" or "lambda"; empty when absent
  std::vector<double> values;
};

// One experiment, parsed from a single JSON document. dB quantities are
// converted here and nowhere else.
struct ExperimentConfig {
  double lambda = 1e-4;
  double r = 25.0;
  double alpha = 3.8;
  double threshold_db = 0.0;
  double ptx_dbm = 23.7;
  std::optional<double> noise_dbm = -90.0;  // null: noise-free
  double xi = 0.3;
  StoppingSetSpec spec = StoppingSetSpec::disk(200.0);
  std::vector<StoppingSetSpec> methods;  // compared policies in sweeps
  SimSection sim;
  SweepSection sweep;
  std::string figure;  // figure3 .. figure8
  std::string output_dir = "out";

  SystemParams params() const;
  // Fully resolved config echoed into every output file. The output
  // directory is left out so artifacts do not depend on where they land.
  Json to_json() const;
};

// Throws ConfigError on unknown keys, wrong types or invalid values.
ExperimentConfig parse_config(const Json& doc);
ExperimentConfig load_config(const std::string& path);

struct RunOptions {
  std::string out_dir;
  unsigned threads = 1;
  std::optional<std::uint64_t> seed;  // overrides sim.seed
};

// Subcommands. Each writes its files into opt.out_dir and returns the paths.
std::vector<std::string> cmd_simulate(const ExperimentConfig& cfg,
                                      const RunOptions& opt);
std::vector<std::string> cmd_analyze(const ExperimentConfig& cfg,
                                     const RunOptions& opt);
std::vector<std::string> cmd_compare(const ExperimentConfig& cfg,
                                     const RunOptions& opt);
std::vector<std::string> cmd_sweep(const ExperimentConfig& cfg,
                                   const RunOptions& opt);

// Runs body(0..count-1) on a pool of worker threads.
void parallel_for(std::size_t count, unsigned threads,
                  const std::function<void(std::size_t)>& body);

struct Realization {
  std::uint64_t seed = 0;
  std::size_t links = 0;
  PolicyAssignment policy;
  SimStats stats;
  std::string error;
};

// Samples, schedules and simulates `count` networks; realization k uses
// derive_seed(seed, k). Deterministic for any thread count.
std::vector<Realization> simulate_realizations(const SystemParams& params,
                                               const StoppingSetSpec& spec,
                                               const SimSection& sim,
                                               int count, unsigned threads);

// Access probabilities of every link over `count` sampled networks.
std::vector<double> sample_policies(const SystemParams& params,
                                    const StoppingSetSpec& spec,
                                    double window, Boundary wrap,
                                    std::uint64_t seed, int count,
                                    unsigned threads);

// Network peak AoI pooled over realizations: the mean over included links of
// each link's mean peak sample. NaN when no link qualifies.
struct PooledAoi {
  double peak_aoi = 0.0;
  double unstable_fraction = 0.0;
  std::size_t links = 0;
  std::size_t included = 0;
  double mean_success = 0.0;
};
PooledAoi pool_peak_aoi(const std::vector<Realization>& runs,
                        Inclusion inclusion);

struct Figure3Row {
  double l = 0.0;
  double z_analysis = 0.0;
  bool converged = true;
  double z_empirical = 0.0;
  std::size_t n = 0;
};
std::vector<Figure3Row> figure3_rows(const ExperimentConfig& cfg,
                                     const std::vector<double>& l_grid,
                                     unsigned threads);

struct Figure4Row {
  double kappa = 0.0;
  double ccdf_analysis = 0.0;
  bool converged = true;
  double ccdf_empirical = 0.0;
  double lambda = 0.0;
};
struct Figure4Result {
  std::vector<Figure4Row> rows;
  std::vector<double> lambdas;
  std::vector<double> ks;  // per lambda, over all empirical jumps
  std::vector<double> atom_analysis;
  std::vector<double> atom_empirical;
  std::vector<double> mean_analysis;
  std::vector<double> mean_empirical;
};
Figure4Result figure4(const ExperimentConfig& cfg, unsigned threads);

struct Figure5Row {
  double u = 0.0;
  double f_analysis = 0.0;
  bool converged = true;
  double f_empirical = 0.0;
  double xi = 0.0;
};
struct Figure5Result {
  std::vector<Figure5Row> rows;
  std::vector<double> xis;
  std::vector<double> ks;
  std::vector<bool> converged;
  std::vector<double> residual;
  std::vector<int> iterations;
  std::vector<double> mean_analysis;
  std::vector<double> mean_empirical;
  std::vector<std::size_t> excluded;  // links without attempts
};
Figure5Result figure5(const ExperimentConfig& cfg, unsigned threads);

struct SweepRow {
  double x = 0.0;  // xi or lambda
  std::string method;
  // Mean-field closed form; infinite when E[eta] E[mu] <= xi.
  double mean_field = 0.0;
  bool mean_field_stable = true;
  PeakAoiExact exact;
  bool analysis_converged = true;
  double mean_eta = 0.0;
  double mean_success = 0.0;
  double xi_max = 0.0;
  PooledAoi sim_stable;
  PooledAoi sim_all;
};
std::vector<SweepRow> run_sweep(const ExperimentConfig& cfg, unsigned threads);

}  // namespace geoage
