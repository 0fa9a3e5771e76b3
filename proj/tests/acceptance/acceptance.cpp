// Acceptance suite: one PASS/FAIL line per criterion. Exit status is the
// number of failed criteria.

#include <CLI11.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <limits>
#include <numbers>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "geoage/analysis.hpp"
#include "geoage/experiment.hpp"
#include "geoage/numerics.hpp"
#include "geoage/policy.hpp"
#include "geoage/simulator.hpp"
#include "geoage/stats.hpp"

using namespace geoage;
namespace fs = std::filesystem;

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kInf = std::numeric_limits<double>::infinity();

struct Outcome {
  bool pass = true;
  std::vector<std::string> notes;

  // Records one sub-check and its measured value.
  void check(bool ok, const std::string& what) {
    pass = pass && ok;
    notes.push_back(std::string(ok ? "ok   " : "FAIL ") + what);
  }
};

std::string fmt(const char* format, ...) __attribute__((format(printf, 1, 2)));
std::string fmt(const char* format, ...) {
  char buf[512];
  va_list args;
  va_start(args, format);
  std::vsnprintf(buf, sizeof buf, format, args);
  va_end(args);
  return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
      .count();
}

ExperimentConfig config(const std::string& text) {
  return parse_config(Json::parse(text));
}

// ---------------------------------------------------------------------------

Outcome fixed_point_correctness(unsigned) {
  Outcome out;
  const auto t0 = std::chrono::steady_clock::now();
  std::mt19937_64 rng(1);
  std::uniform_int_distribution<int> N(0, 8);
  std::uniform_real_distribution<double> logd(-3.0, 2.0), T(0.0, 1.5);
  double worst = 0.0;
  int wrong_atom = 0;
  int solved = 0;
  for (int t = 0; t < 1000; ++t) {
    PolicyInputs in;
    const int n = N(rng);
    for (int k = 0; k < n; ++k) {
      in.neighbor_D.push_back(std::pow(10.0, logd(rng)));
    }
    in.tail = T(rng);
    const double eta = solve_access_probability(in);
    if (access_condition(in)) {
      ++solved;
      worst = std::max(worst, std::fabs(access_residual(in, eta)));
      wrong_atom += eta >= 1.0;
    } else {
      wrong_atom += eta != 1.0;
    }
  }
  out.check(worst < 1e-9, fmt("max |f(eta)| = %.2e over %d solved inputs",
                              worst, solved));
  out.check(wrong_atom == 0,
            fmt("eta = 1 exactly iff the condition fails (%d mismatches)",
                wrong_atom));

  double worst_closed = 0.0;
  std::uniform_real_distribution<double> Y(1.0, 80.0), L(-5.0, -3.0);
  for (int t = 0; t < 1000; ++t) {
    const SystemParams p(std::pow(10.0, L(rng)), 25.0, 3.8, 1.0, 1e11, 0.3);
    const double y = Y(rng);
    PolicyInputs in;
    in.neighbor_D = {std::pow(y, p.alpha()) / p.tr_alpha()};
    in.tail = tail_integral(y, p);
    worst_closed = std::max(worst_closed,
                            std::fabs(closed_form_nearest(y, p) -
                                      solve_access_probability(in, 1e-14)));
  }
  out.check(worst_closed < 1e-8,
            fmt("closed form vs generic solver max |d| = %.2e", worst_closed));
  const double t = seconds_since(t0);
  out.check(t < 1.0, fmt("runtime %.3f s < 1 s", t));
  return out;
}

Outcome dominant_oracle(unsigned) {
  Outcome out;
  const auto t0 = std::chrono::steady_clock::now();
  const SystemParams p =
      SystemParams::from_db(1e-4, 25.0, 3.8, 0.0, 23.7, -90.0, 0.3);
  const NetworkRealization net =
      sample_network(p, 1000.0, Boundary::torus, 2024);
  const PolicyAssignment pol =
      assign_policies(net, StoppingSetSpec::disk(100.0), p);
  SimConfig cfg = SimConfig::make(20000, 7);
  cfg.dominant = true;
  cfg.explicit_fading = true;
  const SimStats s = run_slotted(net, pol, p, cfg);
  std::size_t within = 0;
  for (std::size_t i = 0; i < s.links.size(); ++i) {
    const double q = dominant_success_probability(net, pol, p, i);
    const double n = static_cast<double>(s.links[i].attempts);
    const double se = std::sqrt(q * (1.0 - q) / n);
    within += n > 0 && std::fabs(s.links[i].mu_hat() - q) <= 3.0 * se + 1e-12;
  }
  const double frac = static_cast<double>(within) / s.links.size();
  out.check(frac >= 0.95,
            fmt("%zu of %zu links within 3 binomial SE (%.3f >= 0.95), "
                "explicit fading",
                within, s.links.size(), frac));
  const double t = seconds_since(t0);
  out.check(t < 60.0, fmt("runtime %.1f s < 60 s", t));
  return out;
}

Outcome single_link_oracle(unsigned) {
  Outcome out;
  const double xi = 0.3, q = 0.8;
  const double tr = std::pow(25.0, 3.8);
  const SystemParams p(1e-4, 25.0, 3.8, 1.0, tr / -std::log(q), xi);
  const NetworkRealization net(1000.0, Boundary::open, {{500, 500}},
                               {{525, 500}}, 0);
  PolicyAssignment pol;
  pol.gamma = {1.0};
  pol.condition_met = {false};
  pol.n_observed = {0};
  pol.observation_radius = {0.0};
  const SimStats s = run_slotted(net, pol, p, SimConfig::make(1000000, 5));
  const double expected = 1.0 / xi + (1.0 - xi) / (q - xi);
  const double got = measure_peak_aoi(s, Inclusion::all);
  const double rel = std::fabs(got / expected - 1.0);
  out.check(rel < 0.02, fmt("peak AoI %.4f vs %.4f, rel err %.4f < 0.02",
                            got, expected, rel));
  return out;
}

Outcome access_law(unsigned threads) {
  Outcome out;
  const auto t0 = std::chrono::steady_clock::now();
  const ExperimentConfig cfg = config(R"({
    "params": {"lambda": 1e-4, "r": 50, "xi": 0.3},
    "spec": "disk:200",
    "sweep": {"parameter": "lambda", "values": [1e-4, 5e-4]},
    "sim": {"window": 2000, "realizations": 200, "seed": 1},
    "figure": "figure4"
  })");
  const Figure4Result res = figure4(cfg, threads);
  for (std::size_t k = 0; k < res.lambdas.size(); ++k) {
    out.check(res.ks[k] <= 0.03,
              fmt("lambda %.0e: KS %.4f <= 0.03 (atom %.4f vs %.4f, "
                  "mean %.4f vs %.4f)",
                  res.lambdas[k], res.ks[k], res.atom_analysis[k],
                  res.atom_empirical[k], res.mean_analysis[k],
                  res.mean_empirical[k]));
  }
  // Rows are grouped by lambda on a shared kappa grid.
  const std::size_t n = res.rows.size() / 2;
  double worst = -kInf;
  double worst_emp = -kInf;
  for (std::size_t i = 0; i < n; ++i) {
    worst = std::max(worst, res.rows[n + i].ccdf_analysis -
                                res.rows[i].ccdf_analysis);
    worst_emp = std::max(worst_emp, res.rows[n + i].ccdf_empirical -
                                        res.rows[i].ccdf_empirical);
  }
  out.check(worst <= 0.0,
            fmt("denser analytical CCDF <= sparser, max excess %.2e", worst));
  out.check(worst_emp <= 0.0,
            fmt("denser empirical CCDF <= sparser, max excess %.2e",
                worst_emp));
  const double t = seconds_since(t0);
  out.check(t < 600.0, fmt("runtime %.1f s < 600 s", t));
  return out;
}

Outcome interference_access(unsigned) {
  Outcome out;
  const SystemParams p =
      SystemParams::from_db(1e-4, 25.0, 3.8, 0.0, 23.7, -90.0, 0.3);
  const EtaModel model(p, 200.0);
  double prev = -kInf;
  double worst_drop = 0.0;
  bool flagged = false;
  for (int l = 0; l <= 500; ++l) {
    const Flagged z = model.z(l);
    worst_drop = std::max(worst_drop, prev - z.value);
    prev = z.value;
    flagged = flagged || !z.converged;
  }
  out.check(worst_drop <= 0.0,
            fmt("Z non-decreasing on [0, 500] m (1 m steps), max drop %.2e%s",
                worst_drop, flagged ? ", some points flagged" : ""));
  const double gap =
      std::fabs(model.z(20.0 * p.r()).value - model.mean().value);
  out.check(gap < 1e-2, fmt("|Z(20 r) - E[eta]| = %.2e < 1e-2", gap));
  return out;
}

Outcome success_law(unsigned threads) {
  Outcome out;
  const ExperimentConfig cfg = config(R"({
    "params": {"lambda": 1e-4, "r": 50, "xi": 0.3},
    "spec": "disk:200",
    "sweep": {"parameter": "xi", "values": [0.05, 0.3]},
    "sim": {"window": 2000, "slots": 20000, "realizations": 16, "seed": 1},
    "figure": "figure5"
  })");
  const Figure5Result res = figure5(cfg, threads);
  for (std::size_t k = 0; k < res.xis.size(); ++k) {
    out.check(res.converged[k] && res.residual[k] < 1e-4 &&
                  res.iterations[k] <= 50,
              fmt("xi %.2f: fixed point residual %.1e after %d iterations%s",
                  res.xis[k], res.residual[k], res.iterations[k],
                  res.converged[k] ? "" : " (inversion or iteration flagged)"));
    out.check(res.ks[k] <= 0.05,
              fmt("xi %.2f: KS %.4f <= 0.05 (mean %.4f vs %.4f)", res.xis[k],
                  res.ks[k], res.mean_analysis[k], res.mean_empirical[k]));
  }
  std::vector<double> u_lo, f_lo, u_hi, f_hi;
  for (const Figure5Row& row : res.rows) {
    auto& u = row.xi == res.xis[0] ? u_lo : u_hi;
    auto& f = row.xi == res.xis[0] ? f_lo : f_hi;
    u.push_back(row.u);
    f.push_back(row.f_analysis);
  }
  double worst = -kInf;
  for (std::size_t i = 0; i < u_hi.size(); ++i) {
    worst = std::max(worst, interpolate(u_lo, f_lo, u_hi[i]) - f_hi[i]);
  }
  for (std::size_t i = 0; i < u_lo.size(); ++i) {
    worst = std::max(worst, f_lo[i] - interpolate(u_hi, f_hi, u_lo[i]));
  }
  // Interpolating between grids leaves rounding residue near 0 and 1.
  out.check(worst <= 1e-12,
            fmt("F(xi = 0.3) >= F(xi = 0.05) pointwise, max deficit %.2e",
                worst));
  return out;
}

Outcome numerics_oracles(unsigned) {
  Outcome out;
  const numerics::ComplexFn exp1{
      [](double w) { return 1.0 / numerics::cplx(1.0, -w); }};
  double worst = 0.0;
  for (double x : {0.1, 0.5, 1.0, 2.0, 4.0}) {
    const auto r = numerics::gil_pelaez_cdf(exp1, x, 1e-6);
    worst = std::max(worst, std::fabs(r.value - (1.0 - std::exp(-x))));
  }
  out.check(worst < 1e-4, fmt("Gil-Pelaez Exp(1) CDF max |err| %.2e", worst));

  const SystemParams p(1e-4, 25.0, 4.0, 1.0, 1e12, 0.3);
  const double a = 625.0;
  double rel = 0.0;
  for (double R : {0.0, 10.0, 25.0, 100.0, 400.0}) {
    const double exact = kPi * 1e-4 * a * (kPi / 2 - std::atan(R * R / a));
    rel = std::max(rel, std::fabs(tail_integral(R, p) / exact - 1.0));
  }
  out.check(rel < 1e-8, fmt("alpha = 4 tail vs arctan max rel err %.2e", rel));

  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> W(0.0, 5.0), X(0.0, 0.5);
  double ksum = 0.0;
  for (int i = 0; i < 1000; ++i) {
    const double w = W(rng), x = X(rng);
    ksum = std::max(ksum, std::abs(numerics::binomial_ksum_closed(w, x) -
                                   numerics::binomial_ksum_series(w, x, 40)));
  }
  out.check(ksum < 1e-8, fmt("k-sum closed form vs series max |d| %.2e", ksum));
  return out;
}

double analysis_value(const SweepRow& r) { return r.mean_field; }
double sim_value(const SweepRow& r) { return r.sim_stable.peak_aoi; }

// Rows of one method, in sweep order.
std::vector<SweepRow> of_method(const std::vector<SweepRow>& rows,
                                const std::string& method) {
  std::vector<SweepRow> out;
  for (const auto& r : rows) {
    if (r.method == method) out.push_back(r);
  }
  return out;
}

bool interior_minimum(const std::vector<SweepRow>& rows,
                      const std::function<double(const SweepRow&)>& value) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < rows.size(); ++i) {
    if (value(rows[i]) < value(rows[best])) best = i;
  }
  return best > 0 && best + 1 < rows.size();
}

std::string curve(const std::vector<SweepRow>& rows,
                  const std::function<double(const SweepRow&)>& value) {
  std::string s;
  for (const auto& r : rows) s += fmt(" %.3g", value(r));
  return s;
}

// Interior minimum, scheduled <= baseline, analysis-vs-simulation gap.
void check_xi_sweep(Outcome& out, const std::string& tag,
                    const std::vector<SweepRow>& rows,
                    const std::string& scheduled) {
  const auto base = of_method(rows, "empty");
  const auto disk = of_method(rows, scheduled);
  for (const auto* set : {&base, &disk}) {
    const std::string m = set->front().method;
    out.check(interior_minimum(*set, analysis_value),
              tag + " " + m + " analysis interior minimum:" +
                  curve(*set, analysis_value));
    out.check(interior_minimum(*set, sim_value),
              tag + " " + m + " simulation interior minimum:" +
                  curve(*set, sim_value));
  }
  int worse_analysis = 0;
  int worse_sim = 0;
  for (std::size_t i = 0; i < base.size(); ++i) {
    const double a0 = analysis_value(base[i]), a1 = analysis_value(disk[i]);
    worse_analysis += !(a1 <= a0);
    worse_sim += !(sim_value(disk[i]) <= sim_value(base[i]));
  }
  out.check(worse_analysis == 0,
            fmt("%s %s <= empty in analysis at every xi (%d violations)",
                tag.c_str(), scheduled.c_str(), worse_analysis));
  out.check(worse_sim == 0,
            fmt("%s %s <= empty in simulation at every xi (%d violations)",
                tag.c_str(), scheduled.c_str(), worse_sim));
  double gap = 0.0;
  int points = 0;
  for (const auto& r : rows) {
    if (!r.mean_field_stable || r.sim_all.unstable_fraction > 0.05) continue;
    gap = std::max(gap, std::fabs(r.mean_field / r.sim_stable.peak_aoi - 1.0));
    ++points;
  }
  out.check(gap <= 0.15,
            fmt("%s analysis vs simulation max rel gap %.3f <= 0.15 over %d "
                "stable points",
                tag.c_str(), gap, points));
}

Outcome peak_aoi_vs_xi(unsigned threads) {
  Outcome out;
  const auto t0 = std::chrono::steady_clock::now();
  const std::string grid =
      "[0.05, 0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9]";
  const ExperimentConfig fig6 = config(R"({
    "params": {"lambda": 1e-4, "r": 25},
    "methods": ["empty", "disk:100"],
    "sweep": {"parameter": "xi", "values": )" + grid + R"(},
    "sim": {"window": 1000, "slots": 20000, "realizations": 8, "seed": 6},
    "figure": "figure6"
  })");
  const ExperimentConfig fig7 = config(R"({
    "params": {"lambda": 1e-4, "r": 100},
    "methods": ["empty", "disk:500"],
    "sweep": {"parameter": "xi", "values": )" + grid + R"(},
    "sim": {"window": 1500, "slots": 20000, "realizations": 4, "seed": 7},
    "figure": "figure7"
  })");
  check_xi_sweep(out, "r=25", run_sweep(fig6, threads), "disk:100");
  const auto rows7 = run_sweep(fig7, threads);
  check_xi_sweep(out, "r=100", rows7, "disk:500");

  const auto base = of_method(rows7, "empty");
  const auto disk = of_method(rows7, "disk:500");
  double best_analysis = 0.0;
  double best_sim = 0.0;
  for (std::size_t i = 0; i < base.size(); ++i) {
    if (base[i].x > 0.5) continue;
    const double a0 = analysis_value(base[i]), a1 = analysis_value(disk[i]);
    if (std::isfinite(a1)) {
      best_analysis = std::max(best_analysis,
                               std::isinf(a0) ? 1.0 : 1.0 - a1 / a0);
    }
    best_sim = std::max(best_sim, 1.0 - sim_value(disk[i]) / sim_value(base[i]));
  }
  out.check(best_analysis >= 0.4,
            fmt("r=100 disk:500 best reduction for xi <= 0.5 in analysis "
                "%.3f >= 0.40",
                best_analysis));
  out.check(best_sim >= 0.4,
            fmt("r=100 disk:500 best reduction for xi <= 0.5 in simulation "
                "%.3f >= 0.40",
                best_sim));
  const double t = seconds_since(t0);
  out.check(t < 1800.0, fmt("runtime %.1f s < 1800 s", t));
  return out;
}

Outcome peak_aoi_vs_density(unsigned threads) {
  Outcome out;
  const ExperimentConfig cfg = config(R"({
    "params": {"lambda": 1e-4, "r": 25, "xi": 0.3},
    "methods": ["empty", "nearest:4", "disk:100"],
    "sweep": {"parameter": "lambda", "values": [2.5e-5, 5e-5, 1e-4, 2e-4]},
    "sim": {"window": 1000, "slots": 20000, "realizations": 12, "seed": 8},
    "figure": "figure8"
  })");
  const auto rows = run_sweep(cfg, threads);
  for (const auto& m : cfg.methods) {
    const auto set = of_method(rows, m.label());
    for (const auto& [name, value] :
         {std::pair{"analysis", std::function(analysis_value)},
          std::pair{"simulation", std::function(sim_value)}}) {
      bool increasing = true;
      for (std::size_t i = 1; i < set.size(); ++i) {
        increasing = increasing && value(set[i]) > value(set[i - 1]);
      }
      out.check(increasing, m.label() + " " + name + " increasing in lambda:" +
                                curve(set, value));
    }
  }
  const auto base = of_method(rows, "empty");
  for (const std::string m : {"nearest:4", "disk:100"}) {
    const auto set = of_method(rows, m);
    int worse_analysis = 0;
    int worse_sim = 0;
    for (std::size_t i = 0; i < base.size(); ++i) {
      worse_analysis += !(analysis_value(set[i]) <= analysis_value(base[i]));
      worse_sim += !(sim_value(set[i]) <= sim_value(base[i]));
    }
    out.check(worse_analysis == 0 && worse_sim == 0,
              fmt("%s <= empty at every density (violations: analysis %d, "
                  "simulation %d)",
                  m.c_str(), worse_analysis, worse_sim));
  }
  return out;
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Outcome determinism(unsigned threads) {
  Outcome out;
  const ExperimentConfig cfg = config(R"({
    "params": {"lambda": 1e-4, "r": 25, "xi": 0.3},
    "spec": "disk:100",
    "sim": {"window": 600, "slots": 5000, "realizations": 4, "seed": 3}
  })");
  const fs::path root = fs::temp_directory_path() / "geoage_acceptance";
  fs::remove_all(root);
  const auto a = cmd_simulate(cfg, {(root / "a").string(), 1, std::nullopt});
  const auto b =
      cmd_simulate(cfg, {(root / "b").string(), std::max(2u, threads), {}});
  bool same = a.size() == b.size();
  std::size_t csv = 0;
  for (std::size_t i = 0; same && i < a.size(); ++i) {
    same = fs::relative(a[i], root / "a") == fs::relative(b[i], root / "b") &&
           slurp(a[i]) == slurp(b[i]);
    csv += fs::path(a[i]).extension() == ".csv";
  }
  out.check(same, fmt("%zu files (%zu CSV) byte-identical across two runs "
                      "with 1 and %u threads",
                      a.size(), csv, std::max(2u, threads)));
  fs::remove_all(root);
  return out;
}

struct Criterion {
  int id;
  const char* name;
  Outcome (*run)(unsigned);
};

const Criterion kCriteria[] = {
    {1, "access fixed point", fixed_point_correctness},
    {2, "dominant-mode success oracle", dominant_oracle},
    {3, "single-link Geo/Geo/1 oracle", single_link_oracle},
    {4, "access probability law vs simulation", access_law},
    {5, "interferer access probability Z", interference_access},
    {6, "success probability law vs simulation", success_law},
    {7, "numerics oracles", numerics_oracles},
    {8, "peak AoI vs arrival rate", peak_aoi_vs_xi},
    {9, "peak AoI vs density", peak_aoi_vs_density},
    {10, "determinism", determinism},
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"geoage acceptance suite"};
  std::vector<int> only;
  unsigned threads = std::max(1u, std::thread::hardware_concurrency());
  app.add_option("-c,--criterion", only, "Run only these criteria (1-10)");
  app.add_option("-t,--threads", threads, "Worker threads")
      ->check(CLI::PositiveNumber);
  CLI11_PARSE(app, argc, argv);

  const std::set<int> selected(only.begin(), only.end());
  int failed = 0;
  for (const Criterion& c : kCriteria) {
    if (!selected.empty() && !selected.count(c.id)) continue;
    const auto t0 = std::chrono::steady_clock::now();
    Outcome out;
    try {
      out = c.run(threads);
    } catch (const std::exception& e) {
      out.check(false, std::string("exception: ") + e.what());
    }
    const double t = seconds_since(t0);
    std::printf("CRITERION %d %s: %s (%.1f s)\n", c.id,
                out.pass ? "PASS" : "FAIL", c.name, t);
    for (const auto& note : out.notes) std::printf("    %s\n", note.c_str());
    std::fflush(stdout);
    failed += !out.pass;
  }
  std::printf("%d criteria failed\n", failed);
  return failed;
}
