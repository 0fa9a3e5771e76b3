#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <filesystem>
#include <fstream>
#include <limits>
#include <mutex>
#include <sstream>
#include <thread>

#include "geoage/error.hpp"
#include "geoage/experiment.hpp"
#include "geoage/rng.hpp"
#include "geoage/stats.hpp"
#include "geoage/table.hpp"

namespace geoage {

namespace fs = std::filesystem;

void parallel_for(std::size_t count, unsigned threads,
                  const std::function<void(std::size_t)>& body) {
  const unsigned n = std::max(1u, std::min<unsigned>(threads, count));
  if (n <= 1) {
    for (std::size_t i = 0; i < count; ++i) body(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr first;
  std::mutex mu;
  std::vector<std::thread> pool;
  for (unsigned t = 0; t < n; ++t) {
    pool.emplace_back([&] {
      for (;;) {
        const std::size_t i = next.fetch_add(1);
        if (i >= count) return;
        try {
          body(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(mu);
          if (!first) first = std::current_exception();
        }
      }
    });
  }
  for (auto& th : pool) th.join();
  if (first) std::rethrow_exception(first);
}

std::vector<Realization> simulate_realizations(const SystemParams& params,
                                               const StoppingSetSpec& spec,
                                               const SimSection& sim,
                                               int count, unsigned threads) {
  std::vector<Realization> out(static_cast<std::size_t>(count));
  parallel_for(out.size(), threads, [&](std::size_t k) {
    Realization& r = out[k];
    r.seed = derive_seed(sim.seed, k);
    try {
      const NetworkRealization net =
          sample_network(params, sim.window, sim.wrap, r.seed);
      r.links = net.size();
      r.policy = assign_policies(net, spec, params);
      SimConfig sc;
      sc.slots = sim.slots;
      sc.warmup = sim.resolved_warmup();
      sc.dominant = sim.dominant;
      sc.guard = sim.guard;
      sc.seed = derive_seed(r.seed, 1);
      r.stats = run_slotted(net, r.policy, params, sc);
    } catch (const Error& e) {
      r.error = e.what();
    }
  });
  return out;
}

std::vector<double> sample_policies(const SystemParams& params,
                                    const StoppingSetSpec& spec,
                                    double window, Boundary wrap,
                                    std::uint64_t seed, int count,
                                    unsigned threads) {
  std::vector<std::vector<double>> per(static_cast<std::size_t>(count));
  parallel_for(per.size(), threads, [&](std::size_t k) {
    const NetworkRealization net =
        sample_network(params, window, wrap, derive_seed(seed, k));
    per[k] = assign_policies(net, spec, params).gamma;
  });
  std::vector<double> all;
  for (const auto& v : per) all.insert(all.end(), v.begin(), v.end());
  return all;
}

PooledAoi pool_peak_aoi(const std::vector<Realization>& runs,
                        Inclusion inclusion) {
  PooledAoi p;
  double sum = 0.0;
  double mu_sum = 0.0;
  std::size_t with_attempts = 0;
  std::size_t unstable = 0;
  for (const Realization& r : runs) {
    if (!r.error.empty()) continue;
    const SimStats& s = r.stats;
    for (std::size_t i = 0; i < s.links.size(); ++i) {
      const LinkStats& l = s.links[i];
      if (!l.included) continue;
      ++p.links;
      if (l.attempts > 0) {
        ++with_attempts;
        mu_sum += l.mu_hat();
        if (!s.stable(i)) ++unstable;
      }
      if (l.n_peaks == 0) continue;
      if (inclusion == Inclusion::stable_only && !s.stable(i)) continue;
      sum += l.peak_aoi_mean();
      ++p.included;
    }
  }
  p.peak_aoi = p.included > 0 ? sum / p.included
                              : std::numeric_limits<double>::quiet_NaN();
  p.unstable_fraction =
      with_attempts > 0 ? static_cast<double>(unstable) / with_attempts : 0.0;
  p.mean_success = with_attempts > 0
                       ? mu_sum / with_attempts
                       : std::numeric_limits<double>::quiet_NaN();
  return p;
}

namespace {

double radius_of(const StoppingSetSpec& spec, const SystemParams& p) {
  return spec.analysis_radius(p.lambda());
}

std::vector<double> values_or(const ExperimentConfig& cfg,
                              const std::string& name, double fallback) {
  if (cfg.sweep.parameter == name) return cfg.sweep.values;
  return {fallback};
}

std::vector<double> interior_kappa(const EtaModel& m) {
  std::vector<double> out;
  for (double k : m.kappa_nodes()) {
    if (k > 0.0 && k < 1.0) out.push_back(k);
  }
  return out;
}

}  // namespace

std::vector<Figure3Row> figure3_rows(const ExperimentConfig& cfg,
                                     const std::vector<double>& l_grid,
                                     unsigned threads) {
  if (l_grid.size() < 2) throw InvalidArgument("l grid needs >= 2 points");
  const SystemParams p = cfg.params();
  const EtaModel model(p, radius_of(cfg.spec, p));
  const double width = l_grid[1] - l_grid[0];
  const std::size_t bins = l_grid.size();
  std::vector<std::vector<double>> sums(
      static_cast<std::size_t>(cfg.sim.realizations),
      std::vector<double>(bins, 0.0));
  std::vector<std::vector<std::size_t>> counts(
      sums.size(), std::vector<std::size_t>(bins, 0));
  parallel_for(sums.size(), threads, [&](std::size_t k) {
    const NetworkRealization net = sample_network(
        p, cfg.sim.window, cfg.sim.wrap, derive_seed(cfg.sim.seed, k));
    const PolicyAssignment pol = assign_policies(net, cfg.spec, p);
    for (std::size_t i = 0; i < net.size(); ++i) {
      for (std::size_t j = 0; j < net.size(); ++j) {
        if (i == j) continue;
        const double l = net.distance(net.receiver(i), net.transmitter(j));
        const double pos = (l - l_grid.front()) / width + 0.5;
        if (pos < 0.0) continue;
        const auto b = static_cast<std::size_t>(pos);
        if (b >= bins) continue;
        sums[k][b] += pol.gamma[j];
        ++counts[k][b];
      }
    }
  });
  std::vector<Figure3Row> rows;
  for (std::size_t b = 0; b < bins; ++b) {
    Figure3Row row;
    row.l = l_grid[b];
    const Flagged z = model.z(row.l);
    row.z_analysis = z.value;
    row.converged = z.converged;
    double s = 0.0;
    for (std::size_t k = 0; k < sums.size(); ++k) {
      s += sums[k][b];
      row.n += counts[k][b];
    }
    row.z_empirical = row.n > 0 ? s / row.n
                                : std::numeric_limits<double>::quiet_NaN();
    rows.push_back(row);
  }
  return rows;
}

Figure4Result figure4(const ExperimentConfig& cfg, unsigned threads) {
  Figure4Result res;
  res.lambdas = values_or(cfg, "lambda", cfg.lambda);
  for (double lam : res.lambdas) {
    const SystemParams p = cfg.params().with_lambda(lam);
    const EtaModel model(p, radius_of(cfg.spec, p));
    std::vector<double> g =
        sample_policies(p, cfg.spec, cfg.sim.window, cfg.sim.wrap,
                        cfg.sim.seed, cfg.sim.realizations, threads);
    std::sort(g.begin(), g.end());
    const double n = static_cast<double>(g.size());
    // KS on a fine kappa grid; the atom at 1 is compared separately.
    double ks = 0.0;
    for (int i = 1; i < 1000; ++i) {
      const double k = i / 1000.0;
      const double emp = 1.0 - ecdf(g, k);
      ks = std::max(ks, std::fabs(emp - model.ccdf(k).value));
    }
    for (int i = 1; i < 100; ++i) {
      Figure4Row row;
      row.kappa = i / 100.0;
      const Flagged c = model.ccdf(row.kappa);
      row.ccdf_analysis = c.value;
      row.converged = c.converged;
      row.ccdf_empirical = 1.0 - ecdf(g, row.kappa);
      row.lambda = lam;
      res.rows.push_back(row);
    }
    res.ks.push_back(ks);
    res.atom_analysis.push_back(model.atom_one().value);
    res.atom_empirical.push_back(n > 0 ? 1.0 - ecdf_strict(g, 1.0) : 0.0);
    res.mean_analysis.push_back(model.mean().value);
    res.mean_empirical.push_back(mean(g));
  }
  return res;
}

Figure5Result figure5(const ExperimentConfig& cfg, unsigned threads) {
  Figure5Result res;
  res.xis = values_or(cfg, "xi", cfg.xi);
  const SystemParams base = cfg.params();
  const EtaModel model(base, radius_of(cfg.spec, base));
  const ZTable z(model);
  for (double xi : res.xis) {
    const SystemParams p = base.with_xi(xi);
    const auto runs = simulate_realizations(p, cfg.spec, cfg.sim,
                                            cfg.sim.realizations, threads);
    std::vector<double> mu;
    std::size_t excluded = 0;
    for (const auto& r : runs) {
      for (const LinkStats& l : r.stats.links) {
        if (!l.included) continue;
        if (l.attempts == 0) {
          ++excluded;
          continue;
        }
        mu.push_back(l.mu_hat());
      }
    }
    std::sort(mu.begin(), mu.end());
    const SuccessCdf f = success_cdf_fixed_point(p, z, success_grid(xi));
    res.ks.push_back(mu.empty() ? std::numeric_limits<double>::quiet_NaN()
                                : ks_distance(mu, [&](double u) {
                                    return f.at(u);
                                  }));
    res.converged.push_back(f.converged && f.inversion_converged);
    res.residual.push_back(f.residual);
    res.iterations.push_back(f.iterations);
    res.mean_analysis.push_back(f.mean());
    res.mean_empirical.push_back(mean(mu));
    res.excluded.push_back(excluded);
    for (std::size_t i = 0; i < f.u_grid.size(); ++i) {
      Figure5Row row;
      row.u = f.u_grid[i];
      row.f_analysis = f.F[i];
      row.converged = f.converged && f.inversion_converged;
      row.f_empirical = mu.empty() ? std::numeric_limits<double>::quiet_NaN()
                                   : ecdf(mu, row.u);
      row.xi = xi;
      res.rows.push_back(row);
    }
  }
  return res;
}

std::vector<SweepRow> run_sweep(const ExperimentConfig& cfg,
                                unsigned threads) {
  if (cfg.sweep.parameter.empty() || cfg.sweep.values.empty()) {
    throw ConfigError("sweep requires a non-empty sweep section");
  }
  std::vector<SweepRow> rows;
  for (double x : cfg.sweep.values) {
    const SystemParams p = cfg.sweep.parameter == "xi"
                               ? cfg.params().with_xi(x)
                               : cfg.params().with_lambda(x);
    for (const StoppingSetSpec& method : cfg.methods) {
      SweepRow row;
      row.x = x;
      row.method = method.label();
      const EtaModel model(p, radius_of(method, p));
      const ZTable z(model);
      const Flagged eta = model.mean();
      const MeanSuccess ms = mean_success_probability(p, z);
      row.mean_eta = eta.value;
      row.mean_success = ms.value;
      row.xi_max = stability_max_arrival(p, z);
      row.mean_field_stable = eta.value * ms.value > p.xi();
      row.mean_field = row.mean_field_stable
                           ? peak_aoi_mean_approx(p.xi(), eta.value, ms.value)
                           : std::numeric_limits<double>::infinity();
      const SuccessCdf f = success_cdf_fixed_point(p, z, success_grid(p.xi()));
      row.exact = peak_aoi_exact(p.xi(), f,
                                 model.distribution(interior_kappa(model)));
      row.analysis_converged = eta.converged && ms.converged &&
                               z.converged() && f.converged &&
                               f.inversion_converged;
      const auto runs = simulate_realizations(p, method, cfg.sim,
                                              cfg.sim.realizations, threads);
      row.sim_stable = pool_peak_aoi(runs, Inclusion::stable_only);
      row.sim_all = pool_peak_aoi(runs, Inclusion::all);
      rows.push_back(row);
    }
  }
  return rows;
}

namespace {

Json header_for(const ExperimentConfig& cfg, const std::string& schema) {
  const Json c = cfg.to_json();
  return Json{{"config", c},
              {"input_hash", content_hash(c.dump())},
              {"schema", schema}};
}

std::string join(const fs::path& dir, const std::string& name) {
  return (dir / name).string();
}

class Output {
 public:
  explicit Output(const std::string& dir) : dir_(dir) {
    fs::create_directories(dir_);
  }
  std::ofstream open(const std::string& name) {
    const std::string path = join(dir_, name);
    fs::create_directories(fs::path(path).parent_path());
    std::ofstream os(path, std::ios::binary);
    if (!os) throw Error("cannot write " + path);
    written_.push_back(path);
    return os;
  }
  void json(const std::string& name, const Json& doc) {
    std::ofstream os = open(name);
    os << doc.dump(2) << '\n';
  }
  const std::vector<std::string>& written() const { return written_; }

 private:
  fs::path dir_;
  std::vector<std::string> written_;
};

ExperimentConfig apply_options(ExperimentConfig cfg, const RunOptions& opt) {
  if (opt.seed) cfg.sim.seed = *opt.seed;
  if (!opt.out_dir.empty()) cfg.output_dir = opt.out_dir;
  return cfg;
}

Json num(double v) {
  if (std::isnan(v)) return Json(nullptr);
  if (std::isinf(v)) return Json(v > 0 ? "inf" : "-inf");
  return Json(v);
}

}  // namespace

std::vector<std::string> cmd_simulate(const ExperimentConfig& in,
                                      const RunOptions& opt) {
  const ExperimentConfig cfg = apply_options(in, opt);
  const SystemParams p = cfg.params();
  Output out(cfg.output_dir);
  const auto runs = simulate_realizations(p, cfg.spec, cfg.sim,
                                          cfg.sim.realizations, opt.threads);
  const Json header = header_for(cfg, "simulate");
  {
    std::ofstream os = out.open("realizations.csv");
    write_json_header(os, header);
    os << "realization,seed,links,mean_peak_aoi,median_peak_aoi,"
          "unstable_fraction,mean_success,error\n";
    for (std::size_t k = 0; k < runs.size(); ++k) {
      const Realization& r = runs[k];
      os << k << ',' << r.seed << ',' << r.links << ',';
      if (!r.error.empty()) {
        os << "nan,nan,nan,nan," << r.error << '\n';
        continue;
      }
      std::string err;
      NetworkSummary s;
      try {
        s = summarize(r.stats, cfg.sim.inclusion);
      } catch (const Error& e) {
        err = e.what();
        s.mean_peak_aoi = s.median_peak_aoi =
            std::numeric_limits<double>::quiet_NaN();
        s.unstable_fraction = r.stats.unstable_fraction();
      }
      os << fmt_num(s.mean_peak_aoi) << ',' << fmt_num(s.median_peak_aoi)
         << ',' << fmt_num(s.unstable_fraction) << ','
         << fmt_num(s.mean_success) << ',' << err << '\n';
    }
  }
  for (std::size_t k = 0; k < runs.size(); ++k) {
    if (!runs[k].error.empty()) continue;
    char name[64];
    std::snprintf(name, sizeof name, "links/realization_%04zu.csv", k);
    std::ofstream os = out.open(name);
    write_json_header(os, header);
    runs[k].stats.write_csv(os);
    std::snprintf(name, sizeof name, "policy/realization_%04zu.csv", k);
    std::ofstream ps = out.open(name);
    write_json_header(ps, header);
    runs[k].policy.write_csv(ps);
  }
  Json summary{{"config", cfg.to_json()},
               {"input_hash", header["input_hash"]},
               {"seed", cfg.sim.seed}};
  const PooledAoi pooled = pool_peak_aoi(runs, cfg.sim.inclusion);
  summary["network"] = {{"peak_aoi", num(pooled.peak_aoi)},
                        {"unstable_fraction", num(pooled.unstable_fraction)},
                        {"mean_success", num(pooled.mean_success)},
                        {"links", pooled.links},
                        {"included_links", pooled.included}};
  std::size_t failed = 0;
  for (const auto& r : runs) failed += r.error.empty() ? 0 : 1;
  summary["failed_realizations"] = failed;
  if (cfg.sim.dominant) {
    // Per-link check of the empirical success rate against the closed form.
    std::ofstream os = out.open("dominant_check.csv");
    write_json_header(os, header);
    os << "realization,link_id,attempts,mu_hat_emp,mu_closed_form,z_score\n";
    std::size_t checked = 0;
    std::size_t within = 0;
    for (std::size_t k = 0; k < runs.size(); ++k) {
      const Realization& r = runs[k];
      if (!r.error.empty()) continue;
      const NetworkRealization net =
          sample_network(p, cfg.sim.window, cfg.sim.wrap, r.seed);
      for (std::size_t i = 0; i < net.size(); ++i) {
        const LinkStats& l = r.stats.links[i];
        const double exact = dominant_success_probability(net, r.policy, p, i);
        double zs = std::numeric_limits<double>::quiet_NaN();
        if (l.attempts > 0) {
          const double se =
              std::sqrt(std::max(exact * (1.0 - exact), 1e-300) / l.attempts);
          zs = (l.mu_hat() - exact) / se;
          ++checked;
          if (std::fabs(zs) <= 3.0) ++within;
        }
        os << k << ',' << i << ',' << l.attempts << ',' << fmt_num(l.mu_hat())
           << ',' << fmt_num(exact) << ',' << fmt_num(zs) << '\n';
      }
    }
    summary["dominant_check"] = {
        {"links", checked},
        {"within_3se", within},
        {"fraction_within_3se",
         num(checked ? static_cast<double>(within) / checked : 0.0)}};
  }
  out.json("summary.json", summary);
  return out.written();
}

std::vector<std::string> cmd_analyze(const ExperimentConfig& in,
                                     const RunOptions& opt) {
  const ExperimentConfig cfg = apply_options(in, opt);
  const SystemParams p = cfg.params();
  Output out(cfg.output_dir);
  const EtaModel model(p, radius_of(cfg.spec, p));
  const ZTable z(model);
  std::vector<CurvePoint> pts;
  for (int i = 1; i < 100; ++i) {
    const double k = i / 100.0;
    const Flagged c = model.ccdf(k);
    pts.push_back({"eta_ccdf", k, c.value, c.converged});
  }
  const Flagged atom = model.atom_one();
  const Flagged eta = model.mean();
  pts.push_back({"eta_atom_one", 1.0, atom.value, atom.converged});
  pts.push_back({"mean_eta", 0.0, eta.value, eta.converged});
  for (int i = 0; i <= 50; ++i) {
    const double l = 20.0 * cfg.r * i / 50.0;
    const Flagged v = model.z(l);
    pts.push_back({"z", l, v.value, v.converged});
  }
  const SuccessCdf f = success_cdf_fixed_point(p, z, success_grid(p.xi()));
  const bool f_ok = f.converged && f.inversion_converged;
  for (std::size_t i = 0; i < f.u_grid.size(); ++i) {
    pts.push_back({"success_cdf", f.u_grid[i], f.F[i], f_ok});
  }
  const MeanSuccess ms = mean_success_probability(p, z);
  pts.push_back({"mean_success", 0.0, ms.value, ms.converged});
  pts.push_back({"success_cdf_mean", 0.0, f.mean(), f_ok});
  const double xi_max = stability_max_arrival(p, z);
  pts.push_back({"xi_max", 0.0, xi_max, z.converged()});
  const PeakAoiExact ex =
      peak_aoi_exact(p.xi(), f, model.distribution(interior_kappa(model)));
  const bool ana_ok = f_ok && eta.converged && z.converged();
  pts.push_back({"peak_aoi_exact", p.xi(), ex.value,
                 ana_ok && !ex.heavy_instability});
  pts.push_back({"peak_aoi_exact_conditional", p.xi(), ex.conditional, ana_ok});
  pts.push_back({"peak_aoi_exact_stable_mass", p.xi(), ex.stable_mass, ana_ok});
  const bool stable = eta.value * ms.value > p.xi();
  const double mean_field =
      stable ? peak_aoi_mean_approx(p.xi(), eta.value, ms.value)
             : std::numeric_limits<double>::infinity();
  pts.push_back({"peak_aoi_mean_field", p.xi(), mean_field, ana_ok && stable});
  pts.push_back({"unstable", p.xi(), stable ? 0.0 : 1.0, true});
  {
    std::ofstream os = out.open("analysis.csv");
    write_curve_csv(os, header_for(cfg, "quantity,x,value,converged"), pts);
  }
  Json summary{{"config", cfg.to_json()},
               {"input_hash", content_hash(cfg.to_json().dump())},
               {"mean_eta", num(eta.value)},
               {"eta_atom_one", num(atom.value)},
               {"mean_success", num(ms.value)},
               {"success_cdf", {{"converged", f.converged},
                                {"iterations", f.iterations},
                                {"residual", num(f.residual)},
                                {"inversion_converged", f.inversion_converged},
                                {"mean", num(f.mean())}}},
               {"xi_max", num(xi_max)},
               {"peak_aoi_exact",
                {{"value", num(ex.value)},
                 {"stable_mass", num(ex.stable_mass)},
                 {"conditional", num(ex.conditional)},
                 {"heavy_instability", ex.heavy_instability}}},
               {"peak_aoi_mean_field", num(mean_field)},
               {"unstable", !stable}};
  out.json("analysis_summary.json", summary);
  return out.written();
}

std::vector<std::string> cmd_compare(const ExperimentConfig& in,
                                     const RunOptions& opt) {
  const ExperimentConfig cfg = apply_options(in, opt);
  Output out(cfg.output_dir);
  const std::string fig = cfg.figure;
  if (!fig.empty() && fig != "figure3" && fig != "figure4" &&
      fig != "figure5") {
    throw ConfigError("compare produces figure3, figure4 or figure5");
  }
  Json summary{{"config", cfg.to_json()},
               {"input_hash", content_hash(cfg.to_json().dump())}};
  if (fig.empty() || fig == "figure3") {
    std::vector<double> grid;
    for (int i = 0; i <= 50; ++i) grid.push_back(10.0 * i);
    const auto rows = figure3_rows(cfg, grid, opt.threads);
    std::ofstream os = out.open("figure3.csv");
    write_json_header(os, header_for(cfg, "l,Z_analysis,Z_empirical,n"));
    os << "l,Z_analysis,Z_empirical,n,converged\n";
    double gap = 0.0;
    for (const auto& r : rows) {
      os << fmt_num(r.l) << ',' << fmt_num(r.z_analysis) << ','
         << fmt_num(r.z_empirical) << ',' << r.n << ','
         << (r.converged ? 1 : 0) << '\n';
      if (r.n > 0) gap = std::max(gap, std::fabs(r.z_analysis - r.z_empirical));
    }
    summary["figure3"] = {{"max_abs_gap", num(gap)}};
  }
  if (fig.empty() || fig == "figure4") {
    const Figure4Result r = figure4(cfg, opt.threads);
    std::ofstream os = out.open("figure4.csv");
    write_json_header(
        os, header_for(cfg, "kappa,ccdf_analysis,ccdf_empirical,lambda"));
    os << "kappa,ccdf_analysis,ccdf_empirical,lambda,converged\n";
    for (const auto& row : r.rows) {
      os << fmt_num(row.kappa) << ',' << fmt_num(row.ccdf_analysis) << ','
         << fmt_num(row.ccdf_empirical) << ',' << fmt_num(row.lambda) << ','
         << (row.converged ? 1 : 0) << '\n';
    }
    Json per = Json::array();
    for (std::size_t i = 0; i < r.lambdas.size(); ++i) {
      per.push_back({{"lambda", r.lambdas[i]},
                     {"ks", num(r.ks[i])},
                     {"atom_analysis", num(r.atom_analysis[i])},
                     {"atom_empirical", num(r.atom_empirical[i])},
                     {"mean_analysis", num(r.mean_analysis[i])},
                     {"mean_empirical", num(r.mean_empirical[i])}});
    }
    summary["figure4"] = per;
  }
  if (fig.empty() || fig == "figure5") {
    const Figure5Result r = figure5(cfg, opt.threads);
    std::ofstream os = out.open("figure5.csv");
    write_json_header(os, header_for(cfg, "u,F_analysis,F_empirical,xi"));
    os << "u,F_analysis,F_empirical,xi,converged\n";
    for (const auto& row : r.rows) {
      os << fmt_num(row.u) << ',' << fmt_num(row.f_analysis) << ','
         << fmt_num(row.f_empirical) << ',' << fmt_num(row.xi) << ','
         << (row.converged ? 1 : 0) << '\n';
    }
    Json per = Json::array();
    for (std::size_t i = 0; i < r.xis.size(); ++i) {
      per.push_back({{"xi", r.xis[i]},
                     {"ks", num(r.ks[i])},
                     {"converged", static_cast<bool>(r.converged[i])},
                     {"residual", num(r.residual[i])},
                     {"iterations", r.iterations[i]},
                     {"mean_analysis", num(r.mean_analysis[i])},
                     {"mean_empirical", num(r.mean_empirical[i])},
                     {"excluded_links", r.excluded[i]}});
    }
    summary["figure5"] = per;
  }
  out.json("compare_summary.json", summary);
  return out.written();
}

std::vector<std::string> cmd_sweep(const ExperimentConfig& in,
                                   const RunOptions& opt) {
  const ExperimentConfig cfg = apply_options(in, opt);
  if (cfg.sweep.parameter.empty() || cfg.sweep.values.empty()) {
    throw ConfigError("sweep requires a non-empty sweep section");
  }
  std::string fig = cfg.figure;
  if (fig.empty()) fig = cfg.sweep.parameter == "xi" ? "figure6" : "figure8";
  const bool by_xi = cfg.sweep.parameter == "xi";
  if ((by_xi && fig != "figure6" && fig != "figure7") ||
      (!by_xi && fig != "figure8")) {
    throw ConfigError("sweep over " + cfg.sweep.parameter +
                      " cannot produce " + fig);
  }
  Output out(cfg.output_dir);
  const auto rows = run_sweep(cfg, opt.threads);
  const std::string xname = by_xi ? "xi" : "lambda";
  {
    std::ofstream os = out.open(fig + ".csv");
    write_json_header(
        os, header_for(cfg, xname + ",peak_aoi,method,source"));
    os << xname << ",peak_aoi,method,source\n";
    for (const auto& r : rows) {
      os << fmt_num(r.x) << ',' << fmt_num(r.mean_field) << ',' << r.method
         << ",analysis_mean_field\n";
      os << fmt_num(r.x) << ',' << fmt_num(r.exact.value) << ',' << r.method
         << ",analysis_exact\n";
      os << fmt_num(r.x) << ',' << fmt_num(r.sim_stable.peak_aoi) << ','
         << r.method << ",simulation\n";
    }
  }
  {
    std::ofstream os = out.open(fig + "_details.csv");
    write_json_header(os, header_for(cfg, "sweep details"));
    os << xname
       << ",method,mean_eta,mean_success,xi_max,mean_field,mean_field_stable,"
          "exact,exact_stable_mass,exact_conditional,exact_heavy_instability,"
          "analysis_converged,sim_peak_aoi_stable,sim_peak_aoi_all,"
          "sim_unstable_fraction,sim_mean_success,sim_links,"
          "sim_included_links\n";
    for (const auto& r : rows) {
      os << fmt_num(r.x) << ',' << r.method << ',' << fmt_num(r.mean_eta)
         << ',' << fmt_num(r.mean_success) << ',' << fmt_num(r.xi_max) << ','
         << fmt_num(r.mean_field) << ',' << (r.mean_field_stable ? 1 : 0) << ','
         << fmt_num(r.exact.value) << ',' << fmt_num(r.exact.stable_mass) << ','
         << fmt_num(r.exact.conditional) << ','
         << (r.exact.heavy_instability ? 1 : 0) << ','
         << (r.analysis_converged ? 1 : 0) << ','
         << fmt_num(r.sim_stable.peak_aoi) << ','
         << fmt_num(r.sim_all.peak_aoi) << ','
         << fmt_num(r.sim_stable.unstable_fraction) << ','
         << fmt_num(r.sim_stable.mean_success) << ',' << r.sim_stable.links
         << ',' << r.sim_stable.included << '\n';
    }
  }
  return out.written();
}

}  // namespace geoage
