#include "mfgcache/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdio>
#include <exception>
#include <mutex>
#include <thread>

#include "mfgcache/errors.hpp"
#include "mfgcache/grid_io.hpp"

#ifndef MFGCACHE_VERSION
#define MFGCACHE_VERSION "unknown"
#endif

namespace mfgcache::exp {

namespace fs = std::filesystem;
using io::fmt;

void parallel_for(std::size_t n, int jobs, const std::function<void(std::size_t)>& f) {
  if (n == 0) return;
  const std::size_t workers =
      std::min<std::size_t>(n, static_cast<std::size_t>(std::max(jobs, 1)));
  if (workers == 1) {
    for (std::size_t i = 0; i < n; ++i) f(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::atomic<bool> failed{false};
  std::mutex mu;
  std::size_t err_index = n;
  std::exception_ptr err;
  auto work = [&] {
    while (!failed.load()) {
      const std::size_t i = next.fetch_add(1);
      if (i >= n) return;
      try {
        f(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(mu);
        if (i < err_index) {
          err_index = i;
          err = std::current_exception();
        }
        failed = true;
      }
    }
  };
  std::vector<std::thread> pool;
  for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(work);
  for (auto& t : pool) t.join();
  if (err) std::rethrow_exception(err);
}

ContentSolve solve_content(const config::RunConfig& cfg, std::size_t content) {
  auto scfg = config::solver_config(cfg, content);
  auto lat = config::lattice(cfg, scfg);
  const auto& spec = cfg.contents[content];
  auto m0 = mfg::initial_density(lat, {spec.x0, spec.x0_sd}, {spec.q0, spec.q0_sd});
  auto sol = mfg::solve_mfe(lat, scfg, m0);
  const double res = mfg::hjb_residual(lat, sol.value, sol.policy, sol.overlap, scfg);
  const double res_c =
      mfg::hjb_residual_centred(lat, sol.value, sol.policy, sol.overlap, scfg);
  const double cost = mfg::expected_cost(lat, sol.value, m0);
  return ContentSolve{content, scfg, lat, std::move(m0), std::move(sol), res, res_c, cost};
}

std::vector<ContentSolve> solve_all(const config::RunConfig& cfg, int jobs) {
  std::vector<std::optional<ContentSolve>> slots(cfg.contents.size());
  parallel_for(slots.size(), jobs, [&](std::size_t j) { slots[j] = solve_content(cfg, j); });
  std::vector<ContentSolve> out;
  for (auto& s : slots) out.push_back(std::move(*s));
  return out;
}

LedgerTable simulate_policy(const config::RunConfig& cfg, policies::Kind kind,
                            const policies::IpiModel& ipi, const FieldSet& fields,
                            int jobs) {
  const std::size_t nc = cfg.contents.size();
  const auto reps = static_cast<std::size_t>(cfg.replications);
  std::vector<sim::SimConfig> sims;
  std::vector<policies::Policy> base;
  for (std::size_t j = 0; j < nc; ++j) {
    const auto scfg = config::solver_config(cfg, j);
    const auto lat = config::lattice(cfg, scfg);
    sims.push_back(config::sim_config(cfg, j, lat));
    switch (kind) {
      case policies::Kind::kMeanField:
        if (j >= fields.size() || !fields[j])
          throw MissingArtifact("mean-field policy for content " + std::to_string(j) +
                                " has not been solved");
        base.push_back(policies::Policy::mean_field(fields[j]));
        break;
      case policies::Kind::kBaseline: base.push_back(policies::Policy::baseline()); break;
      case policies::Kind::kUniformRandom:
        base.push_back(policies::Policy::uniform_random(cfg.seed));
        break;
    }
  }
  LedgerTable table(nc, std::vector<sim::CostLedger>(reps));
  parallel_for(nc * reps, jobs, [&](std::size_t idx) {
    const std::size_t j = idx / reps, r = idx % reps;
    table[j][r] = sim::run_replication(sims[j], base[j], ipi, r);
  });
  return table;
}

std::vector<sim::CostLedger> totals(const LedgerTable& table) {
  if (table.empty()) return {};
  std::vector<sim::CostLedger> out = table.front();
  for (std::size_t j = 1; j < table.size(); ++j)
    for (std::size_t r = 0; r < out.size(); ++r) {
      auto& acc = out[r];
      const auto& add = table[j][r];
      if (add.t.size() != acc.t.size())
        throw ConfigError("contents simulate on different time grids; set sim.dt_s");
      for (std::size_t n = 0; n < acc.t.size(); ++n) {
        acc.cost[n] += add.cost[n];
        acc.lra[n] += add.lra[n];
        acc.overlap[n] += add.overlap[n];
      }
    }
  return out;
}

namespace {

std::string grid_name(const char* kind, std::size_t j, const char* ext) {
  return std::string(kind) + "_" + std::to_string(j) + ext;
}

void write_manifest(const fs::path& out, const config::RunConfig& cfg,
                    const std::string& command, double wall,
                    const std::vector<std::string>& artifacts) {
  config::Json seeds = config::Json::array();
  for (int r = 0; r < cfg.replications; ++r) seeds.push_back(r);
  config::Json m = {
      {"tool", "mfgcache"},
      {"version", MFGCACHE_VERSION},
      {"command", command},
      {"config_hash", config::document_hash(cfg.document)},
      {"config", cfg.document},
      {"master_seed", cfg.seed},
      {"replication_seeds", seeds},
      {"seed_derivation", "splitmix64(master, replication, stream tag)"},
      {"wall_time_s", wall},
      {"artifacts", artifacts},
  };
  io::write_text(out / ("manifest_" + command + ".json"), m.dump(2) + "\n");
  // manifest.json always describes the latest command run in the directory.
  io::write_text(out / "manifest.json", m.dump(2) + "\n");
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string band_csv(const sim::Band& b) { return fmt(b.mean) + "," + fmt(b.lo) + "," + fmt(b.hi); }

}  // namespace

FieldSet load_fields(const config::RunConfig& cfg, const fs::path& dir) {
  FieldSet fields;
  for (std::size_t j = 0; j < cfg.contents.size(); ++j) {
    const auto path = dir / grid_name("policy", j, ".bin");
    if (!fs::exists(path))
      throw MissingArtifact("policy grid " + path.string() +
                            " not found; run `solve` with the same config and --out first");
    auto loaded = io::read_grid(path);
    if (loaded.kind != "policy") throw MissingArtifact(path.string() + " is not a policy grid");
    const auto scfg = config::solver_config(cfg, j);
    if (!(loaded.grid.lattice() == config::lattice(cfg, scfg)))
      throw MissingArtifact(path.string() + " was solved on a different lattice; re-run `solve`");
    fields.push_back(std::make_shared<const mfg::PolicyField>(std::move(loaded.grid)));
  }
  return fields;
}

SolveReport cmd_solve(const config::RunConfig& cfg, const fs::path& out, int jobs) {
  const auto t0 = std::chrono::steady_clock::now();
  SolveReport report{solve_all(cfg, jobs)};
  fs::create_directories(out);
  std::vector<std::string> artifacts;
  auto emit = [&](const std::string& name, const std::string& text) {
    io::write_text(out / name, text);
    artifacts.push_back(name);
  };

  std::string iters =
      "content,mean_popularity,iterations,final_change,nx,nq,nt,dt,max_mass_error,"
      "min_density,hjb_residual,hjb_residual_centred,expected_cost\n";
  std::string resid = "content,iteration,policy_change\n";
  for (const auto& s : report.solves) {
    const auto& lat = s.lat;
    const std::size_t j = s.content;
    iters += std::to_string(j) + "," + fmt(s.cfg.content.mean_popularity) + "," +
             std::to_string(s.sol.iterations) + "," + fmt(s.sol.residuals.back()) + "," +
             std::to_string(lat.nx()) + "," + std::to_string(lat.nq()) + "," +
             std::to_string(lat.nt()) + "," + fmt(lat.dt()) + "," +
             fmt(s.sol.fpk.max_mass_error) + "," + fmt(s.sol.fpk.min_density) + "," +
             fmt(s.residual) + "," + fmt(s.residual_centred) + "," + fmt(s.cost) + "\n";
    for (std::size_t k = 0; k < s.sol.residuals.size(); ++k)
      resid += std::to_string(j) + "," + std::to_string(k + 1) + "," + fmt(s.sol.residuals[k]) + "\n";

    for (auto [kind, grid] : {std::pair<const char*, const mfg::Grid3*>{"value", &s.sol.value},
                              {"density", &s.sol.density},
                              {"policy", &s.sol.policy}}) {
      io::write_grid(out / grid_name(kind, j, ".bin"), *grid, kind);
      artifacts.push_back(grid_name(kind, j, ".bin"));
      if (cfg.full_csv) {
        io::write_grid_csv(out / grid_name(kind, j, ".csv"), *grid);
        artifacts.push_back(grid_name(kind, j, ".csv"));
      }
    }

    // Storage marginal of m (heat map) and the policy along x = mean popularity.
    std::string heat = "t,Q,density\n";
    std::string pol = "t,Q,policy\n";
    std::string traj = "t,mean_policy,mean_storage,overlap\n";
    const policies::MeanFieldLookup lookup(std::make_shared<const mfg::PolicyField>(s.sol.policy));
    for (int n = 0; n <= lat.nt(); ++n) {
      const auto m = s.sol.density.slice(n);
      const auto p = s.sol.policy.slice(n);
      double mp = 0.0, mq = 0.0;
      for (int k = 0; k < lat.nq(); ++k) {
        double mk = 0.0;
        for (int i = 0; i < lat.nx(); ++i) {
          const double w = m[lat.node(i, k)];
          mk += w * lat.dx();
          mp += w * p[lat.node(i, k)] * lat.cell_area();
          mq += w * lat.q(k) * lat.cell_area();
        }
        heat += fmt(lat.t(n)) + "," + fmt(lat.q(k)) + "," + fmt(mk) + "\n";
        pol += fmt(lat.t(n)) + "," + fmt(lat.q(k)) + "," +
               fmt(lookup(s.cfg.content.mean_popularity, lat.q(k), lat.t(n))) + "\n";
      }
      traj += fmt(lat.t(n)) + "," + fmt(mp) + "," + fmt(mq) + "," +
              fmt(s.sol.overlap[static_cast<std::size_t>(n)]) + "\n";
    }
    emit(grid_name("density_q", j, ".csv"), heat);
    emit(grid_name("policy_q", j, ".csv"), pol);
    emit(grid_name("trajectory", j, ".csv"), traj);
  }
  emit("iterations.csv", iters);
  emit("residuals.csv", resid);
  write_manifest(out, cfg, "solve", seconds_since(t0), artifacts);
  return report;
}

SimReport cmd_simulate(const config::RunConfig& cfg, const fs::path& out, int jobs) {
  const auto t0 = std::chrono::steady_clock::now();
  FieldSet fields;
  if (std::find(cfg.policies.begin(), cfg.policies.end(), policies::Kind::kMeanField) !=
      cfg.policies.end())
    fields = load_fields(cfg, out);

  const bool imperfect = !cfg.ipi.perfect();
  const bool paired = imperfect && cfg.compare_ppi;
  SimReport report;
  for (auto kind : cfg.policies) {
    SimReport::Entry e{kind, {}, std::nullopt, std::nullopt, {}};
    const auto main = simulate_policy(cfg, kind, paired ? policies::IpiModel{} : cfg.ipi,
                                      fields, jobs);
    const auto main_tot = totals(main);
    e.ppi = sim::aggregate(main_tot);
    for (const auto& per_content : main) e.overlap.push_back(sim::aggregate(per_content).overlap);
    if (paired) {
      const auto noisy_tot = totals(simulate_policy(cfg, kind, cfg.ipi, fields, jobs));
      e.ipi = sim::aggregate(noisy_tot);
      std::vector<double> inc;
      for (std::size_t r = 0; r < main_tot.size(); ++r)
        inc.push_back(noisy_tot[r].final_lra() - main_tot[r].final_lra());
      e.increment = sim::summarize(inc);
    }
    report.entries.push_back(std::move(e));
  }

  fs::create_directories(out);
  std::vector<std::string> artifacts;
  auto emit = [&](const std::string& name, const std::string& text) {
    io::write_text(out / name, text);
    artifacts.push_back(name);
  };
  auto lra_csv = [](const sim::Summary& s) {
    std::string text = "t,mean,lo,hi\n";
    for (std::size_t n = 0; n < s.t.size(); ++n)
      text += fmt(s.t[n]) + "," + band_csv(s.lra[n]) + "\n";
    return text;
  };
  std::string overlap = "content,x0,policy,mean,lo,hi\n";
  std::string finals = "policy,information,replications,mean,lo,hi\n";
  std::string incr = "policy,ppi_mean,ipi_mean,increment_mean,increment_lo,increment_hi\n";
  const std::string main_info = imperfect && !paired ? "ipi" : "ppi";
  for (const auto& e : report.entries) {
    const std::string name(policies::kind_name(e.kind));
    emit("lra_" + name + ".csv", lra_csv(e.ppi));
    finals += name + "," + main_info + "," + std::to_string(e.ppi.replications) + "," +
              band_csv(e.ppi.final_lra) + "\n";
    for (std::size_t j = 0; j < e.overlap.size(); ++j)
      overlap += std::to_string(j) + "," + fmt(cfg.contents[j].x0) + "," + name + "," +
                 band_csv(e.overlap[j]) + "\n";
    if (e.ipi) {
      emit("lra_" + name + "_ipi.csv", lra_csv(*e.ipi));
      finals += name + ",ipi," + std::to_string(e.ipi->replications) + "," +
                band_csv(e.ipi->final_lra) + "\n";
      incr += name + "," + fmt(e.ppi.final_lra.mean) + "," + fmt(e.ipi->final_lra.mean) + "," +
              band_csv(*e.increment) + "\n";
    }
  }
  emit("overlap.csv", overlap);
  emit("final_lra.csv", finals);
  if (paired) emit("ipi_increment.csv", incr);
  write_manifest(out, cfg, "simulate", seconds_since(t0), artifacts);
  return report;
}

std::size_t cmd_sweep(const config::RunConfig& cfg, const fs::path& out, int jobs,
                      const std::vector<config::SweepAxis>& axes_in) {
  const auto t0 = std::chrono::steady_clock::now();
  const auto& axes = axes_in.empty() ? cfg.sweep : axes_in;
  if (axes.empty()) throw ConfigError("sweep needs at least one axis (key and values)");
  std::size_t points = 1;
  for (const auto& a : axes) points *= a.values.size();
  if (points == 0) {
    std::fprintf(stderr, "warning: sweep has an empty value list; nothing to do\n");
    return 0;
  }

  std::string table = "point";
  for (const auto& a : axes) table += "," + a.key;
  table += ",content,iterations,hjb_residual,expected_cost";
  if (cfg.sweep_simulate)
    for (auto kind : cfg.policies) {
      const std::string n(policies::kind_name(kind));
      table += ",lra_" + n + "_mean,lra_" + n + "_lo,lra_" + n + "_hi,overlap_" + n + "_mean";
      if (!cfg.ipi.perfect() && cfg.compare_ppi)
        table += ",increment_" + n + "_mean,increment_" + n + "_lo,increment_" + n + "_hi";
    }
  table += "\n";

  std::vector<std::string> artifacts;
  for (std::size_t pt = 0; pt < points; ++pt) {
    config::Json doc = cfg.document;
    doc.erase("sweep");
    std::vector<double> coords;
    std::size_t rest = pt;
    for (std::size_t a = axes.size(); a-- > 0;) {
      const auto& axis = axes[a];
      coords.insert(coords.begin(), axis.values[rest % axis.values.size()]);
      rest /= axis.values.size();
    }
    for (std::size_t a = 0; a < axes.size(); ++a) config::set_number(doc, axes[a].key, coords[a]);
    const auto point_cfg = config::parse(doc);
    char dirname[32];
    std::snprintf(dirname, sizeof dirname, "point_%03zu", pt);
    const fs::path dir = out / dirname;
    const auto solved = cmd_solve(point_cfg, dir, jobs);
    std::optional<SimReport> simmed;
    if (cfg.sweep_simulate) simmed = cmd_simulate(point_cfg, dir, jobs);
    artifacts.push_back(dirname);

    for (const auto& s : solved.solves) {
      table += std::to_string(pt);
      for (double c : coords) table += "," + fmt(c);
      table += "," + std::to_string(s.content) + "," + std::to_string(s.sol.iterations) + "," +
               fmt(s.residual) + "," + fmt(s.cost);
      if (simmed)
        for (const auto& e : simmed->entries) {
          // Totals over contents; repeated on each content row.
          table += "," + band_csv(e.ppi.final_lra) + "," + fmt(e.overlap[s.content].mean);
          if (e.increment) table += "," + band_csv(*e.increment);
        }
      table += "\n";
    }
  }
  io::write_text(out / "sweep.csv", table);
  artifacts.push_back("sweep.csv");
  write_manifest(out, cfg, "sweep", seconds_since(t0), artifacts);
  return points;
}

}  // namespace mfgcache::exp
