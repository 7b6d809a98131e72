/*
 * Copyright (c) 2026, cmmrank authors.
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "cmm/cli.hpp"

#include <filesystem>
#include <iostream>

#include <CLI11.hpp>

#include "cmm/io.hpp"
#include "cmm/mle.hpp"
#include "cmm/parallel.hpp"
#include "cmm/sampler.hpp"

namespace cmm::cli {

namespace {

namespace fs = std::filesystem;

struct GlobalOpts {
  std::uint64_t seed = 0;
  std::string distance = "kendall";
  std::vector<int> ct;
  int threads = 0;  // 0 = hardware
  std::string out = "cmm_out";
  std::string orientation = "ordering";
};

DistanceKind parse_kind(const std::string& s) {
  if (s == "hamming") return DistanceKind::hamming_oc;
  if (s == "kendall") return DistanceKind::kendall_oc;
  fail(errc::bad_config, "unknown distance '" + s + "'");
}

Orientation parse_orientation(const std::string& s) {
  if (s == "ordering") return Orientation::ordering;
  if (s == "ranks") return Orientation::ranks;
  fail(errc::bad_config, "unknown orientation '" + s + "'");
}

int effective_threads(const GlobalOpts& g) {
  return g.threads > 0 ? g.threads : default_threads();
}

std::string out_path(const GlobalOpts& g, const std::string& name) {
  fs::create_directories(g.out);
  return (fs::path(g.out) / name).string();
}

// Resolve the consensus: an explicit allocation wins over a table's
// canonical one.
Allocation resolve_allocation(const std::vector<int>& z_opt,
                              const std::vector<int>& ct_opt) {
  if (!z_opt.empty()) return Allocation::from_labels(z_opt);
  if (!ct_opt.empty())
    return ClusteringTable::from_sizes(ct_opt).canonical_allocation();
  fail(errc::bad_config, "provide --ct or --z");
}

void add_global(CLI::App* app, GlobalOpts& g) {
  app->add_option("--seed", g.seed, "master RNG seed");
  app->add_option("--distance", g.distance,
                  "ordered-cluster distance: hamming|kendall");
  app->add_option("--ct", g.ct, "cluster sizes, e.g. 2,2,1")->delimiter(',');
  app->add_option("--threads", g.threads, "worker threads (0 = all cores)");
  app->add_option("--out", g.out, "output directory");
  app->add_option("--orientation", g.orientation,
                  "input row layout: ordering|ranks");
}

RunConfig base_config(const std::string& subcommand, const GlobalOpts& g) {
  RunConfig c;
  c["subcommand"] = subcommand;
  c["distance"] = g.distance;
  if (!g.ct.empty()) c["ct"] = g.ct;
  c["seed"] = g.seed;
  c["threads"] = effective_threads(g);
  return c;
}

int run_impl(const std::vector<std::string>& args) {
  CLI::App app{"clustered consensus ranking models"};
  app.require_subcommand(1);
  GlobalOpts g;
  add_global(&app, g);

  // ---- simulate ----
  auto* sim = app.add_subcommand("simulate", "draw rankings from the model");
  sim->fallthrough();
  std::vector<int> sim_z;
  double sim_theta = 1.0;
  int sim_q = 100;
  long long sim_chain = 0;
  sim->add_option("--z", sim_z, "explicit allocation labels")->delimiter(',');
  sim->add_option("--theta", sim_theta, "concentration")->required();
  sim->add_option("--q", sim_q, "number of rankings");
  sim->add_option("--chain-len", sim_chain, "sampler steps per draw");

  // ---- eval ----
  auto* ev = app.add_subcommand("eval", "log-probability of observed rows");
  ev->fallthrough();
  std::string ev_input;
  std::vector<int> ev_z;
  double ev_theta = 1.0;
  bool ev_pseudo = false;
  bool ev_is = false;
  long long ev_draws = 100000;
  ev->add_option("--input", ev_input)->required();
  ev->add_option("--z", ev_z)->delimiter(',');
  ev->add_option("--theta", ev_theta)->required();
  ev->add_flag("--pseudo", ev_pseudo,
               "evaluate the multistage approximation instead");
  ev->add_flag("--is", ev_is, "estimate the normalizer by importance "
                              "sampling (default: exact enumeration)");
  ev->add_option("--M", ev_draws, "importance draws");

  // ---- psi ----
  auto* psi = app.add_subcommand("psi", "normalizer of the model");
  psi->fallthrough();
  std::vector<int> psi_z;
  double psi_theta = 1.0;
  bool psi_exact = false;
  bool psi_is = false;
  long long psi_draws = 100000;
  psi->add_option("--z", psi_z)->delimiter(',');
  psi->add_option("--theta", psi_theta)->required();
  psi->add_flag("--exact", psi_exact, "exact enumeration");
  psi->add_flag("--is", psi_is, "importance sampling");
  psi->add_option("--M", psi_draws, "importance draws");

  // ---- pref-matrix ----
  auto* pm = app.add_subcommand("pref-matrix",
                                "empirical pairwise preference proportions");
  pm->fallthrough();
  std::string pm_input;
  pm->add_option("--input", pm_input)->required();

  // ---- init-ct ----
  auto* ic = app.add_subcommand("init-ct",
                                "initial structure from near-indifferent pairs");
  ic->fallthrough();
  std::string ic_input;
  double ic_tol = 0.0;
  ic->add_option("--input", ic_input)->required();
  ic->add_option("--tol", ic_tol, "merge tolerance (default sqrt(0.5/q))");

  // ---- rc-probs ----
  auto* rc = app.add_subcommand("rc-probs", "rank-cluster probabilities");
  rc->fallthrough();
  std::vector<int> rc_z;
  double rc_theta = 1.0;
  bool rc_mc = false;
  int rc_samples = 20000;
  long long rc_chain = 0;
  rc->add_option("--z", rc_z)->delimiter(',');
  rc->add_option("--theta", rc_theta)->required();
  rc->add_flag("--mc", rc_mc, "Monte Carlo even when enumeration fits");
  rc->add_option("--samples", rc_samples, "Monte Carlo draws");
  rc->add_option("--chain-len", rc_chain);

  // ---- fit-mle ----
  auto* fm = app.add_subcommand("fit-mle",
                                "maximum-likelihood fit at a fixed table");
  fm->fallthrough();
  std::string fm_input;
  double fm_eps = 0.01;
  double fm_theta0 = 1.0;
  long long fm_chain = 0;
  int fm_anneal_moves = 0;
  int fm_m = 2;
  fm->add_option("--input", fm_input)->required();
  fm->add_option("--epsilon", fm_eps, "theta fit tolerance");
  fm->add_option("--theta0", fm_theta0);
  fm->add_option("--chain-len", fm_chain);
  fm->add_option("--anneal-moves", fm_anneal_moves,
                 "proposals per temperature (0 = 20n)");
  fm->add_option("--m-switch", fm_m, "elements switched per proposal");

  // ---- fit-bayes ----
  auto* fb = app.add_subcommand("fit-bayes",
                                "posterior sampling at a fixed table");
  fb->fallthrough();
  std::string fb_input;
  int fb_iters = 11000;
  int fb_burn = 1000;
  double fb_shape = 2.0, fb_rate = 2.0;
  long long fb_aea_n = 200;
  int fb_m = 2;
  double fb_theta0 = 1.0;
  fb->add_option("--input", fb_input)->required();
  fb->add_option("--iters", fb_iters);
  fb->add_option("--burn-in", fb_burn);
  fb->add_option("--prior-shape", fb_shape);
  fb->add_option("--prior-rate", fb_rate);
  fb->add_option("--aea-n", fb_aea_n, "auxiliary sampler steps per draw");
  fb->add_option("--m-switch", fb_m);
  fb->add_option("--theta0", fb_theta0);

  // ---- search-ct ----
  auto* sc = app.add_subcommand("search-ct", "greedy structure search");
  sc->fallthrough();
  std::string sc_input;
  std::string sc_criterion = "info";
  long long sc_draws = 100000;
  double sc_tol = 0.0;
  int sc_max_steps = 50;
  int sc_fix_l = 0;
  bool sc_pin_edges = false;
  double sc_eps = 0.01;
  int sc_max_neighbors = 0;
  sc->add_option("--input", sc_input)->required();
  sc->add_option("--criterion", sc_criterion, "info|data");
  sc->add_option("--M", sc_draws, "importance draws per criterion");
  sc->add_option("--tol", sc_tol, "initial-structure merge tolerance");
  sc->add_option("--max-steps", sc_max_steps);
  sc->add_option("--fix-L", sc_fix_l, "only explore tables with L clusters");
  sc->add_flag("--pin-edges", sc_pin_edges,
               "keep the first and last clusters as singletons");
  sc->add_option("--epsilon", sc_eps, "theta fit tolerance");
  sc->add_option("--max-neighbors", sc_max_neighbors,
                 "sampled neighborhood size (0 = all)");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);  // prints help or the usage error
    return code == 0 ? 0 : 2;
  }

  const DistanceKind kind = parse_kind(g.distance);
  const Orientation orientation = parse_orientation(g.orientation);
  const int threads = effective_threads(g);

  if (sim->parsed()) {
    const Allocation z = resolve_allocation(sim_z, g.ct);
    RunConfig config = base_config("simulate", g);
    config["n"] = z.n();
    if (!sim_z.empty()) config["z"] = sim_z;
    config["theta"] = sim_theta;
    config["q"] = sim_q;
    config["chain_len"] =
        sim_chain > 0 ? sim_chain : default_chain_len(z.n());
    const CmmParams params{z, sim_theta, kind};
    SamplerConfig scfg;
    scfg.chain_len = sim_chain;
    scfg.n_chains = sim_q;
    scfg.seed = g.seed;
    scfg.threads = threads;
    const RankingDataset draws = sample_rankings(params, scfg);
    write_rankings_csv(out_path(g, "rankings.csv"), draws, config);
    std::cout << "wrote " << draws.q() << " rankings to "
              << out_path(g, "rankings.csv") << "\n";
    return 0;
  }

  if (ev->parsed()) {
    const RankingDataset data = read_rankings(ev_input, orientation);
    const Allocation z = resolve_allocation(ev_z, g.ct);
    RunConfig config = base_config("eval", g);
    config["input"] = ev_input;
    config["theta"] = ev_theta;
    config["pseudo"] = ev_pseudo;
    const CmmParams params{z, ev_theta, kind};
    std::vector<std::pair<int, double>> rows;
    double total = 0.0;
    if (ev_pseudo) {
      for (int j = 0; j < data.q(); ++j) {
        const double lp = pseudo_log_prob(data.row_permutation(j), params);
        rows.emplace_back(j, lp);
        total += lp;
      }
    } else {
      double log_psi;
      if (ev_is || z.n() > kEnumerationCap) {
        config["M"] = ev_draws;
        log_psi =
            estimate_log_psi(ev_theta, z, kind, ev_draws, g.seed, threads)
                .log_psi;
      } else {
        log_psi = exact_log_psi(ev_theta, z, kind);
      }
      for (int j = 0; j < data.q(); ++j) {
        const double lp = log_prob(data.row_permutation(j), params, log_psi);
        rows.emplace_back(j, lp);
        total += lp;
      }
    }
    write_eval_csv(out_path(g, "eval.csv"), rows,
                   ev_pseudo ? "pseudo_log_prob" : "log_prob", config);
    std::cout << "total " << (ev_pseudo ? "pseudo " : "") << "log-probability "
              << format_real(total) << "\n";
    return 0;
  }

  if (psi->parsed()) {
    const Allocation z = resolve_allocation(psi_z, g.ct);
    RunConfig config = base_config("psi", g);
    config["theta"] = psi_theta;
    const bool exact = psi_exact || (!psi_is && z.n() <= kEnumerationCap);
    double value, se = 0.0;
    std::string method;
    if (exact) {
      value = exact_log_psi(psi_theta, z, kind);
      method = "exact";
    } else {
      config["M"] = psi_draws;
      const IsEstimate est =
          estimate_log_psi(psi_theta, z, kind, psi_draws, g.seed, threads);
      value = est.log_psi;
      se = est.se_log;
      method = "importance";
    }
    config["method"] = method;
    write_psi_json(out_path(g, "psi.json"), value, se, method, config);
    std::cout << "log_psi " << format_real(value) << " (se "
              << format_real(se) << ", " << method << ")\n";
    return 0;
  }

  if (pm->parsed()) {
    const RankingDataset data = read_rankings(pm_input, orientation);
    RunConfig config = base_config("pref-matrix", g);
    config["input"] = pm_input;
    config["q"] = data.q();
    const PreferenceMatrix m = preference_matrix(data);
    write_pref_matrix_csv(out_path(g, "pref_matrix.csv"), m, data, config);
    std::cout << "wrote " << out_path(g, "pref_matrix.csv") << "\n";
    return 0;
  }

  if (ic->parsed()) {
    const RankingDataset data = read_rankings(ic_input, orientation);
    const double tol = ic_tol > 0.0 ? ic_tol : default_merge_tol(data.q());
    RunConfig config = base_config("init-ct", g);
    config["input"] = ic_input;
    config["tol"] = tol;
    const InitialStructure init =
        initial_structure(preference_matrix(data), tol);
    write_init_ct_json(out_path(g, "init_ct.json"), init, data, config);
    std::cout << "initial ct:";
    for (int s : init.ct.sizes()) std::cout << " " << s;
    std::cout << "\n";
    return 0;
  }

  if (rc->parsed()) {
    const Allocation z = resolve_allocation(rc_z, g.ct);
    RunConfig config = base_config("rc-probs", g);
    config["theta"] = rc_theta;
    const CmmParams params{z, rc_theta, kind};
    RcMatrix m;
    if (!rc_mc && z.n() <= kEnumerationCap) {
      config["method"] = "exact";
      m = rank_cluster_exact(params);
    } else {
      config["method"] = "mc";
      config["samples"] = rc_samples;
      m = rank_cluster_mc(params, rc_samples, rc_chain, g.seed, threads);
    }
    write_rc_probs_csv(out_path(g, "rc_probs.csv"), m, config);
    std::cout << "wrote " << out_path(g, "rc_probs.csv") << "\n";
    return 0;
  }

  if (fm->parsed()) {
    const RankingDataset data = read_rankings(fm_input, orientation);
    if (g.ct.empty()) fail(errc::bad_config, "fit-mle needs --ct");
    const ClusteringTable ct = ClusteringTable::from_sizes(g.ct);
    RunConfig config = base_config("fit-mle", g);
    config["input"] = fm_input;
    config["epsilon"] = fm_eps;
    config["theta0"] = fm_theta0;
    MleConfig mcfg;
    mcfg.theta.epsilon = fm_eps;
    mcfg.theta.theta0 = fm_theta0;
    mcfg.theta.chain_len = fm_chain;
    mcfg.anneal.moves_per_temp = fm_anneal_moves;
    mcfg.anneal.m_switch = fm_m;
    mcfg.seed = g.seed;
    mcfg.threads = threads;
    const MleFit fit = fit_mle(data, ct, kind, mcfg);
    FitSummary summary{fit.z, fit.theta, 0, 0, 0, false, fit.distance_sum};
    write_map_json(out_path(g, "map.json"), summary, data, config);
    std::cout << "theta " << format_real(fit.theta) << ", consensus "
              << consensus_display(ordered_clusters(fit.z), data) << "\n";
    return 0;
  }

  if (fb->parsed()) {
    const RankingDataset data = read_rankings(fb_input, orientation);
    if (g.ct.empty()) fail(errc::bad_config, "fit-bayes needs --ct");
    const ClusteringTable ct = ClusteringTable::from_sizes(g.ct);
    RunConfig config = base_config("fit-bayes", g);
    config["input"] = fb_input;
    config["iters"] = fb_iters;
    config["burn_in"] = fb_burn;
    config["prior_shape"] = fb_shape;
    config["prior_rate"] = fb_rate;
    config["aea_n"] = fb_aea_n;
    Priors priors;
    priors.theta = GammaPrior{fb_shape, fb_rate};
    PosteriorConfig pcfg;
    pcfg.iterations = fb_iters;
    pcfg.burn_in = fb_burn;
    pcfg.m_switch = fb_m;
    pcfg.aux_chain_len = fb_aea_n;
    pcfg.theta0 = fb_theta0;
    pcfg.seed = g.seed;
    pcfg.threads = threads;
    const PosteriorTrace trace = run_posterior(data, ct, kind, priors, pcfg);
    write_trace_csv(out_path(g, "trace.csv"), trace, config);
    const Allocation map_z = trace.map_allocation();
    FitSummary summary{map_z,
                       trace.theta_map(),
                       trace.theta_quantile(0.025),
                       trace.theta_quantile(0.975),
                       trace.theta_mean(),
                       true,
                       0};
    write_map_json(out_path(g, "map.json"), summary, data, config);
    std::cout << "theta MAP " << format_real(summary.theta) << " ci95 ["
              << format_real(summary.theta_lo) << ", "
              << format_real(summary.theta_hi) << "], consensus "
              << consensus_display(ordered_clusters(map_z), data) << "\n";
    return 0;
  }

  if (sc->parsed()) {
    const RankingDataset data = read_rankings(sc_input, orientation);
    RunConfig config = base_config("search-ct", g);
    config["input"] = sc_input;
    config["criterion"] = sc_criterion;
    config["M"] = sc_draws;
    SearchConfig cfg;
    if (sc_criterion == "info")
      cfg.criterion = CriterionKind::info;
    else if (sc_criterion == "data")
      cfg.criterion = CriterionKind::data;
    else
      fail(errc::bad_config, "criterion must be info or data");
    cfg.num_draws = sc_draws;
    cfg.max_steps = sc_max_steps;
    cfg.max_neighbors = sc_max_neighbors;
    cfg.mle.theta.epsilon = sc_eps;
    cfg.mle.seed = g.seed;
    cfg.seed = g.seed;
    cfg.threads = threads;
    if (sc_fix_l > 0) {
      cfg.filter = [sc_fix_l](const ClusteringTable& t) {
        return t.num_clusters() == sc_fix_l;
      };
    } else if (sc_pin_edges) {
      cfg.filter = [](const ClusteringTable& t) {
        return t.sizes().front() == 1 && t.sizes().back() == 1;
      };
    }
    ClusteringTable initial = ClusteringTable::from_sizes(std::vector<int>{1});
    if (!g.ct.empty()) {
      initial = ClusteringTable::from_sizes(g.ct);
    } else {
      const double tol = sc_tol > 0.0 ? sc_tol : default_merge_tol(data.q());
      config["tol"] = tol;
      initial = initial_structure(preference_matrix(data), tol).ct;
    }
    const SearchResult result = greedy_search(data, initial, kind, cfg);
    write_search_report_csv(out_path(g, "search_report.csv"), result, config);
    FitSummary summary{result.best().z, result.best().theta, 0, 0, 0, false,
                       sum_distance(data, result.best().z, kind)};
    write_map_json(out_path(g, "map.json"), summary, data, config);
    std::cout << "best ct:";
    for (int s : result.best().ct.sizes()) std::cout << " " << s;
    std::cout << " (criterion " << format_real(result.best().value);
    if (cfg.criterion == CriterionKind::info)
      std::cout << " se " << format_real(result.best().se);
    std::cout << (result.ambiguous ? ", ambiguous" : "") << ")\n";
    return 0;
  }

  return 0;
}

}  // namespace

int run(const std::vector<std::string>& args) {
  try {
    return run_impl(args);
  } catch (const error& e) {
    std::cerr << "error [" << errc_name(e.code()) << "]: " << e.what()
              << "\n";
    return is_numeric_error(e.code()) ? 4 : 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
}

int main(int argc, char** argv) {
  std::vector<std::string> args;
  for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
  return run(args);
}

}  // namespace cmm::cli
