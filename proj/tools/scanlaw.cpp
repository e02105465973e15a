// scanlaw: classify a standardized light-tailed law, compute the limiting
// constants of its multiscale scan statistic, estimate the Pickands-type
// constant two ways, and confront the laws with simulation.

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "scanlaw/cgf_analysis.hpp"
#include "scanlaw/deviation.hpp"
#include "scanlaw/limit_laws.hpp"
#include "scanlaw/pickands.hpp"
#include "scanlaw/scan.hpp"
#include "scanlaw/simulate.hpp"
#include "scanlaw/version.hpp"

using namespace scanlaw;

namespace {

struct Common {
  std::string dist_json;
  std::string dist_file;
  std::string out_path;
  int threads = 0;
};

void add_dist_options(CLI::App* cmd, Common& c) {
  cmd->add_option("--dist", c.dist_json, "distribution spec as inline JSON");
  cmd->add_option("--dist-file", c.dist_file, "path to a JSON distribution spec");
}

void add_common_options(CLI::App* cmd, Common& c) {
  cmd->add_option("--out", c.out_path, "write the JSON report here instead of stdout");
  cmd->add_option("--threads", c.threads,
                  "worker thread cap (default: SCANLAW_THREADS or 1); never affects results");
}

int resolve_threads(const Common& c) {
  if (c.threads > 0) return c.threads;
  if (const char* env = std::getenv("SCANLAW_THREADS")) {
    int v = std::atoi(env);
    if (v > 0) return v;
  }
  return 1;
}

Distribution load_dist(const Common& c) {
  if (!c.dist_json.empty()) return make_distribution(c.dist_json);
  if (!c.dist_file.empty()) {
    std::ifstream in(c.dist_file);
    if (!in) raise(errc::schema, "cannot open dist file " + c.dist_file);
    std::stringstream ss;
    ss << in.rdbuf();
    return make_distribution(ss.str());
  }
  raise(errc::schema, "a distribution is required: pass --dist or --dist-file");
}

std::vector<double> load_data(const std::string& path) {
  std::ifstream in(path);
  if (!in) raise(errc::schema, "cannot open data file " + path);
  std::vector<double> out;
  std::string tok;
  while (in >> tok) {
    if (!tok.empty() && tok.back() == ',') tok.pop_back();
    try {
      std::size_t used = 0;
      double v = std::stod(tok, &used);
      if (used != tok.size()) throw std::invalid_argument(tok);
      out.push_back(v);
    } catch (const std::exception&) {
      if (out.empty()) continue;  // tolerate a non-numeric header token run
      raise(errc::schema, "non-numeric token '" + tok + "' in " + path);
    }
  }
  if (out.empty()) raise(errc::schema, "no numbers found in " + path);
  return out;
}

void emit(const json& report, const Common& c) {
  std::string text = report.dump(2);
  text.push_back('\n');
  if (c.out_path.empty()) {
    std::fwrite(text.data(), 1, text.size(), stdout);
  } else {
    std::ofstream out(c.out_path, std::ios::binary);
    if (!out) raise(errc::schema, "cannot write " + c.out_path);
    out << text;
  }
}

json report_skeleton(const std::string& command, json config) {
  return json{{"schema_version", kReportSchemaVersion},
              {"tool", "scanlaw"},
              {"version", kVersion},
              {"command", command},
              {"config", std::move(config)}};
}

// attach an H* estimate (exact Spitzer DP when the law is lattice, else MC)
HStarEstimate estimate_hstar(const Distribution& dist, CaseReport& rep, long K, long reps,
                             std::uint64_t seed) {
  auto tw = tilt(dist, rep.log_case->t_star);
  SpitzerConfig cfg;
  cfg.reps = reps;
  auto est = hstar_spitzer(tw, K, cfg, seed);
  attach_hstar(rep, est.value);
  return est;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"multiscale scan statistic laws for light-tailed random walks"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string("scanlaw ") + kVersion);

  Common c;
  std::string data_path;
  long n = 10000, reps = 1000, K = 200, B_max = 16384;
  std::uint64_t seed = 0;
  double s_value = 0, x_value = 0, u_value = 0, y_value = 1.0, m_value = 0, tilt_t = 0,
         hstar_override = 0;
  long k_steps = 100, h1 = 1, h2 = 0, n_cap = 0, hit_reps = 0;
  std::string method = "both", tail_method = "all", window = "theory", scale = "msq",
              plot_path;
  bool two_sided = false, with_hstar = false;

  auto* classify_cmd = app.add_subcommand("classify", "tail-regime classification of a law");
  add_dist_options(classify_cmd, c);
  add_common_options(classify_cmd, c);

  auto* constants_cmd =
      app.add_subcommand("constants", "all limiting-law constants, duality checks included");
  add_dist_options(constants_cmd, c);
  add_common_options(constants_cmd, c);
  constants_cmd->add_option("--n", n, "horizon used for the optimal-length descriptor");
  constants_cmd->add_flag("--with-hstar", with_hstar, "estimate H* (logarithmic case)");
  constants_cmd->add_option("--K", K, "Spitzer truncation for --with-hstar");
  constants_cmd->add_option("--reps", reps, "Monte Carlo paths for --with-hstar");
  constants_cmd->add_option("--seed", seed, "seed for --with-hstar");

  auto* rate_cmd = app.add_subcommand("rate", "Legendre-Fenchel rate I(s) and derivatives");
  add_dist_options(rate_cmd, c);
  add_common_options(rate_cmd, c);
  rate_cmd->add_option("--s", s_value, "evaluation point")->required();

  auto* tail_cmd = app.add_subcommand("tail", "tail approximations for P[S_k/sqrt(k) > x]");
  add_dist_options(tail_cmd, c);
  add_common_options(tail_cmd, c);
  tail_cmd->add_option("--k", k_steps, "walk length")->required();
  tail_cmd->add_option("--x", x_value, "standardized threshold")->required();
  tail_cmd->add_option("--method", tail_method, "cramer|cramer1|bahadur-rao|chernoff|all");

  auto* pickands_cmd = app.add_subcommand("pickands", "H* estimation and reconciliation");
  add_dist_options(pickands_cmd, c);
  add_common_options(pickands_cmd, c);
  pickands_cmd->add_option("--method", method, "direct|spitzer|both");
  pickands_cmd->add_option("--K", K, "Spitzer series truncation");
  pickands_cmd->add_option("--B-max", B_max, "largest B in the direct schedule");
  pickands_cmd->add_option("--reps", reps, "Monte Carlo replicates");
  pickands_cmd->add_option("--seed", seed, "RNG seed");
  pickands_cmd->add_option("--t", tilt_t, "tilt point (default: the law's t*)");

  auto* scan_cmd = app.add_subcommand("scan", "scan statistic of an observed series");
  add_common_options(scan_cmd, c);
  scan_cmd->add_option("--data", data_path, "one-column CSV / newline floats")->required();
  scan_cmd->add_option("--h1", h1, "smallest interval length");
  scan_cmd->add_option("--h2", h2, "largest interval length (default n)");
  scan_cmd->add_flag("--two-sided", two_sided, "also scan the negated series");

  auto* simulate_cmd = app.add_subcommand("simulate", "Monte Carlo experiment for M_n");
  add_dist_options(simulate_cmd, c);
  add_common_options(simulate_cmd, c);
  simulate_cmd->add_option("--n", n, "walk length")->required();
  simulate_cmd->add_option("--reps", reps, "replicates");
  simulate_cmd->add_option("--seed", seed, "RNG seed");
  simulate_cmd->add_option("--window", window, "full|theory|H1:H2");
  simulate_cmd->add_option("--hstar", hstar_override, "H* to use for the logarithmic law");
  simulate_cmd->add_flag("--auto-hstar", with_hstar, "estimate H* first (logarithmic case)");
  simulate_cmd->add_option("--K", K, "Spitzer truncation for --auto-hstar");
  simulate_cmd->add_option("--plot", plot_path, "write value,length CSV for external plotting");

  auto* pvalue_cmd = app.add_subcommand("pvalue", "limit-law p-value for an observed M_n");
  add_dist_options(pvalue_cmd, c);
  add_common_options(pvalue_cmd, c);
  pvalue_cmd->add_option("--n", n, "walk length")->required();
  pvalue_cmd->add_option("--m", m_value, "observed scan maximum")->required();
  pvalue_cmd->add_option("--scale", scale, "msq|m parameterization");
  pvalue_cmd->add_option("--hstar", hstar_override, "H* to use for the logarithmic law");
  pvalue_cmd->add_option("--K", K, "Spitzer truncation when H* must be estimated");
  pvalue_cmd->add_option("--seed", seed, "seed for H* estimation");
  pvalue_cmd->add_option("--reps", reps, "Monte Carlo paths when H* must be estimated");

  auto* hitting_cmd = app.add_subcommand("hitting", "hitting-time law and optional simulation");
  add_dist_options(hitting_cmd, c);
  add_common_options(hitting_cmd, c);
  hitting_cmd->add_option("--u", u_value, "threshold")->required();
  hitting_cmd->add_option("--y", y_value, "survival point of the normalized law");
  hitting_cmd->add_option("--reps", hit_reps, "simulate this many hitting times");
  hitting_cmd->add_option("--n-cap", n_cap, "simulation cap on n (default from the law)");
  hitting_cmd->add_option("--seed", seed, "RNG seed");
  hitting_cmd->add_option("--hstar", hstar_override, "H* to use for the logarithmic law");
  hitting_cmd->add_option("--K", K, "Spitzer truncation when H* must be estimated");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (classify_cmd->parsed()) {
      auto dist = load_dist(c);
      json rep = report_skeleton("classify", {{"dist", dist.spec_json()}});
      rep["result"] = classify(dist).to_json();
      emit(rep, c);
      return 0;
    }

    if (constants_cmd->parsed()) {
      auto dist = load_dist(c);
      auto r = classify(dist);
      json cfg{{"dist", dist.spec_json()}, {"n", n}};
      if (with_hstar) {
        cfg["K"] = K;
        cfg["reps"] = reps;
        cfg["seed"] = seed;
      }
      json rep = report_skeleton("constants", cfg);
      json result;
      json hj;
      if (r.tag == CaseTag::logarithmic && with_hstar)
        hj = estimate_hstar(dist, r, K, reps, seed).to_json();
      result["case"] = r.to_json();
      if (!hj.is_null()) result["hstar"] = hj;
      if (r.tag == CaseTag::logarithmic) result["duality"] = duality_report(dist, r).to_json();
      if (r.tag != CaseTag::indeterminate)
        result["optimal_length"] = optimal_length(r, n).to_json();
      if (r.tag == CaseTag::superlogarithmic ||
          (r.tag == CaseTag::logarithmic && r.log_case->theta_total))
        result["gumbel_law"] = make_gumbel_law(r, n).to_json();
      rep["result"] = result;
      emit(rep, c);
      return 0;
    }

    if (rate_cmd->parsed()) {
      auto dist = load_dist(c);
      json rep = report_skeleton("rate", {{"dist", dist.spec_json()}, {"s", s_value}});
      RateEval re = rate(dist, s_value);
      rep["result"] = {{"s", re.s},
                       {"value", re.value},
                       {"maximizer", re.maximizer},
                       {"d1", re.d1},
                       {"d2", re.d2},
                       {"cramer_lambda", s_value > 0 ? cramer_lambda(dist, s_value) : 0.0}};
      emit(rep, c);
      return 0;
    }

    if (tail_cmd->parsed()) {
      auto dist = load_dist(c);
      json rep = report_skeleton("tail", {{"dist", dist.spec_json()},
                                          {"k", k_steps},
                                          {"x", x_value},
                                          {"method", tail_method}});
      TailQuery q{k_steps, x_value};
      json result;
      if (tail_method == "cramer" || tail_method == "all") {
        auto t = cramer_tail(dist, q, CramerForm::mills);
        result["cramer"] = {{"value", t.value},
                            {"clt_flag", t.clt_flag},
                            {"regime_warning", t.regime_warning}};
      }
      if (tail_method == "cramer1" || tail_method == "all") {
        auto t = cramer_tail(dist, q, CramerForm::phi_bar);
        result["cramer1"] = {{"value", t.value},
                             {"clt_flag", t.clt_flag},
                             {"regime_warning", t.regime_warning}};
      }
      if (tail_method == "bahadur-rao" || (tail_method == "all" && !dist.lattice()))
        result["bahadur_rao"] = bahadur_rao_tail(dist, q);
      if (tail_method == "chernoff" || tail_method == "all")
        result["chernoff_bound"] = chernoff_bound(dist, q);
      if (result.empty()) raise(errc::argument, "unknown tail method " + tail_method);
      rep["result"] = result;
      emit(rep, c);
      return 0;
    }

    if (pickands_cmd->parsed()) {
      auto dist = load_dist(c);
      TiltedWalk tw = tilt_t > 0 ? tilt(dist, tilt_t) : tilt_at_tstar(dist);
      json cfg{{"dist", dist.spec_json()}, {"method", method}, {"K", K},
               {"B_max", B_max},           {"reps", reps},     {"seed", seed},
               {"t", tw.t_star}};
      json rep = report_skeleton("pickands", cfg);
      json result;
      std::optional<HStarEstimate> dir, spz;
      if (method == "direct" || method == "both") {
        std::vector<long> schedule;
        for (long b = 64; b <= B_max; b *= 2) schedule.push_back(b);
        dir = hstar_direct(tw, schedule, reps, seed, resolve_threads(c));
        result["direct"] = dir->to_json();
      }
      if (method == "spitzer" || method == "both") {
        SpitzerConfig scfg;
        scfg.reps = reps;
        spz = hstar_spitzer(tw, K, scfg, seed);
        result["spitzer"] = spz->to_json();
      }
      if (dir && spz) {
        double diff = std::abs(dir->value - spz->value);
        double band = 3 * (dir->std_error + spz->std_error);
        result["reconciliation"] = {{"abs_difference", diff},
                                    {"three_sigma_band", band},
                                    {"consistent", diff < band}};
      }
      if (result.empty()) raise(errc::argument, "unknown pickands method " + method);
      rep["result"] = result;
      emit(rep, c);
      return 0;
    }

    if (scan_cmd->parsed()) {
      auto data = load_data(data_path);
      long n_data = static_cast<long>(data.size());
      long hi = h2 > 0 ? h2 : n_data;
      json rep = report_skeleton(
          "scan", {{"data", data_path}, {"h1", h1}, {"h2", hi}, {"two_sided", two_sided}});
      if (two_sided) {
        auto [plus, minus] = scan_two_sided(data, h1, hi);
        rep["result"] = {{"m_plus", plus.to_json()},
                         {"m_minus", minus.to_json()},
                         {"m_abs", std::max(plus.value, minus.value)}};
      } else {
        rep["result"] = scan_restricted(data, h1, hi).to_json();
      }
      emit(rep, c);
      return 0;
    }

    if (simulate_cmd->parsed()) {
      auto dist = load_dist(c);
      auto r = classify(dist);
      json cfg{{"dist", dist.spec_json()}, {"n", n},       {"reps", reps},
               {"seed", seed},             {"window", window}};
      if (r.tag == CaseTag::logarithmic) {
        if (hstar_override > 0) {
          attach_hstar(r, hstar_override);
          cfg["hstar"] = hstar_override;
        } else if (with_hstar) {
          auto est = estimate_hstar(dist, r, K, reps, seed);
          cfg["hstar"] = est.value;
          cfg["hstar_method"] = est.method;
        }
      }
      SimConfig sim;
      sim.n = n;
      sim.reps = reps;
      sim.seed = seed;
      sim.threads = resolve_threads(c);
      if (window == "full") {
        sim.policy = WindowPolicy::full;
      } else if (window == "theory") {
        sim.policy = WindowPolicy::theory;
      } else {
        auto colon = window.find(':');
        if (colon == std::string::npos)
          raise(errc::argument, "window must be full, theory, or H1:H2");
        sim.policy = WindowPolicy::explicit_window;
        sim.h1 = std::stol(window.substr(0, colon));
        sim.h2 = std::stol(window.substr(colon + 1));
      }
      json rep = report_skeleton("simulate", cfg);
      auto summary = run_mn_experiment(dist, r, sim);
      rep["result"] = summary.to_json();
      rep["result"]["case"] = r.to_json();
      if (!plot_path.empty()) {
        std::ofstream csv(plot_path, std::ios::binary);
        if (!csv) raise(errc::schema, "cannot write " + plot_path);
        csv << "value,length\n";
        char line[64];
        for (std::size_t i = 0; i < summary.values.size(); ++i) {
          std::snprintf(line, sizeof line, "%.17g,%ld\n", summary.values[i],
                        summary.argmax_lengths[i]);
          csv << line;
        }
      }
      emit(rep, c);
      return 0;
    }

    if (pvalue_cmd->parsed()) {
      auto dist = load_dist(c);
      auto r = classify(dist);
      json cfg{{"dist", dist.spec_json()}, {"n", n}, {"m", m_value}, {"scale", scale}};
      if (r.tag == CaseTag::logarithmic) {
        if (hstar_override > 0) {
          attach_hstar(r, hstar_override);
          cfg["hstar"] = hstar_override;
        } else {
          auto est = estimate_hstar(dist, r, K, reps, seed);
          cfg["hstar"] = est.value;
          cfg["hstar_method"] = est.method;
          cfg["seed"] = seed;
        }
      }
      json rep = report_skeleton("pvalue", cfg);
      PValueScale ps = scale == "m" ? PValueScale::m_linear : PValueScale::m_squared;
      rep["result"] = {{"p_value", pvalue_m(m_value, r, n, ps)},
                       {"gumbel_law", make_gumbel_law(r, n).to_json()},
                       {"case", r.to_json()}};
      emit(rep, c);
      return 0;
    }

    if (hitting_cmd->parsed()) {
      auto dist = load_dist(c);
      auto r = classify(dist);
      json cfg{{"dist", dist.spec_json()}, {"u", u_value}, {"y", y_value}, {"seed", seed}};
      if (r.tag == CaseTag::logarithmic) {
        if (hstar_override > 0) {
          attach_hstar(r, hstar_override);
          cfg["hstar"] = hstar_override;
        } else {
          auto est = estimate_hstar(dist, r, K, 200000, seed);
          cfg["hstar"] = est.value;
        }
      }
      json rep = report_skeleton("hitting", cfg);
      auto law = hitting_cdf(y_value, u_value, r);
      json result{{"survival_at_y", law.survival},
                  {"normalization", law.normalization},
                  {"mass", law.mass}};
      if (hit_reps > 0) {
        long cap = n_cap > 0
                       ? n_cap
                       : static_cast<long>(std::min(1e9, 50.0 / (law.mass * law.normalization)));
        cfg["reps"] = hit_reps;
        cfg["n_cap"] = cap;
        // window follows the optimal-length scale at the cap, with margin
        auto ol = optimal_length(r, cap);
        long wcap = static_cast<long>(
            std::ceil(2 * ol.center + 16 * std::sqrt(std::log(static_cast<double>(cap))) + 64));
        long hit = 0, censored = 0;
        double mean_norm_t = 0;
        for (long i = 0; i < hit_reps; ++i) {
          auto t = hitting_time(dist, u_value, seed, cap, wcap, i + 1);
          if (t) {
            ++hit;
            mean_norm_t += law.normalization * *t;
          } else {
            ++censored;
          }
        }
        result["simulated"] = {{"hits", hit},
                               {"censored", censored},
                               {"window_cap", wcap},
                               {"mean_normalized_T", hit ? mean_norm_t / hit : 0.0},
                               {"expected_mean", 1.0 / law.mass}};
      }
      rep["result"] = result;
      emit(rep, c);
      return 0;
    }

    raise(errc::argument, "no subcommand given");
  } catch (const Error& e) {
    json err = report_skeleton("error", json::object());
    err["error"] = {{"code", static_cast<int>(e.code())},
                    {"name", errc_name(e.code())},
                    {"message", e.what()}};
    std::fprintf(stdout, "%s\n", err.dump(2).c_str());
    return 1;
  } catch (const std::exception& e) {
    json err = report_skeleton("error", json::object());
    err["error"] = {{"code", 0}, {"name", "internal"}, {"message", e.what()}};
    std::fprintf(stdout, "%s\n", err.dump(2).c_str());
    return 1;
  }
}
