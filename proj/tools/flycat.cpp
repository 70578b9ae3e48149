// flycat command-line tool: runs the simulation scenarios and writes
// deterministic CSV/JSON reports.

#include <CLI11.hpp>

#include <fstream>
#include <functional>
#include <iostream>
#include <memory>
#include <vector>

#include "flycat/scenario.hpp"

namespace {

using flycat::json;
using flycat::ScenarioConfig;

struct ParamBinder {
  std::vector<std::function<void(json&)>> appliers;

  void bind_num(CLI::App* sub, const std::string& flag,
                const std::string& key, const std::string& desc) {
    auto holder = std::make_shared<double>();
    CLI::Option* opt = sub->add_option(flag, *holder, desc);
    appliers.push_back([opt, holder, key](json& p) {
      if (opt->count() > 0) p[key] = *holder;
    });
  }
  void bind_str(CLI::App* sub, const std::string& flag,
                const std::string& key, const std::string& desc) {
    auto holder = std::make_shared<std::string>();
    CLI::Option* opt = sub->add_option(flag, *holder, desc);
    appliers.push_back([opt, holder, key](json& p) {
      if (opt->count() > 0) p[key] = *holder;
    });
  }
  void bind_vec(CLI::App* sub, const std::string& flag,
                const std::string& key, const std::string& desc) {
    auto holder = std::make_shared<std::vector<double>>();
    CLI::Option* opt = sub->add_option(flag, *holder, desc);
    appliers.push_back([opt, holder, key](json& p) {
      if (opt->count() > 0) p[key] = *holder;
    });
  }
  void bind_flag(CLI::App* sub, const std::string& flag,
                 const std::string& key, const std::string& desc) {
    auto holder = std::make_shared<bool>(false);
    CLI::Option* opt = sub->add_flag(flag, *holder, desc);
    appliers.push_back([opt, holder, key](json& p) {
      if (opt->count() > 0) p[key] = *holder;
    });
  }
  void bind_ivec(CLI::App* sub, const std::string& flag,
                 const std::string& key, const std::string& desc) {
    auto holder = std::make_shared<std::vector<int>>();
    CLI::Option* opt = sub->add_option(flag, *holder, desc);
    appliers.push_back([opt, holder, key](json& p) {
      if (opt->count() > 0) p[key] = *holder;
    });
  }

  void apply(json& params) const {
    for (const auto& f : appliers) f(params);
  }
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"flycat: flying-cat parity-check simulation toolkit"};
  app.require_subcommand(1);

  struct SubSpec {
    CLI::App* sub;
    ParamBinder binder;
    std::string config_path;
    std::uint64_t seed = 1;
    std::size_t shots = 100000;
    int threads = 1;
    std::string format = "csv";
    std::string out_path;
    CLI::Option *seed_opt, *shots_opt, *threads_opt, *fmt_opt, *out_opt;
  };
  std::vector<std::unique_ptr<SubSpec>> specs;

  auto make_sub = [&](const std::string& name, const std::string& desc) {
    auto spec = std::make_unique<SubSpec>();
    spec->sub = app.add_subcommand(name, desc);
    spec->sub->add_option("--config", spec->config_path,
                          "JSON config file (flags override it)");
    spec->seed_opt = spec->sub->add_option("--seed", spec->seed, "RNG seed");
    spec->shots_opt =
        spec->sub->add_option("--shots", spec->shots, "shots / samples");
    spec->threads_opt =
        spec->sub->add_option("--threads", spec->threads, "worker threads");
    spec->fmt_opt = spec->sub->add_option("--format", spec->format,
                                          "output format: csv or json");
    spec->out_opt = spec->sub->add_option("--out", spec->out_path,
                                          "output path (default stdout)");
    specs.push_back(std::move(spec));
    return specs.back().get();
  };

  {
    auto* s = make_sub("tradeoff",
                       "sweep alpha: measurement vs loss error budget");
    s->binder.bind_num(s->sub, "--alpha-from", "alpha_from", "sweep start");
    s->binder.bind_num(s->sub, "--alpha-to", "alpha_to", "sweep end");
    s->binder.bind_num(s->sub, "--alpha-steps", "alpha_steps", "sweep points");
    s->binder.bind_num(s->sub, "--eta", "eta", "uniform segment loss");
    s->binder.bind_vec(s->sub, "--etas", "etas", "per-segment losses");
    s->binder.bind_num(s->sub, "--weight", "weight", "check weight (2 or 3)");
  }
  {
    auto* s = make_sub("optimize-alpha", "minimize the exact total error");
    s->binder.bind_num(s->sub, "--eta", "eta", "uniform segment loss");
    s->binder.bind_vec(s->sub, "--etas", "etas", "per-segment losses");
    s->binder.bind_num(s->sub, "--weight", "weight", "check weight (2 or 3)");
    s->binder.bind_num(s->sub, "--window-lo", "window_lo", "search window lo");
    s->binder.bind_num(s->sub, "--window-hi", "window_hi", "search window hi");
  }
  {
    auto* s = make_sub("check", "single parity check, exact or sampled");
    s->binder.bind_num(s->sub, "--alpha", "alpha", "field amplitude");
    s->binder.bind_num(s->sub, "--eta", "eta", "uniform segment loss");
    s->binder.bind_vec(s->sub, "--etas", "etas", "per-segment losses");
    s->binder.bind_num(s->sub, "--weight", "weight", "check weight (2 or 3)");
    s->binder.bind_str(s->sub, "--basis", "basis", "Z or X");
    s->binder.bind_str(s->sub, "--mode", "mode", "exact or sampled");
    s->binder.bind_str(s->sub, "--input", "input",
                       "xi_plus | plus | mixed_parity | bitstring");
  }
  {
    auto* s = make_sub("ghz", "three-qubit GHZ preparation");
    s->binder.bind_num(s->sub, "--alpha", "alpha", "field amplitude");
    s->binder.bind_num(s->sub, "--eta12", "eta12", "loss between qubits 1,2");
    s->binder.bind_num(s->sub, "--eta23", "eta23", "loss between qubits 2,3");
    s->binder.bind_str(s->sub, "--mode", "mode", "exact or sampled");
  }
  {
    auto* s = make_sub("tetra-prepare", "six-qubit tetrahedron preparation");
    s->binder.bind_num(s->sub, "--alpha", "alpha", "field amplitude");
    s->binder.bind_num(s->sub, "--eta", "eta", "uniform per-segment loss");
    s->binder.bind_str(s->sub, "--mode", "mode", "exact or sampled");
  }
  {
    auto* s = make_sub("tetra-decode", "syndrome to correction lookup");
    s->binder.bind_ivec(s->sub, "--sigma", "sigma",
                        "six stabilizer outcomes (+-1)");
  }
  {
    auto* s = make_sub("witness", "preparation fidelity vs model sweep");
    s->binder.bind_num(s->sub, "--alpha-from", "alpha_from", "sweep start");
    s->binder.bind_num(s->sub, "--alpha-to", "alpha_to", "sweep end");
    s->binder.bind_num(s->sub, "--alpha-steps", "alpha_steps", "sweep points");
    s->binder.bind_num(s->sub, "--eta", "eta", "uniform per-segment loss");
    s->binder.bind_vec(s->sub, "--etas", "etas", "loss values to sweep");
  }
  {
    auto* s = make_sub("teleport", "controlled two-qubit teleportation");
    s->binder.bind_flag(s->sub, "--cooperate", "cooperate",
                        "include the controller's measurements");
  }
  {
    auto* s = make_sub("feasibility", "circuit-QED infidelity budget");
    s->binder.bind_num(s->sub, "--chi-mhz", "chi_mhz",
                       "dispersive shift chi/2pi in MHz (signed)");
    s->binder.bind_num(s->sub, "--kappa-int-mhz", "kappa_int_mhz",
                       "internal loss rate kappa_int/2pi in MHz");
    s->binder.bind_num(s->sub, "--kappa0-mhz", "kappa0_mhz",
                       "line coupling kappa0/2pi in MHz (default 2|chi|)");
    s->binder.bind_num(s->sub, "--tau-ns", "tau_ns", "pulse width in ns");
    s->binder.bind_num(s->sub, "--t1-us", "t1_us", "relaxation time in us");
    s->binder.bind_num(s->sub, "--t2star-us", "t2star_us",
                       "inhomogeneous dephasing time in us");
    s->binder.bind_num(s->sub, "--alpha", "alpha", "field amplitude");
    s->binder.bind_num(s->sub, "--omega-c-ghz", "omega_c_ghz",
                       "cavity frequency omega_c/2pi in GHz");
  }
  {
    auto* s = make_sub("loss-budget", "transmission + circulator losses");
    s->binder.bind_str(s->sub, "--material", "material", "NbTi or Al");
    s->binder.bind_num(s->sub, "--db-per-km", "db_per_km",
                       "cable attenuation in dB/km");
    s->binder.bind_num(s->sub, "--length-km", "length_km", "cable length");
    s->binder.bind_num(s->sub, "--circulators", "circulators",
                       "number of circulators");
    s->binder.bind_num(s->sub, "--circulator-loss", "circulator_loss",
                       "insertion loss per circulator");
  }
  make_sub("selfcheck", "run the invariant suites and report pass/fail");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);  // --help
    app.exit(e);
    return flycat::kExitConfigError;
  }

  SubSpec* active = nullptr;
  for (auto& s : specs)
    if (s->sub->parsed()) active = s.get();
  if (!active) return flycat::kExitConfigError;

  ScenarioConfig cfg;
  cfg.command = active->sub->get_name();
  // Config file first, then flag overrides.
  if (!active->config_path.empty()) {
    std::ifstream in(active->config_path);
    if (!in) {
      std::cerr << "error: cannot open config file " << active->config_path
                << "\n";
      return flycat::kExitConfigError;
    }
    json file_cfg;
    try {
      in >> file_cfg;
    } catch (const json::parse_error& e) {
      std::cerr << "error: config parse failure: " << e.what() << "\n";
      return flycat::kExitConfigError;
    }
    if (!file_cfg.is_object()) {
      std::cerr << "error: config file must hold a JSON object\n";
      return flycat::kExitConfigError;
    }
    cfg.params = file_cfg;
    if (file_cfg.contains("seed")) cfg.seed = file_cfg["seed"].get<std::uint64_t>();
    if (file_cfg.contains("shots"))
      cfg.shots = file_cfg["shots"].get<std::size_t>();
    if (file_cfg.contains("threads"))
      cfg.threads = file_cfg["threads"].get<int>();
    if (file_cfg.contains("format"))
      cfg.format = file_cfg["format"].get<std::string>();
    if (file_cfg.contains("out"))
      cfg.out_path = file_cfg["out"].get<std::string>();
  }
  active->binder.apply(cfg.params);
  if (active->seed_opt->count()) cfg.seed = active->seed;
  if (active->shots_opt->count()) cfg.shots = active->shots;
  if (active->threads_opt->count()) cfg.threads = active->threads;
  if (active->fmt_opt->count()) cfg.format = active->format;
  if (active->out_opt->count()) cfg.out_path = active->out_path;
  if (cfg.format != "csv" && cfg.format != "json") {
    std::cerr << "error: --format must be csv or json\n";
    return flycat::kExitConfigError;
  }

  flycat::RunReport report;
  try {
    report = flycat::run_scenario(cfg);
  } catch (const flycat::contract_error& e) {
    std::cerr << "validation error: " << e.what() << "\n";
    return flycat::kExitValidationError;
  } catch (const flycat::numeric_error& e) {
    std::cerr << "numeric error: " << e.what() << "\n";
    return flycat::kExitValidationError;
  }

  const std::string text =
      cfg.format == "csv" ? flycat::to_csv(report)
                          : flycat::to_json_text(report);
  if (cfg.out_path.empty()) {
    std::cout << text;
  } else {
    std::ofstream out(cfg.out_path, std::ios::binary);
    if (!out) {
      std::cerr << "error: cannot write " << cfg.out_path << "\n";
      return flycat::kExitConfigError;
    }
    out << text;
  }
  std::cerr << "completed in " << report.wall_seconds << " s\n";
  if (cfg.command == "selfcheck" && !report.ok)
    return flycat::kExitSelfcheckFailure;
  return flycat::kExitOk;
}
