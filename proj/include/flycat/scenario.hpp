#pragma once

// Command surface: structured (JSON) configuration, one handler per
// subcommand, and deterministic machine-readable reports (CSV or JSON).
// All randomness flows from the single config seed; identical configs give
// byte-identical result rows at any thread count.

#include <json.hpp>

#include <chrono>
#include <cstdio>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "flycat/errors.hpp"
#include "flycat/feasibility.hpp"
#include "flycat/montecarlo.hpp"
#include "flycat/netstates.hpp"
#include "flycat/paritycheck.hpp"
#include "flycat/qcore.hpp"
#include "flycat/teleport.hpp"

namespace flycat {

using json = nlohmann::json;

#ifndef FLYCAT_VERSION
#define FLYCAT_VERSION "0.0.0"
#endif
inline constexpr const char* kVersion = FLYCAT_VERSION;

// Exit codes used by the CLI.
inline constexpr int kExitOk = 0;
inline constexpr int kExitConfigError = 2;
inline constexpr int kExitValidationError = 3;
inline constexpr int kExitSelfcheckFailure = 4;

struct ScenarioConfig {
  std::string command;
  json params = json::object();
  std::uint64_t seed = 1;
  std::size_t shots = 100000;
  int threads = 1;
  std::string format = "csv";  // csv | json
  std::string out_path;        // empty = stdout
};

struct RunReport {
  std::string schema;
  json inputs = json::object();  // resolved parameter echo
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;
  std::vector<std::string> notes;
  std::uint64_t seed = 0;
  std::string version = kVersion;
  bool ok = true;          // false only for failed selfcheck suites
  double wall_seconds = 0; // in-process only, never serialized
};

namespace detail {

inline std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

inline double get_num(const json& p, const std::string& key, double def) {
  if (!p.contains(key)) return def;
  require(p[key].is_number(), "parameter '" + key + "' must be a number");
  return p[key].get<double>();
}

inline double require_num(const json& p, const std::string& key) {
  require(p.contains(key) && p[key].is_number(),
          "missing numeric parameter '" + key + "'");
  return p[key].get<double>();
}

inline std::string get_str(const json& p, const std::string& key,
                           const std::string& def) {
  if (!p.contains(key)) return def;
  require(p[key].is_string(), "parameter '" + key + "' must be a string");
  return p[key].get<std::string>();
}

inline LossProfile loss_profile_from(const json& p, int default_weight) {
  if (p.contains("etas")) {
    require(p["etas"].is_array(), "'etas' must be an array");
    std::vector<double> etas;
    for (const auto& e : p["etas"]) {
      require(e.is_number(), "'etas' entries must be numbers");
      etas.push_back(e.get<double>());
    }
    return LossProfile(std::move(etas));
  }
  const double eta = get_num(p, "eta", 0.01);
  const int weight =
      static_cast<int>(get_num(p, "weight", default_weight));
  return LossProfile::uniform(weight, eta);
}

inline CheckBasis basis_from(const json& p) {
  const std::string b = get_str(p, "basis", "Z");
  if (b == "Z" || b == "z") return CheckBasis::Z;
  if (b == "X" || b == "x") return CheckBasis::X;
  throw contract_error("basis must be Z or X");
}

inline PureState named_input_state(const std::string& name, int n) {
  if (name == "plus") return PureState::plus_state(n);
  if (name == "xi_plus") {
    // Uniform superposition of the even-parity basis states.
    Vector v = Vector::Zero(static_cast<Eigen::Index>(dim_of(n)));
    for (std::size_t s = 0; s < dim_of(n); ++s)
      if (index_parity(s) > 0) v(static_cast<Eigen::Index>(s)) = 1.0;
    v /= v.norm();
    return PureState(n, std::move(v));
  }
  if (name == "mixed_parity") {
    Vector v = Vector::Zero(static_cast<Eigen::Index>(dim_of(n)));
    v(0) = v(1) = 1.0 / std::sqrt(2.0);
    return PureState(n, std::move(v));
  }
  // Otherwise a computational bitstring, e.g. "011".
  require(static_cast<int>(name.size()) == n,
          "input state '" + name + "' does not match the check weight");
  std::size_t idx = 0;
  for (char c : name) {
    require(c == '0' || c == '1', "input bitstring must be 0s and 1s");
    idx = (idx << 1) | static_cast<std::size_t>(c - '0');
  }
  return PureState::basis_state(n, idx);
}

}  // namespace detail

// --- serialization ---------------------------------------------------------

inline std::string to_csv(const RunReport& r) {
  std::ostringstream os;
  os << "# schema=" << r.schema << "\n";
  os << "# version=" << r.version << "\n";
  os << "# seed=" << r.seed << "\n";
  os << "# inputs=" << r.inputs.dump() << "\n";
  for (const auto& n : r.notes) os << "# note=" << n << "\n";
  for (std::size_t c = 0; c < r.columns.size(); ++c)
    os << (c ? "," : "") << r.columns[c];
  os << "\n";
  for (const auto& row : r.rows) {
    for (std::size_t c = 0; c < row.size(); ++c)
      os << (c ? "," : "") << detail::fmt17(row[c]);
    os << "\n";
  }
  return os.str();
}

inline std::string to_json_text(const RunReport& r) {
  json j;
  j["schema"] = r.schema;
  j["version"] = r.version;
  j["seed"] = r.seed;
  j["inputs"] = r.inputs;
  j["columns"] = r.columns;
  j["rows"] = r.rows;
  j["notes"] = r.notes;
  j["ok"] = r.ok;
  return j.dump(2) + "\n";
}

// --- subcommand handlers ----------------------------------------------------

namespace handlers {

inline RunReport tradeoff(const ScenarioConfig& cfg) {
  const json& p = cfg.params;
  const double lo = detail::get_num(p, "alpha_from", 0.2);
  const double hi = detail::get_num(p, "alpha_to", 3.0);
  const int steps = static_cast<int>(detail::get_num(p, "alpha_steps", 57));
  require(steps >= 2 && hi > lo && lo >= 0, "tradeoff: bad alpha sweep");
  const LossProfile losses = detail::loss_profile_from(p, 3);

  RunReport r;
  r.schema = "flycat.tradeoff.v1";
  r.columns = {"alpha", "pM", "p1", "p2", "ptot"};
  r.inputs = {{"alpha_from", lo},
              {"alpha_to", hi},
              {"alpha_steps", steps},
              {"etas", losses.etas()}};
  std::size_t min_i = 0;
  for (int i = 0; i < steps; ++i) {
    const double a = lo + (hi - lo) * i / (steps - 1);
    const ErrorBudget b = error_budget(a, losses);
    r.rows.push_back({a, b.pM, b.p1, b.p2, b.ptot});
    if (r.rows[i][4] < r.rows[min_i][4]) min_i = i;
  }
  const bool interior = min_i != 0 && min_i + 1 != r.rows.size();
  r.notes.push_back("minimum: alpha=" + detail::fmt17(r.rows[min_i][0]) +
                    " ptot=" + detail::fmt17(r.rows[min_i][4]) +
                    (interior ? " (interior)" : " (at sweep edge)"));
  return r;
}

inline RunReport optimize_alpha_cmd(const ScenarioConfig& cfg) {
  const json& p = cfg.params;
  const LossProfile losses = detail::loss_profile_from(p, 3);
  const double lo = detail::get_num(p, "window_lo", 0.05);
  const double hi = detail::get_num(p, "window_hi", 4.0);
  const AlphaOptimum opt = optimize_alpha(losses, lo, hi);
  const ErrorBudget b = error_budget(opt.alpha_star, losses);
  RunReport r;
  r.schema = "flycat.optimize_alpha.v1";
  r.columns = {"alpha_star", "ptot_star", "pM", "p1", "p2"};
  r.inputs = {{"etas", losses.etas()}, {"window_lo", lo}, {"window_hi", hi}};
  r.rows.push_back({opt.alpha_star, opt.ptot_star, b.pM, b.p1, b.p2});
  return r;
}

inline RunReport check(const ScenarioConfig& cfg) {
  const json& p = cfg.params;
  const double alpha = detail::get_num(p, "alpha", 1.0);
  const LossProfile losses = detail::loss_profile_from(p, 3);
  const ParityCheckConfig check_cfg(alpha, losses, detail::basis_from(p));
  const std::string mode = detail::get_str(p, "mode", "exact");
  const std::string input_name = detail::get_str(p, "input", "xi_plus");
  const PureState input =
      detail::named_input_state(input_name, check_cfg.weight());
  const ErrorBudget budget = error_budget(alpha, losses);

  RunReport r;
  r.inputs = {{"alpha", alpha},
              {"etas", losses.etas()},
              {"basis", check_cfg.basis == CheckBasis::Z ? "Z" : "X"},
              {"mode", mode},
              {"input", input_name}};
  r.notes.push_back("budget: pM=" + detail::fmt17(budget.pM) +
                    " p1=" + detail::fmt17(budget.p1) +
                    " p2=" + detail::fmt17(budget.p2) +
                    " ptot=" + detail::fmt17(budget.ptot));
  if (mode == "exact") {
    const PreMeasurementState pre =
        run_check_exact(DensityMatrix::pure(input), check_cfg);
    r.schema = "flycat.check.exact.v1";
    r.columns = {"block_row_parity", "block_col_parity", "row", "col", "re",
                 "im"};
    r.notes.push_back("abar=" + detail::fmt17(pre.abar()));
    for (int a = 0; a < 2; ++a)
      for (int b = 0; b < 2; ++b)
        for (Eigen::Index row = 0; row < pre.block(a, b).rows(); ++row)
          for (Eigen::Index col = 0; col < pre.block(a, b).cols(); ++col) {
            const cx v = pre.block(a, b)(row, col);
            if (std::abs(v) < 1e-15) continue;
            r.rows.push_back({a == 0 ? 1.0 : -1.0, b == 0 ? 1.0 : -1.0,
                              static_cast<double>(row),
                              static_cast<double>(col), v.real(), v.imag()});
          }
    return r;
  }
  if (mode == "sampled") {
    require(cfg.shots >= 1, "check: shots must be >= 1");
    TrajectoryConfig tcfg{cfg.seed, cfg.shots, {check_cfg}};
    std::size_t plus = 0, e1 = 0, e2 = 0;
    std::array<std::array<std::size_t, 2>, 2> joint{};
    for (std::size_t shot = 0; shot < cfg.shots; ++shot) {
      const TrajectoryRecord rec = run_trajectory(input, tcfg, shot);
      if (rec.inferred_parities[0] > 0) ++plus;
      const PauliString& err = rec.applied_errors[0];
      const bool e1_fired = err.op(1) != PauliOp::I;
      const bool last_fired =
          err.op(check_cfg.weight() - 1) != PauliOp::I;
      if (e1_fired) ++e1;
      if (check_cfg.weight() == 3 && (last_fired != e1_fired)) ++e2;
      ++joint[rec.inferred_parities[0] > 0 ? 0 : 1]
             [rec.true_parities[0] > 0 ? 0 : 1];
    }
    const double n = static_cast<double>(cfg.shots);
    r.schema = "flycat.check.sampled.v1";
    r.columns = {"shots",    "inferred_plus_fraction",
                 "joint_pp", "joint_pm",
                 "joint_mp", "joint_mm",
                 "e1_rate",  "e2_rate"};
    r.rows.push_back({n, plus / n, joint[0][0] / n, joint[0][1] / n,
                      joint[1][0] / n, joint[1][1] / n, e1 / n, e2 / n});
    return r;
  }
  throw contract_error("check: mode must be exact or sampled");
}

inline RunReport ghz(const ScenarioConfig& cfg) {
  const json& p = cfg.params;
  const double alpha = detail::get_num(p, "alpha", 1.0);
  const double eta12 = detail::get_num(p, "eta12", 0.01);
  const double eta23 = detail::get_num(p, "eta23", 0.01);
  const std::string mode = detail::get_str(p, "mode", "exact");
  RunReport r;
  r.schema = "flycat.ghz.v1";
  r.columns = {"alpha", "eta12",       "eta23",
               "fidelity", "fidelity_se", "predicted_error_paper"};
  r.inputs = {
      {"alpha", alpha}, {"eta12", eta12}, {"eta23", eta23}, {"mode", mode}};
  if (mode == "exact") {
    const GhzExactResult res = prepare_ghz_exact(alpha, eta12, eta23);
    r.rows.push_back(
        {alpha, eta12, eta23, res.fidelity, 0.0, res.model.p_paper});
  } else if (mode == "sampled") {
    RandomSource master(cfg.seed);
    const PureState target = ghz_target();
    double sum = 0.0, sumsq = 0.0;
    for (std::size_t k = 0; k < cfg.shots; ++k) {
      RandomSource rng = master.stream(k);
      const double f =
          fidelity(prepare_ghz_sampled(alpha, eta12, eta23, rng).state,
                   target);
      sum += f;
      sumsq += f * f;
    }
    const double n = static_cast<double>(cfg.shots);
    const double mean = sum / n;
    const double se =
        std::sqrt(std::max(sumsq / n - mean * mean, 0.0) / n);
    r.rows.push_back({alpha, eta12, eta23, mean, se,
                      ghz_error_model(alpha, eta12, eta23).p_paper});
  } else {
    throw contract_error("ghz: mode must be exact or sampled");
  }
  return r;
}

inline RunReport tetra_prepare(const ScenarioConfig& cfg) {
  const json& p = cfg.params;
  const double alpha = detail::get_num(p, "alpha", 1.0);
  const double eta = detail::get_num(p, "eta", 0.01);
  const std::string mode = detail::get_str(p, "mode", "exact");
  const auto cfgs = tetra_uniform_configs(alpha, eta);
  const ErrorBudget zb = error_budget(alpha, cfgs[3].losses);
  const double f_model = 0.5 - witness_noisy_model(zb.pM, zb.p1, zb.p2);

  RunReport r;
  r.schema = "flycat.tetra_prepare.v1";
  r.columns = {"alpha", "eta", "fidelity", "fidelity_se", "witness",
               "p1",    "p2",  "pM",       "f_model"};
  r.inputs = {{"alpha", alpha}, {"eta", eta}, {"mode", mode}};
  if (mode == "exact") {
    const TetraExactResult res = tetra_prepare_exact(cfgs);
    const WitnessEstimate w = witness_expectation(res.state);
    r.rows.push_back({alpha, eta, res.fidelity, 0.0, w.value, zb.p1, zb.p2,
                      zb.pM, f_model});
  } else if (mode == "sampled") {
    RandomSource master(cfg.seed);
    const PureState& target = tetra_target();
    double sum = 0.0, sumsq = 0.0;
    Matrix mean_state = Matrix::Zero(64, 64);
    for (std::size_t k = 0; k < cfg.shots; ++k) {
      RandomSource rng = master.stream(k);
      const TetraSampleResult res = tetra_prepare_sampled(cfgs, rng);
      const double f = fidelity(res.state, target);
      sum += f;
      sumsq += f * f;
      mean_state +=
          res.state.amplitudes() * res.state.amplitudes().adjoint();
    }
    const double n = static_cast<double>(cfg.shots);
    mean_state /= n;
    const double mean = sum / n;
    const double se =
        std::sqrt(std::max(sumsq / n - mean * mean, 0.0) / n);
    const WitnessEstimate w =
        witness_expectation(DensityMatrix(6, std::move(mean_state)));
    r.rows.push_back(
        {alpha, eta, mean, se, w.value, zb.p1, zb.p2, zb.pM, f_model});
  } else {
    throw contract_error("tetra-prepare: mode must be exact or sampled");
  }
  return r;
}

inline RunReport tetra_decode_cmd(const ScenarioConfig& cfg) {
  const json& p = cfg.params;
  require(p.contains("sigma") && p["sigma"].is_array() &&
              p["sigma"].size() == 6,
          "tetra-decode: 'sigma' must be an array of six +-1 entries");
  TetraSyndrome syn;
  for (int i = 0; i < 6; ++i) {
    const int s = p["sigma"][i].get<int>();
    require(s == 1 || s == -1, "tetra-decode: sigma entries must be +-1");
    syn.sigma[i] = s;
  }
  const PauliString cx_corr = tetra_decode(syn, PauliOp::X);
  const PauliString cz_corr = tetra_decode(syn, PauliOp::Z);
  RunReport r;
  r.schema = "flycat.tetra_decode.v1";
  r.columns = {"qubit", "x_correction", "z_correction"};
  r.inputs = {{"sigma", syn.sigma}};
  for (int q = 0; q < 6; ++q)
    r.rows.push_back({static_cast<double>(q),
                      cx_corr.op(q) == PauliOp::X ? 1.0 : 0.0,
                      cz_corr.op(q) == PauliOp::Z ? 1.0 : 0.0});
  r.notes.push_back("x_correction=" + cx_corr.label() +
                    " z_correction=" + cz_corr.label());
  return r;
}

inline RunReport witness_cmd(const ScenarioConfig& cfg) {
  const json& p = cfg.params;
  const double lo = detail::get_num(p, "alpha_from", 0.4);
  const double hi = detail::get_num(p, "alpha_to", 2.0);
  const int steps = static_cast<int>(detail::get_num(p, "alpha_steps", 17));
  require(steps >= 1 && hi >= lo, "witness: bad alpha sweep");
  std::vector<double> etas;
  if (p.contains("etas")) {
    for (const auto& e : p["etas"]) etas.push_back(e.get<double>());
  } else {
    etas.push_back(detail::get_num(p, "eta", 0.01));
  }
  RunReport r;
  r.schema = "flycat.witness.v1";
  r.columns = {"alpha", "eta", "F_model", "F_simulated"};
  r.inputs = {{"alpha_from", lo},
              {"alpha_to", hi},
              {"alpha_steps", steps},
              {"etas", etas}};
  for (const double eta : etas) {
    for (int i = 0; i < steps; ++i) {
      const double a =
          steps == 1 ? lo : lo + (hi - lo) * i / (steps - 1);
      const auto cfgs = tetra_uniform_configs(a, eta);
      const ErrorBudget zb = error_budget(a, cfgs[3].losses);
      const double f_model =
          0.5 - witness_noisy_model(zb.pM, zb.p1, zb.p2);
      const double f_sim = tetra_prepare_exact(cfgs).fidelity;
      r.rows.push_back({a, eta, f_model, f_sim});
    }
  }
  return r;
}

inline RunReport teleport_cmd(const ScenarioConfig& cfg) {
  const json& p = cfg.params;
  const bool cooperate = p.contains("cooperate") && p["cooperate"].is_boolean()
                             ? p["cooperate"].get<bool>()
                             : false;
  RunReport r;
  r.schema = "flycat.teleport.v1";
  r.columns = {"samples", "mean_fidelity", "standard_error",
               "control_power"};
  r.inputs = {{"samples", cfg.shots}, {"cooperate", cooperate}};
  if (!cooperate) {
    const HaarAverageResult res =
        average_fidelity(cfg.shots, RandomSource(cfg.seed), cfg.threads);
    r.rows.push_back({static_cast<double>(res.samples), res.mean_fidelity,
                      res.standard_error, res.control_power});
  } else {
    RandomSource master(cfg.seed);
    double sum = 0.0, sumsq = 0.0;
    for (std::size_t k = 0; k < cfg.shots; ++k) {
      RandomSource rng = master.stream(k);
      const TwoQubitMessage msg = TwoQubitMessage::haar(rng);
      const double f = run_teleport(msg, true, rng).fidelity;
      sum += f;
      sumsq += f * f;
    }
    const double n = static_cast<double>(cfg.shots);
    const double mean = sum / n;
    r.rows.push_back(
        {n, mean,
         std::sqrt(std::max(sumsq / n - mean * mean, 0.0) / n),
         1.0 - mean});
  }
  return r;
}

inline RunReport feasibility_cmd(const ScenarioConfig& cfg) {
  const json& p = cfg.params;
  const CqedParams params = CqedParams::from_linear(
      detail::get_num(p, "omega_c_ghz", 5.0),
      detail::require_num(p, "chi_mhz"),
      detail::require_num(p, "kappa_int_mhz"),
      detail::require_num(p, "tau_ns"), detail::get_num(p, "t1_us", 1e6),
      detail::require_num(p, "t2star_us"), detail::get_num(p, "alpha", 1.0),
      detail::get_num(p, "kappa0_mhz", 0.0));
  const InfidelityBudget b = infidelity_budget(params);
  const TetraFidelityBound bound = tetra_fidelity_bound(b.eps_total);
  RunReport r;
  r.schema = "flycat.feasibility.v1";
  r.columns = {"eps_bandwidth_closed", "eps_internal_closed",
               "eps_reflect_closed",   "eps_reflect_numeric",
               "eps_qubit",            "eps_total",
               "f_max_bound"};
  r.inputs = p;
  r.rows.push_back({b.eps_bandwidth_closed, b.eps_internal_closed,
                    b.eps_reflect_closed, b.eps_reflect_numeric, b.eps_qubit,
                    b.eps_total, bound.f_max});
  const double ratio = params.kappa_int / std::abs(params.chi);
  if (ratio > 0.1)
    r.notes.push_back(
        "internal-loss closed-form term uses a leading-order expansion in "
        "kappa_int/|chi|; here kappa_int/|chi|=" +
        detail::fmt17(ratio) +
        " > 0.1, so the numeric column is the trustworthy one");
  if (b.decoherence_warning)
    r.notes.push_back("tau is not small against min(T1, T2*): the "
                      "decoherence estimate tau/T2* is marginal");
  if (bound.saturated)
    r.notes.push_back("eps_total exceeds 1/18: no useful preparation "
                      "fidelity bound");
  return r;
}

inline RunReport loss_budget_cmd(const ScenarioConfig& cfg) {
  const json& p = cfg.params;
  double db_per_km;
  std::string material = detail::get_str(p, "material", "");
  if (!material.empty())
    db_per_km = cable_attenuation_db_per_km(material);
  else
    db_per_km = detail::require_num(p, "db_per_km");
  const double length = detail::get_num(p, "length_km", 1.0);
  const int circulators =
      static_cast<int>(detail::get_num(p, "circulators", 0));
  const double circ_loss = detail::get_num(p, "circulator_loss", 0.13);
  const LossBudget b =
      loss_budget(db_per_km, length, circulators, circ_loss);
  RunReport r;
  r.schema = "flycat.loss_budget.v1";
  r.columns = {"eta_trans", "eta_circ", "eta", "saturated"};
  r.inputs = {{"db_per_km", db_per_km},
              {"length_km", length},
              {"circulators", circulators},
              {"circulator_loss", circ_loss}};
  if (!material.empty()) r.inputs["material"] = material;
  r.rows.push_back(
      {b.eta_trans, b.eta_circ, b.eta, b.saturated ? 1.0 : 0.0});
  return r;
}

}  // namespace handlers

// Full invariant suite at reduced statistics; the release gate.
inline RunReport selfcheck(std::uint64_t seed, int threads = 1) {
  RunReport r;
  r.schema = "flycat.selfcheck.v1";
  r.columns = {"suite", "passed", "metric"};
  r.seed = seed;
  r.inputs = {{"seed", seed}};
  auto add = [&](int suite, bool passed, double metric,
                 const std::string& name) {
    r.rows.push_back({static_cast<double>(suite), passed ? 1.0 : 0.0,
                      metric});
    r.notes.push_back("suite " + std::to_string(suite) + " = " + name +
                      (passed ? " [pass]" : " [FAIL]"));
    r.ok = r.ok && passed;
  };

  // 1: decoder exhaustion over all 4096 combined error patterns.
  add(1, tetra_decoder_exhaustive(kTetraSyndromeTable), 4096,
      "decoder_exhaustion");

  // 2: dephasing decomposition reproduces the exact diagonal blocks.
  {
    RandomSource rng(seed ^ 0x5eedf00dull);
    double worst = 0.0;
    for (int trial = 0; trial < 20; ++trial) {
      const double alpha = 0.2 + 1.8 * rng.uniform();
      std::vector<double> etas = {0.1 * rng.uniform(), 0.1 * rng.uniform(),
                                  0.1 * rng.uniform()};
      const ParityCheckConfig ccfg(
          alpha, LossProfile(etas),
          trial % 2 ? CheckBasis::X : CheckBasis::Z);
      const DensityMatrix rho = DensityMatrix::pure(haar_state(3, rng));
      const PreMeasurementState pre = run_check_exact(rho, ccfg);
      Matrix composed = rho.entries();
      for (const DephasingTerm& t : dephasing_decomposition(ccfg)) {
        if (t.error.is_identity()) continue;
        const Matrix e = t.error.to_matrix();
        composed = (1.0 - t.probability) * composed +
                   t.probability * e * composed * e.adjoint();
      }
      // Compare within the parity sectors of the check basis.
      const Matrix& h = hadamard_all_matrix(3);
      const Matrix composed_f = ccfg.basis == CheckBasis::X
                                    ? Matrix(h * composed * h)
                                    : composed;
      for (int a = 0; a < 2; ++a) {
        const Matrix block_f =
            ccfg.basis == CheckBasis::X
                ? Matrix(h * pre.block(a, a) * h)
                : pre.block(a, a);
        for (std::size_t row = 0; row < 8; ++row)
          for (std::size_t col = 0; col < 8; ++col) {
            if (detail::sector_of(row) != a || detail::sector_of(col) != a)
              continue;
            worst = std::max(worst, std::abs(block_f(row, col) -
                                             composed_f(row, col)));
          }
      }
    }
    add(2, worst < 1e-12, worst, "channel_equivalence");
  }

  // 3: Monte Carlo vs exact engine at reduced shots.
  {
    const ParityCheckConfig ccfg(1.0, LossProfile::uniform(3, 0.02));
    const McComparisonReport rep = mc_vs_exact(
        ccfg, detail::named_input_state("xi_plus", 3), 10000, seed, threads);
    add(3, !rep.failed_5sigma, rep.worst_sigma(), "mc_vs_exact");
  }

  // 4: witness endpoints.
  {
    const double w_t =
        witness_expectation(DensityMatrix::pure(tetra_target())).value;
    const double w_mix =
        witness_expectation(DensityMatrix::maximally_mixed(6)).value;
    const double err =
        std::max(std::abs(w_t + 0.5), std::abs(w_mix - 1.25));
    add(4, err < 1e-9, err, "witness_endpoints");
  }

  // 5: cooperative teleportation hits unit fidelity on every branch.
  {
    RandomSource rng(seed ^ 0x7e1e907ull);
    double worst = 1.0, prob_sum = 0.0;
    const TwoQubitMessage msg = TwoQubitMessage::haar(rng);
    for (int a1 = 0; a1 < 4; ++a1)
      for (int a2 = 0; a2 < 4; ++a2)
        for (int zb = 0; zb < 2; ++zb)
          for (int xs : {+1, -1}) {
            const auto [prob, out] = teleport_branch(
                msg, static_cast<BellLabel>(a1), static_cast<BellLabel>(a2),
                std::make_pair(zb, xs));
            prob_sum += prob;
            if (prob > 0) worst = std::min(worst, out.fidelity);
          }
    add(5, worst > 1.0 - 1e-9 && std::abs(prob_sum - 1.0) < 1e-9, worst,
        "teleport_cooperative");
  }
  return r;
}

inline RunReport run_scenario(const ScenarioConfig& cfg) {
  const auto start = std::chrono::steady_clock::now();
  RunReport r;
  if (cfg.command == "tradeoff")
    r = handlers::tradeoff(cfg);
  else if (cfg.command == "optimize-alpha")
    r = handlers::optimize_alpha_cmd(cfg);
  else if (cfg.command == "check")
    r = handlers::check(cfg);
  else if (cfg.command == "ghz")
    r = handlers::ghz(cfg);
  else if (cfg.command == "tetra-prepare")
    r = handlers::tetra_prepare(cfg);
  else if (cfg.command == "tetra-decode")
    r = handlers::tetra_decode_cmd(cfg);
  else if (cfg.command == "witness")
    r = handlers::witness_cmd(cfg);
  else if (cfg.command == "teleport")
    r = handlers::teleport_cmd(cfg);
  else if (cfg.command == "feasibility")
    r = handlers::feasibility_cmd(cfg);
  else if (cfg.command == "loss-budget")
    r = handlers::loss_budget_cmd(cfg);
  else if (cfg.command == "selfcheck")
    r = selfcheck(cfg.seed, cfg.threads);
  else
    throw contract_error("unknown command '" + cfg.command + "'");
  r.seed = cfg.seed;
  r.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
          .count();
  return r;
}

}  // namespace flycat
