// zeno-scissors: staged-cascade vacuum truncation experiments.
// Subcommands: fig2, sweep, verify, truncate. Exit codes: 0 ok,
// 1 check/run failure, 2 usage or config error.

#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "zeno/experiment.hpp"

namespace {

struct CliState {
  zeno::ExperimentConfig cfg;
  std::string n_range_text;
  std::string config_path;
  bool has_probe_option = false;
  bool has_sweep_options = false;
  double kappa_skew = 0.0;
};

void add_common_options(CLI::App* sub, CliState& st,
                        const std::string& range_default) {
  st.n_range_text = range_default;
  st.has_sweep_options = true;
  sub->add_option("--n", st.cfg.n, "Target photon number of the signal mode")
      ->capture_default_str();
  sub->add_option("--kappa", st.cfg.kappa,
                  "Cross-phase per photon pair, radians")
      ->capture_default_str();
  sub->add_option("--N-range", st.n_range_text,
                  "Stage counts to sample, A:B[:S] inclusive")
      ->capture_default_str();
  sub->add_option("--a-cutoff", st.cfg.a_cutoff,
                  "Signal-mode dimension (0 picks 3n+2)")
      ->capture_default_str();
  sub->add_option("--b-cutoff", st.cfg.b_cutoff, "Probe-mode dimension")
      ->capture_default_str();
  sub->add_option("--out", st.cfg.out_path,
                  "Write output to this file instead of stdout");
  sub->add_option("--config", st.config_path,
                  "Read defaults from a key=value file (flags win)");
}

void add_probe_option(CLI::App* sub, CliState& st) {
  st.has_probe_option = true;
  sub->add_option(
         "--probe", st.cfg.probe,
         "Probe state: fock:M | coherent:ALPHA | squeezed:EPS,ALPHA | "
         "custom:@PATH")
      ->capture_default_str();
}

std::string trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r");
  if (begin == std::string::npos) return {};
  const auto end = s.find_last_not_of(" \t\r");
  return s.substr(begin, end - begin + 1);
}

int parse_config_int(const std::string& value, const std::string& key,
                     int lineno) {
  std::size_t used = 0;
  int out = 0;
  try {
    out = std::stoi(value, &used);
  } catch (const std::exception&) {
    used = std::string::npos;
  }
  if (used != value.size())
    throw std::invalid_argument("config line " + std::to_string(lineno) +
                                ": key '" + key + "' needs an integer, got '" +
                                value + "'");
  return out;
}

double parse_config_real(const std::string& value, const std::string& key,
                         int lineno) {
  std::size_t used = 0;
  double out = 0.0;
  try {
    out = std::stod(value, &used);
  } catch (const std::exception&) {
    used = std::string::npos;
  }
  if (used != value.size())
    throw std::invalid_argument("config line " + std::to_string(lineno) +
                                ": key '" + key + "' needs a number, got '" +
                                value + "'");
  return out;
}

// key=value file with '#' comment lines; a key is applied only when the
// matching flag was absent on the command line.
void apply_config_file(const CLI::App& sub, CliState& st) {
  std::ifstream in(st.config_path);
  if (!in)
    throw std::invalid_argument("cannot open config file '" + st.config_path +
                                "'");
  const auto flag_given = [&](const char* name) {
    return sub.count(name) > 0;
  };
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string body = trim(line);
    if (body.empty() || body[0] == '#' || body[0] == ';') continue;
    const auto eq = body.find('=');
    if (eq == std::string::npos)
      throw std::invalid_argument("config line " + std::to_string(lineno) +
                                  ": expected key=value, got '" + body + "'");
    const std::string key = trim(body.substr(0, eq));
    std::string value = trim(body.substr(eq + 1));
    if (value.size() >= 2 && (value.front() == '"' || value.front() == '\'') &&
        value.back() == value.front())
      value = value.substr(1, value.size() - 2);
    if (key == "out") {
      if (!flag_given("--out")) st.cfg.out_path = value;
    } else if (st.has_sweep_options && key == "n") {
      if (!flag_given("--n")) st.cfg.n = parse_config_int(value, key, lineno);
    } else if (st.has_sweep_options && key == "kappa") {
      if (!flag_given("--kappa"))
        st.cfg.kappa = parse_config_real(value, key, lineno);
    } else if (st.has_probe_option && key == "probe") {
      if (!flag_given("--probe")) st.cfg.probe = value;
    } else if (st.has_sweep_options && key == "N-range") {
      if (!flag_given("--N-range")) st.n_range_text = value;
    } else if (st.has_sweep_options && key == "a-cutoff") {
      if (!flag_given("--a-cutoff"))
        st.cfg.a_cutoff = parse_config_int(value, key, lineno);
    } else if (st.has_sweep_options && key == "b-cutoff") {
      if (!flag_given("--b-cutoff"))
        st.cfg.b_cutoff = parse_config_int(value, key, lineno);
    } else {
      throw std::invalid_argument("config line " + std::to_string(lineno) +
                                  ": unknown key '" + key +
                                  "' for this mode");
    }
  }
}

// Streams to --out when set, else stdout.
template <typename Fn>
int with_output(const std::string& path, Fn&& fn) {
  if (path.empty()) {
    fn(std::cout);
    return 0;
  }
  std::ofstream file(path);
  if (!file)
    throw std::invalid_argument("cannot open output path '" + path + "'");
  fn(file);
  if (!file)
    throw std::invalid_argument("write failed for output path '" + path + "'");
  return 0;
}

void warn_custom_norm(const zeno::ExperimentConfig& cfg) {
  const zeno::ProbeSpec spec = zeno::parse_probe_spec(cfg.probe, cfg.b_cutoff);
  const double dev = zeno::input_norm_deviation(spec);
  if (dev > 1e-6)
    std::cerr << "warning: probe '" << spec.label()
              << "' coefficients renormalized (input norm off by " << dev
              << ")\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Staged-cascade vacuum truncation toolkit"};
  app.require_subcommand(1);

  CliState fig2_state, sweep_state, verify_state, trunc_state;

  CLI::App* fig2 = app.add_subcommand(
      "fig2", "Emission curves for the three unit-mean benchmark probes");
  add_common_options(fig2, fig2_state, "1:200:1");

  CLI::App* sweep =
      app.add_subcommand("sweep", "Emission sweep over N for one probe");
  add_common_options(sweep, sweep_state, "1:200:1");
  add_probe_option(sweep, sweep_state);

  CLI::App* verify = app.add_subcommand(
      "verify", "Cross-path equivalence and conservation checks");
  verify->add_option("--out", verify_state.cfg.out_path,
                     "Write the report to this file instead of stdout");
  verify->add_option("--config", verify_state.config_path,
                     "Read defaults from a key=value file (flags win)");
  verify
      ->add_option("--inject-kappa-skew", verify_state.kappa_skew,
                   "Offset kappa on the fast path only (negative control)")
      ->group("");

  CLI::App* trunc = app.add_subcommand(
      "truncate", "Vacuum-truncation fidelity vs stage count");
  add_common_options(trunc, trunc_state, "25:800:25");
  add_probe_option(trunc, trunc_state);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (fig2->parsed()) {
      if (!fig2_state.config_path.empty())
        apply_config_file(*fig2, fig2_state);
      fig2_state.cfg.n_range = zeno::parse_n_range(fig2_state.n_range_text);
      return with_output(fig2_state.cfg.out_path, [&](std::ostream& out) {
        zeno::write_fig2_csv(fig2_state.cfg, out);
      });
    }
    if (sweep->parsed()) {
      if (!sweep_state.config_path.empty())
        apply_config_file(*sweep, sweep_state);
      sweep_state.cfg.n_range = zeno::parse_n_range(sweep_state.n_range_text);
      warn_custom_norm(sweep_state.cfg);
      return with_output(sweep_state.cfg.out_path, [&](std::ostream& out) {
        zeno::write_sweep_csv(sweep_state.cfg, out);
      });
    }
    if (trunc->parsed()) {
      if (!trunc_state.config_path.empty())
        apply_config_file(*trunc, trunc_state);
      trunc_state.cfg.n_range = zeno::parse_n_range(trunc_state.n_range_text);
      warn_custom_norm(trunc_state.cfg);
      return with_output(trunc_state.cfg.out_path, [&](std::ostream& out) {
        zeno::write_truncate_csv(trunc_state.cfg, out);
      });
    }
    // verify
    if (!verify_state.config_path.empty())
      apply_config_file(*verify, verify_state);
    std::vector<zeno::VerifyCheck> checks;
    try {
      checks = zeno::verify_checks({verify_state.kappa_skew});
    } catch (const std::exception& e) {
      std::cerr << "verify: error: " << e.what() << "\n";
      return 1;
    }
    with_output(verify_state.cfg.out_path, [&](std::ostream& out) {
      zeno::write_verify_report(checks, out);
    });
    return zeno::all_pass(checks) ? 0 : 1;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
