#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <iomanip>
#include <limits>
#include <mutex>
#include <optional>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "zeno/analysis.hpp"
#include "zeno/cascade.hpp"
#include "zeno/kernel.hpp"
#include "zeno/probe.hpp"

namespace zeno {

inline constexpr const char* kArtifactVersion = "0.1.0";

// Inclusive stage-count range A:B[:S].
struct NRange {
  int start = 1;
  int stop = 200;
  int step = 1;

  void validate() const {
    if (start < 1 || step < 1 || stop < start)
      throw std::invalid_argument(
          "N range: need 1 <= start <= stop and step >= 1, got " + text());
  }

  std::vector<int> values() const {
    validate();
    std::vector<int> out;
    for (int v = start; v <= stop; v += step) out.push_back(v);
    return out;
  }

  std::string text() const {
    return std::to_string(start) + ":" + std::to_string(stop) + ":" +
           std::to_string(step);
  }
};

inline NRange parse_n_range(const std::string& s) {
  const auto bad = [&]() -> std::invalid_argument {
    return std::invalid_argument("N range '" + s +
                                 "': expected A:B[:S] with integers");
  };
  std::vector<int> parts;
  std::size_t pos = 0;
  while (pos <= s.size()) {
    const auto colon = s.find(':', pos);
    const std::string tok =
        s.substr(pos, colon == std::string::npos ? colon : colon - pos);
    std::size_t used = 0;
    int value = 0;
    try {
      value = std::stoi(tok, &used);
    } catch (const std::exception&) {
      throw bad();
    }
    if (used != tok.size()) throw bad();
    parts.push_back(value);
    if (colon == std::string::npos) break;
    pos = colon + 1;
  }
  if (parts.size() < 2 || parts.size() > 3) throw bad();
  NRange r{parts[0], parts[1], parts.size() == 3 ? parts[2] : 1};
  r.validate();
  return r;
}

struct ExperimentConfig {
  int n = 2;
  double kappa = 0.2;
  std::string probe = "coherent:1.0";
  NRange n_range{1, 200, 1};
  int a_cutoff = 0;  // 0 selects the default headroom for the signal mode
  int b_cutoff = kDefaultProbeCutoff;
  std::string out_path;

  int signal_cutoff() const {
    return a_cutoff > 0 ? a_cutoff : default_signal_cutoff(n);
  }

  void validate() const {
    if (n < 1) throw std::invalid_argument("config: n must be >= 1");
    if (!std::isfinite(kappa))
      throw std::invalid_argument("config: kappa must be finite");
    n_range.validate();
    if (a_cutoff != 0 && a_cutoff < 2 * n + 2)
      throw std::invalid_argument("config: a-cutoff must be at least 2n+2 = " +
                                  std::to_string(2 * n + 2));
    if (b_cutoff < 2)
      throw std::invalid_argument("config: b-cutoff must be at least 2");
  }
};

namespace detail {

inline std::string fmt_real(double x) {
  char buf[48];
  std::snprintf(buf, sizeof(buf), "%.12g", x);
  return buf;
}

inline std::string fmt_dev(double x) {
  char buf[48];
  std::snprintf(buf, sizeof(buf), "%.3e", x);
  return buf;
}

// Quotes a CSV cell only when it needs it (commas in probe labels).
inline std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    out += c;
    if (c == '"') out += '"';
  }
  out += '"';
  return out;
}

// Runs fn(0..count-1) on a small worker pool; rethrows the first failure.
template <typename Fn>
void parallel_index(std::size_t count, Fn&& fn) {
  const unsigned hw = std::thread::hardware_concurrency();
  const std::size_t workers = std::min<std::size_t>(count, hw ? hw : 1);
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::mutex err_mutex;
  std::exception_ptr first_error;
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&]() {
      for (;;) {
        const std::size_t i = next.fetch_add(1);
        if (i >= count) return;
        try {
          fn(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(err_mutex);
          if (!first_error) first_error = std::current_exception();
          next.store(count);
          return;
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (first_error) std::rethrow_exception(first_error);
}

struct RowResult {
  double emission = 0.0;
  double postselect = 0.0;
  std::optional<double> fid;
  bool no_outcome = false;
};

inline RowResult summarize(const CascadeResult& res) {
  return {res.emission_probability, res.postselect_probability,
          res.truncation_fidelity, res.no_outcome};
}

inline void echo_config(std::ostream& out, const char* mode,
                        const ExperimentConfig& cfg) {
  out << "# zeno-scissors " << mode << " v" << kArtifactVersion << "\n";
  out << "# n=" << cfg.n << " kappa=" << fmt_real(cfg.kappa)
      << " a_cutoff=" << cfg.signal_cutoff() << " b_cutoff=" << cfg.b_cutoff
      << " N_range=" << cfg.n_range.text() << "\n";
}

}  // namespace detail

// Emission-probability curves for the three benchmark probes with unit
// mean photon number, one row per (N, probe).
inline void write_fig2_csv(const ExperimentConfig& cfg, std::ostream& out) {
  cfg.validate();
  const std::vector<std::string> labels = {"fock:1", "coherent:1.0",
                                           "squeezed:-0.5,0.853498"};
  std::vector<CVector> probes;
  probes.reserve(labels.size());
  for (const auto& label : labels)
    probes.push_back(build_state(parse_probe_spec(label, cfg.b_cutoff)));
  const std::vector<int> stages = cfg.n_range.values();

  const std::size_t cols = labels.size();
  std::vector<detail::RowResult> rows(stages.size() * cols);
  detail::parallel_index(rows.size(), [&](std::size_t i) {
    const int N = stages[i / cols];
    const CVector& probe = probes[i % cols];
    rows[i] = detail::summarize(
        run_blocks(StageParams::cascade(cfg.n, N, cfg.kappa), probe));
  });

  detail::echo_config(out, "fig2", cfg);
  out << "# probes: " << labels[0] << " " << labels[1] << " " << labels[2]
      << " (mean photon number 1 each)\n";
  out << "N,probe,P_n,P_postselect,fidelity\n";
  for (std::size_t r = 0; r < stages.size(); ++r)
    for (std::size_t c = 0; c < cols; ++c) {
      const detail::RowResult& row = rows[r * cols + c];
      out << stages[r] << "," << detail::csv_field(labels[c]) << ","
          << detail::fmt_real(row.emission) << ","
          << detail::fmt_real(row.postselect) << ","
          << detail::fmt_real(row.fid ? *row.fid
                                      : std::numeric_limits<double>::quiet_NaN())
          << "\n";
    }
}

// Single-probe emission sweep over N.
inline void write_sweep_csv(const ExperimentConfig& cfg, std::ostream& out) {
  cfg.validate();
  const ProbeSpec spec = parse_probe_spec(cfg.probe, cfg.b_cutoff);
  const CVector probe = build_state(spec);
  const std::vector<int> stages = cfg.n_range.values();

  std::vector<detail::RowResult> rows(stages.size());
  detail::parallel_index(rows.size(), [&](std::size_t i) {
    rows[i] = detail::summarize(
        run_blocks(StageParams::cascade(cfg.n, stages[i], cfg.kappa), probe));
  });

  detail::echo_config(out, "sweep", cfg);
  out << "# probe: " << spec.label() << "\n";
  out << "N,probe,P_n,P_postselect,fidelity,no_outcome\n";
  for (std::size_t r = 0; r < stages.size(); ++r) {
    const detail::RowResult& row = rows[r];
    out << stages[r] << "," << detail::csv_field(spec.label()) << ","
        << detail::fmt_real(row.emission) << ","
        << detail::fmt_real(row.postselect) << ","
        << detail::fmt_real(row.fid ? *row.fid
                                    : std::numeric_limits<double>::quiet_NaN())
        << "," << (row.no_outcome ? 1 : 0) << "\n";
  }
}

// Vacuum-truncation quality vs stage count, with the fitted infidelity
// order appended as a comment.
inline void write_truncate_csv(const ExperimentConfig& cfg, std::ostream& out) {
  cfg.validate();
  const ProbeSpec spec = parse_probe_spec(cfg.probe, cfg.b_cutoff);
  const CVector probe = build_state(spec);
  if (strip_vacuum(probe).vacuum_only)
    throw std::invalid_argument(
        "truncate: probe '" + spec.label() +
        "' is pure vacuum, post-selection can never succeed (no outcome)");
  const std::vector<int> stages = cfg.n_range.values();

  std::vector<detail::RowResult> rows(stages.size());
  detail::parallel_index(rows.size(), [&](std::size_t i) {
    rows[i] = detail::summarize(
        run_blocks(StageParams::cascade(cfg.n, stages[i], cfg.kappa), probe));
  });

  detail::echo_config(out, "truncate", cfg);
  out << "# probe: " << spec.label() << "\n";
  out << "N,P_postselect,fidelity,one_minus_F\n";
  std::vector<double> xs, ys;
  for (std::size_t r = 0; r < stages.size(); ++r) {
    const detail::RowResult& row = rows[r];
    const double nan = std::numeric_limits<double>::quiet_NaN();
    const double fid = row.fid ? *row.fid : nan;
    out << stages[r] << "," << detail::fmt_real(row.postselect) << ","
        << detail::fmt_real(fid) << ","
        << detail::fmt_real(row.fid ? 1.0 - *row.fid : nan) << "\n";
    if (row.no_outcome)
      out << "# N=" << stages[r]
          << ": no outcome (post-selection probability below threshold)\n";
    if (row.fid && 1.0 - *row.fid > 0.0) {
      xs.push_back(static_cast<double>(stages[r]));
      ys.push_back(1.0 - *row.fid);
    }
  }
  if (xs.size() >= 2)
    out << "# fit: log-log slope of one_minus_F vs N = "
        << detail::fmt_real(loglog_slope(xs, ys)) << "\n";
  else
    out << "# fit: log-log slope of one_minus_F vs N = nan (fewer than 2 "
           "positive samples)\n";
}

struct VerifyCheck {
  std::string name;
  double max_deviation = 0.0;
  double tolerance = 0.0;
  std::string worst_case;
  bool pass() const { return max_deviation <= tolerance; }
};

struct VerifyOptions {
  // Offsets kappa on the fast path only; nonzero values break the
  // cross-path agreement on purpose (negative control).
  double kappa_skew = 0.0;
};

// Cross-path equivalence and conservation checks over the standing grid.
inline std::vector<VerifyCheck> verify_checks(const VerifyOptions& opt = {}) {
  const std::vector<int> ns = {1, 2, 3};
  const std::vector<int> stages = {1, 2, 4, 8, 16, 32};
  const std::vector<double> kappas = {0.2, 1.0};
  const std::vector<std::string> probe_labels = {"fock:1", "fock:3",
                                                 "coherent:1.0"};
  const int b_cutoff = 24;
  std::vector<CVector> probes;
  for (const auto& label : probe_labels)
    probes.push_back(build_state(parse_probe_spec(label, b_cutoff)));

  VerifyCheck path{"oracle_vs_blocks", 0.0, 1e-9, "-"};
  VerifyCheck unitarity{"propagator_unitarity", 0.0, kUnitarityTol, "-"};
  VerifyCheck norm_cons{"norm_conservation", 0.0, 1e-10, "-"};
  VerifyCheck leakage{"subspace_leakage", 0.0, kLeakageTol, "-"};
  VerifyCheck block_unit{"block_unitarity", 0.0, 1e-12, "-"};
  VerifyCheck closure{"probability_closure", 0.0, 1e-10, "-"};
  VerifyCheck marginal{"probe_marginal_invariance", 0.0, 1e-10, "-"};
  VerifyCheck spectral{"propagator_composition", 0.0, 1e-10, "-"};

  const auto tuple_text = [&](int n, int N, double kappa, std::size_t p) {
    std::ostringstream os;
    os << "n=" << n << " N=" << N << " kappa=" << detail::fmt_real(kappa)
       << " probe=" << probe_labels[p];
    return os.str();
  };
  const auto note = [](VerifyCheck& chk, double dev, const std::string& at) {
    if (dev > chk.max_deviation) {
      chk.max_deviation = dev;
      chk.worst_case = at;
    }
  };

  for (int n : ns) {
    const int a_cutoff = default_signal_cutoff(n);
    const ModeSpace a(a_cutoff);
    const CMatrix h = kh_hamiltonian(n, 1.0, a);
    {
      const CMatrix u1 = hermitian_propagator(h, 0.3);
      const CMatrix u2 = hermitian_propagator(h, 0.4);
      const CMatrix u12 = hermitian_propagator(h, 0.7);
      std::ostringstream os;
      os << "n=" << n << " t=0.3+0.4";
      note(spectral, max_abs(u1 * u2 - u12), os.str());
    }
    for (int N : stages) {
      const CMatrix u = hermitian_propagator(h, std::numbers::pi / (2.0 * N));
      {
        std::ostringstream os;
        os << "pump n=" << n << " N=" << N;
        note(unitarity, unitarity_defect(u), os.str());
      }
      for (double kappa : kappas) {
        for (std::size_t p = 0; p < probes.size(); ++p) {
          const std::string at = tuple_text(n, N, kappa, p);
          const StageParams params = StageParams::cascade(n, N, kappa);
          const OracleRun oracle = run_oracle(params, probes[p], a_cutoff);
          const StageParams skewed =
              StageParams(n, N, kappa + opt.kappa_skew, params.theta);
          const CascadeResult fast = run_blocks(skewed, probes[p]);
          const JointState assembled =
              blocks_joint_state(fast, probes[p], a_cutoff);
          note(path, max_abs(oracle.state.amps - assembled.amps), at);
          note(norm_cons, std::abs(oracle.state.norm() - 1.0), at);
          note(leakage, oracle.max_leakage, at);
          note(closure,
               std::abs(fast.emission_probability +
                        fast.postselect_probability - 1.0),
               at);
          const RVector marg = oracle.state.probe_marginal();
          double md = 0.0;
          for (int m = 0; m < b_cutoff; ++m)
            md = std::max(md, std::abs(marg(m) - std::norm(probes[p](m))));
          note(marginal, md, at);
          for (int m = 0; m < b_cutoff; ++m) {
            const BlockAmplitudes& b = fast.blocks[m];
            std::ostringstream os;
            os << at << " m=" << m;
            note(block_unit,
                 std::abs(std::norm(b.v) + std::norm(b.w) - 1.0), os.str());
          }
        }
      }
    }
  }
  for (double kappa : kappas) {
    const ModeSpace small(8);
    std::ostringstream os;
    os << "kerr kappa=" << detail::fmt_real(kappa);
    note(unitarity, unitarity_defect(kerr_unitary(kappa, small, small)),
         os.str());
  }

  return {path, unitarity, norm_cons, leakage,
          block_unit, closure, marginal, spectral};
}

inline bool all_pass(const std::vector<VerifyCheck>& checks) {
  for (const auto& c : checks)
    if (!c.pass()) return false;
  return true;
}

inline void write_verify_report(const std::vector<VerifyCheck>& checks,
                                std::ostream& out) {
  out << "zeno-scissors verify v" << kArtifactVersion << "\n";
  out << std::left << std::setw(28) << "check" << std::setw(16)
      << "max_deviation" << std::setw(12) << "tolerance" << std::setw(8)
      << "status"
      << "worst_case\n";
  int passed = 0;
  for (const auto& c : checks) {
    out << std::left << std::setw(28) << c.name << std::setw(16)
        << detail::fmt_dev(c.max_deviation) << std::setw(12)
        << detail::fmt_dev(c.tolerance) << std::setw(8)
        << (c.pass() ? "pass" : "FAIL") << c.worst_case << "\n";
    if (c.pass()) ++passed;
  }
  out << "overall: " << (passed == static_cast<int>(checks.size()) ? "pass"
                                                                   : "FAIL")
      << " (" << passed << "/" << checks.size() << ")\n";
}

}  // namespace zeno
