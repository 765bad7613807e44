#pragma once

#include <optional>
#include <stdexcept>
#include <vector>

#include "zeno/fock.hpp"
#include "zeno/kernel.hpp"
#include "zeno/probe.hpp"

namespace zeno {

// Population allowed outside the {|0>, |n>} signal subspace before the
// full-space propagation is considered broken.
inline constexpr double kLeakageTol = 1e-9;
// Below this post-selection probability there is no conditional state.
inline constexpr double kNoOutcomeTol = 1e-12;

// Headroom above 2n+2 so truncation artifacts stay far from the subspace.
inline int default_signal_cutoff(int n) { return 3 * n + 2; }

struct OracleRun {
  JointState state;
  double max_leakage;
};

// Reference evolution with nothing reduced: alternates the full-space pump
// propagator with the cross-Kerr phases, N times, watching how much weight
// escapes the {|0>, |n>} rows along the way.
inline OracleRun run_oracle(const StageParams& p, const CVector& probe,
                            int a_cutoff) {
  if (a_cutoff < 2 * p.n + 2)
    throw std::invalid_argument("run_oracle: signal cutoff below 2n+2");
  if (std::abs(probe.norm() - 1.0) > 1e-8)
    throw std::invalid_argument("run_oracle: probe must be normalized");
  const ModeSpace a(a_cutoff);
  const CMatrix u_pump =
      hermitian_propagator(kh_hamiltonian(p.n, 1.0, a), p.theta);
  CVector vac = CVector::Zero(a_cutoff);
  vac(0) = 1.0;
  OracleRun run{JointState::product(vac, probe), 0.0};
  CMatrix& c = run.state.amps;
  const int db = run.state.dim_b();
  for (int stage = 0; stage < p.N; ++stage) {
    c = u_pump * c;
    for (int j = 0; j < a_cutoff; ++j)
      for (int m = 0; m < db; ++m)
        c(j, m) *= std::exp(Complex(0.0, p.kappa * j * m));
    double leak = 0.0;
    for (int j = 0; j < a_cutoff; ++j) {
      if (j == 0 || j == p.n) continue;
      leak += c.row(j).squaredNorm();
    }
    run.max_leakage = std::max(run.max_leakage, leak);
  }
  if (run.max_leakage > kLeakageTol)
    throw std::runtime_error("run_oracle: leakage " +
                             std::to_string(run.max_leakage) +
                             " out of the signal subspace");
  return run;
}

struct CascadeResult {
  StageParams params;
  std::vector<BlockAmplitudes> blocks;   // one per probe occupation m
  double emission_probability = 0.0;     // n photons seen in the signal mode
  double postselect_probability = 0.0;   // signal mode still empty
  Complex alpha0;                        // vacuum amplitude of the input probe
  bool no_outcome = false;               // post-selection has nothing to keep
  std::optional<CVector> truncated_state;        // conditional probe state
  std::optional<double> truncation_fidelity;     // against vacuum-stripped input
};

// Closed-form cascade: every probe occupation m evolves independently
// inside its own two-level block, so the joint state is a sum over m of
// alpha_m (v_m |0> + w_m |n>) x |m>.
inline CascadeResult run_blocks(const StageParams& p, const CVector& probe) {
  if (probe.size() < 1)
    throw std::invalid_argument("run_blocks: empty probe state");
  if (std::abs(probe.norm() - 1.0) > 1e-8)
    throw std::invalid_argument("run_blocks: probe must be normalized");
  CascadeResult res{p, {}, 0.0, 0.0, probe(0), false, std::nullopt,
                    std::nullopt};
  const int db = static_cast<int>(probe.size());
  res.blocks.reserve(db);
  CVector kept(db);
  for (int m = 0; m < db; ++m) {
    res.blocks.push_back(vw_closed_form(p, m));
    const Complex& v = res.blocks.back().v;
    const Complex& w = res.blocks.back().w;
    res.emission_probability += std::norm(probe(m) * w);
    kept(m) = probe(m) * v;
  }
  res.postselect_probability = kept.squaredNorm();
  if (res.postselect_probability < kNoOutcomeTol) {
    res.no_outcome = true;
    return res;
  }
  res.truncated_state = normalized(kept);
  const VacuumStripped target = strip_vacuum(probe);
  if (!target.vacuum_only)
    res.truncation_fidelity =
        fidelity(*res.truncated_state, normalized(target.stripped));
  return res;
}

// Joint two-mode state reassembled from the block amplitudes, for direct
// comparison with the full-space reference.
inline JointState blocks_joint_state(const CascadeResult& res,
                                     const CVector& probe, int a_cutoff) {
  if (a_cutoff <= res.params.n)
    throw std::invalid_argument("blocks_joint_state: cutoff must exceed n");
  JointState s(a_cutoff, static_cast<int>(probe.size()));
  for (int m = 0; m < probe.size(); ++m) {
    s.amps(0, m) = probe(m) * res.blocks[m].v;
    s.amps(res.params.n, m) = probe(m) * res.blocks[m].w;
  }
  return s;
}

struct SweepRow {
  int N = 0;
  double emission_probability = 0.0;
  double postselect_probability = 0.0;
  std::optional<double> fidelity;
  bool no_outcome = false;
};

inline std::vector<SweepRow> truncation_fidelity_sweep(
    int n, double kappa, const CVector& probe, const std::vector<int>& stages) {
  std::vector<SweepRow> rows;
  rows.reserve(stages.size());
  for (int N : stages) {
    const CascadeResult res = run_blocks(StageParams::cascade(n, N, kappa), probe);
    rows.push_back({N, res.emission_probability, res.postselect_probability,
                    res.truncation_fidelity, res.no_outcome});
  }
  return rows;
}

}  // namespace zeno
