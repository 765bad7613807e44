#pragma once

#include <algorithm>
#include <cmath>
#include <fstream>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "zeno/fock.hpp"

namespace zeno {

inline constexpr int kDefaultProbeCutoff = 40;
inline constexpr double kTailMassTol = 1e-10;

struct FockSpec {
  int m = 0;
};

struct CoherentSpec {
  Complex amplitude;
};

// Squeeze applied to vacuum first, displacement second.
struct PhaseSqueezedSpec {
  Complex squeeze;
  Complex displacement;
};

struct CustomSpec {
  std::vector<Complex> coefficients;
  std::string source;
};

struct ProbeSpec {
  std::variant<FockSpec, CoherentSpec, PhaseSqueezedSpec, CustomSpec> shape;
  int cutoff = kDefaultProbeCutoff;
  std::string text;  // as parsed, kept for echoing

  std::string label() const {
    if (!text.empty()) return text;
    std::ostringstream os;
    if (const auto* f = std::get_if<FockSpec>(&shape)) {
      os << "fock:" << f->m;
    } else if (const auto* c = std::get_if<CoherentSpec>(&shape)) {
      os << "coherent:" << c->amplitude.real();
      if (c->amplitude.imag() != 0.0) os << "," << c->amplitude.imag();
    } else if (const auto* s = std::get_if<PhaseSqueezedSpec>(&shape)) {
      os << "squeezed:" << s->squeeze.real() << "," << s->displacement.real();
    } else {
      const auto& cu = std::get<CustomSpec>(shape);
      os << "custom:@" << (cu.source.empty() ? "<inline>" : cu.source);
    }
    return os.str();
  }
};

namespace detail {

[[noreturn]] inline void throw_tail(const std::string& label, double tail,
                                    int cutoff, std::optional<int> suggest) {
  std::ostringstream os;
  os << "probe '" << label << "': tail mass " << tail << " beyond cutoff "
     << cutoff << " exceeds " << kTailMassTol;
  if (suggest)
    os << "; use a cutoff of at least " << *suggest;
  else
    os << "; no workable cutoff below the search limit, state is too broad";
  throw std::invalid_argument(os.str());
}

inline double parse_real(const std::string& token, const std::string& what) {
  std::size_t used = 0;
  double value = 0.0;
  try {
    value = std::stod(token, &used);
  } catch (const std::exception&) {
    throw std::invalid_argument("probe spec: cannot parse " + what + " from '" +
                                token + "'");
  }
  if (used != token.size() || !std::isfinite(value))
    throw std::invalid_argument("probe spec: cannot parse " + what + " from '" +
                                token + "'");
  return value;
}

inline std::vector<Complex> read_coefficient_file(const std::string& path) {
  std::ifstream in(path);
  if (!in)
    throw std::invalid_argument("probe spec: cannot open coefficient file '" +
                                path + "'");
  std::vector<Complex> coeffs;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos)
      line.erase(hash);
    for (char& ch : line)
      if (ch == ',') ch = ' ';
    std::istringstream ls(line);
    double re = 0.0, im = 0.0;
    if (!(ls >> re)) continue;  // blank or comment-only line
    if (!(ls >> im)) im = 0.0;
    std::string extra;
    if (ls >> extra)
      throw std::invalid_argument("probe spec: trailing junk on line " +
                                  std::to_string(lineno) + " of '" + path +
                                  "'");
    coeffs.emplace_back(re, im);
  }
  if (coeffs.empty())
    throw std::invalid_argument("probe spec: no coefficients in '" + path +
                                "'");
  return coeffs;
}

inline CVector build_coherent(const CoherentSpec& spec, int cutoff,
                              const std::string& label) {
  const Complex alpha = spec.amplitude;
  // gamma_{m+1} = gamma_m * alpha / sqrt(m+1); total weight of the full
  // series is exactly 1, so the tail is 1 minus the retained prefix.
  CVector amps(cutoff);
  Complex gamma = std::exp(Complex(-0.5 * std::norm(alpha), 0.0));
  double prefix = 0.0;
  for (int m = 0; m < cutoff; ++m) {
    amps(m) = gamma;
    prefix += std::norm(gamma);
    gamma *= alpha / std::sqrt(static_cast<double>(m + 1));
  }
  const double tail = std::max(0.0, 1.0 - prefix);
  if (tail > kTailMassTol) {
    std::optional<int> suggest;
    double run = prefix;
    Complex g = gamma;
    for (int m = cutoff; m < 4096; ++m) {
      run += std::norm(g);
      if (1.0 - run <= kTailMassTol) {
        suggest = m + 1;
        break;
      }
      g *= alpha / std::sqrt(static_cast<double>(m + 1));
    }
    throw_tail(label, tail, cutoff, suggest);
  }
  return normalized(amps);
}

inline CVector build_phase_squeezed(const PhaseSqueezedSpec& spec, int cutoff,
                                    const std::string& label) {
  int work = std::max(2 * cutoff, cutoff + 16);
  for (;;) {
    const ModeSpace ws(work);
    const LadderOps ops = ladder_ops(ws);
    const CMatrix b2 = ops.annihilation * ops.annihilation;
    // exp(G) for anti-Hermitian G, evaluated as exp(i (-i G)).
    const CMatrix squeeze_gen =
        0.5 * std::conj(spec.squeeze) * b2 -
        0.5 * spec.squeeze * b2.adjoint();
    const CMatrix disp_gen = spec.displacement * ops.creation -
                             std::conj(spec.displacement) * ops.annihilation;
    CVector state = CVector::Zero(work);
    state(0) = 1.0;
    state = hermitian_propagator(Complex(0.0, -1.0) * squeeze_gen, 1.0) * state;
    state = hermitian_propagator(Complex(0.0, -1.0) * disp_gen, 1.0) * state;

    double edge = 0.0;
    for (int m = std::max(0, work - 8); m < work; ++m)
      edge += std::norm(state(m));
    if (edge > 1e-13) {
      if (work >= 512)
        throw std::runtime_error("probe '" + label +
                                 "': state does not fit the working space");
      work = std::min(512, 2 * work);
      continue;
    }

    double tail = 0.0;
    for (int m = cutoff; m < work; ++m) tail += std::norm(state(m));
    if (tail > kTailMassTol) {
      std::optional<int> suggest;
      double suffix = tail;
      for (int c = cutoff; c < work; ++c) {
        if (suffix <= kTailMassTol) {
          suggest = c;
          break;
        }
        suffix -= std::norm(state(c));
      }
      throw_tail(label, tail, cutoff, suggest);
    }
    return normalized(state.head(cutoff));
  }
}

}  // namespace detail

// Normalized probe state on the truncated space. Throws if the requested
// state leaves more than kTailMassTol of its weight above the cutoff.
inline CVector build_state(const ProbeSpec& spec) {
  if (spec.cutoff < 2)
    throw std::invalid_argument("build_state: cutoff must be at least 2");
  const std::string label = spec.label();
  if (const auto* f = std::get_if<FockSpec>(&spec.shape)) {
    if (f->m < 0)
      throw std::invalid_argument("build_state: fock index must be >= 0");
    if (f->m >= spec.cutoff) detail::throw_tail(label, 1.0, spec.cutoff, f->m + 1);
    CVector v = CVector::Zero(spec.cutoff);
    v(f->m) = 1.0;
    return v;
  }
  if (const auto* c = std::get_if<CoherentSpec>(&spec.shape))
    return detail::build_coherent(*c, spec.cutoff, label);
  if (const auto* s = std::get_if<PhaseSqueezedSpec>(&spec.shape))
    return detail::build_phase_squeezed(*s, spec.cutoff, label);

  const auto& cu = std::get<CustomSpec>(spec.shape);
  if (cu.coefficients.empty())
    throw std::invalid_argument("build_state: empty coefficient list");
  double total = 0.0, kept = 0.0;
  for (std::size_t m = 0; m < cu.coefficients.size(); ++m) {
    total += std::norm(cu.coefficients[m]);
    if (m < static_cast<std::size_t>(spec.cutoff))
      kept += std::norm(cu.coefficients[m]);
  }
  if (total < 1e-24)
    throw std::invalid_argument("build_state: coefficient list has zero norm");
  const double tail = (total - kept) / total;
  if (tail > kTailMassTol) {
    std::optional<int> suggest;
    double suffix = total;
    for (std::size_t c = 0; c <= cu.coefficients.size(); ++c) {
      if (suffix / total <= kTailMassTol) {
        suggest = static_cast<int>(std::max<std::size_t>(c, 2));
        break;
      }
      if (c < cu.coefficients.size()) suffix -= std::norm(cu.coefficients[c]);
    }
    detail::throw_tail(label, tail, spec.cutoff, suggest);
  }
  CVector v = CVector::Zero(spec.cutoff);
  const int keep =
      std::min<int>(spec.cutoff, static_cast<int>(cu.coefficients.size()));
  for (int m = 0; m < keep; ++m) v(m) = cu.coefficients[m];
  return normalized(v);
}

// Norm deviation of raw custom coefficients, for entry-point warnings.
inline double input_norm_deviation(const ProbeSpec& spec) {
  if (const auto* cu = std::get_if<CustomSpec>(&spec.shape)) {
    double total = 0.0;
    for (const Complex& c : cu->coefficients) total += std::norm(c);
    return std::abs(std::sqrt(total) - 1.0);
  }
  return 0.0;
}

// Grammar: fock:M | coherent:ALPHA | squeezed:EPS,ALPHA | custom:@PATH
inline ProbeSpec parse_probe_spec(const std::string& text,
                                  int cutoff = kDefaultProbeCutoff) {
  const auto colon = text.find(':');
  if (colon == std::string::npos || colon == 0 || colon + 1 >= text.size())
    throw std::invalid_argument(
        "probe spec '" + text +
        "': expected fock:M, coherent:ALPHA, squeezed:EPS,ALPHA or "
        "custom:@PATH");
  const std::string kind = text.substr(0, colon);
  const std::string args = text.substr(colon + 1);
  ProbeSpec spec;
  spec.cutoff = cutoff;
  spec.text = text;
  if (kind == "fock") {
    const double m = detail::parse_real(args, "fock index");
    if (m < 0 || m != std::floor(m))
      throw std::invalid_argument("probe spec '" + text +
                                  "': fock index must be a non-negative "
                                  "integer");
    spec.shape = FockSpec{static_cast<int>(m)};
  } else if (kind == "coherent") {
    spec.shape = CoherentSpec{Complex(
        detail::parse_real(args, "coherent amplitude"), 0.0)};
  } else if (kind == "squeezed") {
    const auto comma = args.find(',');
    if (comma == std::string::npos)
      throw std::invalid_argument("probe spec '" + text +
                                  "': expected squeezed:EPS,ALPHA");
    spec.shape = PhaseSqueezedSpec{
        Complex(detail::parse_real(args.substr(0, comma), "squeeze"), 0.0),
        Complex(detail::parse_real(args.substr(comma + 1), "displacement"),
                0.0)};
  } else if (kind == "custom") {
    if (args.empty() || args[0] != '@')
      throw std::invalid_argument("probe spec '" + text +
                                  "': expected custom:@PATH");
    const std::string path = args.substr(1);
    spec.shape = CustomSpec{detail::read_coefficient_file(path), path};
  } else {
    throw std::invalid_argument("probe spec '" + text + "': unknown kind '" +
                                kind + "'");
  }
  return spec;
}

struct PhotonStatistics {
  double mean = 0.0;
  double variance = 0.0;
  double vacuum_weight = 0.0;
  std::optional<double> mandel_q;
};

inline PhotonStatistics photon_statistics(const CVector& state) {
  if (std::abs(state.norm() - 1.0) > 1e-6)
    throw std::invalid_argument("photon_statistics: state must be normalized");
  PhotonStatistics st;
  st.vacuum_weight = std::norm(state(0));
  for (int m = 0; m < state.size(); ++m)
    st.mean += m * std::norm(state(m));
  for (int m = 0; m < state.size(); ++m) {
    const double d = m - st.mean;
    st.variance += d * d * std::norm(state(m));
  }
  if (st.mean > 1e-15)
    st.mandel_q = (st.variance - st.mean) / st.mean;
  return st;
}

struct VacuumStripped {
  CVector stripped;  // not normalized
  Complex alpha0;
  bool vacuum_only = false;
};

inline VacuumStripped strip_vacuum(const CVector& state) {
  VacuumStripped out{state, state.size() > 0 ? state(0) : Complex(0.0), false};
  if (out.stripped.size() > 0) out.stripped(0) = 0.0;
  out.vacuum_only = out.stripped.norm() < 1e-12;
  return out;
}

}  // namespace zeno
