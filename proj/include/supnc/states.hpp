#pragma once

#include <cmath>
#include <complex>
#include <limits>

#include "supnc/errors.hpp"

// State families produced by the operator A = s a a† + t a† a acting on a
// coherent or thermal input, plus the detector-efficiency variants.  A is
// diagonal on Fock states with eigenvalue g(n) = s + (s+t) n, which keeps
// every quantity here in closed or rapidly converging form.
namespace supnc::states {

inline constexpr double kDegenerateNorm = 1e-300;  // below this the state is the zero vector
inline constexpr double kSeriesTail = 1e-16;       // relative tail bound for thermal sums
inline constexpr long kSeriesCap = 1000000;        // hard iteration cap for thermal sums

struct SupParams {
  double s;
  double t;

  SupParams(double s_, double t_) : s(s_), t(t_) {
    if (!std::isfinite(s) || !std::isfinite(t) || std::abs(s * s + t * t - 1.0) > 1e-12) {
      throw invalid_argument("SupParams: s^2 + t^2 must equal 1");
    }
  }

  // Eigenvalue of the superposed operator on the n-photon state.
  double g(int n) const { return s + (s + t) * n; }
};

// Derives t = +sqrt(1 - s^2); the negative branch must be passed explicitly.
inline SupParams sup_from_s(double s) {
  if (!(std::abs(s) <= 1.0)) throw invalid_argument("sup_from_s: |s| must not exceed 1");
  return SupParams(s, std::sqrt(std::max(0.0, (1.0 - s) * (1.0 + s))));
}

struct CoherentSpec {
  std::complex<double> alpha;

  explicit CoherentSpec(std::complex<double> a) : alpha(a) {
    if (!std::isfinite(a.real()) || !std::isfinite(a.imag())) {
      throw invalid_argument("CoherentSpec: alpha must be finite");
    }
  }
};

struct ThermalSpec {
  double nbar;

  explicit ThermalSpec(double n) : nbar(n) {
    if (!std::isfinite(n) || n < 0.0) throw invalid_argument("ThermalSpec: nbar must be >= 0");
  }

  // Geometric ratio of the thermal weights a_r = (1 - mu) mu^r.
  double mu() const { return nbar / (1.0 + nbar); }
  double weight(int r) const { return std::pow(mu(), r) / (1.0 + nbar); }
};

struct DetectorSpec {
  double eta;

  explicit DetectorSpec(double e = 0.0) : eta(e) {
    if (!std::isfinite(e) || e < 0.0 || e > 1.0) {
      throw invalid_argument("DetectorSpec: eta must lie in [0, 1]");
    }
  }

  // Per-photon amplitude attenuation of the (1-eta)^(a†a) detector map.
  double attenuation() const { return 1.0 - eta; }
};

enum class Family { socs, sots };

// Tagged description of either family; `coherent` is meaningful only for
// SOCS and `thermal` only for SOTS.
struct StateSpec {
  Family family;
  SupParams sup;
  CoherentSpec coherent;
  ThermalSpec thermal;
  DetectorSpec detector;

  static StateSpec socs(SupParams p, std::complex<double> alpha, double eta = 0.0) {
    return StateSpec{Family::socs, p, CoherentSpec(alpha), ThermalSpec(0.0), DetectorSpec(eta)};
  }

  static StateSpec sots(SupParams p, double nbar, double eta = 0.0) {
    return StateSpec{Family::sots, p, CoherentSpec(0.0), ThermalSpec(nbar), DetectorSpec(eta)};
  }
};

namespace detail {

// Integer power by repeated squaring; unlike std::pow on complex arguments
// it is exact at z = 0 (0^0 = 1, 0^k = 0).
inline std::complex<double> cpow_int(std::complex<double> z, int k) {
  std::complex<double> acc(1.0, 0.0);
  while (k > 0) {
    if (k & 1) acc *= z;
    z *= z;
    k >>= 1;
  }
  return acc;
}

}  // namespace detail

inline double normalization_socs(const SupParams& p, const CoherentSpec& c) {
  const double w = std::norm(c.alpha);
  const double n1 = p.s * p.s + (1.0 + 2.0 * p.s * p.s + 4.0 * p.s * p.t) * w +
                    (1.0 + 2.0 * p.s * p.t) * w * w;
  if (!(n1 > kDegenerateNorm)) {
    throw degenerate_state("normalization_socs: state has zero norm");
  }
  return n1;
}

inline double normalization_sots(const SupParams& p, const ThermalSpec& th) {
  const double n = th.nbar;
  const double n2 = p.s * p.s * (1.0 + n) * (1.0 + 2.0 * n) +
                    4.0 * p.s * p.t * n * (1.0 + n) + p.t * p.t * n * (1.0 + 2.0 * n);
  if (!(n2 > kDegenerateNorm)) {
    throw degenerate_state("normalization_sots: state has zero norm");
  }
  return n2;
}

// <a†^m a^n> in the operated coherent state.  The bracket is a polynomial in
// m, n and |alpha|^2; for m = n = 0 it reduces to the normalization itself,
// so 1 is returned without rounding.
inline std::complex<double> moment_socs(int m, int n, const SupParams& p,
                                        const CoherentSpec& c) {
  if (m < 0 || n < 0) throw invalid_argument("moment_socs: negative order");
  if (m > 64 || n > 64) throw order_limit_exceeded("moment_socs: order above 64");
  const double n1 = normalization_socs(p, c);
  if (m == 0 && n == 0) return 1.0;
  const double w = std::norm(c.alpha);
  const double d = p.s + p.t;
  const double bracket = d * d * (static_cast<double>(m) * n + (m + n + 1.0) * w + w * w) +
                         p.s * d * (m + n + 2.0 * w) + p.s * p.s;
  const std::complex<double> phase =
      detail::cpow_int(std::conj(c.alpha), m) * detail::cpow_int(c.alpha, n);
  return phase * (bracket / n1);
}

namespace detail {

// Sum over r of (1-mu) mu^r · r!/(r-n)! · g(r)^2 · extra(r), truncated when a
// geometric bound on the remaining tail drops below kSeriesTail of the
// accumulated value.  `extra` must map into [0, 1] (used for the detector
// factor); pass nullptr for the plain sum.
template <typename Extra>
inline double thermal_weighted_sum(int n, const SupParams& p, double nbar, Extra extra) {
  if (nbar == 0.0) {
    // Only the vacuum term survives; r!/(r-n)! kills it for n >= 1.
    if (n >= 1) return 0.0;
    double e0 = extra(0);
    return p.s * p.s * e0;
  }
  const double mu = nbar / (1.0 + nbar);
  const double log_mu = std::log(mu);
  const double log_pref = -std::log1p(nbar);
  // Past the zero of g the squared eigenvalue grows monotonically, which
  // makes the per-term ratio an upper bound for the whole tail.
  const double d = p.s + p.t;
  long zero_r = 0;
  if (d != 0.0) {
    const double root = -p.s / d;
    if (root > 0.0) zero_r = static_cast<long>(std::ceil(root)) + 1;
  }
  const long check_from = static_cast<long>(n) + 4 + zero_r;

  long double acc = 0.0L;
  for (long r = n; r < kSeriesCap; ++r) {
    const double lg = log_pref + static_cast<double>(r) * log_mu +
                      std::lgamma(static_cast<double>(r) + 1.0) -
                      std::lgamma(static_cast<double>(r - n) + 1.0);
    const double g = p.g(static_cast<int>(std::min<long>(r, std::numeric_limits<int>::max())));
    const double bare = std::exp(lg) * g * g;
    acc += static_cast<long double>(bare * extra(r));
    if (r >= check_from && g != 0.0 && acc > 0.0L) {
      const double gn = p.g(static_cast<int>(r + 1));
      const double ratio = mu * (static_cast<double>(r + 1) / static_cast<double>(r + 1 - n)) *
                           (gn / g) * (gn / g);
      if (ratio < 1.0 && bare * ratio / (1.0 - ratio) < kSeriesTail * static_cast<double>(acc)) {
        return static_cast<double>(acc);
      }
    }
  }
  throw size_limit_exceeded("thermal sum: iteration cap reached before convergence");
}

}  // namespace detail

// <a†^m a^n> in the operated thermal state; diagonal, so exactly 0 off the
// m = n line and exactly 1 at the origin.
inline double moment_sots(int m, int n, const SupParams& p, const ThermalSpec& th) {
  if (m < 0 || n < 0) throw invalid_argument("moment_sots: negative order");
  if (m > 64 || n > 64) throw order_limit_exceeded("moment_sots: order above 64");
  const double n2 = normalization_sots(p, th);
  if (m != n) return 0.0;
  if (n == 0) return 1.0;
  const double sum = detail::thermal_weighted_sum(n, p, th.nbar, [](long) { return 1.0; });
  return sum / n2;
}

// Attenuation folds into the state parameters exactly: the detector map
// rescales Fock amplitudes by (1-eta)^n, which for a coherent input is a
// smaller alpha and for a thermal input a smaller geometric ratio.
inline StateSpec effective_state(const StateSpec& spec) {
  const double w = spec.detector.attenuation();
  if (spec.detector.eta == 0.0) return spec;
  if (spec.family == Family::socs) {
    return StateSpec::socs(spec.sup, spec.coherent.alpha * w, 0.0);
  }
  const double n = spec.thermal.nbar;
  const double scaled = n * w * w;
  return StateSpec::sots(spec.sup, scaled / (1.0 + n - scaled), 0.0);
}

// p_m for either family, in the log domain so large m neither overflows nor
// loses the g(m)^2 factor.
inline double photon_probability(const StateSpec& spec_in, int m) {
  if (m < 0) throw invalid_argument("photon_probability: negative index");
  if (m > 4096) throw order_limit_exceeded("photon_probability: index above 4096");
  const StateSpec spec = effective_state(spec_in);
  const double g = spec.sup.g(m);
  if (spec.family == Family::socs) {
    const double n1 = normalization_socs(spec.sup, spec.coherent);
    const double w = std::norm(spec.coherent.alpha);
    if (w == 0.0) return m == 0 ? 1.0 : 0.0;
    const double lg = -w + m * std::log(w) - std::lgamma(static_cast<double>(m) + 1.0);
    return std::exp(lg) * g * g / n1;
  }
  const double n2 = normalization_sots(spec.sup, spec.thermal);
  const double nbar = spec.thermal.nbar;
  if (nbar == 0.0) return m == 0 ? 1.0 : 0.0;
  const double lg = -std::log1p(nbar) + m * std::log(spec.thermal.mu());
  return std::exp(lg) * g * g / n2;
}

// Generalized moment for either family with the detector folded in.
inline std::complex<double> moment(const StateSpec& spec_in, int m, int n) {
  const StateSpec spec = effective_state(spec_in);
  if (spec.family == Family::socs) return moment_socs(m, n, spec.sup, spec.coherent);
  return moment_sots(m, n, spec.sup, spec.thermal);
}

// ---------------------------------------------------------------------------
// Published closed-form efficiency variants, kept verbatim for the
// discrepancy report.  They are not consistent with the attenuation
// definition above (their (0,0) moment is not 1 and the thermal
// normalization vanishes at eta = 0), so nothing else calls them.

namespace detail {

// Bracket {s + (s+t) x}^2 + (s+t)^2 x appearing in the coherent-family
// formulas, with x an attenuated |alpha|^2.
inline double socs_eta_bracket(const SupParams& p, double x) {
  const double d = p.s + p.t;
  const double b = p.s + d * x;
  return b * b + d * d * x;
}

// Bracket {s + (s+t) x^2}^2 + (s+t)^2 x^2 appearing in the thermal-family
// normalization, with x one of the attenuated geometric ratios.
inline double sots_eta_bracket(const SupParams& p, double x) {
  const double d = p.s + p.t;
  const double b = p.s + d * x * x;
  return b * b + d * d * x * x;
}

}  // namespace detail

inline double eta_formula_normalization_socs(const SupParams& p, const CoherentSpec& c,
                                             const DetectorSpec& det) {
  const double w = std::norm(c.alpha);
  const double a = det.attenuation();
  return detail::socs_eta_bracket(p, w) +
         detail::socs_eta_bracket(p, a * w) * std::exp(-det.eta * w) +
         detail::socs_eta_bracket(p, a * a * w) * std::exp((det.eta * det.eta - 2.0 * det.eta) * w);
}

inline double eta_formula_normalization_sots(const SupParams& p, const ThermalSpec& th,
                                             const DetectorSpec& det) {
  const double mu = th.mu();
  const double theta = mu * det.attenuation();
  const double zeta = mu * det.attenuation() * det.attenuation();
  return (detail::sots_eta_bracket(p, mu) * std::exp(mu) -
          2.0 * detail::sots_eta_bracket(p, theta) * std::exp(theta) +
          detail::sots_eta_bracket(p, zeta) * std::exp(zeta)) /
         (1.0 + th.nbar);
}

inline std::complex<double> eta_formula_moment_socs(int m, int n, const SupParams& p,
                                                    const CoherentSpec& c,
                                                    const DetectorSpec& det) {
  if (m < 0 || n < 0) throw invalid_argument("eta_formula_moment_socs: negative order");
  const double norm = eta_formula_normalization_socs(p, c, det);
  if (!(std::abs(norm) > kDegenerateNorm)) {
    throw degenerate_denominator("eta_formula_moment_socs: published normalization vanishes");
  }
  const double w = std::norm(c.alpha);
  const double a = det.attenuation();
  const double bracket =
      detail::socs_eta_bracket(p, w) +
      (std::pow(a, m) + std::pow(a, n)) * detail::socs_eta_bracket(p, a * w) *
          std::exp(-det.eta * w) +
      std::pow(a, m + n) * detail::socs_eta_bracket(p, a * a * w) *
          std::exp((det.eta * det.eta - 2.0 * det.eta) * w);
  const std::complex<double> phase =
      detail::cpow_int(std::conj(c.alpha), m) * detail::cpow_int(c.alpha, n);
  return phase * (bracket / norm);
}

inline double eta_formula_moment_sots(int n, const SupParams& p, const ThermalSpec& th,
                                      const DetectorSpec& det) {
  if (n < 0) throw invalid_argument("eta_formula_moment_sots: negative order");
  const double norm = eta_formula_normalization_sots(p, th, det);
  if (!(std::abs(norm) > kDegenerateNorm)) {
    throw degenerate_denominator("eta_formula_moment_sots: published normalization vanishes");
  }
  const double a = det.attenuation();
  const double sum = detail::thermal_weighted_sum(n, p, th.nbar, [a](long r) {
    const double f = 1.0 - std::pow(a, static_cast<double>(r));
    return f * f;
  });
  return sum / norm;
}

}  // namespace supnc::states
