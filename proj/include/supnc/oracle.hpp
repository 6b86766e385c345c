#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdio>
#include <limits>
#include <ostream>
#include <vector>

#include "supnc/errors.hpp"
#include "supnc/states.hpp"

// Truncated Fock-space construction of both state families, used as the
// ground truth against the closed forms.  The detector factor is applied
// directly to the amplitudes here, never through the reparametrization, so
// the two paths stay independent.
namespace supnc::oracle {

inline constexpr int kMaxCutoff = 100000;
// Relative unnormalized tail at the cutoff.  Tight enough that even
// factorial-weighted sums up to the working order cannot feel the truncation.
inline constexpr double kTailTarget = 1e-18;

// Normalized pure state on Fock levels 0..cutoff.
struct FockVector {
  int cutoff;
  std::vector<std::complex<double>> amplitudes;
};

// Normalized diagonal mixed state on Fock levels 0..cutoff.
struct FockDiagonal {
  int cutoff;
  std::vector<double> weights;
};

// Constructor contracts for adopted states: unit norm and a dead tail.
inline void validate_state(const FockVector& v) {
  long double norm = 0.0L;
  for (const auto& a : v.amplitudes) norm += std::norm(std::complex<long double>(a));
  if (std::abs(static_cast<double>(norm) - 1.0) > 1e-12) {
    throw inconsistent_provider("FockVector: norm departs from 1");
  }
  long double tail = 0.0L;
  for (size_t n = v.amplitudes.size() - 2; n < v.amplitudes.size(); ++n) {
    tail += std::norm(std::complex<long double>(v.amplitudes[n]));
  }
  if (static_cast<double>(tail) >= 1e-14) {
    throw inconsistent_provider("FockVector: cutoff too small for the state");
  }
}

inline void validate_state(const FockDiagonal& d) {
  long double sum = 0.0L;
  for (double w : d.weights) sum += w;
  if (std::abs(static_cast<double>(sum) - 1.0) > 1e-12) {
    throw inconsistent_provider("FockDiagonal: weights do not sum to 1");
  }
  const size_t last = d.weights.size() - 1;
  if (d.weights[last] + d.weights[last - 1] >= 1e-14) {
    throw inconsistent_provider("FockDiagonal: cutoff too small for the state");
  }
  // The tail must be on a decaying scale; a factor covers a zero of g
  // dipping through the last entries.
  if (d.weights[last] > 16.0 * d.weights[last - 2] + 1e-300) {
    throw inconsistent_provider("FockDiagonal: tail weights are growing");
  }
}

// Smallest cutoff whose unnormalized weight tail is below kTailTarget of the
// total, plus a working margin of max_order + 4 levels.
inline int choose_cutoff(const states::StateSpec& spec_in, int max_order) {
  if (max_order < 0) throw invalid_argument("choose_cutoff: negative order");
  const states::StateSpec spec = states::effective_state(spec_in);
  const states::SupParams& p = spec.sup;
  long k = 0;

  if (spec.family == states::Family::socs) {
    states::normalization_socs(p, spec.coherent);  // degeneracy gate
    const double lambda = std::norm(spec.coherent.alpha);
    if (lambda > 0.0) {
      // Exact suffix scan over the Poisson-times-g^2 weights.  The stop rule
      // wants two consecutive negligible terms: a zero of g can make a single
      // term vanish in the middle of live weight.
      const double log_lambda = std::log(lambda);
      const double stop_after = lambda + 10.0 + 12.0 * std::sqrt(lambda + 1.0);
      std::vector<double> weight;
      long double total = 0.0L;
      bool prev_small = false;
      for (long n = 0;; ++n) {
        if (n > kMaxCutoff + 16) throw cutoff_infeasible("choose_cutoff: amplitude too large");
        const double lw = -lambda + n * log_lambda - std::lgamma(static_cast<double>(n) + 1.0);
        const double g = p.g(static_cast<int>(n));
        const double w = std::exp(lw) * g * g;
        weight.push_back(w);
        total += w;
        const bool small = w < 1e-22 * static_cast<double>(total);
        if (n > stop_after && small && prev_small) break;
        prev_small = small;
      }
      long double suffix = 0.0L;
      k = static_cast<long>(weight.size());
      for (long n = static_cast<long>(weight.size()) - 1; n >= 0; --n) {
        suffix += weight[static_cast<size_t>(n)];
        if (static_cast<double>(suffix) >= kTailTarget * static_cast<double>(total)) break;
        k = n;  // tail beyond n-1 is still small enough
      }
      k = std::max<long>(k - 1, 0);
    }
  } else {
    states::normalization_sots(p, spec.thermal);
    const double mu = spec.thermal.mu();
    if (mu > 0.0) {
      // Closed-form geometric suffix of a_r g(r)^2 = a_r (A + B r + C r^2).
      const double d = p.s + p.t;
      const double A = p.s * p.s, B = 2.0 * p.s * d, C = d * d;
      const double total = states::normalization_sots(p, spec.thermal);
      const double q = 1.0 - mu;
      auto tail_beyond = [&](long j0) {
        const double j = static_cast<double>(j0) + 1.0;  // sum over r >= j
        const double m0 = std::pow(mu, j) / q;
        const double m1 = std::pow(mu, j) * (j * q + mu) / (q * q);
        const double m2 = std::pow(mu, j) * (j * j * q * q + mu * (2.0 * j * q + 1.0 + mu)) /
                          (q * q * q);
        return q * (A * m0 + B * m1 + C * m2);
      };
      while (tail_beyond(k) >= kTailTarget * total) {
        if (++k > kMaxCutoff) throw cutoff_infeasible("choose_cutoff: nbar too large");
      }
    }
  }

  const long cutoff = k + max_order + 4;
  if (cutoff > kMaxCutoff) throw cutoff_infeasible("choose_cutoff: cutoff above the cap");
  return static_cast<int>(cutoff);
}

// Unnormalized squared-amplitude sum of the detector-attenuated operated
// coherent state, log-summed so large alpha cannot underflow.
inline double socs_weight_sum(const states::SupParams& p, const states::CoherentSpec& c,
                              const states::DetectorSpec& det, int cutoff) {
  const double w = std::norm(c.alpha);
  const double u = w * det.attenuation() * det.attenuation();
  std::vector<double> logs;
  std::vector<double> gsq;
  double shift = -std::numeric_limits<double>::infinity();
  for (int n = 0; n <= cutoff; ++n) {
    const double lw =
        (n == 0) ? -w : -w + n * std::log(u) - std::lgamma(static_cast<double>(n) + 1.0);
    const double g = p.g(n);
    if (u == 0.0 && n > 0) break;
    logs.push_back(lw);
    gsq.push_back(g * g);
    if (g != 0.0) shift = std::max(shift, lw + std::log(g * g));
  }
  if (!std::isfinite(shift)) return 0.0;
  long double acc = 0.0L;
  for (size_t n = 0; n < logs.size(); ++n) {
    if (gsq[n] == 0.0) continue;
    acc += std::exp(logs[n] + std::log(gsq[n]) - shift);
  }
  return static_cast<double>(acc) * std::exp(shift);
}

// Unnormalized weight sum of the attenuated operated thermal state.
inline double sots_weight_sum(const states::SupParams& p, const states::ThermalSpec& th,
                              const states::DetectorSpec& det, int cutoff) {
  const double base = th.mu() * det.attenuation() * det.attenuation();
  long double acc = 0.0L;
  double factor = 1.0 / (1.0 + th.nbar);
  for (int r = 0; r <= cutoff; ++r) {
    acc += factor * p.g(r) * p.g(r);
    factor *= base;
    if (factor == 0.0) break;
  }
  return static_cast<double>(acc);
}

inline FockVector build_socs(const states::SupParams& p, const states::CoherentSpec& c,
                             const states::DetectorSpec& det, int cutoff) {
  if (cutoff < 4) throw invalid_argument("build_socs: cutoff below the working margin");
  const std::complex<double> base = c.alpha * det.attenuation();
  const double b = std::abs(base);
  const double phase = std::arg(base);
  std::vector<std::complex<double>> amp(static_cast<size_t>(cutoff) + 1, 0.0);
  if (b == 0.0) {
    amp[0] = p.g(0);
  } else {
    // Log-domain magnitudes, shifted by their maximum before exponentiation.
    std::vector<double> lm(static_cast<size_t>(cutoff) + 1);
    double shift = -std::numeric_limits<double>::infinity();
    for (int n = 0; n <= cutoff; ++n) {
      lm[static_cast<size_t>(n)] =
          n * std::log(b) - 0.5 * std::lgamma(static_cast<double>(n) + 1.0);
      const double g = p.g(n);
      if (g != 0.0) {
        shift = std::max(shift, lm[static_cast<size_t>(n)] + std::log(std::abs(g)));
      }
    }
    if (std::isfinite(shift)) {
      for (int n = 0; n <= cutoff; ++n) {
        const double g = p.g(n);
        if (g == 0.0) continue;
        const double mag = std::exp(lm[static_cast<size_t>(n)] + std::log(std::abs(g)) - shift);
        std::complex<double> a = std::polar(mag, phase * n);
        amp[static_cast<size_t>(n)] = (g < 0.0) ? -a : a;
      }
    }
  }
  long double norm_sq = 0.0L;
  for (const auto& a : amp) norm_sq += std::norm(std::complex<long double>(a));
  if (!(static_cast<double>(norm_sq) > 0.0)) {
    throw degenerate_state("build_socs: state has zero norm");
  }
  const double inv = 1.0 / std::sqrt(static_cast<double>(norm_sq));
  for (auto& a : amp) a *= inv;
  FockVector v{cutoff, std::move(amp)};
  validate_state(v);
  return v;
}

inline FockDiagonal build_sots(const states::SupParams& p, const states::ThermalSpec& th,
                               const states::DetectorSpec& det, int cutoff) {
  if (cutoff < 4) throw invalid_argument("build_sots: cutoff below the working margin");
  const double base = th.mu() * det.attenuation() * det.attenuation();
  std::vector<double> w(static_cast<size_t>(cutoff) + 1, 0.0);
  double geom = 1.0;
  for (int r = 0; r <= cutoff; ++r) {
    w[static_cast<size_t>(r)] = geom * p.g(r) * p.g(r);
    geom *= base;
    if (geom == 0.0) break;
  }
  long double total = 0.0L;
  for (double x : w) total += x;
  if (!(static_cast<double>(total) > 0.0)) {
    throw degenerate_state("build_sots: state has zero weight");
  }
  const double inv = 1.0 / static_cast<double>(total);
  for (auto& x : w) x *= inv;
  FockDiagonal d{cutoff, std::move(w)};
  validate_state(d);
  return d;
}

// <a†^m a^n> by direct summation; the factorial ratios go through log-gamma.
inline std::complex<double> oracle_moment(const FockVector& v, int m, int n) {
  if (m < 0 || n < 0) throw invalid_argument("oracle_moment: negative order");
  if (m > v.cutoff - 4 || n > v.cutoff - 4) {
    throw order_limit_exceeded("oracle_moment: order too close to the cutoff");
  }
  std::complex<long double> acc = 0.0L;
  const size_t top = v.amplitudes.size() - static_cast<size_t>(std::max(m, n));
  for (size_t k = 0; k < top; ++k) {
    const double lgk = std::lgamma(static_cast<double>(k) + 1.0);
    const double f =
        std::exp(0.5 * (std::lgamma(static_cast<double>(k + static_cast<size_t>(m)) + 1.0) - lgk) +
                 0.5 * (std::lgamma(static_cast<double>(k + static_cast<size_t>(n)) + 1.0) - lgk));
    acc += std::complex<long double>(std::conj(v.amplitudes[k + static_cast<size_t>(m)]) *
                                     v.amplitudes[k + static_cast<size_t>(n)]) *
           static_cast<long double>(f);
  }
  return static_cast<std::complex<double>>(acc);
}

inline std::complex<double> oracle_moment(const FockDiagonal& d, int m, int n) {
  if (m < 0 || n < 0) throw invalid_argument("oracle_moment: negative order");
  if (m > d.cutoff - 4 || n > d.cutoff - 4) {
    throw order_limit_exceeded("oracle_moment: order too close to the cutoff");
  }
  if (m != n) return 0.0;
  long double acc = 0.0L;
  for (size_t r = static_cast<size_t>(n); r < d.weights.size(); ++r) {
    const double f = std::exp(std::lgamma(static_cast<double>(r) + 1.0) -
                              std::lgamma(static_cast<double>(r - static_cast<size_t>(n)) + 1.0));
    acc += static_cast<long double>(d.weights[r] * f);
  }
  return static_cast<double>(acc);
}

inline double oracle_photon_prob(const FockVector& v, int m) {
  if (m < 0) throw invalid_argument("oracle_photon_prob: negative index");
  if (m >= static_cast<int>(v.amplitudes.size())) return 0.0;
  return std::norm(v.amplitudes[static_cast<size_t>(m)]);
}

inline double oracle_photon_prob(const FockDiagonal& d, int m) {
  if (m < 0) throw invalid_argument("oracle_photon_prob: negative index");
  if (m >= static_cast<int>(d.weights.size())) return 0.0;
  return d.weights[static_cast<size_t>(m)];
}

// (1/pi) <beta| rho |beta> by contracting against coherent amplitudes.
inline double oracle_husimi(const FockVector& v, std::complex<double> beta) {
  std::complex<long double> overlap = 0.0L;
  std::complex<double> cn(std::exp(-std::norm(beta) / 2.0), 0.0);  // <beta|n> factor
  for (size_t n = 0; n < v.amplitudes.size(); ++n) {
    overlap += std::complex<long double>(cn * v.amplitudes[n]);
    cn *= std::conj(beta) / std::sqrt(static_cast<double>(n) + 1.0);
  }
  const double a = static_cast<double>(overlap.real());
  const double b = static_cast<double>(overlap.imag());
  return (a * a + b * b) / M_PI;
}

inline double oracle_husimi(const FockDiagonal& d, std::complex<double> beta) {
  const double w = std::norm(beta);
  long double acc = 0.0L;
  double pois = std::exp(-w);  // |<beta|r>|^2
  for (size_t r = 0; r < d.weights.size(); ++r) {
    acc += static_cast<long double>(d.weights[r] * pois);
    pois *= w / (static_cast<double>(r) + 1.0);
  }
  return static_cast<double>(acc) / M_PI;
}

namespace detail {

// One application of the tridiagonal quadrature matrix (a + a†)/sqrt(2).
inline std::vector<std::complex<double>> apply_quadrature(
    const std::vector<std::complex<double>>& v) {
  const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
  std::vector<std::complex<double>> out(v.size(), 0.0);
  for (size_t n = 0; n < v.size(); ++n) {
    std::complex<double> x = 0.0;
    if (n + 1 < v.size()) x += std::sqrt(static_cast<double>(n) + 1.0) * v[n + 1];
    if (n > 0) x += std::sqrt(static_cast<double>(n)) * v[n - 1];
    out[n] = inv_sqrt2 * x;
  }
  return out;
}

}  // namespace detail

// <X^k> through repeated tridiagonal application, the matrix-power path the
// normal-ordered expansion is checked against.
inline double oracle_quadrature_moment(const FockVector& v, int k) {
  if (k < 0) throw invalid_argument("oracle_quadrature_moment: negative power");
  if (k > 12 || k > v.cutoff - 4) {
    throw order_limit_exceeded("oracle_quadrature_moment: power above the supported bound");
  }
  std::vector<std::complex<double>> cur = v.amplitudes;
  for (int i = 0; i < k; ++i) cur = detail::apply_quadrature(cur);
  std::complex<long double> acc = 0.0L;
  for (size_t n = 0; n < cur.size(); ++n) {
    acc += std::complex<long double>(std::conj(v.amplitudes[n]) * cur[n]);
  }
  return static_cast<double>(acc.real());
}

inline double oracle_quadrature_moment(const FockDiagonal& d, int k) {
  if (k < 0) throw invalid_argument("oracle_quadrature_moment: negative power");
  if (k > 12 || k > d.cutoff - 4) {
    throw order_limit_exceeded("oracle_quadrature_moment: power above the supported bound");
  }
  long double acc = 0.0L;
  std::vector<std::complex<double>> basis(d.weights.size());
  for (size_t r = 0; r < d.weights.size(); ++r) {
    if (d.weights[r] == 0.0) continue;
    std::fill(basis.begin(), basis.end(), std::complex<double>(0.0));
    basis[r] = 1.0;
    std::vector<std::complex<double>> cur = basis;
    for (int i = 0; i < k; ++i) cur = detail::apply_quadrature(cur);
    acc += static_cast<long double>(d.weights[r] * cur[r].real());
  }
  return static_cast<double>(acc);
}

// Plain-text dumps for inspection: one line per Fock level.
inline void dump_state(const FockVector& v, std::ostream& os) {
  os << "n,re_amp,im_amp\n";
  char buf[96];
  for (size_t n = 0; n < v.amplitudes.size(); ++n) {
    std::snprintf(buf, sizeof buf, "%zu,%.17g,%.17g\n", n, v.amplitudes[n].real(),
                  v.amplitudes[n].imag());
    os << buf;
  }
}

inline void dump_state(const FockDiagonal& d, std::ostream& os) {
  os << "r,weight\n";
  char buf[64];
  for (size_t r = 0; r < d.weights.size(); ++r) {
    std::snprintf(buf, sizeof buf, "%zu,%.17g\n", r, d.weights[r]);
    os << buf;
  }
}

}  // namespace supnc::oracle
