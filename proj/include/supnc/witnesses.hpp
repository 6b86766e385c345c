#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "supnc/algebra.hpp"
#include "supnc/errors.hpp"
#include "supnc/moment_provider.hpp"
#include "supnc/states.hpp"

// Nonclassicality witnesses.  Everything moment-based consumes a
// MomentProvider; the phase-space functions work at the state level because
// they need more than moments.
namespace supnc::witnesses {

inline constexpr int kNumberMomentCap = 16;
inline constexpr int kQuadratureCap = 12;

enum class Criterion { q, hoa, hosps, hos, a3, klyshko, husimi };

inline const char* criterion_name(Criterion c) {
  switch (c) {
    case Criterion::q: return "q";
    case Criterion::hoa: return "hoa";
    case Criterion::hosps: return "hosps";
    case Criterion::hos: return "hos";
    case Criterion::a3: return "a3";
    case Criterion::klyshko: return "klyshko";
    case Criterion::husimi: return "husimi";
  }
  return "?";
}

inline std::optional<Criterion> parse_criterion(const std::string& name) {
  for (Criterion c : {Criterion::q, Criterion::hoa, Criterion::hosps, Criterion::hos,
                      Criterion::a3, Criterion::klyshko, Criterion::husimi}) {
    if (name == criterion_name(c)) return c;
  }
  return std::nullopt;
}

namespace detail {

// Diagonal moments must come out real; anything else means the provider is
// feeding inconsistent data.
inline double real_part(std::complex<double> z, const char* what) {
  if (std::abs(z.imag()) > 1e-8 * std::max(1.0, std::abs(z.real()))) {
    throw inconsistent_provider(std::string(what) + ": imaginary residue");
  }
  return z.real();
}

// Coefficient of <a†^n a^n> in <(N - mean)^l>, folding the Stirling expansion
// and the central binomial transform into one pass.  Keeping a single linear
// map from factorial moments avoids an intermediate rounding of the power
// moments, whose cancellation would otherwise dominate the error at high l.
inline std::vector<long double> central_fold(int l, long double mean) {
  std::vector<long double> c(static_cast<size_t>(l) + 1, 0.0L);
  for (int n = 0; n <= l; ++n) {
    long double acc = 0.0L;
    long double mean_pow = 1.0L;
    for (int k = 0; k + n <= l; ++k) {
      const long double term =
          static_cast<long double>(static_cast<double>(algebra::binomial(l, k))) * mean_pow *
          static_cast<long double>(static_cast<double>(algebra::stirling2(l - k, n)));
      acc += (k % 2 == 0) ? term : -term;
      mean_pow *= mean;
    }
    c[static_cast<size_t>(n)] = acc;
  }
  return c;
}

}  // namespace detail

// <a†^j a^j>, the factorial moment of order j.
inline double factorial_moment(const MomentProvider& mp, int j) {
  if (j < 0) throw invalid_argument("factorial_moment: negative order");
  return detail::real_part(mp.moment(j, j), "factorial_moment");
}

// <N^j> through the Stirling expansion over factorial moments.
inline double number_moment(const MomentProvider& mp, int j) {
  if (j < 0) throw invalid_argument("number_moment: negative order");
  if (j > kNumberMomentCap) throw order_limit_exceeded("number_moment: order above 16");
  long double acc = 0.0L;
  for (int n = 1; n <= j; ++n) {
    acc += static_cast<long double>(static_cast<double>(algebra::stirling2(j, n))) *
           static_cast<long double>(factorial_moment(mp, n));
  }
  return (j == 0) ? 1.0 : static_cast<double>(acc);
}

// Factorial and power moments up to j_max, as one table.
struct NumberMoments {
  std::vector<double> factorial;  // <a†^j a^j>
  std::vector<double> power;      // <N^j>
};

inline NumberMoments number_moments(const MomentProvider& mp, int j_max) {
  if (j_max < 0) throw invalid_argument("number_moments: negative order");
  if (j_max > kNumberMomentCap) throw order_limit_exceeded("number_moments: order above 16");
  NumberMoments t;
  t.factorial.resize(static_cast<size_t>(j_max) + 1, 1.0);
  t.power.resize(static_cast<size_t>(j_max) + 1, 1.0);
  for (int j = 1; j <= j_max; ++j) {
    t.factorial[static_cast<size_t>(j)] = factorial_moment(mp, j);
    long double acc = 0.0L;
    for (int n = 1; n <= j; ++n) {
      acc += static_cast<long double>(static_cast<double>(algebra::stirling2(j, n))) *
             static_cast<long double>(t.factorial[static_cast<size_t>(n)]);
    }
    t.power[static_cast<size_t>(j)] = static_cast<double>(acc);
  }
  return t;
}

// <(N - <N>)^l>, applied as one folded linear map over factorial moments.
inline double central_number_moment(const MomentProvider& mp, int l) {
  if (l < 1) throw invalid_argument("central_number_moment: order starts at 1");
  if (l > kNumberMomentCap) throw order_limit_exceeded("central_number_moment: order above 16");
  const long double mean = factorial_moment(mp, 1);
  const std::vector<long double> c = detail::central_fold(l, mean);
  long double acc = c[0];
  for (int n = 1; n <= l; ++n) {
    acc += c[static_cast<size_t>(n)] * static_cast<long double>(factorial_moment(mp, n));
  }
  return static_cast<double>(acc);
}

// l-th central moment of a Poisson distribution with the given mean, via the
// same folded map (Poisson factorial moments are plain powers of the mean).
inline double poisson_central_moment(int l, double lambda) {
  if (l < 0) throw invalid_argument("poisson_central_moment: negative order");
  if (l > kNumberMomentCap) throw order_limit_exceeded("poisson_central_moment: order above 16");
  if (l == 0) return 1.0;
  const std::vector<long double> c = detail::central_fold(l, lambda);
  long double acc = c[0];
  long double lp = 1.0L;
  for (int n = 1; n <= l; ++n) {
    lp *= lambda;
    acc += c[static_cast<size_t>(n)] * lp;
  }
  return static_cast<double>(acc);
}

// Order-l Mandel parameter: the excess of <(ΔN)^l> over the Poisson value at
// the same mean, in units of the mean.  Zero for every coherent state at
// every order; negative means sub-Poissonian statistics of order l.
inline double mandel_q(const MomentProvider& mp, int l) {
  if (l < 2) throw invalid_argument("mandel_q: order starts at 2");
  const double mean = number_moment(mp, 1);
  if (mean <= 1e-12) throw undefined_witness("mandel_q: mean photon number is zero");
  return (central_number_moment(mp, l) - poisson_central_moment(l, mean)) / mean;
}

// Higher-order antibunching: <a†^l a^l> - <a†a>^l, negative when present.
inline double hoa(const MomentProvider& mp, int l) {
  if (l < 2) throw invalid_argument("hoa: order starts at 2");
  if (l > kNumberMomentCap) throw order_limit_exceeded("hoa: order above 16");
  const double m1 = factorial_moment(mp, 1);
  return factorial_moment(mp, l) - std::pow(m1, l);
}

// Higher-order sub-Poissonian statistics: <(ΔN)^l> minus the Poisson central
// moment at the same mean.
inline double hosps(const MomentProvider& mp, int l) {
  if (l < 2) throw invalid_argument("hosps: order starts at 2");
  if (l > kQuadratureCap) throw order_limit_exceeded("hosps: order above 12");
  return central_number_moment(mp, l) - poisson_central_moment(l, number_moment(mp, 1));
}

// Higher-order squeezing of the x quadrature: relative deficit of <(ΔX)^l>
// against the vacuum value (l-1)!!/2^{l/2}.  Even orders only.
inline double hos(const MomentProvider& mp, int l) {
  if (l < 2 || l % 2 != 0) throw invalid_argument("hos: even order starting at 2");
  if (l > kQuadratureCap) throw order_limit_exceeded("hos: order above 12");
  const double mean = detail::real_part(mp.quadrature_mean(), "hos mean");
  std::vector<long double> raw(static_cast<size_t>(l) + 1);
  for (int k = 0; k <= l; ++k) {
    const auto poly = algebra::quadrature_power_expansion(k);
    const std::complex<double> value =
        poly.contract([&](int a, int b) { return mp.moment(a, b); });
    raw[static_cast<size_t>(k)] = detail::real_part(value, "hos quadrature moment");
  }
  long double acc = 0.0L;
  long double mean_pow = 1.0L;
  for (int k = 0; k <= l; ++k) {
    const long double c =
        static_cast<long double>(static_cast<double>(algebra::binomial(l, k)));
    const long double term = c * raw[static_cast<size_t>(l - k)] * mean_pow;
    acc += (k % 2 == 0) ? term : -term;
    mean_pow *= static_cast<long double>(mean);
  }
  const double vacuum = algebra::pochhammer_half(l).value();
  return (static_cast<double>(acc) - vacuum) / vacuum;
}

// Agarwal-Tara A3 from the order-3 Hankel matrices of factorial and number
// moments.  The cascade handles the degenerate inputs: vacuum pins the value
// at 0, rank-deficient matrices fall back to the order-2 ratio, and a
// vanishing denominator is reported as a pole instead of a number.
struct AgarwalTara {
  std::optional<double> value;
  std::string note;
};

inline AgarwalTara agarwal_tara(const MomentProvider& mp) {
  const double m1 = factorial_moment(mp, 1);
  if (m1 <= 1e-12) return {0.0, ""};

  std::array<long double, 5> fm{1.0L, 0.0L, 0.0L, 0.0L, 0.0L};
  std::array<long double, 5> nm{1.0L, 0.0L, 0.0L, 0.0L, 0.0L};
  for (int j = 1; j <= 4; ++j) {
    fm[static_cast<size_t>(j)] = factorial_moment(mp, j);
    nm[static_cast<size_t>(j)] = number_moment(mp, j);
  }
  auto hankel_det = [](const std::array<long double, 5>& v) {
    return v[0] * (v[2] * v[4] - v[3] * v[3]) - v[1] * (v[1] * v[4] - v[3] * v[2]) +
           v[2] * (v[1] * v[3] - v[2] * v[2]);
  };
  const double det_f = static_cast<double>(hankel_det(fm));
  const double det_n = static_cast<double>(hankel_det(nm));

  long double scale = 1.0L;
  for (int j = 1; j <= 4; ++j) scale = std::max(scale, std::abs(nm[static_cast<size_t>(j)]));
  const double tiny = 1e-12 * static_cast<double>(scale * scale * scale);

  if (std::abs(det_f) <= tiny && std::abs(det_n) <= tiny) {
    const double num = static_cast<double>(fm[2] - fm[1] * fm[1]);
    const double den = static_cast<double>((nm[2] - nm[1] * nm[1]) - (fm[2] - fm[1] * fm[1]));
    if (std::abs(den) <= 1e-12 * std::max(1.0, std::abs(num))) {
      return {std::nullopt, "singular"};
    }
    return {num / den, "reduced-order"};
  }

  const double den = det_n - det_f;
  if (std::abs(den) < 1e-12 * std::max({std::abs(det_n), std::abs(det_f), 1.0})) {
    return {std::nullopt, "singular"};
  }
  return {det_f / den, ""};
}

// Klyshko coefficient from three neighboring photon probabilities; a
// negative value at any m is a nonclassicality certificate.
inline double klyshko(const MomentProvider& mp, int m) {
  if (m < 0) throw invalid_argument("klyshko: negative index");
  if (m > 4094) throw order_limit_exceeded("klyshko: index above 4094");
  const double p0 = mp.photon_prob(m);
  const double p1 = mp.photon_prob(m + 1);
  const double p2 = mp.photon_prob(m + 2);
  return (m + 2) * p0 * p2 - (m + 1) * p1 * p1;
}

// Published closed form of the same coefficient, kept for cross-checks.  For
// the thermal family it coincides with the probability-based value; for the
// coherent family it drops state-dependent positive factors, which changes
// magnitudes and, beyond m = 1, signs.
inline double klyshko_printed(const states::StateSpec& spec_in, int m) {
  if (m < 0) throw invalid_argument("klyshko_printed: negative index");
  const states::StateSpec spec = states::effective_state(spec_in);
  const states::SupParams& p = spec.sup;
  const double g0 = p.g(m), g1 = p.g(m + 1), g2 = p.g(m + 2);
  const double bracket = (m + 2) * g0 * g0 * g2 * g2 - (m + 1) * g1 * g1 * g1 * g1;
  if (spec.family == states::Family::socs) {
    const double n1 = states::normalization_socs(p, spec.coherent);
    const double w = std::norm(spec.coherent.alpha);
    return std::pow(w, 2 * m + 2) * bracket / (n1 * n1);
  }
  const double n2 = states::normalization_sots(p, spec.thermal);
  const double mu = spec.thermal.mu();
  const double c = 1.0 / (1.0 + spec.thermal.nbar);
  return c * c * std::pow(mu, 2 * m + 2) * bracket / (n2 * n2);
}

// Husimi function of the operated states, closed form.
inline double husimi(const states::StateSpec& spec_in, std::complex<double> beta) {
  const states::StateSpec spec = states::effective_state(spec_in);
  const states::SupParams& p = spec.sup;
  const double d = p.s + p.t;
  if (spec.family == states::Family::socs) {
    const double n1 = states::normalization_socs(p, spec.coherent);
    const std::complex<double> core = p.s + d * spec.coherent.alpha * std::conj(beta);
    return std::norm(core) * std::exp(-std::norm(spec.coherent.alpha - beta)) / (M_PI * n1);
  }
  const double nbar = spec.thermal.nbar;
  const double n2 = states::normalization_sots(p, spec.thermal);
  const double x = nbar * std::norm(beta) / (1.0 + nbar);
  const double bracket = (p.s + d * x) * (p.s + d * x) + d * d * x;
  return std::exp(-std::norm(beta) / (1.0 + nbar)) * bracket / (M_PI * (1.0 + nbar) * n2);
}

// Radius beyond which the Husimi mass of the state is negligible.
inline double search_radius(const states::StateSpec& spec_in) {
  const states::StateSpec spec = states::effective_state(spec_in);
  if (spec.family == states::Family::socs) {
    return 8.0 + 2.0 * std::abs(spec.coherent.alpha);
  }
  return 8.0 + 4.0 * std::sqrt(1.0 + spec.thermal.nbar);
}

namespace detail {

// Gauss-Legendre nodes and weights on [-1, 1], Newton on the recurrence.
inline void gauss_legendre(int n, std::vector<double>& x, std::vector<double>& w) {
  x.assign(static_cast<size_t>(n), 0.0);
  w.assign(static_cast<size_t>(n), 0.0);
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double z = std::cos(M_PI * (i + 0.75) / (n + 0.5));
    double pp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = 0.0;
      for (int j = 0; j < n; ++j) {
        const double p2 = p1;
        p1 = p0;
        p0 = ((2.0 * j + 1.0) * z * p1 - j * p2) / (j + 1.0);
      }
      pp = n * (z * p0 - p1) / (z * z - 1.0);
      const double dz = p0 / pp;
      z -= dz;
      if (std::abs(dz) < 1e-15) break;
    }
    x[static_cast<size_t>(i)] = -z;
    x[static_cast<size_t>(n - 1 - i)] = z;
    w[static_cast<size_t>(i)] = 2.0 / ((1.0 - z * z) * pp * pp);
    w[static_cast<size_t>(n - 1 - i)] = w[static_cast<size_t>(i)];
  }
}

}  // namespace detail

// Integral of f over the disk |beta| <= radius: Gauss-Legendre radially,
// trapezoid in the angle (periodic, hence spectrally accurate).
inline double plane_integral(const std::function<double(std::complex<double>)>& f,
                             double radius, int radial_nodes = 200, int angular_nodes = 256) {
  std::vector<double> x, w;
  detail::gauss_legendre(radial_nodes, x, w);
  const double dtheta = 2.0 * M_PI / angular_nodes;
  long double acc = 0.0L;
  for (int i = 0; i < radial_nodes; ++i) {
    const double r = radius * (x[static_cast<size_t>(i)] + 1.0) / 2.0;
    const double wr = w[static_cast<size_t>(i)] * radius / 2.0 * r;
    long double ring = 0.0L;
    for (int j = 0; j < angular_nodes; ++j) {
      const double theta = j * dtheta;
      ring += f(std::complex<double>(r * std::cos(theta), r * std::sin(theta)));
    }
    acc += static_cast<long double>(wr) * ring * static_cast<long double>(dtheta);
  }
  return static_cast<double>(acc);
}

namespace detail {

struct DiskPoint {
  std::complex<double> at;
  double value;
};

// Coarse polar scan, optional seed, then a shrinking 3x3 stencil refinement
// around the best point.
inline DiskPoint disk_argmin(const std::function<double(std::complex<double>)>& f,
                             double radius, std::optional<std::complex<double>> seed) {
  std::complex<double> best_at(0.0, 0.0);
  double best = f(best_at);
  auto consider = [&](std::complex<double> z) {
    if (std::abs(z) > radius) return;
    const double v = f(z);
    if (v < best) {
      best = v;
      best_at = z;
    }
  };
  if (seed && std::abs(*seed) <= radius) consider(*seed);
  const int nr = 96, nt = 128;
  for (int i = 1; i <= nr; ++i) {
    const double r = radius * i / nr;
    for (int j = 0; j < nt; ++j) {
      const double theta = 2.0 * M_PI * j / nt;
      consider(std::complex<double>(r * std::cos(theta), r * std::sin(theta)));
    }
  }
  double step = radius / nr;
  for (int it = 0; it < 40; ++it) {
    const std::complex<double> center = best_at;
    for (int dx = -1; dx <= 1; ++dx) {
      for (int dy = -1; dy <= 1; ++dy) {
        if (dx == 0 && dy == 0) continue;
        consider(center + std::complex<double>(dx * step, dy * step));
      }
    }
    if (best_at == center) step /= 2.0;
    if (step < 1e-12) break;
  }
  return {best_at, best};
}

// Largest value of f on a coarse polar grid; used to scale zero thresholds.
inline double disk_max(const std::function<double(std::complex<double>)>& f, double radius) {
  double best = f(std::complex<double>(0.0, 0.0));
  const int nr = 64, nt = 96;
  for (int i = 1; i <= nr; ++i) {
    const double r = radius * i / nr;
    for (int j = 0; j < nt; ++j) {
      const double theta = 2.0 * M_PI * j / nt;
      best = std::max(best, f(std::complex<double>(r * std::cos(theta), r * std::sin(theta))));
    }
  }
  return best;
}

}  // namespace detail

// Minimum of f over the disk |beta| <= radius.
inline double function_minimum(const std::function<double(std::complex<double>)>& f,
                               double radius,
                               std::optional<std::complex<double>> seed = std::nullopt) {
  return detail::disk_argmin(f, radius, seed).value;
}

// Location where the Husimi function vanishes inside the search disk, if it
// does.  The coherent family has a closed-form candidate wherever the core
// factor s + (s+t) alpha conj(beta) can vanish, with a grid-refined
// minimization as fallback; for the thermal family the radial bracket
// (s + (s+t)x)^2 + (s+t)^2 x is scanned for a sign change and bisected.
// Any candidate must beat 1e-12 of the grid maximum to count as a zero;
// absence is a valid result, not an error.
inline std::optional<std::complex<double>> husimi_zero_locus(const states::StateSpec& spec_in,
                                                             double radius) {
  const states::StateSpec spec = states::effective_state(spec_in);
  const states::SupParams& p = spec.sup;
  const double d = p.s + p.t;
  auto f = [&spec](std::complex<double> beta) { return husimi(spec, beta); };
  const double threshold = 1e-12 * detail::disk_max(f, radius);
  auto accept = [&](std::complex<double> z) { return std::abs(z) <= radius && f(z) <= threshold; };

  if (spec.family == states::Family::socs) {
    std::optional<std::complex<double>> cand;
    if (p.s == 0.0) {
      cand = std::complex<double>(0.0, 0.0);
    } else if (d != 0.0 && spec.coherent.alpha != std::complex<double>(0.0, 0.0)) {
      cand = std::conj(-p.s / (d * spec.coherent.alpha));
    }
    if (cand && accept(*cand)) return cand;
    // A mere tail of the distribution also dips under the threshold near the
    // rim; only a strictly interior minimum counts as a zero.
    const detail::DiskPoint m = detail::disk_argmin(f, radius, cand);
    if (m.value <= threshold && std::abs(m.at) <= 0.98 * radius) return m.at;
    return std::nullopt;
  }

  const double nbar = spec.thermal.nbar;
  auto bracket = [&](double x) { return (p.s + d * x) * (p.s + d * x) + d * d * x; };
  if (bracket(0.0) == 0.0 && accept(std::complex<double>(0.0, 0.0))) {
    return std::complex<double>(0.0, 0.0);
  }
  if (nbar > 0.0) {
    const double xmax = nbar * radius * radius / (1.0 + nbar);
    const int n = 4096;
    double prev = bracket(0.0);
    for (int i = 1; i <= n; ++i) {
      const double x = xmax * i / n;
      const double cur = bracket(x);
      if ((prev < 0.0) != (cur < 0.0)) {
        double lo = xmax * (i - 1) / n, hi = x;
        for (int it = 0; it < 200; ++it) {
          const double mid = (lo + hi) / 2.0;
          if ((bracket(lo) < 0.0) == (bracket(mid) < 0.0)) lo = mid; else hi = mid;
        }
        const double xr = (lo + hi) / 2.0;
        const std::complex<double> beta(std::sqrt(xr * (1.0 + nbar) / nbar), 0.0);
        if (accept(beta)) return beta;
      }
      prev = cur;
    }
  }
  return std::nullopt;
}

inline std::optional<std::complex<double>> husimi_zero_locus(const states::StateSpec& spec) {
  return husimi_zero_locus(spec, search_radius(spec));
}

// Uniform wrapper for the moment-based criteria; the phase-space criterion
// needs state-level data and is assembled by the caller.
struct WitnessResult {
  Criterion criterion;
  int order;
  std::optional<double> value;
  bool nonclassical;
  std::string note;
};

inline WitnessResult evaluate(const MomentProvider& mp, Criterion criterion, int order) {
  WitnessResult r{criterion, order, std::nullopt, false, ""};
  switch (criterion) {
    case Criterion::q: r.value = mandel_q(mp, order); break;
    case Criterion::hoa: r.value = hoa(mp, order); break;
    case Criterion::hosps: r.value = hosps(mp, order); break;
    case Criterion::hos: r.value = hos(mp, order); break;
    case Criterion::klyshko: r.value = klyshko(mp, order); break;
    case Criterion::a3: {
      const AgarwalTara a = agarwal_tara(mp);
      r.value = a.value;
      r.note = a.note;
      break;
    }
    case Criterion::husimi:
      throw invalid_argument("evaluate: the phase-space criterion needs state-level data");
  }
  r.nonclassical = r.value.has_value() && *r.value < 0.0;
  return r;
}

}  // namespace supnc::witnesses
