#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <complex>
#include <vector>

#include "supnc/states.hpp"

using namespace supnc;
using namespace supnc::states;
using Catch::Approx;

namespace {

// Direct Fock-space evaluation of the operated coherent state, independent of
// every closed form under test: amplitudes e^{-|a|^2/2} a^n/sqrt(n!) · g(n).
struct CoherentFockOracle {
  std::vector<std::complex<double>> amp;  // unnormalized
  double norm_sq = 0.0;

  CoherentFockOracle(const SupParams& p, std::complex<double> alpha, int terms) {
    amp.resize(static_cast<size_t>(terms));
    const double w = std::norm(alpha);
    std::complex<double> coherent(std::exp(-w / 2.0), 0.0);
    for (int n = 0; n < terms; ++n) {
      amp[static_cast<size_t>(n)] = coherent * p.g(n);
      norm_sq += std::norm(amp[static_cast<size_t>(n)]);
      coherent *= alpha / std::sqrt(static_cast<double>(n) + 1.0);
    }
  }

  std::complex<double> moment(int m, int n) const {
    std::complex<long double> acc = 0.0L;
    for (size_t k = 0; k + std::max(m, n) < amp.size(); ++k) {
      double f = 1.0;
      for (int j = 1; j <= m; ++j) f *= static_cast<double>(k) + j;
      double h = 1.0;
      for (int j = 1; j <= n; ++j) h *= static_cast<double>(k) + j;
      acc += std::complex<long double>(std::conj(amp[k + static_cast<size_t>(m)]) *
                                       amp[k + static_cast<size_t>(n)]) *
             static_cast<long double>(std::sqrt(f) * std::sqrt(h));
    }
    return static_cast<std::complex<double>>(acc) / norm_sq;
  }
};

// Exact operated-thermal factorial moments via the linearity of g(r)^2 in
// r, r^2 and the closed thermal falling-factorial moments T_j = j! nbar^j.
double exact_sots_weighted_sum(const SupParams& p, double nbar, int n) {
  auto T = [nbar](int j) {
    double f = 1.0;
    for (int i = 2; i <= j; ++i) f *= i;
    return f * std::pow(nbar, j);
  };
  const double d = p.s + p.t;
  const double B = 2.0 * p.s * d;
  const double C = d * d;
  return p.g(n) * p.g(n) * T(n) + (B + C * (2.0 * n + 1.0)) * T(n + 1) + C * T(n + 2);
}

}  // namespace

TEST_CASE("sup parameter validation and eigenvalues", "[states]") {
  CHECK_THROWS_AS(SupParams(0.5, 0.5), invalid_argument);
  CHECK_THROWS_AS(SupParams(1.0, 1.0), invalid_argument);
  SupParams p(0.6, 0.8);
  CHECK(p.g(0) == Approx(0.6));
  CHECK(p.g(2) == Approx(0.6 + 2.8));

  auto q = sup_from_s(0.2);
  CHECK(q.t == Approx(std::sqrt(0.96)));
  CHECK(sup_from_s(1.0).t == 0.0);
  CHECK_THROWS_AS(sup_from_s(1.5), invalid_argument);

  // Negative t branch is expressible.
  SupParams neg(0.6, -0.8);
  CHECK(neg.g(1) == Approx(0.4));
}

TEST_CASE("coherent normalization closed form", "[states]") {
  CHECK(normalization_socs(SupParams(1.0, 0.0), CoherentSpec(0.0)) == Approx(1.0));
  CHECK(normalization_socs(SupParams(0.6, 0.8), CoherentSpec(0.0)) == Approx(0.36));
  const double r = 1.0 / std::sqrt(2.0);
  CHECK(normalization_socs(SupParams(r, r), CoherentSpec(1.0)) == Approx(6.5));
  CHECK_THROWS_AS(normalization_socs(SupParams(0.0, 1.0), CoherentSpec(0.0)), degenerate_state);

  // Any alpha phase leaves the norm unchanged.
  CHECK(normalization_socs(SupParams(0.6, 0.8), CoherentSpec({0.6, 0.8})) ==
        Approx(normalization_socs(SupParams(0.6, 0.8), CoherentSpec(1.0))));
}

TEST_CASE("thermal normalization closed form", "[states]") {
  CHECK(normalization_sots(SupParams(0.6, 0.8), ThermalSpec(0.0)) == Approx(0.36));
  CHECK(normalization_sots(SupParams(0.0, 1.0), ThermalSpec(1.0)) == Approx(3.0));
  CHECK_THROWS_AS(normalization_sots(SupParams(0.0, 1.0), ThermalSpec(0.0)), degenerate_state);

  // Series oracle first: direct geometric sum of a_r g(r)^2.
  SupParams p(0.6, 0.8);
  double direct = 0.0;
  for (int r = 0; r < 400; ++r) direct += ThermalSpec(1.0).weight(r) * p.g(r) * p.g(r);
  CHECK(direct == Approx(7.92).epsilon(1e-12));
  CHECK(normalization_sots(p, ThermalSpec(1.0)) == Approx(7.92).epsilon(1e-12));
}

TEST_CASE("coherent moments against a direct Fock sum", "[states]") {
  struct Case {
    SupParams p;
    std::complex<double> alpha;
  };
  const Case cases[] = {
      {sup_from_s(0.2), {1.0, 0.0}},
      {sup_from_s(0.5), {0.6, 0.3}},
      {SupParams(0.5, -std::sqrt(0.75)), {1.5, -0.4}},
      {sup_from_s(0.8), {2.0, 0.0}},
  };
  for (const auto& c : cases) {
    CoherentFockOracle oracle(c.p, c.alpha, 80);
    for (int m = 0; m <= 4; ++m)
      for (int n = 0; n <= 4; ++n) {
        auto closed = moment_socs(m, n, c.p, CoherentSpec(c.alpha));
        auto direct = oracle.moment(m, n);
        CAPTURE(c.p.s, c.p.t, c.alpha, m, n);
        CHECK(std::abs(closed - direct) <=
              1e-10 * std::max(1.0, std::abs(direct)));
      }
  }
}

TEST_CASE("coherent moment structure", "[states]") {
  SupParams p = sup_from_s(0.3);
  CHECK(moment_socs(0, 0, p, CoherentSpec({1.2, 0.7})) == std::complex<double>(1.0));
  CHECK(moment_socs(2, 1, p, CoherentSpec(0.0)) == std::complex<double>(0.0));
  CHECK(moment_socs(0, 3, p, CoherentSpec(0.0)) == std::complex<double>(0.0));

  // Hermiticity under order swap.
  auto a = moment_socs(3, 1, p, CoherentSpec({0.8, -0.5}));
  auto b = moment_socs(1, 3, p, CoherentSpec({0.8, -0.5}));
  CHECK(a.real() == Approx(b.real()));
  CHECK(a.imag() == Approx(-b.imag()));

  CHECK_THROWS_AS(moment_socs(65, 0, p, CoherentSpec(1.0)), order_limit_exceeded);
  CHECK_THROWS_AS(moment_socs(-1, 0, p, CoherentSpec(1.0)), invalid_argument);
}

TEST_CASE("thermal moments against exact factorial identities", "[states]") {
  // Frozen value first: with s=0, t=1 the moment (1,1) is the ratio of bare
  // thermal power moments <N^3>/<N^2>; direct geometric sums give 13 and 3.
  double n3 = 0.0, n2 = 0.0;
  for (int r = 0; r < 400; ++r) {
    const double w = ThermalSpec(1.0).weight(r);
    n2 += w * r * r;
    n3 += w * r * r * r;
  }
  CHECK(n2 == Approx(3.0).epsilon(1e-12));
  CHECK(n3 == Approx(13.0).epsilon(1e-12));
  CHECK(moment_sots(1, 1, SupParams(0.0, 1.0), ThermalSpec(1.0)) ==
        Approx(13.0 / 3.0).epsilon(1e-12));

  for (double s : {0.2, 0.5, 0.8})
    for (double nbar : {0.5, 1.0, 2.0}) {
      SupParams p = sup_from_s(s);
      const double norm = exact_sots_weighted_sum(p, nbar, 0);
      for (int n = 1; n <= 6; ++n) {
        CAPTURE(s, nbar, n);
        CHECK(moment_sots(n, n, p, ThermalSpec(nbar)) ==
              Approx(exact_sots_weighted_sum(p, nbar, n) / norm).epsilon(1e-12));
      }
    }
}

TEST_CASE("thermal moment structure", "[states]") {
  SupParams p = sup_from_s(0.4);
  CHECK(moment_sots(2, 1, p, ThermalSpec(1.0)) == 0.0);
  CHECK(moment_sots(0, 0, p, ThermalSpec(2.0)) == 1.0);
  CHECK(moment_sots(1, 1, p, ThermalSpec(0.0)) == 0.0);
  CHECK_THROWS_AS(moment_sots(65, 65, p, ThermalSpec(1.0)), order_limit_exceeded);
}

TEST_CASE("photon probabilities", "[states]") {
  auto socs = StateSpec::socs(sup_from_s(0.3), 0.0);
  CHECK(photon_probability(socs, 0) == 1.0);
  CHECK(photon_probability(socs, 3) == 0.0);

  auto sots0 = StateSpec::sots(sup_from_s(0.3), 0.0);
  CHECK(photon_probability(sots0, 0) == 1.0);

  // Distribution matches the direct amplitude construction.
  SupParams p = sup_from_s(0.2);
  CoherentFockOracle oracle(p, {2.0, 0.0}, 80);
  auto spec = StateSpec::socs(p, {2.0, 0.0});
  for (int m = 0; m <= 30; ++m) {
    CAPTURE(m);
    CHECK(photon_probability(spec, m) ==
          Approx(std::norm(oracle.amp[static_cast<size_t>(m)]) / oracle.norm_sq)
              .margin(1e-12));
  }

  for (auto spec2 : {StateSpec::socs(sup_from_s(0.5), {1.0, 1.0}),
                     StateSpec::sots(sup_from_s(0.5), 2.0),
                     StateSpec::socs(SupParams(0.6, -0.8), {1.5, 0.0}),
                     StateSpec::sots(sup_from_s(0.8), 0.5, 0.25)}) {
    double sum = 0.0;
    for (int m = 0; m <= 400; ++m) {
      const double pm = photon_probability(spec2, m);
      REQUIRE(pm >= 0.0);
      sum += pm;
    }
    CHECK(sum == Approx(1.0).margin(1e-10));
  }

  CHECK_THROWS_AS(photon_probability(socs, 4097), order_limit_exceeded);
  CHECK_THROWS_AS(photon_probability(socs, -1), invalid_argument);
}

TEST_CASE("detector attenuation folds into the state parameters", "[states]") {
  SupParams p = sup_from_s(0.2);

  auto same = effective_state(StateSpec::socs(p, {1.0, 0.5}, 0.0));
  CHECK(same.coherent.alpha == std::complex<double>(1.0, 0.5));
  CHECK(same.detector.eta == 0.0);

  auto dark = effective_state(StateSpec::socs(p, {1.0, 0.5}, 1.0));
  CHECK(dark.coherent.alpha == std::complex<double>(0.0, 0.0));

  auto scaled = effective_state(StateSpec::socs(p, {2.0, 0.0}, 0.25));
  CHECK(scaled.coherent.alpha.real() == Approx(1.5));

  // Oracle for the thermal reparametrization: attenuate the geometric
  // weights directly and read off the surviving ratio.
  const double eta = 0.5, nbar = 1.0;
  ThermalSpec th(nbar);
  auto attenuated = [&](int r) {
    return th.weight(r) * std::pow(1.0 - eta, 2 * r);
  };
  const double ratio = attenuated(5) / attenuated(4);  // = mu (1-eta)^2
  CHECK(ratio == Approx(1.0 / 8.0).epsilon(1e-12));
  const double fitted_nbar = ratio / (1.0 - ratio);
  CHECK(fitted_nbar == Approx(1.0 / 7.0).epsilon(1e-12));

  auto eff = effective_state(StateSpec::sots(p, nbar, eta));
  CHECK(eff.thermal.nbar == Approx(1.0 / 7.0).epsilon(1e-12));

  // Full distribution agreement, not just the fitted ratio.
  auto spec = StateSpec::sots(p, nbar, eta);
  double total = 0.0;
  for (int r = 0; r < 200; ++r) total += attenuated(r) * p.g(r) * p.g(r);
  for (int r = 0; r <= 40; ++r) {
    CAPTURE(r);
    CHECK(photon_probability(spec, r) ==
          Approx(attenuated(r) * p.g(r) * p.g(r) / total).margin(1e-14));
  }
}

TEST_CASE("published efficiency formulas kept verbatim", "[states]") {
  SupParams p = sup_from_s(0.2);
  CoherentSpec c(1.0);
  ThermalSpec th(1.0);

  // At eta = 0 the printed coherent normalization triples the true one and
  // the printed (0,0) moment is 4/3, not 1.
  const double n1 = normalization_socs(p, c);
  CHECK(eta_formula_normalization_socs(p, c, DetectorSpec(0.0)) ==
        Approx(3.0 * n1).epsilon(1e-12));
  CHECK(eta_formula_moment_socs(0, 0, p, c, DetectorSpec(0.0)).real() ==
        Approx(4.0 / 3.0).epsilon(1e-12));

  // The printed thermal normalization cancels identically at eta = 0.
  CHECK(std::abs(eta_formula_normalization_sots(p, th, DetectorSpec(0.0))) < 1e-12);
  CHECK_THROWS_AS(eta_formula_moment_sots(1, p, th, DetectorSpec(0.0)),
                  degenerate_denominator);

  // Away from eta = 0 both evaluate to finite values.
  auto v = eta_formula_moment_socs(0, 0, p, c, DetectorSpec(0.5));
  CHECK(std::isfinite(v.real()));
  auto u = eta_formula_moment_sots(1, p, th, DetectorSpec(0.5));
  CHECK(std::isfinite(u));
  CHECK(u >= 0.0);
}

TEST_CASE("spec constructors validate inputs", "[states]") {
  CHECK_THROWS_AS(ThermalSpec(-0.5), invalid_argument);
  CHECK_THROWS_AS(DetectorSpec(1.5), invalid_argument);
  CHECK_THROWS_AS(DetectorSpec(-0.1), invalid_argument);
  CHECK_THROWS_AS(CoherentSpec({std::numeric_limits<double>::infinity(), 0.0}),
                  invalid_argument);
}
