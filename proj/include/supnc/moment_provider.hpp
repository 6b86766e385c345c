#pragma once

#include <cmath>
#include <complex>
#include <utility>
#include <variant>

#include "supnc/errors.hpp"
#include "supnc/oracle.hpp"
#include "supnc/states.hpp"

// Uniform moment source the witnesses consume.  Closed forms and the
// truncated construction sit behind the same interface so every witness can
// run against either backend unchanged.
namespace supnc {

class MomentProvider {
 public:
  virtual ~MomentProvider() = default;

  // Normally ordered moment <a†^m a^n>.
  virtual std::complex<double> moment(int m, int n) const = 0;

  // Probability of finding m photons.
  virtual double photon_prob(int m) const = 0;

  // Largest m, n the provider supports.
  virtual int order_bound() const = 0;

  // <X> for the x quadrature; real for every state handled here.
  std::complex<double> quadrature_mean() const {
    return (moment(1, 0) + moment(0, 1)) / std::sqrt(2.0);
  }
};

class ClosedFormProvider final : public MomentProvider {
 public:
  explicit ClosedFormProvider(const states::StateSpec& spec)
      : spec_(states::effective_state(spec)) {}

  std::complex<double> moment(int m, int n) const override {
    return states::moment(spec_, m, n);
  }

  double photon_prob(int m) const override { return states::photon_probability(spec_, m); }

  int order_bound() const override { return 64; }

  const states::StateSpec& spec() const { return spec_; }

 private:
  states::StateSpec spec_;  // detector already folded in
};

class OracleProvider final : public MomentProvider {
 public:
  // Builds the truncated state with a cutoff sized for max_order.
  OracleProvider(const states::StateSpec& spec, int max_order) {
    const int cutoff = oracle::choose_cutoff(spec, max_order);
    if (spec.family == states::Family::socs) {
      state_ = oracle::build_socs(spec.sup, spec.coherent, spec.detector, cutoff);
    } else {
      state_ = oracle::build_sots(spec.sup, spec.thermal, spec.detector, cutoff);
    }
  }

  // Adopts an externally built state (Fock states, custom weights).
  explicit OracleProvider(oracle::FockVector state) : state_(std::move(state)) {
    oracle::validate_state(std::get<oracle::FockVector>(state_));
  }
  explicit OracleProvider(oracle::FockDiagonal state) : state_(std::move(state)) {
    oracle::validate_state(std::get<oracle::FockDiagonal>(state_));
  }

  std::complex<double> moment(int m, int n) const override {
    return std::visit([&](const auto& s) { return oracle::oracle_moment(s, m, n); }, state_);
  }

  double photon_prob(int m) const override {
    return std::visit([&](const auto& s) { return oracle::oracle_photon_prob(s, m); }, state_);
  }

  int order_bound() const override {
    return std::visit([](const auto& s) { return s.cutoff; }, state_) - 4;
  }

  double quadrature_moment(int k) const {
    return std::visit([&](const auto& s) { return oracle::oracle_quadrature_moment(s, k); },
                      state_);
  }

  const std::variant<oracle::FockVector, oracle::FockDiagonal>& state() const { return state_; }

 private:
  std::variant<oracle::FockVector, oracle::FockDiagonal> state_;
};

}  // namespace supnc
