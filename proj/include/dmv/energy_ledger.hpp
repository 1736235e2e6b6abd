#pragma once

// Energy bookkeeping along one Wiener path: total energy, viscous
// dissipation, Ito correction and the realized energy martingale, sampled on
// a fixed time grid. Increments use left-point (Ito) evaluation.

#include <cstdint>
#include <functional>
#include <vector>

#include "dmv/dynamics.hpp"
#include "dmv/ensemble_ym.hpp"

namespace dmv {

struct LedgerRow {
  double t = 0;
  double E = 0;
  double D = 0;
  double dissipation_cum = 0;
  double ito_cum = 0;
  double martingale = 0;
  double residual = 0;  // energy residual over [0, t]
};

struct EnergyLedger {
  std::vector<LedgerRow> rows;
};

/// int <nu; |m|^2 / (2 rho) + P_delta(rho)> dx + D.
double total_energy(const EmpiricalYoungMeasure& ym, double D, const PressureLaw& law, double rho_floor = 1e-8);

/// [E(t) + dissipation(tau, t)] - [E(tau) + ito(tau, t) + martingale(tau, t)]
/// between sample rows `tau` < `t`.
double energy_residual(const EnergyLedger& ledger, std::size_t tau, std::size_t t);

class LedgerAccumulator {
 public:
  LedgerAccumulator(ModelConfig model, double rho_floor = 1e-8);

  /// Appends a row for the current measure at time t.
  void sample(const EmpiricalYoungMeasure& ym, double t);
  /// Adds dissipation, Ito and martingale increments of a step of size dt
  /// with increments dW, evaluated at the measure before the step.
  void advance(const EmpiricalYoungMeasure& ym, const Eigen::VectorXd& dW, double dt);

  const EnergyLedger& ledger() const { return ledger_; }

 private:
  ModelConfig model_;
  PressureLaw law_;
  double rho_floor_;
  double dissipation_ = 0, ito_ = 0, martingale_ = 0;
  EnergyLedger ledger_;
};

/// Per-column mean and standard error over ledgers sharing one time axis.
struct LedgerStats {
  EnergyLedger mean;
  EnergyLedger standard_error;
};
LedgerStats ledger_stats(const std::vector<EnergyLedger>& ledgers);

std::string ledger_csv_header();
std::string ledger_csv(const EnergyLedger& ledger);
/// Mean columns followed by their standard errors (suffix _se).
std::string ledger_stats_csv(const LedgerStats& stats);

struct PoincareReport {
  double oscillation = 0;  // int <nu; |u - <u>|^2> dx
  double D = 0;
  double ratio = 0;
  bool pass = true;
};

/// Velocity oscillation against the dissipation defect; 0/0 passes.
PoincareReport poincare_ratio(const EmpiricalYoungMeasure& ym, double D, double c_p, double rho_floor = 1e-8);

/// Test process f(t) = drift t + sum_k coupling_k W_k(t) + independent W'(t),
/// where W' is a Wiener process independent of the driving noise.
struct TestProcess {
  Eigen::VectorXd coupling;
  double drift = 0;
  double independent = 0;
};

struct CrossVariationConfig {
  ModelConfig model;
  Grid grid{std::vector<int>{16}};
  std::function<State(const Grid&)> initial;
  TestProcess f;
  /// Momentum component paired with the constant test function.
  int component = 0;
  double dt = 1e-2;
  double horizon = 1.0;
  int paths = 10000;
  std::uint64_t seed = 0;
  int threads = 0;
};

struct CrossVariationReport {
  double estimate = 0;     // mean of f(T) M(T)
  double expected = 0;     // mean of sum_k coupling_k int int <G_k> dx dt
  double difference = 0;   // paired mean of the two
  double standard_error = 0;
  bool pass = false;       // |difference| <= 5 standard errors
};

/// Monte Carlo check of the cross variation between f and the momentum
/// martingale M(t) = int <nu; m>(t) - int <nu; m>(0) - int int drift.
CrossVariationReport cross_variation_audit(const CrossVariationConfig& cfg);

}  // namespace dmv
