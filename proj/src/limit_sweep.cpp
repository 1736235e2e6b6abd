#include "dmv/limit_sweep.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <sstream>

#include <Eigen/QR>

#include "dmv/ensemble_ym.hpp"
#include "dmv/euler_ref.hpp"
#include "dmv/parallel.hpp"
#include "dmv/relative_energy.hpp"

namespace dmv {

State well_prepared_data(double eps, const VectorField& v0, double delta, const DataPerturbation& shape) {
  if (!(eps > 0)) throw InvalidArgument("well_prepared_data: eps must be positive");
  if (!(delta >= 0)) throw InvalidArgument("well_prepared_data: delta must be nonnegative");
  const Grid& g = v0.grid();
  detail::require_same_grid(g, shape.eta.grid(), "well_prepared_data");
  detail::require_same_grid(g, shape.zeta.grid(), "well_prepared_data");
  const double div = max_abs(divergence(v0));
  if (div > 1e-8 * std::max(1.0, v0.values().abs().maxCoeff()))
    throw InvalidArgument("well_prepared_data: v0 is not divergence free (max |div v0| = " + std::to_string(div) + ")");
  if (max_abs(shape.eta) > 1 || shape.zeta.values().square().rowwise().sum().sqrt().maxCoeff() > 1 + 1e-15)
    throw InvalidArgument("well_prepared_data: perturbation shapes must be bounded by one");
  ScalarField::Values rho = 1 + eps * delta * shape.eta.values();
  if (!(rho.minCoeff() > 0)) throw InvalidArgument("well_prepared_data: density is not positive");
  return {ScalarField(g, std::move(rho)), VectorField(g, v0.values() + delta * shape.zeta.values())};
}

DataPerturbation low_mode_perturbation(const Grid& g, std::uint64_t seed, int path, int replica) {
  const std::uint64_t key = seed ^ 0x5eedda7aULL;
  const std::uint64_t id = std::uint64_t(path) << 20 | std::uint64_t(replica);
  auto u = [&](std::uint64_t slot) { return keyed_uniform(key, id, slot, 0); };
  // Amplitudes in [-1/2, 1/2] keep rho0 >= 1/2 even at eps = delta = 1.
  const double a = u(0) - 0.5, phi = kTwoPi * u(1);
  const double b = u(2) - 0.5, psi = kTwoPi * u(3);
  const double c = u(4) - 0.5, chi = kTwoPi * u(5);
  const bool two_d = g.dim() == 2;
  auto eta = ScalarField::sample(g, [&](double x, double y) { return a * std::sin((two_d ? y : x) + phi); });
  auto zeta = VectorField::sample(g, [&](double x, double y) {
    if (!two_d) return std::array<double, 2>{b * std::cos(x + psi), 0};
    return std::array<double, 2>{b * std::cos(y + psi), c * std::sin(x + chi)};
  });
  return {std::move(eta), std::move(zeta)};
}

double PowerLaw::operator()(double eps) const { return coef * std::pow(eps, power); }

void SweepConfig::validate() const {
  law.validate();
  if (eps.empty()) throw InvalidArgument("sweep: empty eps schedule");
  for (double e : eps) {
    if (!(e > 0)) throw InvalidArgument("sweep: eps values must be positive");
    if (!(nu(e) > 0)) throw InvalidArgument("sweep: nu_eps must be positive");
    if (!(lambda(e) >= 0)) throw InvalidArgument("sweep: lambda_eps must be nonnegative");
    if (!(delta(e) >= 0)) throw InvalidArgument("sweep: delta_eps must be nonnegative");
  }
  if (!(nu.power > 0) || !(lambda.power > 0 || lambda.coef == 0))
    throw InvalidArgument("sweep: viscosities must vanish as eps -> 0");
  if (!(horizon > 0) || samples < 1 || paths < 1 || replicas < 1)
    throw InvalidArgument("sweep: horizon, samples, paths and replicas must be positive");
  if (!(grad_threshold > 0)) throw InvalidArgument("sweep: gradient threshold must be positive");
  if (!(acoustic_safety > 0) || !(cfl > 0 && cfl <= 1)) throw InvalidArgument("sweep: bad step controls");
  require_solenoidal_noise(noise);
}

VectorField taylor_green(const Grid& g) {
  if (g.dim() != 2) throw InvalidArgument("taylor_green: needs a 2D grid");
  return VectorField::sample(g, [](double x, double y) {
    return std::array<double, 2>{std::sin(x) * std::cos(y), -std::cos(x) * std::sin(y)};
  });
}

RateFit fit_rate(const std::vector<double>& eps, const std::vector<double>& values) {
  if (eps.size() != values.size()) throw InvalidArgument("fit_rate: series lengths differ");
  if (eps.size() < 3) throw InvalidArgument("fit_rate: need at least three eps points");
  const std::size_t n = eps.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) { return eps[i] > eps[j]; });
  RateFit fit;
  fit.monotone = true;
  for (std::size_t i = 1; i < n; ++i)
    if (!(values[order[i]] < values[order[i - 1]])) fit.monotone = false;
  Eigen::MatrixXd A(n, 2);
  Eigen::VectorXd y(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (!(eps[i] > 0) || !(values[i] > 0)) throw InvalidArgument("fit_rate: eps and values must be positive");
    A(i, 0) = std::log(eps[i]);
    A(i, 1) = 1;
    y[i] = std::log(values[i]);
  }
  const Eigen::Vector2d c = A.colPivHouseholderQr().solve(y);
  fit.slope = c[0];
  fit.intercept = c[1];
  return fit;
}

double envelope_exponent(const SweepConfig& cfg) {
  double e = std::min({2.0 / std::min(cfg.law.gamma, 2.0), cfg.delta.power, cfg.nu.power});
  if (cfg.lambda.coef != 0) e = std::min(e, cfg.lambda.power);
  return e;
}

namespace {

ModelConfig sweep_model(const SweepConfig& cfg, double eps) {
  ModelConfig m;
  m.law = cfg.law;
  m.visc = {cfg.nu(eps), cfg.lambda(eps)};
  m.noise = cfg.noise;
  m.mach_eps = eps;
  m.grad_threshold = cfg.grad_threshold;
  return m;
}

VectorField initial_velocity(const SweepConfig& cfg) { return cfg.v0 ? cfg.v0(cfg.grid) : taylor_green(cfg.grid); }

int dyadic_level(const SweepConfig& cfg, double eps) {
  const ModelConfig model = sweep_model(cfg, eps);
  StepperConfig stepper;
  stepper.cfl = cfg.cfl;
  const VectorField v0 = initial_velocity(cfg);
  double cap = std::numeric_limits<double>::infinity();
  for (int j = 0; j < cfg.replicas; ++j)
    cap = std::min(cap, cfl_dt(model, stepper, well_prepared_data(eps, v0, cfg.delta(eps),
                                                                  low_mode_perturbation(cfg.grid, cfg.seed, 0, j))));
  const double c2 = pressure_delta_derivative(cfg.law, 1.0, 1);
  cap = std::min(cap, cfg.acoustic_safety * (model.visc.nu + model.visc.lambda) * eps * eps / c2);
  int level = 0;
  while (cfg.horizon / (cfg.samples * std::ldexp(1.0, level)) > cap) {
    if (++level > 40) throw InvalidArgument("sweep: step size underflow");
  }
  return level;
}

struct PathResult {
  std::vector<double> E, D;
  double tau = 0;
};

}  // namespace

double sweep_dt(const SweepConfig& cfg, double eps) {
  return cfg.horizon / (cfg.samples * std::ldexp(1.0, dyadic_level(cfg, eps)));
}

RateReport run_sweep(const SweepConfig& cfg) {
  cfg.validate();
  const VectorField v0 = initial_velocity(cfg);
  const int K = cfg.noise.modes();
  std::vector<int> levels;
  for (double e : cfg.eps) levels.push_back(dyadic_level(cfg, e));
  const int finest = *std::max_element(levels.begin(), levels.end());

  RateReport rep;
  rep.envelope_exponent = envelope_exponent(cfg);
  for (std::size_t q = 0; q < cfg.eps.size(); ++q) {
    const double eps = cfg.eps[q];
    const ModelConfig model = sweep_model(cfg, eps);
    const PressureLaw law = model.effective_law();
    const std::uint64_t per_sample = std::uint64_t(1) << levels[q];
    const std::uint64_t steps = per_sample * std::uint64_t(cfg.samples);
    const double dt = cfg.horizon / double(steps);
    const int aggregation = 1 << (finest - levels[q]);
    StepperConfig stepper;
    stepper.cfl = cfg.cfl;
    const ScalarField one = ScalarField::constant(cfg.grid, 1.0);

    std::vector<PathResult> results(cfg.paths);
    parallel_for(cfg.paths, cfg.threads, [&](Index p) {
      const WienerPath w(cfg.seed, std::uint64_t(p), K, aggregation);
      std::vector<State> members;
      for (int j = 0; j < cfg.replicas; ++j)
        members.push_back(
            well_prepared_data(eps, v0, cfg.delta(eps), low_mode_perturbation(cfg.grid, cfg.seed, int(p), j)));
      EulerState ref(v0);
      PathResult& out = results[p];
      out.tau = cfg.horizon;
      bool stopped = false;
      for (std::uint64_t n = 0;; ++n) {
        if (n % per_sample == 0) {
          const auto ym = build_ym(members, 0, cfg.replicas);
          const double D = dissipation_defect(ym, law, stepper.rho_floor).total;
          out.D.push_back(D);
          if (!stopped) {
            out.E.push_back(relative_energy(ym, D, one, ref.v, law, stepper.rho_floor));
            if (gradient_sup_norm(ref.v) > cfg.grad_threshold) {
              stopped = true;
              out.tau = double(n) * dt;
            }
          } else {
            out.E.push_back(out.E.back());
          }
        }
        if (n == steps) break;
        const Eigen::VectorXd dW = w.sample_increments(n, dt);
        try {
          for (auto& s : members) s = step_em(model, stepper, s, dW, dt);
        } catch (const CflViolation& e) {
          std::ostringstream os;
          os << "limit sweep: eps = " << eps << " at t = " << double(n) * dt << " needs dt <= " << e.required_dt
             << " (dt = " << dt << ")";
          throw CflViolation(os.str(), e.required_dt);
        }
        if (!stopped) ref = step_em_euler(ref, cfg.noise, dW, dt);
      }
    });

    SweepPoint pt;
    pt.eps = eps;
    pt.nu = model.visc.nu;
    pt.lambda = model.visc.lambda;
    pt.delta = cfg.delta(eps);
    pt.dt = dt;
    const double P = cfg.paths;
    auto stats = [&](auto get, double& mean, double& se) {
      double s = 0, s2 = 0;
      for (const auto& r : results) s += get(r);
      mean = s / P;
      for (const auto& r : results) s2 += (get(r) - mean) * (get(r) - mean);
      se = P > 1 ? std::sqrt(s2 / (P - 1) / P) : 0.0;
    };
    for (int s = 0; s <= cfg.samples; ++s) {
      double m, se, dm, dse;
      stats([s](const PathResult& r) { return r.E[s]; }, m, se);
      stats([s](const PathResult& r) { return r.D[s]; }, dm, dse);
      pt.t.push_back(cfg.horizon * s / cfg.samples);
      pt.Emv_mean.push_back(m);
      pt.Emv_se.push_back(se);
      pt.D_mean.push_back(dm);
    }
    stats([](const PathResult& r) { return *std::max_element(r.D.begin(), r.D.end()); }, pt.D_sup_mean, pt.D_sup_se);
    pt.tau_M = cfg.horizon;
    for (const auto& r : results) pt.tau_M = std::min(pt.tau_M, r.tau);
    rep.points.push_back(std::move(pt));
  }

  std::vector<double> e, v;
  for (const auto& pt : rep.points) {
    e.push_back(pt.eps);
    v.push_back(pt.final_mean());
  }
  if (rep.points.size() >= 3) rep.fit = fit_rate(e, v);

  std::vector<const SweepPoint*> sorted;
  for (const auto& pt : rep.points) sorted.push_back(&pt);
  std::sort(sorted.begin(), sorted.end(), [](auto* a, auto* b) { return a->eps > b->eps; });
  rep.D_nonincreasing = true;
  for (std::size_t i = 1; i < sorted.size(); ++i) {
    const double tol = 2 * std::hypot(sorted[i]->D_sup_se, sorted[i - 1]->D_sup_se);
    if (sorted[i]->D_sup_mean > sorted[i - 1]->D_sup_mean + tol) rep.D_nonincreasing = false;
  }
  return rep;
}

std::string sweep_csv(const RateReport& rep) {
  std::string out = "eps,t,Emv_mean,Emv_se,D_sup,tau_M\n";
  char buf[160];
  for (const auto& pt : rep.points)
    for (std::size_t i = 0; i < pt.t.size(); ++i) {
      std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g,%.17g,%.17g\n", pt.eps, pt.t[i], pt.Emv_mean[i],
                    pt.Emv_se[i], pt.D_sup_mean, pt.tau_M);
      out += buf;
    }
  return out;
}

std::string sweep_summary_json(const RateReport& rep) {
  std::ostringstream os;
  os.precision(17);
  os << "{\"slope\": " << rep.fit.slope << ", \"intercept\": " << rep.fit.intercept
     << ", \"monotone\": " << (rep.fit.monotone ? "true" : "false") << ", \"envelope_exponent\": " << rep.envelope_exponent
     << ", \"D_nonincreasing\": " << (rep.D_nonincreasing ? "true" : "false")
     << ", \"pass\": " << (rep.pass() ? "true" : "false") << ", \"points\": [";
  for (std::size_t i = 0; i < rep.points.size(); ++i) {
    const auto& pt = rep.points[i];
    os << (i ? ", " : "") << "{\"eps\": " << pt.eps << ", \"dt\": " << pt.dt << ", \"Emv_final\": " << pt.final_mean()
       << ", \"Emv_final_se\": " << pt.final_se() << ", \"D_sup\": " << pt.D_sup_mean << ", \"D_sup_se\": " << pt.D_sup_se
       << ", \"tau_M\": " << pt.tau_M << "}";
  }
  os << "]}\n";
  return os.str();
}

}  // namespace dmv
