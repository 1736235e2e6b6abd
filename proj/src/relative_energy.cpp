#include "dmv/relative_energy.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>

#include "dmv/euler_ref.hpp"
#include "dmv/parallel.hpp"

namespace dmv {
namespace {

ScalarField scalar_of(const Grid& g, ScalarField::Values v) { return {g, std::move(v)}; }

/// (U.grad)U with grad U in (a, b) = d_b U_a layout.
VectorField::Values advect(const VectorField& U, const TensorField& gU) {
  const int n = U.dim();
  VectorField::Values out = VectorField::Values::Zero(U.grid().cells(), n);
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) out.col(a) += U.values().col(b) * gU.values().col(TensorField::slot(n, a, b));
  return out;
}

[[noreturn]] void missing(int term, const char* what) {
  std::ostringstream os;
  os << "remainder: term " << term << " needs " << what;
  throw InvalidArgument(os.str());
}

}  // namespace

void ReferencePair::validate(double r_lo, double r_hi) const {
  detail::require_same_grid(r.grid(), U.grid(), "reference pair");
  if (!(r.values().minCoeff() > r_lo) || !(r.values().maxCoeff() <= r_hi) || !(r.values().minCoeff() > 0))
    throw InvalidArgument("reference pair: density outside its bounds");
  if (drift_r) detail::require_same_grid(r.grid(), drift_r->grid(), "reference pair");
  if (drift_U) detail::require_same_grid(r.grid(), drift_U->grid(), "reference pair");
}

ReferencePair compressible_reference(const ModelConfig& model, const ScalarField& r, const VectorField& rU) {
  detail::require_same_grid(r.grid(), rU.grid(), "compressible_reference");
  if (!(r.values().minCoeff() > 0)) throw InvalidArgument("compressible_reference: density must be positive");
  const Grid& g = r.grid();
  const int n = g.dim();
  const PressureLaw law = model.effective_law();
  const VectorField U(g, rU.values().colwise() / r.values());
  const TensorField gU = gradient(U);

  ReferencePair pair{r, U, std::nullopt, std::nullopt, std::nullopt, std::nullopt};
  pair.drift_r = scalar_of(g, -divergence(rU).values());

  ScalarField::Values p(g.cells());
  for (Index c = 0; c < g.cells(); ++c) p[c] = pressure_delta(law, r[c]);
  const VectorField gp = gradient(ScalarField(g, std::move(p)));
  const VectorField divS = divergence(stress(model.visc, gU));
  VectorField::Values dU = -advect(U, gU) + ((divS.values() - gp.values()).colwise() / r.values());
  pair.drift_U = VectorField(g, std::move(dU));

  std::vector<ScalarField> ds_r;
  std::vector<VectorField> ds_U;
  for (int k = 0; k < model.noise.modes(); ++k) {
    ds_r.push_back(ScalarField::zero(g));
    ds_U.emplace_back(g, apply_G(model.noise, r, rU, k).values().colwise() / r.values());
  }
  pair.diffusion_r = std::move(ds_r);
  pair.diffusion_U = std::move(ds_U);
  (void)n;
  return pair;
}

ReferencePair euler_reference(const NoiseModel& noise, const VectorField& v) {
  const Grid& g = v.grid();
  const ScalarField one = ScalarField::constant(g, 1.0);
  ReferencePair pair{one, v, ScalarField::zero(g), euler_drift(v), std::nullopt, std::nullopt};
  std::vector<ScalarField> ds_r;
  std::vector<VectorField> ds_U;
  for (int k = 0; k < noise.modes(); ++k) {
    ds_r.push_back(ScalarField::zero(g));
    ds_U.push_back(apply_G(noise, one, v, k));
  }
  pair.diffusion_r = std::move(ds_r);
  pair.diffusion_U = std::move(ds_U);
  return pair;
}

ReferencePair resample(const ReferencePair& pair, const Grid& target) {
  if (pair.r.grid() == target) return pair;
  ReferencePair out{resample(pair.r, target), resample(pair.U, target), std::nullopt, std::nullopt, std::nullopt,
                    std::nullopt};
  if (pair.drift_r) out.drift_r = resample(*pair.drift_r, target);
  if (pair.drift_U) out.drift_U = resample(*pair.drift_U, target);
  if (pair.diffusion_r) {
    std::vector<ScalarField> v;
    for (const auto& f : *pair.diffusion_r) v.push_back(resample(f, target));
    out.diffusion_r = std::move(v);
  }
  if (pair.diffusion_U) {
    std::vector<VectorField> v;
    for (const auto& f : *pair.diffusion_U) v.push_back(resample(f, target));
    out.diffusion_U = std::move(v);
  }
  return out;
}

double relative_energy(const EmpiricalYoungMeasure& ym, double D, const ScalarField& r, const VectorField& U,
                       const PressureLaw& law, double rho_floor) {
  detail::require_same_grid(ym.grid(), r.grid(), "relative_energy");
  detail::require_same_grid(ym.grid(), U.grid(), "relative_energy");
  if (!(r.values().minCoeff() > 0)) throw InvalidArgument("relative_energy: reference density must be positive");
  double s = 0;
  for (Index i = 0; i < ym.atoms(); ++i) {
    const State& a = ym.atom(i);
    const auto& rho = a.rho.values();
    const VectorField::Values diff = a.mom.values() - (U.values().colwise() * rho);
    s += (0.5 * diff.square().rowwise().sum() / rho.max(rho_floor)).sum();
    for (Index c = 0; c < rho.size(); ++c) s += relative_H(law, rho[c], r[c]);
  }
  return s * ym.weight() * ym.grid().cell_volume() + D;
}

double RemainderBreakdown::total() const {
  double s = 0;
  for (double t : terms) s += t;
  return s;
}

RemainderBreakdown remainder(const EmpiricalYoungMeasure& ym, const ReferencePair& pair, const ModelConfig& model,
                             const TensorField* mu_m, double rho_floor) {
  const Grid& g = ym.grid();
  detail::require_same_grid(g, pair.r.grid(), "remainder");
  const int n = g.dim();
  const PressureLaw law = model.effective_law();
  const NoiseModel& noise = model.noise;
  const int K = noise.modes();
  const double vol = g.cell_volume();
  const auto& r = pair.r.values();
  const auto& U = pair.U.values();
  const TensorField gU = gradient(pair.U);
  const ScalarField divU = divergence(pair.U);
  const ScalarField::Values brho = ym.mean_density().values();
  const VectorField::Values bm = ym.mean_momentum().values();

  ScalarField::Values P2(g.cells()), P3(g.cells()), p2(g.cells()), pr(g.cells());
  for (Index c = 0; c < g.cells(); ++c) {
    P2[c] = potential_delta_derivative(law, r[c], 2);
    P3[c] = potential_delta_derivative(law, r[c], 3);
    p2[c] = pressure_delta_derivative(law, r[c], 2);
    pr[c] = pressure_delta(law, r[c]);
  }

  RemainderBreakdown out;
  auto& T = out.terms;

  const TensorField gu = gradient(ym.mean_velocity(rho_floor));
  T[0] = (stress(model.visc, gU).values() * (gU.values() - gu.values())).sum() * vol;

  if (!pair.drift_U) missing(2, "the drift of U");
  const VectorField::Values w = pair.drift_U->values() + advect(pair.U, gU);
  T[1] = (((U.colwise() * brho) - bm) * w).sum() * vol;

  // Atom sums for terms 3, 5 and 6.
  double t3 = 0, mean_p = 0, t6 = 0;
  ScalarField::Values pbar = ScalarField::Values::Zero(g.cells());
  if (K > 0 && !pair.diffusion_U) missing(6, "the diffusion of U");
  for (Index i = 0; i < ym.atoms(); ++i) {
    const State& a = ym.atom(i);
    const auto& rho = a.rho.values();
    const ScalarField::Values rf = rho.max(rho_floor);
    const VectorField::Values q = a.mom.values() - (U.colwise() * rho);
    for (int x = 0; x < n; ++x)
      for (int y = 0; y < n; ++y) t3 -= (q.col(x) * q.col(y) / rf * gU.values().col(TensorField::slot(n, x, y))).sum();
    for (Index c = 0; c < g.cells(); ++c) pbar[c] += pressure_delta(law, rho[c]);
    for (int k = 0; k < K; ++k) {
      const VectorField::Values e =
          apply_G(noise, a.rho, a.mom, k).values() - ((*pair.diffusion_U)[k].values().colwise() * rho);
      t6 += (e.square().rowwise().sum() / rf).sum();
    }
  }
  (void)mean_p;
  const double wgt = ym.weight();
  T[2] = t3 * wgt * vol;

  if (!pair.drift_r) missing(4, "the drift of r");
  const VectorField gr = gradient(pair.r);
  const VectorField::Values flux = (U.colwise() * r) - bm;
  T[3] = ((r - brho) * P2 * pair.drift_r->values() + P2 * (gr.values() * flux).rowwise().sum()).sum() * vol;

  T[4] = ((pr - pbar * wgt) * divU.values()).sum() * vol;
  T[5] = 0.5 * t6 * wgt * vol;
  T[6] = mu_m ? -(gU.values() * mu_m->values()).sum() * vol : 0.0;

  if (K > 0 && !pair.diffusion_r) missing(8, "the diffusion of r");
  double s8 = 0, s9 = 0;
  for (int k = 0; k < K; ++k) {
    const auto& dr = (*pair.diffusion_r)[k].values();
    s8 += (brho * P3 * dr.square()).sum();
    s9 += (p2 * dr.square()).sum();
  }
  T[7] = -0.5 * s8 * vol;
  T[8] = 0.5 * s9 * vol;
  return out;
}

double relative_martingale_increment(const EmpiricalYoungMeasure& ym, const ReferencePair& pair,
                                     const ModelConfig& model, const Eigen::VectorXd& dW, double rho_floor) {
  const NoiseModel& noise = model.noise;
  const int K = noise.modes();
  if (K == 0) return 0;
  if (dW.size() != K) throw InvalidArgument("relative_martingale_increment: increment count mismatch");
  if (!pair.diffusion_U || !pair.diffusion_r) throw InvalidArgument("relative_martingale_increment: missing diffusion");
  const Grid& g = ym.grid();
  const PressureLaw law = model.effective_law();
  const auto& r = pair.r.values();
  const auto& U = pair.U.values();
  const ScalarField::Values brho = ym.mean_density().values();
  const VectorField::Values bm = ym.mean_momentum().values();
  ScalarField::Values P2(g.cells()), p1(g.cells());
  for (Index c = 0; c < g.cells(); ++c) {
    P2[c] = potential_delta_derivative(law, r[c], 2);
    p1[c] = pressure_delta_derivative(law, r[c], 1);
  }
  double total = 0;
  for (int k = 0; k < K; ++k) {
    if (dW[k] == 0) continue;
    double mE = 0;
    VectorField::Values bG = VectorField::Values::Zero(g.cells(), g.dim());
    for (Index i = 0; i < ym.atoms(); ++i) {
      const State& a = ym.atom(i);
      const VectorField::Values G = apply_G(noise, a.rho, a.mom, k).values();
      mE += ((a.mom.values().colwise() / a.rho.values().max(rho_floor)) * G).sum();
      bG += G;
    }
    mE *= ym.weight();
    bG *= ym.weight();
    const auto& dU = (*pair.diffusion_U)[k].values();
    const auto& dr = (*pair.diffusion_r)[k].values();
    const double m1 = (U * bG).sum() + (bm * dU).sum();
    const double m2 = ((U * dU).rowwise().sum() * brho).sum();
    const double m3 = (p1 * dr).sum();
    const double m4 = (brho * P2 * dr).sum();
    total += (mE - m1 + m2 + m3 - m4) * dW[k];
  }
  return total * g.cell_volume();
}

double relative_dissipation(const EmpiricalYoungMeasure& ym, const VectorField& U, const Viscosity& visc,
                            double rho_floor) {
  const TensorField gu = gradient(ym.mean_velocity(rho_floor));
  const TensorField gU = gradient(U);
  const TensorField d(gu.grid(), gu.values() - gU.values());
  return integrate(contract(stress(visc, d), d));
}

double gronwall_check(const std::vector<double>& t, const std::vector<double>& E, double c, double bias) {
  if (t.size() != E.size() || t.empty()) throw InvalidArgument("gronwall_check: series lengths differ or are empty");
  double worst = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < t.size(); ++i) worst = std::max(worst, E[i] - (E[0] + bias) * std::exp(c * (t[i] - t[0])));
  return worst;
}

double gronwall_fit(const std::vector<double>& t, const std::vector<double>& E, double bias) {
  if (t.size() != E.size() || t.empty()) throw InvalidArgument("gronwall_fit: series lengths differ or are empty");
  const double base = E[0] + bias;
  double c = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 1; i < t.size(); ++i) {
    const double dt = t[i] - t[0];
    if (!(dt > 0) || !(E[i] > 0)) continue;
    if (!(base > 0)) return std::numeric_limits<double>::infinity();
    c = std::max(c, std::log(E[i] / base) / dt);
  }
  return std::isfinite(c) ? c : 0.0;
}

void WeakStrongConfig::validate() const {
  model.validate();
  if (!reference_initial) throw InvalidArgument("weak-strong: missing reference data");
  if (paths < 1 || replicas < 1 || sample_every < 1) throw InvalidArgument("weak-strong: bad ensemble layout");
  if (!(dt > 0) || !(horizon > 0)) throw InvalidArgument("weak-strong: dt and horizon must be positive");
  if (!(bias >= 0)) throw InvalidArgument("weak-strong: bias must be nonnegative");
}

namespace {

struct PathSeries {
  std::vector<double> E, M, residual;
  std::vector<std::array<double, kRemainderTerms>> R;
  double tau = 0;
};

Grid refine(const Grid& g) {
  std::vector<int> sizes;
  for (int d = 0; d < g.dim(); ++d) sizes.push_back(2 * g.size(d));
  return Grid(sizes);
}

}  // namespace

RelativeEnergyReport weak_strong_experiment(const WeakStrongConfig& cfg) {
  cfg.validate();
  const std::uint64_t steps = static_cast<std::uint64_t>(std::llround(cfg.horizon / cfg.dt));
  if (std::abs(double(steps) * cfg.dt - cfg.horizon) > 1e-9 * cfg.horizon)
    throw InvalidArgument("weak-strong: horizon is not a multiple of dt");
  const int factor = cfg.self_comparison ? 1 : 2;
  const Grid ref_grid = cfg.self_comparison ? cfg.grid : refine(cfg.grid);
  const double ref_dt = cfg.dt / factor;
  const int K = cfg.model.noise.modes();
  const PressureLaw law = cfg.model.effective_law();
  StepperConfig stepper;

  std::vector<std::uint64_t> sample_steps;
  for (std::uint64_t n = 0; n <= steps; ++n)
    if (n % std::uint64_t(cfg.sample_every) == 0 || n == steps) sample_steps.push_back(n);
  const std::size_t S = sample_steps.size();

  std::vector<PathSeries> series(cfg.paths);
  parallel_for(cfg.paths, cfg.threads, [&](Index p) {
    const WienerPath w_mem(cfg.seed, std::uint64_t(p), K, factor);
    const WienerPath w_ref(cfg.seed, std::uint64_t(p), K, 1);
    State ref = cfg.reference_initial(ref_grid);
    std::vector<State> members;
    for (int j = 0; j < cfg.replicas; ++j)
      members.push_back(cfg.member_initial ? cfg.member_initial(cfg.grid, int(p), j) : cfg.reference_initial(cfg.grid));

    PathSeries& out = series[p];
    out.tau = cfg.horizon;
    std::array<double, kRemainderTerms> R{};
    double M = 0, diss = 0, E0 = 0;
    bool stopped = false;
    std::size_t next_sample = 0;
    for (std::uint64_t n = 0;; ++n) {
      const ReferencePair pair = resample(compressible_reference(cfg.model, ref.rho, ref.mom), cfg.grid);
      const auto ym = build_ym(members, 0, cfg.replicas);
      if (next_sample < S && sample_steps[next_sample] == n) {
        const double D = dissipation_defect(ym, law, stepper.rho_floor).total;
        const double E = relative_energy(ym, D, pair.r, pair.U, law, stepper.rho_floor);
        if (n == 0) E0 = E;
        double Rsum = 0;
        for (double x : R) Rsum += x;
        out.E.push_back(E);
        out.M.push_back(M);
        out.R.push_back(R);
        out.residual.push_back(E + diss - E0 - M - Rsum);
        ++next_sample;
        if (gradient_sup_norm(pair.U) > cfg.model.grad_threshold) {
          stopped = true;
          out.tau = double(n) * cfg.dt;
        }
      }
      if (n == steps || stopped) break;
      const RemainderBreakdown rb = remainder(ym, pair, cfg.model, nullptr, stepper.rho_floor);
      for (int i = 0; i < kRemainderTerms; ++i) R[i] += rb.terms[i] * cfg.dt;
      diss += relative_dissipation(ym, pair.U, cfg.model.visc, stepper.rho_floor) * cfg.dt;
      const Eigen::VectorXd dW = w_mem.sample_increments(n, cfg.dt);
      M += relative_martingale_increment(ym, pair, cfg.model, dW, stepper.rho_floor);
      for (auto& s : members) s = step_em(cfg.model, stepper, s, dW, cfg.dt);
      for (int j = 0; j < factor; ++j)
        ref = step_em(cfg.model, stepper, ref, w_ref.sample_increments(n * factor + j, ref_dt), ref_dt);
    }
    // Values after the stopping time are frozen.
    while (out.E.size() < S) {
      out.E.push_back(out.E.back());
      out.M.push_back(out.M.back());
      out.R.push_back(out.R.back());
      out.residual.push_back(out.residual.back());
    }
  });

  RelativeEnergyReport rep;
  rep.bias = cfg.bias;
  const double P = cfg.paths;
  auto mean_se = [&](auto get, std::vector<double>& mean, std::vector<double>* se) {
    for (std::size_t i = 0; i < S; ++i) {
      double s = 0, s2 = 0;
      for (const auto& ps : series) s += get(ps, i);
      const double m = s / P;
      for (const auto& ps : series) s2 += (get(ps, i) - m) * (get(ps, i) - m);
      mean.push_back(m);
      if (se) se->push_back(P > 1 ? std::sqrt(s2 / (P - 1) / P) : 0.0);
    }
  };
  for (std::uint64_t n : sample_steps) rep.t.push_back(double(n) * cfg.dt);
  mean_se([](const PathSeries& s, std::size_t i) { return s.E[i]; }, rep.Emv_mean, &rep.Emv_se);
  mean_se([](const PathSeries& s, std::size_t i) { return s.M[i]; }, rep.martingale_mean, &rep.martingale_se);
  mean_se([](const PathSeries& s, std::size_t i) { return s.residual[i]; }, rep.inequality_residual_mean,
          &rep.inequality_residual_se);
  rep.remainder_cum.resize(S);
  for (int k = 0; k < kRemainderTerms; ++k) {
    std::vector<double> m;
    mean_se([k](const PathSeries& s, std::size_t i) { return s.R[i][k]; }, m, nullptr);
    for (std::size_t i = 0; i < S; ++i) rep.remainder_cum[i][k] = m[i];
  }
  rep.tau_min = cfg.horizon;
  for (const auto& s : series) rep.tau_min = std::min(rep.tau_min, s.tau);
  rep.gronwall_c = gronwall_fit(rep.t, rep.Emv_mean, rep.bias);
  for (std::size_t i = 0; i < S; ++i)
    rep.gronwall_residual.push_back(rep.Emv_mean[i] - (rep.Emv_mean[0] + rep.bias) * std::exp(rep.gronwall_c * rep.t[i]));
  return rep;
}

std::string relative_energy_csv(const RelativeEnergyReport& rep) {
  std::string out = "t,Emv_mean,Emv_se";
  for (int k = 1; k <= kRemainderTerms; ++k) out += ",remainder_term_" + std::to_string(k);
  out += ",gronwall_residual\n";
  char buf[64];
  for (std::size_t i = 0; i < rep.t.size(); ++i) {
    auto put = [&](double v, bool last = false) {
      std::snprintf(buf, sizeof buf, last ? "%.17g\n" : "%.17g,", v);
      out += buf;
    };
    put(rep.t[i]);
    put(rep.Emv_mean[i]);
    put(rep.Emv_se[i]);
    for (double r : rep.remainder_cum[i]) put(r);
    put(rep.gronwall_residual[i], true);
  }
  return out;
}

}  // namespace dmv
