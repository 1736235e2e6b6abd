#include "dmv/noise.hpp"

#include <cmath>
#include <sstream>

#include "dmv/diagnostics.hpp"

namespace dmv {
namespace {

constexpr std::uint64_t kGolden = 0x9e3779b97f4a7c15ULL;

std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

std::uint64_t key_hash(std::uint64_t seed, std::uint64_t path, std::uint64_t mode, std::uint64_t step) {
  std::uint64_t h = mix64(seed + kGolden);
  h = mix64(h ^ (path + 2 * kGolden));
  h = mix64(h ^ (mode + 3 * kGolden));
  h = mix64(h ^ (step + 4 * kGolden));
  return h;
}

double to_unit_open_closed(std::uint64_t bits) {
  // 53 random bits mapped to (0, 1].
  return (double((bits >> 11) + 1)) * 0x1.0p-53;
}

}  // namespace

double keyed_uniform(std::uint64_t seed, std::uint64_t path, std::uint64_t mode, std::uint64_t step) {
  return to_unit_open_closed(key_hash(seed, path, mode, step));
}

double keyed_normal(std::uint64_t seed, std::uint64_t path, std::uint64_t mode, std::uint64_t step) {
  const std::uint64_t h = key_hash(seed, path, mode, step);
  const double u1 = to_unit_open_closed(h);
  const double u2 = to_unit_open_closed(mix64(h + kGolden));
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(kTwoPi * u2);
}

NoiseModel NoiseModel::affine(std::vector<double> K, std::vector<double> L, double tail_mass) {
  if (K.size() != L.size()) throw InvalidArgument("noise: K and L must have the same length");
  for (std::size_t i = 0; i < K.size(); ++i)
    if (!std::isfinite(K[i]) || !std::isfinite(L[i])) throw InvalidArgument("noise: non-finite coefficient");
  if (!(tail_mass >= 0)) throw InvalidArgument("noise: tail mass must be nonnegative");
  NoiseModel m;
  m.kind_ = NoiseKind::affine;
  m.K_ = std::move(K);
  m.L_ = std::move(L);
  m.tail_mass_ = tail_mass;
  return m;
}

NoiseModel NoiseModel::general(std::vector<GeneralMode> modes, double tail_mass) {
  NoiseModel m;
  m.kind_ = NoiseKind::general;
  for (auto& mode : modes) {
    if (!mode.coefficient) throw InvalidArgument("noise: general mode without coefficient");
    if (!(mode.lipschitz >= 0)) throw InvalidArgument("noise: declared Lipschitz constant must be nonnegative");
    auto raw = std::move(mode.coefficient);
    mode.coefficient = [raw](const Point& x, double rho, const SmallVector& q) -> SmallVector {
      const SmallVector zero = SmallVector::Zero(q.size());
      return raw(x, rho, q) - raw(x, 0.0, zero);
    };
  }
  m.general_ = std::move(modes);
  m.tail_mass_ = tail_mass;
  return m;
}

double NoiseModel::alpha(int k) const {
  if (kind_ == NoiseKind::affine) return std::abs(K_.at(k)) + std::abs(L_.at(k));
  return general_.at(k).lipschitz;
}

double NoiseModel::alpha_sum() const {
  double s = 0;
  for (int k = 0; k < modes(); ++k) s += alpha(k);
  return s;
}

SmallVector NoiseModel::at(int k, const Point& x, double rho, const SmallVector& m) const {
  if (k < 0 || k >= modes()) throw InvalidArgument("noise: mode index out of range");
  if (kind_ == NoiseKind::general) return general_[k].coefficient(x, rho, m);
  SmallVector g = L_[k] * m;
  g[k % m.size()] += rho * K_[k];
  return g;
}

VectorField apply_G(const NoiseModel& model, const ScalarField& rho, const VectorField& m, int k) {
  detail::require_same_grid(rho.grid(), m.grid(), "apply_G");
  if (k < 0 || k >= model.modes())
    throw InvalidArgument("apply_G: mode " + std::to_string(k) + " not in [0, " + std::to_string(model.modes()) + ")");
  if ((rho.values() < 0).any()) throw InvalidArgument("apply_G: negative density");
  const Grid& g = rho.grid();
  const int n = g.dim();
  if (model.kind() == NoiseKind::affine) {
    VectorField::Values out = model.L(k) * m.values();
    out.col(k % n) += model.K(k) * rho.values();
    return {g, std::move(out)};
  }
  VectorField::Values out(g.cells(), n);
  SmallVector q(n);
  for (Index c = 0; c < g.cells(); ++c) {
    for (int d = 0; d < n; ++d) q[d] = m.values()(c, d);
    const SmallVector v = model.at(k, g.position(c), rho[c], q);
    for (int d = 0; d < n; ++d) out(c, d) = v[d];
  }
  return {g, std::move(out)};
}

double ito_correction_at(const NoiseModel& model, const Point& x, double rho, const SmallVector& m, double rho_floor) {
  const double rf = std::max(rho, rho_floor);
  double s = 0;
  if (model.kind() == NoiseKind::affine) {
    const SmallVector u = m / rf;
    for (int k = 0; k < model.modes(); ++k) {
      SmallVector w = model.L(k) * u;
      w[k % m.size()] += model.K(k);
      s += rho * w.squaredNorm();
    }
    return s;
  }
  for (int k = 0; k < model.modes(); ++k) s += model.at(k, x, rho, m).squaredNorm();
  return s / rf;
}

ScalarField ito_correction_density(const NoiseModel& model, const ScalarField& rho, const VectorField& m,
                                   double rho_floor, Index* vacuum_cells) {
  detail::require_same_grid(rho.grid(), m.grid(), "ito_correction_density");
  const Grid& g = rho.grid();
  const int n = g.dim();
  ScalarField::Values out(g.cells());
  Index vacuum = 0;
  SmallVector q(n);
  for (Index c = 0; c < g.cells(); ++c) {
    for (int d = 0; d < n; ++d) q[d] = m.values()(c, d);
    if (rho[c] < rho_floor && q.squaredNorm() > 0) ++vacuum;
    out[c] = ito_correction_at(model, g.position(c), rho[c], q, rho_floor);
  }
  if (vacuum > 0) {
    std::ostringstream os;
    os << "ito_correction_density: " << vacuum << " vacuum cells carry momentum";
    warn(os.str());
  }
  if (vacuum_cells) *vacuum_cells = vacuum;
  return {g, std::move(out)};
}

WienerPath::WienerPath(std::uint64_t seed, std::uint64_t path, int modes, int aggregation)
    : seed_(seed), path_(path), modes_(modes), aggregation_(aggregation) {
  if (modes < 0) throw InvalidArgument("wiener path: negative mode count");
  if (aggregation < 1 || (aggregation & (aggregation - 1)) != 0)
    throw InvalidArgument("wiener path: aggregation must be a power of two");
}

Eigen::VectorXd WienerPath::sample_increments(std::uint64_t step, double dt) const {
  if (!(dt >= 0)) throw InvalidArgument("sample_increments: dt must be nonnegative");
  Eigen::VectorXd dw = Eigen::VectorXd::Zero(modes_);
  if (dt == 0) return dw;
  const double base_sd = std::sqrt(dt / aggregation_);
  for (int k = 0; k < modes_; ++k) {
    double s = 0;
    for (int j = 0; j < aggregation_; ++j)
      s += keyed_normal(seed_, path_, std::uint64_t(k), step * std::uint64_t(aggregation_) + std::uint64_t(j));
    dw[k] = base_sd * s;
  }
  return dw;
}

LipschitzAuditReport lipschitz_audit(const NoiseModel& model, int k, int dim, int samples, std::uint64_t seed,
                                     double rho_max, double q_max) {
  LipschitzAuditReport rep;
  const double alpha = model.alpha(k);
  auto draw = [&](std::uint64_t i, std::uint64_t slot) { return keyed_uniform(seed, std::uint64_t(k), slot, i); };
  for (int s = 0; s < samples; ++s) {
    const std::uint64_t i = std::uint64_t(s);
    const Point x{kTwoPi * draw(i, 0), kTwoPi * draw(i, 1)};
    const double r1 = rho_max * draw(i, 2), r2 = rho_max * draw(i, 3);
    SmallVector q1(dim), q2(dim);
    for (int d = 0; d < dim; ++d) {
      q1[d] = q_max * (2 * draw(i, 4 + d) - 1) / std::sqrt(double(dim));
      q2[d] = q_max * (2 * draw(i, 6 + d) - 1) / std::sqrt(double(dim));
    }
    const double lhs = (model.at(k, x, r1, q1) - model.at(k, x, r2, q2)).norm();
    const double rhs = alpha * (std::abs(r1 - r2) + (q1 - q2).norm());
    ++rep.samples;
    if (rhs > 0) rep.max_ratio = std::max(rep.max_ratio, lhs / rhs);
    if (lhs > rhs * (1 + 1e-12) + 1e-14) ++rep.violations;
  }
  return rep;
}

IsometryAuditReport ito_isometry_audit(const std::function<double(int, double)>& integrand, int modes, double dt,
                                       double horizon, int paths, std::uint64_t seed) {
  if (!(dt > 0) || !(horizon > 0) || paths < 2) throw InvalidArgument("ito_isometry_audit: bad arguments");
  const auto steps = static_cast<std::uint64_t>(std::llround(horizon / dt));
  double expected = 0;
  for (int k = 0; k < modes; ++k)
    for (std::uint64_t n = 0; n < steps; ++n) {
      const double g = integrand(k, double(n) * dt);
      expected += g * g * dt;
    }
  double sum = 0, sum2 = 0;
  for (int p = 0; p < paths; ++p) {
    const WienerPath path(seed, std::uint64_t(p), modes);
    double I = 0;
    for (std::uint64_t n = 0; n < steps; ++n) {
      const Eigen::VectorXd dw = path.sample_increments(n, dt);
      for (int k = 0; k < modes; ++k) I += integrand(k, double(n) * dt) * dw[k];
    }
    sum += I;
    sum2 += I * I;
  }
  IsometryAuditReport rep;
  const double M = paths;
  const double mean = sum / M;
  rep.sample_variance = (sum2 - M * mean * mean) / (M - 1);
  rep.expected_variance = expected;
  // Gaussian integrand: Var(sample variance) = 2 sigma^4 / (M - 1).
  rep.standard_error = expected * std::sqrt(2.0 / (M - 1));
  rep.pass = std::abs(rep.sample_variance - expected) <= 5 * rep.standard_error + 1e-15;
  return rep;
}

}  // namespace dmv
