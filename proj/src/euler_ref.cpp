#include "dmv/euler_ref.hpp"

#include <cmath>
#include <sstream>

namespace dmv {
namespace {

VectorField dealias(const VectorField& v) {
  std::vector<ScalarField> comps;
  for (int d = 0; d < v.dim(); ++d) comps.push_back(dmv::dealias(v.component(d)));
  return VectorField::from_components(comps);
}

void require_divergence_free(const VectorField& v, double tol, const char* what) {
  const double div = max_abs(divergence(v));
  if (div > tol) {
    std::ostringstream os;
    os << what << ": divergence " << div << " exceeds " << tol;
    throw InvalidArgument(os.str());
  }
}

}  // namespace

EulerState::EulerState(VectorField v_, double time_) : v(std::move(v_)), pi(pressure_from_projection(v)), time(time_) {
  require_divergence_free(v, 1e-8, "euler state");
}

VectorField convective_term(const VectorField& v) {
  const Grid& g = v.grid();
  const int n = v.dim();
  const TensorField gv = gradient(v);
  VectorField::Values c = VectorField::Values::Zero(g.cells(), n);
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) c.col(a) += v.values().col(b) * gv.values().col(TensorField::slot(n, a, b));
  return dealias(VectorField(g, std::move(c)));
}

ScalarField pressure_from_projection(const VectorField& v) {
  const ScalarField d = divergence(convective_term(v));
  const ScalarField neg(d.grid(), -d.values());
  return inverse_laplacian(neg);
}

VectorField euler_drift(const VectorField& v) {
  const VectorField p = helmholtz_project(convective_term(v));
  return {v.grid(), -p.values()};
}

void require_solenoidal_noise(const NoiseModel& noise) {
  if (noise.modes() > 0 && noise.kind() != NoiseKind::affine)
    throw InvalidArgument("euler reference: only affine noise keeps G(1, v) solenoidal");
}

double euler_cfl_dt(const VectorField& v, double cfl) {
  const double speed = v.values().square().rowwise().sum().sqrt().maxCoeff();
  return speed > 0 ? cfl * v.grid().min_spacing() / speed : std::numeric_limits<double>::infinity();
}

EulerState step_em_euler(const EulerState& s, const NoiseModel& noise, const Eigen::VectorXd& dW, double dt) {
  require_solenoidal_noise(noise);
  if (dW.size() != noise.modes()) throw InvalidArgument("step_em_euler: increment count does not match noise modes");
  const double limit = euler_cfl_dt(s.v, 1.0);
  if (dt > limit) {
    std::ostringstream os;
    os << "step_em_euler: dt = " << dt << " exceeds the Courant limit " << limit;
    throw InvalidArgument(os.str());
  }
  const Grid& g = s.v.grid();
  VectorField::Values v = s.v.values() + dt * euler_drift(s.v).values();
  if (noise.modes() > 0) {
    const ScalarField one = ScalarField::constant(g, 1.0);
    for (int k = 0; k < noise.modes(); ++k)
      if (dW[k] != 0) v += dW[k] * apply_G(noise, one, s.v, k).values();
  }
  VectorField next = helmholtz_project(VectorField(g, std::move(v)));
  const double div = max_abs(divergence(next));
  if (div > 1e-8) {
    std::ostringstream os;
    os << "step_em_euler: divergence grew to " << div << " at t = " << s.time + dt;
    throw Error(os.str());
  }
  return EulerState(std::move(next), s.time + dt);
}

EulerState step_em_euler(const EulerState& s, const NoiseModel& noise, const WienerPath& path, std::uint64_t step,
                         double dt) {
  return step_em_euler(s, noise, path.sample_increments(step, dt), dt);
}

double gradient_sup_norm(const VectorField& v) {
  const TensorField gv = gradient(v);
  const int n = v.dim();
  double best = 0;
  for (Index c = 0; c < v.grid().cells(); ++c) {
    if (n == 1) {
      best = std::max(best, std::abs(gv.values()(c, 0)));
      continue;
    }
    // Largest singular value of a 2x2 matrix in closed form.
    const double a = gv.values()(c, 0), b = gv.values()(c, 1), d = gv.values()(c, 2), e = gv.values()(c, 3);
    const double s1 = a * a + b * b + d * d + e * e;
    const double det = a * e - b * d;
    const double disc = std::sqrt(std::max(0.0, s1 * s1 - 4 * det * det));
    best = std::max(best, std::sqrt(0.5 * (s1 + disc)));
  }
  return best;
}

double stopping_time_tau_M(const std::vector<double>& times, const std::vector<double>& grad_norms, double M,
                           double horizon) {
  if (times.size() != grad_norms.size()) throw InvalidArgument("stopping_time_tau_M: series lengths differ");
  for (std::size_t i = 0; i < times.size(); ++i)
    if (grad_norms[i] > M) return times[i];
  return horizon;
}

}  // namespace dmv
