#pragma once

// Periodic grids on the flat torus [0, 2pi)^N (N = 1, 2), sampled fields and
// pseudo-spectral calculus. Fields are immutable values; every operator is a
// free function returning a new field. Transforms go through a per-thread
// cache so the operators can be called from concurrent ensemble workers.

#include <Eigen/Core>
#include <unsupported/Eigen/FFT>
#ifdef EIGEN_FFTW_DEFAULT
#include <fftw3.h>

#include <mutex>
#endif

#include <array>
#include <cmath>
#include <complex>
#include <cstdint>
#include <map>
#include <memory>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "dmv/diagnostics.hpp"
#include "dmv/error.hpp"

namespace dmv {

inline constexpr double kTwoPi = 6.283185307179586476925286766559;

using Index = Eigen::Index;

class Grid {
 public:
  explicit Grid(std::vector<int> sizes) {
    if (sizes.empty() || sizes.size() > 2)
      throw InvalidArgument("grid: dimension must be 1 or 2, got " + std::to_string(sizes.size()));
    for (int n : sizes) {
      if (n < 8 || (n & (n - 1)) != 0)
        throw InvalidArgument("grid: sizes must be powers of two >= 8, got " + std::to_string(n));
    }
    dim_ = static_cast<int>(sizes.size());
    for (int d = 0; d < dim_; ++d) sizes_[d] = sizes[d];
  }

  int dim() const { return dim_; }
  int size(int d) const { return sizes_[d]; }
  std::vector<int> sizes() const { return {sizes_.begin(), sizes_.begin() + dim_}; }
  Index cells() const { return dim_ == 1 ? sizes_[0] : Index(sizes_[0]) * sizes_[1]; }
  double length() const { return kTwoPi; }
  double spacing(int d) const { return kTwoPi / sizes_[d]; }
  double min_spacing() const {
    double h = spacing(0);
    for (int d = 1; d < dim_; ++d) h = std::min(h, spacing(d));
    return h;
  }
  double cell_volume() const {
    double v = 1.0;
    for (int d = 0; d < dim_; ++d) v *= spacing(d);
    return v;
  }

  /// Cell `c` sits at (i h_x) in 1D and (i h_x, j h_y) in 2D with c = i * n_y + j.
  std::array<double, 2> position(Index cell) const {
    if (dim_ == 1) return {spacing(0) * double(cell), 0.0};
    const Index i = cell / sizes_[1];
    const Index j = cell % sizes_[1];
    return {spacing(0) * double(i), spacing(1) * double(j)};
  }

  std::string describe() const {
    std::ostringstream os;
    os << '[';
    for (int d = 0; d < dim_; ++d) os << (d ? "," : "") << sizes_[d];
    os << ']';
    return os.str();
  }

  bool operator==(const Grid& other) const { return dim_ == other.dim_ && sizes_ == other.sizes_; }
  bool operator!=(const Grid& other) const { return !(*this == other); }

 private:
  int dim_ = 1;
  std::array<int, 2> sizes_{1, 1};
};

namespace detail {

template <typename Derived>
void require_finite(const Eigen::DenseBase<Derived>& values, const char* what) {
  if (!values.derived().array().isFinite().all())
    throw NonFiniteValue(std::string(what) + ": non-finite entries");
}

inline void require_same_grid(const Grid& a, const Grid& b, const char* what) {
  if (a != b) throw InvalidArgument(std::string(what) + ": grid mismatch " + a.describe() + " vs " + b.describe());
}

}  // namespace detail

template <typename Scalar>
class BasicScalarField {
 public:
  using Values = Eigen::Array<Scalar, Eigen::Dynamic, 1>;

  BasicScalarField(Grid grid, Values values) : grid_(std::move(grid)), values_(std::move(values)) {
    if (values_.size() != grid_.cells()) throw InvalidArgument("scalar field: value count does not match grid");
    detail::require_finite(values_, "scalar field");
  }

  static BasicScalarField constant(const Grid& grid, Scalar c) { return {grid, Values::Constant(grid.cells(), c)}; }
  static BasicScalarField zero(const Grid& grid) { return constant(grid, Scalar(0)); }

  /// Samples f(x, y) at every cell; y is 0 on 1D grids.
  template <typename F>
  static BasicScalarField sample(const Grid& grid, F&& f) {
    Values v(grid.cells());
    for (Index c = 0; c < grid.cells(); ++c) {
      const auto x = grid.position(c);
      v[c] = static_cast<Scalar>(f(x[0], x[1]));
    }
    return {grid, std::move(v)};
  }

  const Grid& grid() const { return grid_; }
  const Values& values() const { return values_; }
  Scalar operator[](Index cell) const { return values_[cell]; }

 private:
  Grid grid_;
  Values values_;
};

/// N components stored column-wise: values().col(d) is component d.
template <typename Scalar>
class BasicVectorField {
 public:
  using Values = Eigen::Array<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

  BasicVectorField(Grid grid, Values values) : grid_(std::move(grid)), values_(std::move(values)) {
    if (values_.rows() != grid_.cells() || values_.cols() != grid_.dim())
      throw InvalidArgument("vector field: shape does not match grid");
    detail::require_finite(values_, "vector field");
  }

  static BasicVectorField zero(const Grid& grid) { return {grid, Values::Zero(grid.cells(), grid.dim())}; }

  /// Constant vector; missing trailing components are zero.
  static BasicVectorField constant(const Grid& grid, std::array<Scalar, 2> c) {
    Values v(grid.cells(), grid.dim());
    for (int d = 0; d < grid.dim(); ++d) v.col(d).setConstant(c[d]);
    return {grid, std::move(v)};
  }

  /// f(x, y) returns something indexable by component.
  template <typename F>
  static BasicVectorField sample(const Grid& grid, F&& f) {
    Values v(grid.cells(), grid.dim());
    for (Index c = 0; c < grid.cells(); ++c) {
      const auto x = grid.position(c);
      const auto value = f(x[0], x[1]);
      for (int d = 0; d < grid.dim(); ++d) v(c, d) = static_cast<Scalar>(value[d]);
    }
    return {grid, std::move(v)};
  }

  static BasicVectorField from_components(const std::vector<BasicScalarField<Scalar>>& comps) {
    if (comps.empty()) throw InvalidArgument("vector field: no components");
    const Grid& g = comps.front().grid();
    if (static_cast<int>(comps.size()) != g.dim()) throw InvalidArgument("vector field: component count != dim");
    Values v(g.cells(), g.dim());
    for (int d = 0; d < g.dim(); ++d) {
      detail::require_same_grid(g, comps[d].grid(), "vector field");
      v.col(d) = comps[d].values();
    }
    return {g, std::move(v)};
  }

  const Grid& grid() const { return grid_; }
  const Values& values() const { return values_; }
  int dim() const { return grid_.dim(); }
  BasicScalarField<Scalar> component(int d) const { return {grid_, values_.col(d)}; }

 private:
  Grid grid_;
  Values values_;
};

/// N*N components; column a*N + b holds entry (a, b).
template <typename Scalar>
class BasicTensorField {
 public:
  using Values = Eigen::Array<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

  BasicTensorField(Grid grid, Values values) : grid_(std::move(grid)), values_(std::move(values)) {
    if (values_.rows() != grid_.cells() || values_.cols() != grid_.dim() * grid_.dim())
      throw InvalidArgument("tensor field: shape does not match grid");
    detail::require_finite(values_, "tensor field");
  }

  static BasicTensorField zero(const Grid& grid) {
    return {grid, Values::Zero(grid.cells(), grid.dim() * grid.dim())};
  }

  const Grid& grid() const { return grid_; }
  const Values& values() const { return values_; }
  int dim() const { return grid_.dim(); }
  static int slot(int dim, int a, int b) { return a * dim + b; }
  auto component(int a, int b) const { return values_.col(slot(dim(), a, b)); }

  /// Entry (a, b) at one cell as a small dense matrix.
  Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> at(Index cell) const {
    const int n = dim();
    Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> m(n, n);
    for (int a = 0; a < n; ++a)
      for (int b = 0; b < n; ++b) m(a, b) = values_(cell, slot(n, a, b));
    return m;
  }

 private:
  Grid grid_;
  Values values_;
};

using ScalarField = BasicScalarField<double>;
using VectorField = BasicVectorField<double>;
using TensorField = BasicTensorField<double>;

/// Real-to-half-complex transform on one grid, with wavenumber tables.
/// Holds scratch buffers, so one instance must not be shared across threads;
/// use `spectral_for(grid)` to get the calling thread's instance.
template <typename Scalar>
class Spectral {
 public:
  using Complex = std::complex<Scalar>;
  using Spectrum = Eigen::Array<Complex, Eigen::Dynamic, 1>;
  using Real = Eigen::Array<Scalar, Eigen::Dynamic, 1>;

  explicit Spectral(const Grid& grid) : grid_(grid) {
#ifdef EIGEN_FFTW_DEFAULT
    // Plans are created lazily by worker threads.
    static std::once_flag planner_once;
    std::call_once(planner_once, [] { fftw_make_planner_thread_safe(); });
#endif
    rows_ = grid.dim() == 2 ? grid.size(0) : 1;
    cols_ = grid.dim() == 2 ? grid.size(1) : grid.size(0);
    half_ = cols_ / 2 + 1;
    fft_.SetFlag(Eigen::FFT<Scalar>::HalfSpectrum);

    const Index n = rows_ * half_;
    for (int d = 0; d < grid.dim(); ++d) {
      k_deriv_[d].resize(n);
      k_signed_[d].resize(n);
    }
    k_squared_.resize(n);
    mask_.resize(n);
    weight_.resize(n);
    for (Index p = 0; p < rows_; ++p) {
      for (Index q = 0; q < half_; ++q) {
        const Index idx = p * half_ + q;
        // Last axis is the real-transform axis.
        const int last = grid.dim() - 1;
        std::array<Index, 2> kint{0, 0};
        std::array<bool, 2> nyq{false, false};
        kint[last] = q;
        nyq[last] = (q == cols_ / 2);
        if (grid.dim() == 2) {
          kint[0] = p <= rows_ / 2 ? p : p - rows_;
          nyq[0] = (p == rows_ / 2);
        }
        Scalar k2 = 0;
        bool keep = true;
        for (int d = 0; d < grid.dim(); ++d) {
          k_signed_[d][idx] = Scalar(kint[d]);
          k_deriv_[d][idx] = nyq[d] ? Scalar(0) : Scalar(kint[d]);
          k2 += Scalar(kint[d]) * Scalar(kint[d]);
          if (std::abs(kint[d]) > grid.size(d) / 3) keep = false;
        }
        k_squared_[idx] = k2;
        mask_[idx] = keep ? Scalar(1) : Scalar(0);
        weight_[idx] = (q == 0 || q == cols_ / 2) ? Scalar(1) : Scalar(2);
      }
    }
    row_in_.resize(cols_);
    row_out_.resize(half_);
    col_in_.resize(rows_);
    col_out_.resize(rows_);
    work_.resize(n);
  }

  const Grid& grid() const { return grid_; }
  Index modes() const { return rows_ * half_; }
  Index half_length() const { return half_; }

  /// Unnormalized forward transform: f_hat(k) = sum_j f_j exp(-i k x_j).
  template <typename Derived>
  Spectrum forward(const Eigen::DenseBase<Derived>& values) {
    Spectrum out(modes());
    for (Index i = 0; i < rows_; ++i) {
      for (Index j = 0; j < cols_; ++j) row_in_[j] = values.derived().coeff(i * cols_ + j);
      fft_.fwd(row_out_.data(), row_in_.data(), cols_);
      for (Index q = 0; q < half_; ++q) out[i * half_ + q] = row_out_[q];
    }
    if (rows_ > 1) {
      for (Index q = 0; q < half_; ++q) {
        for (Index p = 0; p < rows_; ++p) col_in_[p] = out[p * half_ + q];
        cfft_.fwd(col_out_.data(), col_in_.data(), rows_);
        for (Index p = 0; p < rows_; ++p) out[p * half_ + q] = col_out_[p];
      }
    }
    return out;
  }

  Real inverse(const Spectrum& spec) {
    work_ = spec;
    if (rows_ > 1) {
      for (Index q = 0; q < half_; ++q) {
        for (Index p = 0; p < rows_; ++p) col_in_[p] = work_[p * half_ + q];
        cfft_.inv(col_out_.data(), col_in_.data(), rows_);
        for (Index p = 0; p < rows_; ++p) work_[p * half_ + q] = col_out_[p];
      }
    }
    Real out(grid_.cells());
    for (Index i = 0; i < rows_; ++i) {
      for (Index q = 0; q < half_; ++q) row_out_[q] = work_[i * half_ + q];
      // DC and Nyquist bins of a real series carry no imaginary part.
      row_out_[0] = Complex(row_out_[0].real(), 0);
      row_out_[half_ - 1] = Complex(row_out_[half_ - 1].real(), 0);
      fft_.inv(row_in_.data(), row_out_.data(), cols_);
      for (Index j = 0; j < cols_; ++j) out[i * cols_ + j] = row_in_[j];
    }
    return out;
  }

  /// Wavenumbers used for first derivatives (Nyquist entries zeroed).
  const Real& derivative_wavenumber(int d) const { return k_deriv_[d]; }
  /// Signed integer wavenumbers, Nyquist kept.
  const Real& wavenumber(int d) const { return k_signed_[d]; }
  const Real& wavenumber_squared() const { return k_squared_; }
  /// 1 inside the 2/3-rule band, 0 outside.
  const Real& dealias_mask() const { return mask_; }
  /// Multiplicity of each stored mode in the full (Hermitian) spectrum.
  const Real& parseval_weight() const { return weight_; }

 private:
  Grid grid_;
  Index rows_ = 1, cols_ = 1, half_ = 1;
  Eigen::FFT<Scalar> fft_;
  Eigen::FFT<Scalar> cfft_;
  std::array<Real, 2> k_deriv_;
  std::array<Real, 2> k_signed_;
  Real k_squared_, mask_, weight_;
  std::vector<Scalar> row_in_;
  std::vector<Complex> row_out_, col_in_, col_out_;
  Spectrum work_;
};

/// The calling thread's transform for `grid`.
template <typename Scalar = double>
Spectral<Scalar>& spectral_for(const Grid& grid) {
  thread_local std::map<std::pair<int, int>, std::unique_ptr<Spectral<Scalar>>> cache;
  const auto key = std::make_pair(grid.size(0), grid.dim() == 2 ? grid.size(1) : 0);
  auto it = cache.find(key);
  if (it == cache.end()) it = cache.emplace(key, std::make_unique<Spectral<Scalar>>(grid)).first;
  return *it->second;
}

// ---------------------------------------------------------------------------
// Operators

template <typename Scalar>
Scalar integrate(const BasicScalarField<Scalar>& f) {
  return f.values().sum() * Scalar(f.grid().cell_volume());
}

template <typename Scalar>
Scalar mean(const BasicScalarField<Scalar>& f) {
  return f.values().mean();
}

template <typename Scalar>
Scalar max_abs(const BasicScalarField<Scalar>& f) {
  return f.values().abs().maxCoeff();
}

template <typename Scalar>
Scalar max_abs(const BasicVectorField<Scalar>& v) {
  return v.values().abs().maxCoeff();
}

/// Squared L2 norm computed from the modal coefficients (Parseval).
template <typename Scalar>
Scalar modal_norm_squared(const BasicScalarField<Scalar>& f) {
  auto& sp = spectral_for<Scalar>(f.grid());
  const auto hat = sp.forward(f.values());
  const Scalar s = (sp.parseval_weight() * hat.abs2()).sum();
  return s * Scalar(f.grid().cell_volume()) / Scalar(f.grid().cells());
}

template <typename Scalar>
BasicVectorField<Scalar> gradient(const BasicScalarField<Scalar>& f) {
  const Grid& g = f.grid();
  auto& sp = spectral_for<Scalar>(g);
  const auto hat = sp.forward(f.values());
  const std::complex<Scalar> I(0, 1);
  typename BasicVectorField<Scalar>::Values out(g.cells(), g.dim());
  for (int d = 0; d < g.dim(); ++d)
    out.col(d) = sp.inverse(hat * (I * sp.derivative_wavenumber(d).template cast<std::complex<Scalar>>()));
  return {g, std::move(out)};
}

template <typename Scalar>
BasicScalarField<Scalar> divergence(const BasicVectorField<Scalar>& v) {
  const Grid& g = v.grid();
  auto& sp = spectral_for<Scalar>(g);
  const std::complex<Scalar> I(0, 1);
  typename Spectral<Scalar>::Spectrum acc = Spectral<Scalar>::Spectrum::Zero(sp.modes());
  for (int d = 0; d < g.dim(); ++d)
    acc += sp.forward(v.values().col(d)) * (I * sp.derivative_wavenumber(d).template cast<std::complex<Scalar>>());
  return {g, sp.inverse(acc)};
}

/// Entry (a, b) = d v_a / d x_b.
template <typename Scalar>
BasicTensorField<Scalar> gradient(const BasicVectorField<Scalar>& v) {
  const Grid& g = v.grid();
  const int n = g.dim();
  auto& sp = spectral_for<Scalar>(g);
  const std::complex<Scalar> I(0, 1);
  typename BasicTensorField<Scalar>::Values out(g.cells(), n * n);
  for (int a = 0; a < n; ++a) {
    const auto hat = sp.forward(v.values().col(a));
    for (int b = 0; b < n; ++b)
      out.col(BasicTensorField<Scalar>::slot(n, a, b)) =
          sp.inverse(hat * (I * sp.derivative_wavenumber(b).template cast<std::complex<Scalar>>()));
  }
  return {g, std::move(out)};
}

/// Row-wise divergence: component a = sum_b d T_ab / d x_b.
template <typename Scalar>
BasicVectorField<Scalar> divergence(const BasicTensorField<Scalar>& t) {
  const Grid& g = t.grid();
  const int n = g.dim();
  auto& sp = spectral_for<Scalar>(g);
  const std::complex<Scalar> I(0, 1);
  typename BasicVectorField<Scalar>::Values out(g.cells(), n);
  for (int a = 0; a < n; ++a) {
    typename Spectral<Scalar>::Spectrum acc = Spectral<Scalar>::Spectrum::Zero(sp.modes());
    for (int b = 0; b < n; ++b)
      acc += sp.forward(t.values().col(BasicTensorField<Scalar>::slot(n, a, b))) *
             (I * sp.derivative_wavenumber(b).template cast<std::complex<Scalar>>());
    out.col(a) = sp.inverse(acc);
  }
  return {g, std::move(out)};
}

template <typename Scalar>
BasicScalarField<Scalar> laplacian(const BasicScalarField<Scalar>& f) {
  auto& sp = spectral_for<Scalar>(f.grid());
  const auto hat = sp.forward(f.values());
  return {f.grid(), sp.inverse(hat * (-sp.wavenumber_squared()).template cast<std::complex<Scalar>>())};
}

/// Solves Laplacian(u) = f for zero-mean u. A nonzero mean of f is removed
/// before solving; if it exceeds 1e-12 (relative to max|f|, floor 1) a warning
/// is issued and the removed value is stored in `removed_mean` when given.
template <typename Scalar>
BasicScalarField<Scalar> inverse_laplacian(const BasicScalarField<Scalar>& f, Scalar* removed_mean = nullptr) {
  const Scalar m = mean(f);
  const Scalar scale = std::max<Scalar>(Scalar(1), max_abs(f));
  if (std::abs(m) > Scalar(1e-12) * scale) {
    std::ostringstream os;
    os << "inverse_laplacian: source mean " << m << " removed before solving";
    warn(os.str());
  }
  if (removed_mean) *removed_mean = m;
  auto& sp = spectral_for<Scalar>(f.grid());
  auto hat = sp.forward(f.values());
  const auto& k2 = sp.wavenumber_squared();
  for (Index i = 0; i < hat.size(); ++i) hat[i] = k2[i] > 0 ? hat[i] / (-k2[i]) : std::complex<Scalar>(0);
  return {f.grid(), sp.inverse(hat)};
}

/// Leray projection Id - grad Laplacian^{-1} div, built from the same
/// derivative wavenumbers as `divergence` so the result is discretely
/// solenoidal.
template <typename Scalar>
BasicVectorField<Scalar> helmholtz_project(const BasicVectorField<Scalar>& v) {
  const Grid& g = v.grid();
  const int n = g.dim();
  auto& sp = spectral_for<Scalar>(g);
  std::array<typename Spectral<Scalar>::Spectrum, 2> hat;
  for (int d = 0; d < n; ++d) hat[d] = sp.forward(v.values().col(d));
  typename Spectral<Scalar>::Spectrum kdotv = Spectral<Scalar>::Spectrum::Zero(sp.modes());
  Eigen::Array<Scalar, Eigen::Dynamic, 1> kk = Eigen::Array<Scalar, Eigen::Dynamic, 1>::Zero(sp.modes());
  for (int d = 0; d < n; ++d) {
    const auto& k = sp.derivative_wavenumber(d);
    kdotv += hat[d] * k.template cast<std::complex<Scalar>>();
    kk += k * k;
  }
  typename BasicVectorField<Scalar>::Values out(g.cells(), n);
  for (int d = 0; d < n; ++d) {
    const auto& k = sp.derivative_wavenumber(d);
    typename Spectral<Scalar>::Spectrum h = hat[d];
    for (Index i = 0; i < h.size(); ++i)
      if (kk[i] > 0) h[i] -= k[i] * kdotv[i] / kk[i];
    out.col(d) = sp.inverse(h);
  }
  return {g, std::move(out)};
}

/// Zeroes all modes outside the 2/3-rule band.
template <typename Scalar>
BasicScalarField<Scalar> dealias(const BasicScalarField<Scalar>& f) {
  auto& sp = spectral_for<Scalar>(f.grid());
  return {f.grid(), sp.inverse(sp.forward(f.values()) * sp.dealias_mask().template cast<std::complex<Scalar>>())};
}

/// 2D only: (d psi/dy, -d psi/dx), which is solenoidal for any psi.
template <typename Scalar>
BasicVectorField<Scalar> skew_gradient(const BasicScalarField<Scalar>& psi) {
  if (psi.grid().dim() != 2) throw InvalidArgument("skew_gradient: needs a 2D grid");
  const auto grad = gradient(psi);
  typename BasicVectorField<Scalar>::Values out(psi.grid().cells(), 2);
  out.col(0) = grad.values().col(1);
  out.col(1) = -grad.values().col(0);
  return {psi.grid(), std::move(out)};
}

/// Spectral interpolation onto another grid of the same dimension. Modes
/// resolved by both grids (Nyquist excluded) are carried over; the rest drop.
template <typename Scalar>
BasicScalarField<Scalar> resample(const BasicScalarField<Scalar>& f, const Grid& target) {
  const Grid& src = f.grid();
  if (src.dim() != target.dim()) throw InvalidArgument("resample: dimension mismatch");
  if (src == target) return f;
  auto& sp_src = spectral_for<Scalar>(src);
  const auto hat = sp_src.forward(f.values());
  auto& sp_dst = spectral_for<Scalar>(target);
  typename Spectral<Scalar>::Spectrum out = Spectral<Scalar>::Spectrum::Zero(sp_dst.modes());
  const Scalar scale = Scalar(target.cells()) / Scalar(src.cells());
  // Index maps through signed wavenumbers.
  std::map<std::pair<long, long>, Index> dst_index;
  for (Index i = 0; i < sp_dst.modes(); ++i) {
    const long k0 = long(sp_dst.wavenumber(0)[i]);
    const long k1 = target.dim() == 2 ? long(sp_dst.wavenumber(1)[i]) : 0;
    dst_index.emplace(std::make_pair(k0, k1), i);
  }
  for (Index i = 0; i < sp_src.modes(); ++i) {
    bool keep = true;
    std::array<long, 2> k{0, 0};
    for (int d = 0; d < src.dim(); ++d) {
      k[d] = long(sp_src.wavenumber(d)[i]);
      const long limit = std::min(src.size(d), target.size(d)) / 2;
      if (std::abs(k[d]) >= limit) keep = false;
    }
    if (!keep) continue;
    const auto it = dst_index.find({k[0], k[1]});
    if (it != dst_index.end()) out[it->second] = hat[i] * scale;
  }
  return {target, sp_dst.inverse(out)};
}

template <typename Scalar>
BasicVectorField<Scalar> resample(const BasicVectorField<Scalar>& v, const Grid& target) {
  std::vector<BasicScalarField<Scalar>> comps;
  for (int d = 0; d < v.dim(); ++d) comps.push_back(resample(v.component(d), target));
  return BasicVectorField<Scalar>::from_components(comps);
}

}  // namespace dmv
