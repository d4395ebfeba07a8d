#include "clockdil/galerkin_basis.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "clockdil/simd/kernels.hpp"

namespace clockdil {
namespace {

// Beyond |y| = 26 the starting Gaussian gets close to underflow for large N, so those
// points take a log-scaled scalar path.
constexpr double kSafeAbscissa = 26.0;

using RowMajor = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

void scaled_column(std::size_t n_funcs, double y, double* out, std::size_t stride) {
  double prev = 0.0;
  double cur = std::pow(std::numbers::pi, -0.25);
  double log_scale = -0.5 * y * y;
  out[0] = cur * std::exp(log_scale);
  for (std::size_t k = 0; k + 1 < n_funcs; ++k) {
    const double next = std::sqrt(2.0 / (k + 1.0)) * y * cur - std::sqrt(k / (k + 1.0)) * prev;
    prev = cur;
    cur = next;
    if (std::abs(cur) > 1e100) {
      cur *= 1e-100;
      prev *= 1e-100;
      log_scale += 100.0 * std::numbers::ln10;
    }
    out[(k + 1) * stride] = cur * std::exp(log_scale);
  }
}

template <class Sink>
void with_rule(const HermiteBasis& basis, const QuadratureOptions& opts, std::size_t step,
               Sink&& sink) {
  // step 0 is the initial rule; each later step doubles the node count.
  const double radius = basis.support_radius();
  if (opts.kind == QuadratureKind::GaussHermite) {
    const std::size_t base = opts.initial_order ? opts.initial_order : 2 * basis.size();
    const std::size_t order = base << step;
    const QuadratureRule& rule = gauss_hermite_folded(order);
    std::vector<double> x;
    std::vector<double> w;
    x.reserve(order);
    w.reserve(order);
    for (Eigen::Index i = 0; i < rule.nodes.size(); ++i) {
      const double xi = basis.scale() * rule.nodes(i);
      if (std::abs(xi) > radius) continue;
      x.push_back(xi);
      w.push_back(basis.scale() * rule.weights(i));
    }
    sink(x, w, order);
  } else {
    const double width = 2.0 * radius;
    const std::size_t base = opts.initial_order
                                 ? opts.initial_order
                                 : static_cast<std::size_t>(std::ceil(width / basis.resolution()));
    const QuadratureRule rule =
        panel_rule(-radius, radius, base << step, 16, std::span<const double>(opts.breakpoints));
    std::vector<double> x(rule.nodes.data(), rule.nodes.data() + rule.nodes.size());
    std::vector<double> w(rule.weights.data(), rule.weights.data() + rule.weights.size());
    sink(x, w, x.size());
  }
}

std::size_t max_steps(const HermiteBasis& basis, const QuadratureOptions& opts) {
  const std::size_t base = opts.initial_order
                               ? opts.initial_order
                               : (opts.kind == QuadratureKind::GaussHermite ? 2 * basis.size() : 1);
  std::size_t steps = 0;
  while ((base << (steps + 1)) <= opts.max_order) ++steps;
  return steps;
}

}  // namespace

HermiteBasis::HermiteBasis(std::size_t size, double scale) : size_(size), scale_(scale) {
  if (size < 2) throw Error(ErrorKind::InvalidArgument, "HermiteBasis: size must be >= 2");
  if (!(scale > 0.0) || !std::isfinite(scale))
    throw Error(ErrorKind::InvalidArgument, "HermiteBasis: scale must be positive");
}

double HermiteBasis::eval(std::size_t n, double x) const {
  if (n >= size_) throw Error(ErrorKind::InvalidArgument, "basis index out of range");
  std::vector<double> col(n + 1);
  scaled_column(n + 1, x / scale_, col.data(), 1);
  return col[n] / std::sqrt(scale_);
}

RealVector HermiteBasis::column(double x) const {
  RealVector out(static_cast<Eigen::Index>(size_));
  scaled_column(size_, x / scale_, out.data(), 1);
  return out / std::sqrt(scale_);
}

RealMatrix HermiteBasis::table(std::span<const double> x) const {
  const std::size_t m = x.size();
  RowMajor rows(static_cast<Eigen::Index>(size_), static_cast<Eigen::Index>(m));
  std::vector<double> y(m);
  std::vector<std::size_t> far;
  for (std::size_t j = 0; j < m; ++j) {
    y[j] = x[j] / scale_;
    if (std::abs(y[j]) > kSafeAbscissa) {
      far.push_back(j);
      y[j] = 0.0;  // recomputed below
    }
  }
  const double c0 = std::pow(std::numbers::pi, -0.25);
  double* r0 = rows.row(0).data();
  for (std::size_t j = 0; j < m; ++j) r0[j] = c0 * std::exp(-0.5 * y[j] * y[j]);
  std::vector<double> zeros(m, 0.0);
  const auto& k = simd::kernels();
  k.recurrence(std::sqrt(2.0), 0.0, y.data(), r0, zeros.data(), rows.row(1).data(), m);
  for (std::size_t n = 1; n + 1 < size_; ++n) {
    k.recurrence(std::sqrt(2.0 / (n + 1.0)), std::sqrt(n / (n + 1.0)), y.data(),
                 rows.row(static_cast<Eigen::Index>(n)).data(),
                 rows.row(static_cast<Eigen::Index>(n - 1)).data(),
                 rows.row(static_cast<Eigen::Index>(n + 1)).data(), m);
  }
  for (std::size_t j : far) scaled_column(size_, x[j] / scale_, rows.data() + j, m);
  return RealMatrix(rows) / std::sqrt(scale_);
}

double HermiteBasis::support_radius() const noexcept {
  return scale_ * (std::sqrt(2.0 * size_ + 1.0) + 12.0);
}

double HermiteBasis::resolution() const noexcept { return scale_ / std::sqrt(double(size_)); }

RealMatrix gram_matrix(const HermiteBasis& basis, std::size_t order) {
  const QuadratureRule& rule = gauss_hermite_folded(order ? order : 2 * basis.size());
  std::vector<double> x(rule.nodes.data(), rule.nodes.data() + rule.nodes.size());
  for (double& v : x) v *= basis.scale();
  const RealMatrix b = basis.table(x);
  return b * (basis.scale() * rule.weights).asDiagonal() * b.transpose();
}

Matrix position_matrix(const HermiteBasis& basis) {
  const auto n = static_cast<Eigen::Index>(basis.size());
  Matrix x = Matrix::Zero(n, n);
  for (Eigen::Index k = 0; k + 1 < n; ++k) {
    const double v = basis.scale() * std::sqrt((k + 1) / 2.0);
    x(k, k + 1) = v;
    x(k + 1, k) = v;
  }
  return x;
}

Matrix momentum_matrix(const HermiteBasis& basis) {
  const auto n = static_cast<Eigen::Index>(basis.size());
  Matrix p = Matrix::Zero(n, n);
  for (Eigen::Index k = 0; k + 1 < n; ++k) {
    const double v = std::sqrt((k + 1) / 2.0) / basis.scale();
    p(k, k + 1) = cplx(0.0, -v);
    p(k + 1, k) = cplx(0.0, v);
  }
  return p;
}

namespace {

Matrix padded_power(const HermiteBasis& basis, unsigned k, Matrix (*generator)(const HermiteBasis&)) {
  const auto n = static_cast<Eigen::Index>(basis.size());
  if (k == 0) return Matrix::Identity(n, n);
  const Matrix g = generator(HermiteBasis(basis.size() + k, basis.scale()));
  Matrix acc = g;
  for (unsigned j = 1; j < k; ++j) acc = acc * g;
  return acc.topLeftCorner(n, n);
}

}  // namespace

Matrix position_power_matrix(const HermiteBasis& basis, unsigned k) {
  return padded_power(basis, k, &position_matrix);
}

Matrix momentum_power_matrix(const HermiteBasis& basis, unsigned k) {
  return padded_power(basis, k, &momentum_matrix);
}

Matrix polynomial_in_position(const HermiteBasis& basis, std::span<const cplx> coefficients) {
  const auto n = static_cast<Eigen::Index>(basis.size());
  const std::size_t degree = coefficients.empty() ? 0 : coefficients.size() - 1;
  const auto padded = static_cast<Eigen::Index>(basis.size() + degree);
  const Matrix x = position_matrix(HermiteBasis(basis.size() + degree, basis.scale()));
  Matrix acc = Matrix::Zero(padded, padded);
  // Horner in the padded space, truncated once at the end.
  for (std::size_t j = coefficients.size(); j-- > 0;) {
    acc = acc * x;
    acc.diagonal().array() += coefficients[j];
  }
  return acc.topLeftCorner(n, n);
}

GalerkinMatrix galerkin_matrix(const ComplexFunction& f, const HermiteBasis& basis,
                               const QuadratureOptions& opts) {
  GalerkinMatrix out;
  Matrix prev;
  const std::size_t steps = max_steps(basis, opts);
  for (std::size_t step = 0; step <= steps; ++step) {
    Matrix cur;
    with_rule(basis, opts, step, [&](const std::vector<double>& x, const std::vector<double>& w,
                                     std::size_t order) {
      const RealMatrix b = basis.table(x);
      RealVector wr(static_cast<Eigen::Index>(x.size()));
      RealVector wi(static_cast<Eigen::Index>(x.size()));
      bool has_imag = false;
      for (std::size_t j = 0; j < x.size(); ++j) {
        const cplx v = f(x[j]);
        wr(static_cast<Eigen::Index>(j)) = w[j] * v.real();
        wi(static_cast<Eigen::Index>(j)) = w[j] * v.imag();
        has_imag = has_imag || v.imag() != 0.0;
      }
      const RealMatrix re = b * wr.asDiagonal() * b.transpose();
      cur = re.cast<cplx>();
      if (has_imag) cur += kI * (b * wi.asDiagonal() * b.transpose()).cast<cplx>();
      out.order = order;
    });
    if (step > 0) {
      out.refinement_delta = (cur - prev).cwiseAbs().maxCoeff();
      if (out.refinement_delta <= opts.tolerance) {
        out.matrix = std::move(cur);
        return out;
      }
    }
    prev = std::move(cur);
  }
  out.matrix = std::move(prev);
  out.converged = out.refinement_delta <= opts.flag_threshold;
  if (!out.converged && opts.throw_on_flag)
    throw Error(ErrorKind::QuadratureNonConvergence,
                "multiplication operator: node doubling still changes entries by " +
                    std::to_string(out.refinement_delta));
  return out;
}

Matrix multiplication_operator(const ComplexFunction& f, const HermiteBasis& basis,
                               const QuadratureOptions& opts) {
  return galerkin_matrix(f, basis, opts).matrix;
}

StateProjection project_state(const ComplexFunction& psi, const HermiteBasis& basis,
                              std::optional<double> norm_squared, QuadratureOptions opts) {
  StateProjection out;
  Vector prev;
  const std::size_t steps = max_steps(basis, opts);
  for (std::size_t step = 0; step <= steps; ++step) {
    Vector cur;
    with_rule(basis, opts, step, [&](const std::vector<double>& x, const std::vector<double>& w,
                                     std::size_t order) {
      const RealMatrix b = basis.table(x);
      Vector fw(static_cast<Eigen::Index>(x.size()));
      for (std::size_t j = 0; j < x.size(); ++j)
        fw(static_cast<Eigen::Index>(j)) = w[j] * psi(x[j]);
      cur = b.cast<cplx>() * fw;
      out.order = order;
    });
    if (step > 0) {
      out.refinement_delta = (cur - prev).cwiseAbs().maxCoeff();
      if (out.refinement_delta <= opts.tolerance) {
        prev = std::move(cur);
        break;
      }
    }
    prev = std::move(cur);
  }
  if (out.refinement_delta > opts.flag_threshold && opts.throw_on_flag)
    throw Error(ErrorKind::QuadratureNonConvergence,
                "project_state: node doubling still changes coefficients by " +
                    std::to_string(out.refinement_delta));
  out.coefficients = std::move(prev);
  if (norm_squared) out.leakage = 1.0 - out.coefficients.squaredNorm() / *norm_squared;
  return out;
}

Vector fourier_phases(std::size_t n, FourierDirection direction) {
  static constexpr cplx forward[4] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};
  Vector d(static_cast<Eigen::Index>(n));
  for (std::size_t k = 0; k < n; ++k) {
    const cplx v = forward[k % 4];
    d(static_cast<Eigen::Index>(k)) = direction == FourierDirection::Forward ? v : std::conj(v);
  }
  return d;
}

ConjugateCoefficients fourier_conjugate(const Vector& c, const HermiteBasis& basis,
                                        FourierDirection direction) {
  if (static_cast<std::size_t>(c.size()) != basis.size())
    throw Error(ErrorKind::DimensionMismatch, "fourier_conjugate: coefficient length");
  return {fourier_phases(basis.size(), direction).cwiseProduct(c), basis.conjugate()};
}

IntervalProjection interval_projection(double a, double b, const HermiteBasis& basis) {
  if (!(a < b)) throw Error(ErrorKind::InvalidArgument, "interval_projection: need a < b");
  const auto n = static_cast<Eigen::Index>(basis.size());
  const double radius = basis.support_radius();
  const double lo = std::max(a, -radius);
  const double hi = std::min(b, radius);
  IntervalProjection out;
  if (!(lo < hi)) {
    out.matrix = Matrix::Zero(n, n);
    return out;
  }
  auto assemble = [&](std::size_t panels) {
    const QuadratureRule rule = panel_rule(lo, hi, panels, 16);
    std::vector<double> x(rule.nodes.data(), rule.nodes.data() + rule.nodes.size());
    const RealMatrix t = basis.table(x);
    return RealMatrix(t * rule.weights.asDiagonal() * t.transpose());
  };
  auto panels = static_cast<std::size_t>(std::ceil((hi - lo) / (0.5 * basis.resolution())));
  panels = std::max<std::size_t>(panels, 2);
  RealMatrix cur = assemble(panels);
  for (int it = 0; it < 6; ++it) {
    panels *= 2;
    RealMatrix next = assemble(panels);
    out.refinement_delta = (next - cur).cwiseAbs().maxCoeff();
    cur = std::move(next);
    if (out.refinement_delta <= 1e-13) break;
  }
  if (out.refinement_delta > 1e-8)
    throw Error(ErrorKind::QuadratureNonConvergence, "interval_projection did not converge");
  out.matrix = cur.cast<cplx>();
  out.idempotency_defect = (out.matrix * out.matrix - out.matrix).norm();
  return out;
}

}  // namespace clockdil
