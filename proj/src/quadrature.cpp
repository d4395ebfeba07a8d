#include "clockdil/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <Eigen/Eigenvalues>

namespace clockdil {
namespace {

struct HermitePair {
  QuadratureRule standard;
  QuadratureRule folded;
};

// Orthonormal Hermite polynomial values p_0..p_{n-1} at y are kept implicitly: we need
// p_n / p_{n-1} for Newton polishing and log(sum_k p_k^2) for the weights.
struct HermiteScan {
  double ratio;       // p_n(y) / p_{n-1}(y)
  double log_sum_sq;  // log sum_{k<n} p_k(y)^2
};

HermiteScan scan_polynomials(std::size_t n, double y) {
  double prev = 0.0;
  double cur = std::pow(std::numbers::pi, -0.25);
  double sum = cur * cur;
  double log_offset = 0.0;
  for (std::size_t k = 0; k + 1 < n; ++k) {
    const double next = std::sqrt(2.0 / (k + 1.0)) * y * cur - std::sqrt(k / (k + 1.0)) * prev;
    prev = cur;
    cur = next;
    sum += cur * cur;
    if (std::abs(cur) > 1e150) {
      prev *= 1e-150;
      cur *= 1e-150;
      sum *= 1e-300;
      log_offset += 300.0 * std::log(10.0);
    }
  }
  // one more step gives p_n
  const double pn = std::sqrt(2.0 / n) * y * cur - std::sqrt((n - 1.0) / n) * prev;
  return {pn / cur, std::log(sum) + log_offset};
}

HermitePair build_hermite(std::size_t n) {
  // Jacobi matrix of the orthonormal Hermite polynomials: zero diagonal, sqrt(k/2) off it.
  Eigen::VectorXd diag = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(n));
  Eigen::VectorXd sub(static_cast<Eigen::Index>(n > 0 ? n - 1 : 0));
  for (std::size_t k = 1; k < n; ++k) sub(static_cast<Eigen::Index>(k - 1)) = std::sqrt(k / 2.0);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver;
  solver.computeFromTridiagonal(diag, sub, Eigen::EigenvaluesOnly);
  RealVector nodes = solver.eigenvalues();

  HermitePair out;
  out.standard.nodes.resize(nodes.size());
  out.standard.weights.resize(nodes.size());
  out.folded.nodes.resize(nodes.size());
  out.folded.weights.resize(nodes.size());
  for (Eigen::Index i = 0; i < nodes.size(); ++i) {
    double y = nodes(i);
    // p_n' = sqrt(2n) p_{n-1}, so the Newton step is ratio / sqrt(2n).
    for (int it = 0; it < 2; ++it) y -= scan_polynomials(n, y).ratio / std::sqrt(2.0 * n);
    const double log_sum = scan_polynomials(n, y).log_sum_sq;
    out.standard.nodes(i) = y;
    out.folded.nodes(i) = y;
    out.standard.weights(i) = std::exp(-log_sum);
    out.folded.weights(i) = std::exp(y * y - log_sum);
  }
  // Symmetrize: the rule is exactly even.
  const Eigen::Index m = nodes.size();
  for (Eigen::Index i = 0; i < m / 2; ++i) {
    const Eigen::Index j = m - 1 - i;
    const double y = 0.5 * (out.standard.nodes(j) - out.standard.nodes(i));
    for (auto* rule : {&out.standard, &out.folded}) {
      rule->nodes(i) = -y;
      rule->nodes(j) = y;
      const double w = 0.5 * (rule->weights(i) + rule->weights(j));
      rule->weights(i) = w;
      rule->weights(j) = w;
    }
  }
  if (m % 2 == 1) {
    out.standard.nodes(m / 2) = 0.0;
    out.folded.nodes(m / 2) = 0.0;
  }
  return out;
}

template <class Value, class Build>
const Value& cached(std::map<std::size_t, std::unique_ptr<Value>>& cache, std::mutex& mu,
                    std::size_t key, Build build) {
  std::lock_guard lock(mu);
  auto it = cache.find(key);
  if (it == cache.end()) it = cache.emplace(key, std::make_unique<Value>(build(key))).first;
  return *it->second;
}

std::mutex g_hermite_mu;
std::map<std::size_t, std::unique_ptr<HermitePair>> g_hermite;

const HermitePair& hermite_pair(std::size_t order) {
  if (order < 1) throw Error(ErrorKind::InvalidArgument, "Gauss-Hermite order must be >= 1");
  return cached(g_hermite, g_hermite_mu, order, build_hermite);
}

QuadratureRule build_legendre(std::size_t n) {
  Eigen::VectorXd diag = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(n));
  Eigen::VectorXd sub(static_cast<Eigen::Index>(n - 1));
  for (std::size_t k = 1; k < n; ++k)
    sub(static_cast<Eigen::Index>(k - 1)) = k / std::sqrt(4.0 * k * k - 1.0);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver;
  solver.computeFromTridiagonal(diag, sub, Eigen::ComputeEigenvectors);
  QuadratureRule rule;
  rule.nodes = solver.eigenvalues();
  rule.weights = 2.0 * solver.eigenvectors().row(0).transpose().array().square();
  return rule;
}

std::mutex g_legendre_mu;
std::map<std::size_t, std::unique_ptr<QuadratureRule>> g_legendre;

}  // namespace

const QuadratureRule& gauss_hermite(std::size_t order) { return hermite_pair(order).standard; }

const QuadratureRule& gauss_hermite_folded(std::size_t order) {
  return hermite_pair(order).folded;
}

const QuadratureRule& gauss_legendre(std::size_t order) {
  if (order < 2) throw Error(ErrorKind::InvalidArgument, "Gauss-Legendre order must be >= 2");
  return cached(g_legendre, g_legendre_mu, order, build_legendre);
}

QuadratureRule panel_rule(double a, double b, std::size_t panels, std::size_t points_per_panel,
                          std::span<const double> breakpoints) {
  if (!(a < b)) throw Error(ErrorKind::InvalidArgument, "panel_rule: need a < b");
  if (panels < 1) throw Error(ErrorKind::InvalidArgument, "panel_rule: need at least one panel");
  std::vector<double> edges;
  edges.reserve(panels + 1 + breakpoints.size());
  for (std::size_t k = 0; k <= panels; ++k) edges.push_back(a + (b - a) * k / panels);
  for (double bp : breakpoints)
    if (bp > a && bp < b) edges.push_back(bp);
  std::sort(edges.begin(), edges.end());
  edges.erase(std::unique(edges.begin(), edges.end(),
                          [&](double x, double y) { return std::abs(x - y) <= 1e-14 * (b - a); }),
              edges.end());

  const QuadratureRule& base = gauss_legendre(points_per_panel);
  const Eigen::Index p = base.nodes.size();
  QuadratureRule rule;
  rule.nodes.resize(static_cast<Eigen::Index>(edges.size() - 1) * p);
  rule.weights.resize(rule.nodes.size());
  for (std::size_t k = 0; k + 1 < edges.size(); ++k) {
    const double mid = 0.5 * (edges[k] + edges[k + 1]);
    const double half = 0.5 * (edges[k + 1] - edges[k]);
    const Eigen::Index off = static_cast<Eigen::Index>(k) * p;
    rule.nodes.segment(off, p) = (mid + half * base.nodes.array()).matrix();
    rule.weights.segment(off, p) = half * base.weights;
  }
  return rule;
}

double integrate(const std::function<double(double)>& f, double a, double b, double tol) {
  if (a == b) return 0.0;
  double err = 0.0;
  return boost::math::quadrature::gauss_kronrod<double, 31>::integrate(f, a, b, 15, tol, &err);
}

}  // namespace clockdil
