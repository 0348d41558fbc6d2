#pragma once

// Adaptive Gauss-Kronrod quadrature for smooth integrands, Gauss-Jacobi rules
// for the endpoint power singularities (b - s)^mu of the fractional kernels,
// and truncated half-line integrals.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Eigenvalues>

#include "vofrac/errors.hpp"
#include "vofrac/specialfn.hpp"

namespace vofrac {

struct QuadConfig {
  double rel_tol = 1e-10;
  double abs_tol = 1e-14;
  int max_subdivisions = 2000;
  int singular_nodes = 64;  // Gauss-Jacobi node count

  void validate() const {
    if (!(rel_tol > 0.0)) throw ValidationError("QuadConfig: rel_tol must be > 0");
    if (!(abs_tol > 0.0)) throw ValidationError("QuadConfig: abs_tol must be > 0");
    if (max_subdivisions < 1) throw ValidationError("QuadConfig: max_subdivisions must be >= 1");
    if (singular_nodes < 2) throw ValidationError("QuadConfig: singular_nodes must be >= 2");
  }

  /// Tolerance target for a result of magnitude |value|.
  double target(double value) const { return std::max(rel_tol * std::abs(value), abs_tol); }
};

struct QuadResult {
  double value = 0.0;
  double error_estimate = 0.0;
  int subdivisions_used = 0;
  bool converged = false;
};

/// Quadrature ran out of subdivisions. The partial result travels with the exception.
class NonConvergence : public Error {
 public:
  NonConvergence(const std::string& what, QuadResult partial) : Error(what), partial_(partial) {}
  const QuadResult& partial() const noexcept { return partial_; }

 private:
  QuadResult partial_;
};

inline double require_converged(const QuadResult& r, const char* who) {
  if (!r.converged) {
    throw NonConvergence(std::string(who) + ": quadrature did not converge (error estimate " +
                             std::to_string(r.error_estimate) + ")",
                         r);
  }
  return r.value;
}

namespace detail {

struct Panel {
  double a, b, value, error;
  bool operator<(const Panel& o) const { return error < o.error; }
};

// QUADPACK qk15 nodes (non-negative half) and weights.
inline constexpr std::array<double, 8> kXgk = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
inline constexpr std::array<double, 8> kWgk = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
inline constexpr std::array<double, 4> kWg = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

template <class F>
Panel kronrod15(F& f, double a, double b) {
  constexpr double eps = std::numeric_limits<double>::epsilon();
  const double center = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  std::array<double, 15> fv{};
  const double fc = f(center);
  fv[7] = fc;
  double resk = kWgk[7] * fc;
  double resg = kWg[3] * fc;
  double resabs = std::abs(resk);
  for (int j = 0; j < 7; ++j) {
    const double dx = half * kXgk[j];
    const double f1 = f(center - dx);
    const double f2 = f(center + dx);
    fv[j] = f1;
    fv[14 - j] = f2;
    resk += kWgk[j] * (f1 + f2);
    resabs += kWgk[j] * (std::abs(f1) + std::abs(f2));
    if (j % 2 == 1) resg += kWg[j / 2] * (f1 + f2);
  }
  const double mean = 0.5 * resk;
  double resasc = kWgk[7] * std::abs(fc - mean);
  for (int j = 0; j < 7; ++j) resasc += kWgk[j] * (std::abs(fv[j] - mean) + std::abs(fv[14 - j] - mean));
  const double value = resk * half;
  resasc *= std::abs(half);
  resabs *= std::abs(half);
  double err = std::abs((resk - resg) * half);
  if (resasc != 0.0 && err != 0.0) err = resasc * std::min(1.0, std::pow(200.0 * err / resasc, 1.5));
  if (resabs > std::numeric_limits<double>::min() / (50.0 * eps)) err = std::max(50.0 * eps * resabs, err);
  if (!std::isfinite(value)) err = std::numeric_limits<double>::infinity();
  return {a, b, value, err};
}

}  // namespace detail

/// Globally adaptive G7-K15 quadrature of f over [a, b].
template <class F>
QuadResult integrate_smooth(F&& f, double a, double b, const QuadConfig& cfg = {}) {
  cfg.validate();
  if (a == b) return {0.0, 0.0, 0, true};
  if (!(a < b)) throw DomainError("integrate_smooth: requires a < b");

  std::vector<detail::Panel> heap;
  heap.push_back(detail::kronrod15(f, a, b));
  double value = heap.front().value;
  double error = heap.front().error;
  int used = 1;
  while (error > cfg.target(value) && used < cfg.max_subdivisions) {
    std::pop_heap(heap.begin(), heap.end());
    const detail::Panel worst = heap.back();
    const double mid = 0.5 * (worst.a + worst.b);
    // Panel too narrow to split further in double precision.
    if (!(worst.a < mid && mid < worst.b)) {
      std::push_heap(heap.begin(), heap.end());
      break;
    }
    heap.pop_back();
    const detail::Panel left = detail::kronrod15(f, worst.a, mid);
    const detail::Panel right = detail::kronrod15(f, mid, worst.b);
    heap.push_back(left);
    std::push_heap(heap.begin(), heap.end());
    heap.push_back(right);
    std::push_heap(heap.begin(), heap.end());
    ++used;
    value += left.value + right.value - worst.value;
    error += left.error + right.error - worst.error;
  }
  // Resum so the reported total carries no update drift.
  value = 0.0;
  error = 0.0;
  for (const auto& p : heap) {
    value += p.value;
    error += p.error;
  }
  return {value, error, used, std::isfinite(value) && error <= cfg.target(value)};
}

/// Gauss-Jacobi rule on [-1, 1] for the weight (1 - x)^alpha.
struct JacobiRule {
  double alpha = 0.0;
  std::vector<double> nodes;
  std::vector<double> weights;
};

namespace detail {

// Golub-Welsch on the Jacobi recurrence with beta = 0.
inline JacobiRule build_jacobi_rule(int n, double alpha) {
  constexpr double beta = 0.0;
  const double ab = alpha + beta;
  Eigen::VectorXd diag(n);
  Eigen::VectorXd sub(std::max(n - 1, 1));
  for (int k = 0; k < n; ++k) {
    const double kk = 2.0 * k + ab;
    diag(k) = (k == 0) ? (beta - alpha) / (ab + 2.0) : (beta * beta - alpha * alpha) / (kk * (kk + 2.0));
  }
  for (int k = 1; k < n; ++k) {
    const double kk = 2.0 * k + ab;
    sub(k - 1) = std::sqrt(4.0 * k * (k + alpha) * (k + beta) * (k + ab) / (kk * kk * (kk + 1.0) * (kk - 1.0)));
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig;
  eig.computeFromTridiagonal(diag, sub.head(n - 1), Eigen::ComputeEigenvectors);
  const double mu0 = std::pow(2.0, ab + 1.0) * gamma(alpha + 1.0) * gamma(beta + 1.0) / gamma(ab + 2.0);
  JacobiRule rule;
  rule.alpha = alpha;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  for (int i = 0; i < n; ++i) {
    rule.nodes[i] = eig.eigenvalues()(i);
    const double v = eig.eigenvectors()(0, i);
    rule.weights[i] = mu0 * v * v;
  }
  return rule;
}

class JacobiCache {
 public:
  std::shared_ptr<const JacobiRule> get(int n, double alpha) {
    const Key key{n, static_cast<std::int64_t>(std::llround(alpha * 1e12))};
    std::lock_guard<std::mutex> lock(mutex_);
    auto it = rules_.find(key);
    if (it != rules_.end()) return it->second;
    auto rule = std::make_shared<const JacobiRule>(build_jacobi_rule(n, alpha));
    rules_.emplace(key, rule);
    return rule;
  }

 private:
  using Key = std::pair<int, std::int64_t>;
  std::mutex mutex_;
  std::map<Key, std::shared_ptr<const JacobiRule>> rules_;
};

inline JacobiCache& jacobi_cache() {
  static JacobiCache cache;
  return cache;
}

}  // namespace detail

/// Gauss-Jacobi rule with n nodes for the weight (1 - x)^alpha on [-1, 1].
/// Rules are cached by (n, alpha rounded to 1e-12); safe to call concurrently.
inline std::shared_ptr<const JacobiRule> jacobi_rule(int n, double alpha) {
  if (n < 2) throw DomainError("jacobi_rule: need at least two nodes");
  if (!(alpha > -1.0)) throw DomainError("jacobi_rule: weight exponent must exceed -1");
  return detail::jacobi_cache().get(n, alpha);
}

/// Integral of g(s) (b - s)^mu over [a, b] (at_upper) or g(s) (s - a)^mu
/// (otherwise), mu in (-1, 0]. The panel touching the singular endpoint uses
/// Gauss-Jacobi rules of two sizes; when they disagree the far half is handed
/// to integrate_smooth and the singular panel is halved.
template <class G>
QuadResult integrate_endpoint_singular(G&& g, double a, double b, double mu, bool at_upper,
                                       const QuadConfig& cfg = {}) {
  cfg.validate();
  if (!(mu > -1.0)) {
    throw DomainError("integrate_endpoint_singular: exponent " + std::to_string(mu) +
                      " <= -1 is not integrable; use the regularized transform");
  }
  if (mu > 0.0) throw DomainError("integrate_endpoint_singular: exponent must lie in (-1, 0]");
  if (a == b) return {0.0, 0.0, 0, true};
  if (!(a < b)) throw DomainError("integrate_endpoint_singular: requires a < b");

  // Work in the distance u from the singular endpoint so that small
  // distances are represented exactly.
  const double len = b - a;
  auto at = [&](double u) { return at_upper ? g(b - u) : g(a + u); };

  const int n_fine = cfg.singular_nodes;
  const int n_coarse = std::max(2, (2 * cfg.singular_nodes) / 3);
  const auto fine = jacobi_rule(n_fine, mu);
  const auto coarse = jacobi_rule(n_coarse, mu);

  // Rule on u in [0, hi]: u = hi (1 - x) / 2 puts the weight (1 - x)^mu at u = 0.
  auto apply = [&](const JacobiRule& rule, double hi) {
    const double half = 0.5 * hi;
    double sum = 0.0;
    for (std::size_t i = 0; i < rule.nodes.size(); ++i) sum += rule.weights[i] * at(half * (1.0 - rule.nodes[i]));
    return std::pow(half, mu + 1.0) * sum;
  };

  QuadResult total{0.0, 0.0, 0, true};
  double hi = len;
  while (true) {
    const double v_fine = apply(*fine, hi);
    const double v_coarse = apply(*coarse, hi);
    const double diff = std::abs(v_fine - v_coarse);
    ++total.subdivisions_used;
    const double mid = 0.5 * hi;
    const bool can_split = mid > 0.0 && mid < hi && total.subdivisions_used < cfg.max_subdivisions;
    const double goal = cfg.target(std::abs(total.value) + std::abs(v_fine));
    if (diff <= goal || !can_split) {
      total.value += v_fine;
      total.error_estimate += diff;
      if (diff > goal) total.converged = false;
      break;
    }
    QuadConfig sub = cfg;
    sub.max_subdivisions = std::max(1, cfg.max_subdivisions - total.subdivisions_used);
    sub.abs_tol = std::max(cfg.abs_tol, 0.05 * goal);
    const QuadResult smooth = integrate_smooth([&](double u) { return at(u) * std::pow(u, mu); }, mid, hi, sub);
    total.value += smooth.value;
    total.error_estimate += smooth.error_estimate;
    total.subdivisions_used += smooth.subdivisions_used;
    total.converged = total.converged && smooth.converged;
    hi = mid;
  }
  total.converged = total.converged && std::isfinite(total.value) && total.error_estimate <= cfg.target(total.value);
  return total;
}

/// Point T beyond which C exp(-rate (t - a)) / rate drops below abs_tol.
inline double truncation_point(double a, double decay_rate, double bound, double abs_tol) {
  if (!(decay_rate > 0.0)) throw DomainError("truncation_point: decay_rate must be > 0");
  const double span = std::log(std::max(bound, 1e-300) / (decay_rate * abs_tol)) / decay_rate;
  return a + std::max(span, 1.0 / decay_rate);
}

/// Integral of f over [a, inf) for |f(t)| <= bound exp(-decay_rate (t - a)).
/// Truncated where the tail bound drops below abs_tol; an optional `horizon`
/// caps the truncation point, adding the remaining tail bound to the error.
template <class F>
QuadResult integrate_halfline(F&& f, double a, double decay_rate, const QuadConfig& cfg = {},
                              double bound = 1.0,
                              double horizon = std::numeric_limits<double>::infinity()) {
  cfg.validate();
  if (!(decay_rate > 0.0)) throw DomainError("integrate_halfline: decay_rate must be > 0");
  double end = truncation_point(a, decay_rate, bound, cfg.abs_tol);
  double tail = 0.0;
  if (end > horizon) {
    end = horizon;
    tail = bound * std::exp(-decay_rate * (horizon - a)) / decay_rate;
  }
  QuadResult r = integrate_smooth(f, a, end, cfg);
  if (tail > 0.0) {
    r.error_estimate += tail;
    r.converged = r.converged && r.error_estimate <= cfg.target(r.value);
  }
  return r;
}

}  // namespace vofrac
