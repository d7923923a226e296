#pragma once

#include <cmath>
#include <concepts>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "gif/errors.hpp"

namespace gif {

inline constexpr std::size_t kMaxQuadratureOrder = 64;

// L_n(z) via the three-term recurrence
//   L_{k+1} = ((2k + 1 - z) L_k - k L_{k-1}) / (k + 1).
double laguerre_eval(std::size_t n, double z);

// Order-n Gauss-Laguerre rule for integrals of the form  int_0^inf e^{-z} f(z) dz.
// Immutable once built.
class GaussLaguerreRule {
 public:
  // Builds the rule for 1 <= n <= kMaxQuadratureOrder. Nodes are the roots of
  // L_n found by Newton iteration; weights are z_i / ((n+1)^2 L_{n+1}(z_i)^2).
  explicit GaussLaguerreRule(std::size_t n);

  std::size_t order() const { return nodes_.size(); }
  std::span<const double> nodes() const { return nodes_; }
  std::span<const double> weights() const { return weights_; }

 private:
  std::vector<double> nodes_;
  std::vector<double> weights_;
};

inline GaussLaguerreRule build_rule(std::size_t n) { return GaussLaguerreRule(n); }

// Sum of w_i f(z_i). Throws NumericalError if f is non-finite at a node.
template <std::invocable<double> F>
double integrate(const GaussLaguerreRule& rule, F&& f) {
  double sum = 0.0;
  const auto z = rule.nodes();
  const auto w = rule.weights();
  for (std::size_t i = 0; i < rule.order(); ++i) {
    const double fi = static_cast<double>(f(z[i]));
    if (!std::isfinite(fi)) {
      throw NumericalError("integrand is non-finite at node " + std::to_string(i) +
                           " (z = " + format_double(z[i]) + ")");
    }
    sum += w[i] * fi;
  }
  return sum;
}

}  // namespace gif
