#include "gif/quadrature.hpp"

#include <cmath>
#include <limits>
#include <utility>

namespace gif {

namespace {

// Returns (L_n(z), L_{n-1}(z)); L_{-1} is taken as 0.
std::pair<double, double> laguerre_pair(std::size_t n, double z) {
  double prev = 0.0;
  double cur = 1.0;
  for (std::size_t k = 0; k < n; ++k) {
    const double kd = static_cast<double>(k);
    const double next = ((2.0 * kd + 1.0 - z) * cur - kd * prev) / (kd + 1.0);
    prev = cur;
    cur = next;
  }
  return {cur, prev};
}

constexpr int kMaxNewtonIterations = 100;

}  // namespace

double laguerre_eval(std::size_t n, double z) {
  if (!std::isfinite(z)) {
    throw DomainError("laguerre_eval: z must be finite");
  }
  return laguerre_pair(n, z).first;
}

GaussLaguerreRule::GaussLaguerreRule(std::size_t n) {
  if (n < 1 || n > kMaxQuadratureOrder) {
    throw ConfigError("Gauss-Laguerre order must be in [1, " +
                      std::to_string(kMaxQuadratureOrder) + "], got " + std::to_string(n));
  }
  nodes_.resize(n);
  weights_.resize(n);
  const double nd = static_cast<double>(n);

  double z = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    // Initial guesses after the asymptotic root spacing of L_n.
    if (i == 0) {
      z = 3.0 / (1.0 + 2.4 * nd);
    } else if (i == 1) {
      z += 15.0 / (1.0 + 2.5 * nd);
    } else {
      const double ai = static_cast<double>(i - 1);
      z += (1.0 + 2.55 * ai) / (1.9 * ai) * (z - nodes_[i - 2]);
    }

    // Stop at 1e-14 relative, or once the step stops shrinking at the
    // rounding floor (high orders settle around 1e-13).
    bool converged = false;
    double last_step = std::numeric_limits<double>::infinity();
    for (int it = 0; it < kMaxNewtonIterations; ++it) {
      const auto [ln, lnm1] = laguerre_pair(n, z);
      const double derivative = nd * (ln - lnm1) / z;
      const double step = ln / derivative;
      z -= step;
      if (!std::isfinite(z)) break;
      const double size = std::abs(step);
      if (size <= 1e-14 * std::abs(z) || (size <= 1e-10 * std::abs(z) && size >= last_step)) {
        converged = true;
        break;
      }
      last_step = size;
    }
    if (!converged || z <= 0.0 || (i > 0 && z <= nodes_[i - 1])) {
      throw NumericalError("Gauss-Laguerre root " + std::to_string(i) + " of order " +
                           std::to_string(n) + " failed to converge");
    }
    nodes_[i] = z;
    const double lnp1 = laguerre_pair(n + 1, z).first;
    weights_[i] = z / ((nd + 1.0) * (nd + 1.0) * lnp1 * lnp1);
  }
}

}  // namespace gif
