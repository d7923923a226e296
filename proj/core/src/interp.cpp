#include "gif/interp.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <utility>

#include "gif/errors.hpp"

namespace gif {

std::string_view to_string(GridPurpose purpose) {
  switch (purpose) {
    case GridPurpose::time_update:
      return "time_update";
    case GridPurpose::measurement_update:
      return "measurement_update";
    case GridPurpose::quadrature:
      return "quadrature";
  }
  return "unknown";
}

NodeGrid::NodeGrid(std::vector<double> nodes, GridPurpose purpose)
    : nodes_(std::move(nodes)), purpose_(purpose) {
  if (nodes_.empty()) throw DomainError("NodeGrid: no nodes");
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    if (!std::isfinite(nodes_[i]) || nodes_[i] <= 0.0) {
      throw DomainError("NodeGrid: node " + std::to_string(i) + " is not positive and finite");
    }
    if (i > 0 && nodes_[i] <= nodes_[i - 1]) {
      throw DomainError("NodeGrid: nodes must be strictly increasing (index " +
                        std::to_string(i) + ")");
    }
  }
}

Interpolant::Interpolant(std::vector<double> nodes, std::vector<double> values)
    : nodes_(std::move(nodes)), values_(std::move(values)) {
  const std::size_t n = nodes_.size();
  if (n == 0 || values_.size() != n) {
    throw DomainError("fit_curve: need one value per node");
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (!std::isfinite(values_[i])) {
      throw DomainError("fit_curve: value at node " + std::to_string(i) + " is not finite");
    }
    if (i > 0 && !(nodes_[i] > nodes_[i - 1])) {
      throw DomainError("fit_curve: nodes must be strictly increasing");
    }
  }
  switch (n) {
    case 1:
      kind_ = Kind::point;
      return;
    case 2:
      kind_ = Kind::linear;
      return;
    case 3:
      kind_ = Kind::quadratic;
      return;
    default:
      kind_ = Kind::natural_cubic;
      break;
  }

  // Second derivatives M with M_0 = M_{n-1} = 0; tridiagonal solve for the interior.
  second_derivatives_.assign(n, 0.0);
  const std::size_t m = n - 2;
  std::vector<double> diag(m), upper(m), rhs(m);
  for (std::size_t k = 0; k < m; ++k) {
    const std::size_t i = k + 1;
    const double h0 = nodes_[i] - nodes_[i - 1];
    const double h1 = nodes_[i + 1] - nodes_[i];
    diag[k] = (h0 + h1) / 3.0;
    upper[k] = h1 / 6.0;
    rhs[k] = (values_[i + 1] - values_[i]) / h1 - (values_[i] - values_[i - 1]) / h0;
  }
  // Thomas algorithm; the lower diagonal at row k equals upper[k-1] by symmetry.
  for (std::size_t k = 1; k < m; ++k) {
    const double factor = upper[k - 1] / diag[k - 1];
    diag[k] -= factor * upper[k - 1];
    rhs[k] -= factor * rhs[k - 1];
  }
  for (std::size_t k = m; k-- > 0;) {
    const double next = (k + 1 < m) ? second_derivatives_[k + 2] : 0.0;
    second_derivatives_[k + 1] = (rhs[k] - upper[k] * next) / diag[k];
  }
}

double Interpolant::operator()(double z) const {
  if (!(z >= nodes_.front() && z <= nodes_.back())) {
    throw ExtrapolationError("interpolant evaluated at z = " + format_double(z) +
                             " outside [" + format_double(nodes_.front()) + ", " +
                             format_double(nodes_.back()) + "]");
  }
  switch (kind_) {
    case Kind::point:
      return values_[0];
    case Kind::linear: {
      const double h = nodes_[1] - nodes_[0];
      const double a = (nodes_[1] - z) / h;
      const double b = (z - nodes_[0]) / h;
      return a * values_[0] + b * values_[1];
    }
    case Kind::quadratic: {
      const double z0 = nodes_[0], z1 = nodes_[1], z2 = nodes_[2];
      const double l0 = (z - z1) * (z - z2) / ((z0 - z1) * (z0 - z2));
      const double l1 = (z - z0) * (z - z2) / ((z1 - z0) * (z1 - z2));
      const double l2 = (z - z0) * (z - z1) / ((z2 - z0) * (z2 - z1));
      return l0 * values_[0] + l1 * values_[1] + l2 * values_[2];
    }
    case Kind::natural_cubic: {
      auto it = std::upper_bound(nodes_.begin(), nodes_.end(), z);
      std::size_t k = static_cast<std::size_t>(it - nodes_.begin());
      k = std::clamp<std::size_t>(k, 1, nodes_.size() - 1) - 1;
      const double h = nodes_[k + 1] - nodes_[k];
      const double a = (nodes_[k + 1] - z) / h;
      const double b = (z - nodes_[k]) / h;
      return a * values_[k] + b * values_[k + 1] +
             ((a * a * a - a) * second_derivatives_[k] +
              (b * b * b - b) * second_derivatives_[k + 1]) *
                 (h * h) / 6.0;
    }
  }
  return values_[0];
}

Interpolant fit_curve(const NodeGrid& nodes, std::span<const double> values) {
  if (values.size() != nodes.size()) {
    throw DomainError("fit_curve: " + std::to_string(values.size()) + " values for " +
                      std::to_string(nodes.size()) + " nodes");
  }
  return Interpolant({nodes.nodes().begin(), nodes.nodes().end()},
                     {values.begin(), values.end()});
}

std::string NestingViolation::message() const {
  return "grid " + std::to_string(source_index + 1) + " node " + std::to_string(target_index) +
         " (z = " + format_double(node) + ") lies outside source grid " +
         std::to_string(source_index) + " span [" + format_double(lower) + ", " +
         format_double(upper) + "]";
}

std::optional<NestingViolation> check_nesting(std::span<const NodeGrid> grids) {
  for (std::size_t k = 0; k + 1 < grids.size(); ++k) {
    const NodeGrid& source = grids[k];
    const NodeGrid& target = grids[k + 1];
    for (std::size_t i = 0; i < target.size(); ++i) {
      if (target[i] < source.front() || target[i] > source.back()) {
        return NestingViolation{k, i, target[i], source.front(), source.back()};
      }
    }
  }
  return std::nullopt;
}

std::string_view to_string(InterpScale scale) {
  return scale == InterpScale::z ? "z" : "sqrt_z";
}

Matrix interpolation_matrix(const NodeGrid& source, const NodeGrid& target, InterpScale scale) {
  const std::array<NodeGrid, 2> pair{source, target};
  if (auto violation = check_nesting(pair)) {
    throw NestingError("remap: " + violation->message());
  }
  const auto ns = static_cast<Eigen::Index>(source.size());
  const auto nt = static_cast<Eigen::Index>(target.size());
  Matrix weights(nt, ns);
  const auto abscissa = [scale](double z) { return scale == InterpScale::z ? z : std::sqrt(z); };
  std::vector<double> x(source.size());
  std::transform(source.nodes().begin(), source.nodes().end(), x.begin(), abscissa);
  std::vector<double> unit(source.size(), 0.0);
  for (Eigen::Index j = 0; j < ns; ++j) {
    std::fill(unit.begin(), unit.end(), 0.0);
    unit[static_cast<std::size_t>(j)] = 1.0;
    const Interpolant basis(x, unit);
    for (Eigen::Index i = 0; i < nt; ++i) {
      weights(i, j) = basis(abscissa(target[static_cast<std::size_t>(i)]));
    }
  }
  return weights;
}

CgmmBelief::CgmmBelief(NodeGrid grid, std::vector<Mixand> mixands)
    : grid_(std::move(grid)), mixands_(std::move(mixands)) {
  if (mixands_.size() != grid_.size()) {
    throw DomainError("CgmmBelief: " + std::to_string(mixands_.size()) + " mixands for " +
                      std::to_string(grid_.size()) + " nodes");
  }
  const Eigen::Index d = mixands_.front().mean.size();
  for (std::size_t i = 0; i < mixands_.size(); ++i) {
    const Mixand& m = mixands_[i];
    if (m.z != grid_[i]) {
      throw DomainError("CgmmBelief: mixand " + std::to_string(i) + " z does not match its node");
    }
    if (m.mean.size() != d || m.chol.rows() != d || m.chol.cols() != d) {
      throw DomainError("CgmmBelief: mixand " + std::to_string(i) + " has inconsistent dimensions");
    }
  }
}

CgmmBelief remap_belief(const CgmmBelief& belief, const NodeGrid& target, InterpScale scale) {
  if (belief.grid().same_nodes(target)) {
    std::vector<Mixand> copy = belief.mixands();
    return CgmmBelief(target, std::move(copy));
  }
  const Matrix weights = interpolation_matrix(belief.grid(), target, scale);
  const Eigen::Index d = belief.state_dim();
  const auto& source = belief.mixands();

  std::vector<Mixand> out(target.size());
  for (std::size_t i = 0; i < target.size(); ++i) {
    const auto row = static_cast<Eigen::Index>(i);
    Mixand& m = out[i];
    m.z = target[i];
    m.mean = Vector::Zero(d);
    m.chol = Matrix::Zero(d, d);
    m.log_weight = 0.0;
    for (std::size_t j = 0; j < source.size(); ++j) {
      const double w = weights(row, static_cast<Eigen::Index>(j));
      if (w == 0.0) continue;
      m.mean += w * source[j].mean;
      m.chol += w * source[j].chol;
      m.log_weight += w * source[j].log_weight;
    }
    m.chol.triangularView<Eigen::StrictlyUpper>().setZero();
    for (Eigen::Index k = 0; k < d; ++k) m.chol(k, k) = std::max(0.0, m.chol(k, k));
  }
  return CgmmBelief(target, std::move(out));
}

}  // namespace gif
