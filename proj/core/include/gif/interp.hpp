#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "gif/linalg.hpp"

namespace gif {

enum class GridPurpose { time_update, measurement_update, quadrature };

std::string_view to_string(GridPurpose purpose);

// Strictly increasing, positive nodes of the mixing parameter z.
class NodeGrid {
 public:
  NodeGrid(std::vector<double> nodes, GridPurpose purpose);

  std::size_t size() const { return nodes_.size(); }
  std::span<const double> nodes() const { return nodes_; }
  double operator[](std::size_t i) const { return nodes_[i]; }
  double front() const { return nodes_.front(); }
  double back() const { return nodes_.back(); }
  GridPurpose purpose() const { return purpose_; }

  NodeGrid with_purpose(GridPurpose purpose) const { return NodeGrid(nodes_, purpose); }
  bool same_nodes(const NodeGrid& other) const { return nodes_ == other.nodes_; }

 private:
  std::vector<double> nodes_;
  GridPurpose purpose_;
};

// Curve through (node, value) pairs: linear for 2 nodes, the unique quadratic
// for 3, a natural cubic spline for 4 or more. A single node gives a curve
// defined only at that node. Evaluation outside [first node, last node]
// throws ExtrapolationError.
class Interpolant {
 public:
  enum class Kind { point, linear, quadratic, natural_cubic };

  Interpolant(std::vector<double> nodes, std::vector<double> values);

  double operator()(double z) const;
  Kind kind() const { return kind_; }
  double lower() const { return nodes_.front(); }
  double upper() const { return nodes_.back(); }

 private:
  Kind kind_;
  std::vector<double> nodes_;
  std::vector<double> values_;
  std::vector<double> second_derivatives_;  // natural_cubic only
};

Interpolant fit_curve(const NodeGrid& nodes, std::span<const double> values);

// Abscissa the curves are fitted over: z itself, or sqrt(z). Cholesky factors
// of z-scaled covariances grow like sqrt(z), so they are close to linear in
// the second scale.
enum class InterpScale { z, sqrt_z };

std::string_view to_string(InterpScale scale);

// Row i holds the weights that map data on `source` to the curve value at
// target[i]. Every curve kind above is linear in its data, so remapping any
// quantity is a product with this matrix.
Matrix interpolation_matrix(const NodeGrid& source, const NodeGrid& target,
                            InterpScale scale = InterpScale::z);

// One Gaussian component pinned to a node z.
struct Mixand {
  double z = 0.0;
  Vector mean;
  Matrix chol;  // lower triangular, non-negative diagonal
  double log_weight = 0.0;

  Matrix covariance() const { return chol * chol.transpose(); }
};

// A discretized continuous Gaussian mixture: one mixand per grid node.
class CgmmBelief {
 public:
  CgmmBelief(NodeGrid grid, std::vector<Mixand> mixands);

  const NodeGrid& grid() const { return grid_; }
  const std::vector<Mixand>& mixands() const { return mixands_; }
  std::vector<Mixand>& mixands() { return mixands_; }
  std::size_t size() const { return mixands_.size(); }
  Eigen::Index state_dim() const { return mixands_.front().mean.size(); }

 private:
  NodeGrid grid_;
  std::vector<Mixand> mixands_;
};

// Re-expresses the belief on `target` by per-entry curves over the source
// grid: Cholesky entries (lower triangle), mean components and log-weights.
// Throws NestingError when a target node lies outside the source span.
CgmmBelief remap_belief(const CgmmBelief& belief, const NodeGrid& target,
                        InterpScale scale = InterpScale::z);

struct NestingViolation {
  std::size_t source_index = 0;  // position of the source grid in the pipeline
  std::size_t target_index = 0;
  double node = 0.0;             // offending target node
  double lower = 0.0;            // source span
  double upper = 0.0;
  std::string message() const;
};

// Checks a pipeline in which grid k+1 is evaluated from grid k. Returns the
// first violation, or nullopt when every grid lies in its source's span.
std::optional<NestingViolation> check_nesting(std::span<const NodeGrid> grids);

}  // namespace gif
