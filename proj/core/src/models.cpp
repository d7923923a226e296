#include "gif/models.hpp"

#include <cmath>
#include <numbers>

#include "gif/errors.hpp"

namespace gif::models {

void PhysicalConstants::validate() const {
  if (!(mu > 0.0) || !(re > 0.0) || !(j2 >= 0.0)) {
    throw ConfigError("physical constants must be positive");
  }
}

Vector OrbitState::to_vector() const {
  Vector x(6);
  x << position, velocity;
  return x;
}

OrbitState OrbitState::from_vector(const Vector& x) {
  if (x.size() != 6) throw DomainError("OrbitState expects a 6-vector");
  return {x.head<3>(), x.tail<3>()};
}

Vector3 j2_acceleration(const Vector3& r, const PhysicalConstants& c) {
  const double r2 = r.squaredNorm();
  const double rn = std::sqrt(r2);
  const double factor = -1.5 * c.mu * c.j2 * c.re * c.re / (r2 * r2 * rn);
  const double zr = r.z() * r.z() / r2;
  return {factor * (1.0 - 5.0 * zr) * r.x(), factor * (1.0 - 5.0 * zr) * r.y(),
          factor * (3.0 - 5.0 * zr) * r.z()};
}

Vector3 accel(const OrbitState& state, const Vector3& thrust, const PhysicalConstants& c) {
  const double r2 = state.position.squaredNorm();
  if (r2 == 0.0) throw DomainError("accel: position at the origin");
  const double rn = std::sqrt(r2);
  return -c.mu / (r2 * rn) * state.position + j2_acceleration(state.position, c) + thrust;
}

Vector3 along_track_thrust(const OrbitState& state, double magnitude) {
  const double speed = state.velocity.norm();
  if (speed == 0.0) return Vector3::Zero();
  return magnitude / speed * state.velocity;
}

Vector3 VelocityFrameThrust::operator()(const OrbitState& s) const {
  const Vector3 h = s.position.cross(s.velocity);
  const double speed = s.velocity.norm();
  const double hn = h.norm();
  if (speed == 0.0 || hn == 0.0) throw DomainError("VelocityFrameThrust: degenerate orbit frame");
  const Vector3 t = s.velocity / speed;
  const Vector3 n = h / hn;
  return components.x() * t + components.y() * n + components.z() * t.cross(n);
}

template <ThrustField Thrust>
OrbitState propagate(const OrbitState& state, const Thrust& thrust, double dt,
                     const PhysicalConstants& consts, double max_substep) {
  if (!(dt > 0.0) || !(max_substep > 0.0)) {
    throw DomainError("propagate: dt and substep must be positive");
  }
  const auto steps = static_cast<long>(std::ceil(dt / max_substep - 1e-12));
  const double h = dt / static_cast<double>(steps);

  const auto derivative = [&](const OrbitState& s) {
    return OrbitState{s.velocity, accel(s, thrust(s), consts)};
  };
  const auto shifted = [](const OrbitState& s, const OrbitState& k, double scale) {
    return OrbitState{s.position + scale * k.position, s.velocity + scale * k.velocity};
  };

  OrbitState s = state;
  for (long i = 0; i < steps; ++i) {
    const OrbitState k1 = derivative(s);
    const OrbitState k2 = derivative(shifted(s, k1, 0.5 * h));
    const OrbitState k3 = derivative(shifted(s, k2, 0.5 * h));
    const OrbitState k4 = derivative(shifted(s, k3, h));
    s.position += h / 6.0 * (k1.position + 2.0 * k2.position + 2.0 * k3.position + k4.position);
    s.velocity += h / 6.0 * (k1.velocity + 2.0 * k2.velocity + 2.0 * k3.velocity + k4.velocity);
  }
  if (!s.position.allFinite() || !s.velocity.allFinite()) {
    throw PropagationError("propagate: non-finite state");
  }
  return s;
}

template OrbitState propagate<ConstantThrust>(const OrbitState&, const ConstantThrust&, double,
                                              const PhysicalConstants&, double);
template OrbitState propagate<AlongTrackThrust>(const OrbitState&, const AlongTrackThrust&,
                                                double, const PhysicalConstants&, double);
template OrbitState propagate<VelocityFrameThrust>(const OrbitState&, const VelocityFrameThrust&,
                                                   double, const PhysicalConstants&, double);

Vector radar_measure(const OrbitState& state) {
  const Vector3& r = state.position;
  const double rho = r.norm();
  if (rho == 0.0) throw DomainError("radar_measure: position at the origin");
  Vector y(4);
  y << rho, r.dot(state.velocity) / rho, std::atan2(r.y(), r.x()), std::asin(r.z() / rho);
  return y;
}

Matrix radar_jacobian(const OrbitState& state) {
  const Vector3& r = state.position;
  const Vector3& v = state.velocity;
  const double rho2 = r.squaredNorm();
  const double rho = std::sqrt(rho2);
  const double rxy2 = r.x() * r.x() + r.y() * r.y();
  const double rxy = std::sqrt(rxy2);
  if (rho == 0.0 || rxy == 0.0) throw DomainError("radar_jacobian: singular geometry");

  Matrix jac = Matrix::Zero(4, 6);
  jac.block<1, 3>(0, 0) = r.transpose() / rho;
  jac.block<1, 3>(1, 0) = v.transpose() / rho - r.dot(v) / (rho2 * rho) * r.transpose();
  jac.block<1, 3>(1, 3) = r.transpose() / rho;
  jac(2, 0) = -r.y() / rxy2;
  jac(2, 1) = r.x() / rxy2;
  jac(3, 0) = -r.z() * r.x() / (rho2 * rxy);
  jac(3, 1) = -r.z() * r.y() / (rho2 * rxy);
  jac(3, 2) = rxy / rho2;
  return jac;
}

double wrap_angle(double angle) {
  double wrapped = std::remainder(angle, 2.0 * std::numbers::pi);
  if (wrapped <= -std::numbers::pi) wrapped += 2.0 * std::numbers::pi;
  return wrapped;
}

Vector innovation_wrap(Vector dy) {
  if (dy.size() != 4) throw DomainError("innovation_wrap: expected a radar residual");
  dy[2] = wrap_angle(dy[2]);
  return dy;
}

Dynamics orbit_dynamics(double dt, const PhysicalConstants& consts, double max_substep,
                        NoiseFrame frame) {
  consts.validate();
  Dynamics d;
  d.state_dim = 6;
  d.noise_dim = 3;
  if (frame == NoiseFrame::inertial) {
    d.propagate = [dt, consts, max_substep](const Vector& x, const Vector& v) {
      return propagate(OrbitState::from_vector(x), ConstantThrust{v.head<3>()}, dt, consts,
                       max_substep)
          .to_vector();
    };
  } else {
    d.propagate = [dt, consts, max_substep](const Vector& x, const Vector& v) {
      return propagate(OrbitState::from_vector(x), VelocityFrameThrust{v.head<3>()}, dt, consts,
                       max_substep)
          .to_vector();
    };
  }
  return d;
}

MeasurementModel radar_model() {
  MeasurementModel m;
  m.dim = 4;
  m.predict = [](const Vector& x) { return radar_measure(OrbitState::from_vector(x)); };
  m.jacobian = [](const Vector& x) { return radar_jacobian(OrbitState::from_vector(x)); };
  m.wrap = [](const Vector& dy) { return innovation_wrap(dy); };
  return m;
}

void LinearModel::validate() const {
  const Eigen::Index n = f.rows();
  if (f.cols() != n || gamma.rows() != n || h.cols() != n || r.rows() != h.rows() ||
      r.cols() != h.rows()) {
    throw ConfigError("LinearModel: inconsistent dimensions");
  }
  if (asymmetry(r) > 1e-12) throw ConfigError("LinearModel: R is not symmetric");
  (void)lower_cholesky(r, "LinearModel R");
}

Dynamics LinearModel::dynamics() const {
  validate();
  Dynamics d;
  d.state_dim = f.rows();
  d.noise_dim = gamma.cols();
  d.propagate = [f = f, g = gamma](const Vector& x, const Vector& v) -> Vector {
    return f * x + g * v;
  };
  d.state_jacobian = [f = f](const Vector&) { return f; };
  d.noise_jacobian = [g = gamma](const Vector&) { return g; };
  return d;
}

MeasurementModel LinearModel::measurement() const {
  validate();
  MeasurementModel m;
  m.dim = h.rows();
  m.predict = [h = h](const Vector& x) -> Vector { return h * x; };
  m.jacobian = [h = h](const Vector&) { return h; };
  return m;
}

LinearModel LinearModel::toy_full_rank() {
  Matrix h(3, 3);
  h << 1, 0, 1,
       0, 1, 0,
       0, 1, 1;
  return {Matrix::Identity(3, 3), Matrix::Identity(3, 3), h, Matrix::Identity(3, 3)};
}

LinearModel LinearModel::toy_rank_deficient() {
  Matrix h(3, 3);
  h << 1, 0, 1,
       0, -1, 0,
       1, 0, 1;
  return {Matrix::Identity(3, 3), Matrix::Identity(3, 3), h, Matrix::Identity(3, 3)};
}

}  // namespace gif::models
