#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <concepts>
#include <type_traits>

#include "gif/filter.hpp"

namespace gif::models {

using Vector3 = Eigen::Vector3d;

// Earth constants (SI). Defaults are the WGS-84 / EGM values.
struct PhysicalConstants {
  double mu = 3.986004418e14;  // m^3/s^2
  double re = 6378137.0;       // m
  double j2 = 1.08262668e-3;

  void validate() const;
};

struct OrbitState {
  Vector3 position = Vector3::Zero();  // m, inertial
  Vector3 velocity = Vector3::Zero();  // m/s

  Vector to_vector() const;
  static OrbitState from_vector(const Vector& x);
};

// J2 perturbing acceleration.
Vector3 j2_acceleration(const Vector3& r, const PhysicalConstants& consts);

// Central gravity + J2 + thrust. Throws DomainError at r = 0.
Vector3 accel(const OrbitState& state, const Vector3& thrust, const PhysicalConstants& consts);

// magnitude * v / |v|
Vector3 along_track_thrust(const OrbitState& state, double magnitude);

inline constexpr double kDefaultSubstep = 50.0;  // s

// Thrust held fixed in the inertial frame over the whole interval.
struct ConstantThrust {
  Vector3 acceleration = Vector3::Zero();
  Vector3 operator()(const OrbitState&) const { return acceleration; }
};

// Thrust along the instantaneous velocity, re-evaluated at every RK4 stage.
struct AlongTrackThrust {
  double magnitude = 0.0;
  Vector3 operator()(const OrbitState& s) const { return along_track_thrust(s, magnitude); }
};

// Thrust with fixed components in the local velocity frame
// (velocity direction, orbit normal, velocity x normal), re-evaluated at every RK4 stage.
struct VelocityFrameThrust {
  Vector3 components = Vector3::Zero();
  Vector3 operator()(const OrbitState& s) const;
};

// Thrust acceleration as a function of the current state. Eigen expressions
// are excluded: their templated operator() would otherwise match, and a fixed
// vector goes to the ConstantThrust overload below.
template <class T>
concept ThrustField = !std::is_base_of_v<Eigen::EigenBase<std::remove_cvref_t<T>>,
                                         std::remove_cvref_t<T>> &&
                      requires(const T& t, const OrbitState& s) {
                        { t(s) } -> std::convertible_to<Vector3>;
                      };

// Fixed-step RK4 with ceil(dt / max_substep) equal substeps.
// Throws DomainError for dt <= 0 and PropagationError on a non-finite state.
template <ThrustField Thrust>
OrbitState propagate(const OrbitState& state, const Thrust& thrust, double dt,
                     const PhysicalConstants& consts, double max_substep = kDefaultSubstep);

extern template OrbitState propagate<ConstantThrust>(const OrbitState&, const ConstantThrust&,
                                                     double, const PhysicalConstants&, double);
extern template OrbitState propagate<AlongTrackThrust>(const OrbitState&, const AlongTrackThrust&,
                                                       double, const PhysicalConstants&, double);
extern template OrbitState propagate<VelocityFrameThrust>(const OrbitState&,
                                                          const VelocityFrameThrust&, double,
                                                          const PhysicalConstants&, double);

inline OrbitState propagate(const OrbitState& state, const Vector3& thrust, double dt,
                            const PhysicalConstants& consts,
                            double max_substep = kDefaultSubstep) {
  return propagate(state, ConstantThrust{thrust}, dt, consts, max_substep);
}

// Geocentric radar: (range, range-rate, right ascension, declination).
Vector radar_measure(const OrbitState& state);
// Analytic 4x6 Jacobian of radar_measure with respect to [r; v].
Matrix radar_jacobian(const OrbitState& state);

// Wraps the right-ascension residual (index 2) into (-pi, pi].
Vector innovation_wrap(Vector dy);
double wrap_angle(double angle);

// Frame in which the filter's noise acceleration stays constant over an interval.
enum class NoiseFrame { inertial, velocity };

// Filter models for the orbit problem: process noise is an acceleration with
// constant components in `frame` over each interval of length dt.
Dynamics orbit_dynamics(double dt, const PhysicalConstants& consts,
                        double max_substep = kDefaultSubstep,
                        NoiseFrame frame = NoiseFrame::velocity);
MeasurementModel radar_model();

// x_k = F x_{k-1} + Gamma v_{k-1},  y_k = H x_k + w_k.
struct LinearModel {
  Matrix f;
  Matrix gamma;
  Matrix h;
  Matrix r;

  void validate() const;
  Dynamics dynamics() const;
  MeasurementModel measurement() const;

  // The 3-D toy system with F = Gamma = R = I and an invertible H.
  static LinearModel toy_full_rank();
  // Same system with a rank-2 H.
  static LinearModel toy_rank_deficient();
};

}  // namespace gif::models
