#pragma once

// 5-DOF underwater rigid-body dynamics. Pitch carries no actuation; the
// centre of buoyancy sits above the centre of mass, so roll and pitch are
// passively restored. World frame is NED (z = depth), body frame FRD.

#include <array>
#include <cstdint>
#include <span>
#include <stdexcept>

#include <Eigen/Dense>

namespace auvsim::hydro {

using Vec3 = Eigen::Vector3d;

inline constexpr std::uint16_t kPwmNeutral = 1500;
inline constexpr std::uint16_t kPwmMin = 1100;
inline constexpr std::uint16_t kPwmMax = 1900;

struct ThrusterPwm {
    std::array<std::uint16_t, 6> pwm{kPwmNeutral, kPwmNeutral, kPwmNeutral,
                                     kPwmNeutral, kPwmNeutral, kPwmNeutral};
    bool all_neutral() const {
        for (auto v : pwm)
            if (v != kPwmNeutral) return false;
        return true;
    }
    bool operator==(const ThrusterPwm&) const = default;
};

struct VehicleState {
    Vec3 position{0.0, 0.0, 0.0}; // world NED, m; z is depth
    Vec3 attitude{0.0, 0.0, 0.0}; // roll, pitch, yaw, rad, wrapped to (-pi, pi]
    Vec3 v_body{0.0, 0.0, 0.0};   // u, v, w, m/s
    Vec3 w_body{0.0, 0.0, 0.0};   // p, q, r, rad/s
    double t = 0.0;

    double depth() const { return position.z(); }
    double roll() const { return attitude.x(); }
    double pitch() const { return attitude.y(); }
    double yaw() const { return attitude.z(); }
};

struct VehicleParams {
    double mass = 11.0;               // kg
    Vec3 inertia{0.20, 0.25, 0.30};   // kg m^2, diagonal
    double gravity = 9.81;            // m/s^2
    double buoyancy = 11.0 * 9.81;    // N, default neutral
    Vec3 cob_offset{0.0, 0.0, -0.02}; // m, body frame; -z = above CoM
    Vec3 linear_drag{15.0, 60.0, 60.0};          // N s/m
    Vec3 quadratic_drag{10.0, 20.0, 20.0};       // N s^2/m^2
    Vec3 angular_linear_drag{0.5, 0.5, 1.5};     // N m s/rad
    Vec3 angular_quadratic_drag{0.2, 0.2, 0.2};  // N m s^2/rad^2
};

struct Thruster {
    Vec3 position;  // m, body FRD
    Vec3 direction; // unit vector, thrust direction for positive command
};

struct ThrusterGeometry {
    std::array<Thruster, 6> thrusters;
    double thrust_max = 40.0;      // N at full command
    double deadband_us = 25.0;     // |pwm - 1500| below this gives zero thrust

    // Four vectored horizontal thrusters at +-45 deg plus two verticals;
    // the layout spans surge, sway, heave, roll and yaw, never pitch.
    static ThrusterGeometry vectored_default();
};

struct Wrench {
    Vec3 force{0.0, 0.0, 0.0};  // N, body
    Vec3 torque{0.0, 0.0, 0.0}; // N m, body
};

struct NonFiniteState : std::runtime_error {
    explicit NonFiniteState(const std::string& what) : std::runtime_error(what) {}
};

// Quadratic thrust curve with deadband: s = (pwm-1500)/400, thrust = Tmax*s*|s|.
// Throws std::out_of_range outside [1100, 1900].
double pwm_to_thrust(double pwm_us, double thrust_max = 40.0, double deadband_us = 25.0);

Wrench thruster_wrench(std::span<const double, 6> thrusts, const ThrusterGeometry& geometry);

// body->world rotation for Z-Y-X Euler angles (roll, pitch, yaw)
Eigen::Matrix3d body_to_world(const Vec3& attitude);

double wrap_angle(double a); // to (-pi, pi]

// One semi-implicit Euler step at fixed dt. Velocities integrate first, the
// pose follows with the updated velocities. Throws NonFiniteState when the
// state leaves the finite / small-pitch envelope.
VehicleState step(const VehicleState& state, const ThrusterPwm& pwm, const VehicleParams& params,
                  const ThrusterGeometry& geometry, double dt);

} // namespace auvsim::hydro
