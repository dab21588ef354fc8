#include "auvsim/hydro.hpp"

#include <cmath>

namespace auvsim::hydro {

ThrusterGeometry ThrusterGeometry::vectored_default() {
    const double c = std::cos(M_PI / 4.0), s = std::sin(M_PI / 4.0);
    ThrusterGeometry g;
    g.thrusters = {{
        {{+0.16, +0.11, 0.0}, {c, -s, 0.0}}, // T1 front-right, az -45 deg
        {{+0.16, -0.11, 0.0}, {c, +s, 0.0}}, // T2 front-left,  az +45 deg
        {{-0.16, +0.11, 0.0}, {c, +s, 0.0}}, // T3 rear-right,  az +45 deg
        {{-0.16, -0.11, 0.0}, {c, -s, 0.0}}, // T4 rear-left,   az -45 deg
        {{0.0, -0.11, 0.0}, {0.0, 0.0, -1.0}}, // T5 mid-left vertical
        {{0.0, +0.11, 0.0}, {0.0, 0.0, -1.0}}, // T6 mid-right vertical
    }};
    return g;
}

double pwm_to_thrust(double pwm_us, double thrust_max, double deadband_us) {
    if (pwm_us < kPwmMin || pwm_us > kPwmMax)
        throw std::out_of_range("pwm out of [1100, 1900]: " + std::to_string(pwm_us));
    if (std::abs(pwm_us - kPwmNeutral) <= deadband_us) return 0.0;
    double s = (pwm_us - kPwmNeutral) / 400.0;
    s = std::clamp(s, -1.0, 1.0);
    return thrust_max * s * std::abs(s);
}

Wrench thruster_wrench(std::span<const double, 6> thrusts, const ThrusterGeometry& geometry) {
    Wrench w;
    for (std::size_t i = 0; i < 6; ++i) {
        Vec3 f = thrusts[i] * geometry.thrusters[i].direction;
        w.force += f;
        w.torque += geometry.thrusters[i].position.cross(f);
    }
    return w;
}

Eigen::Matrix3d body_to_world(const Vec3& attitude) {
    return (Eigen::AngleAxisd(attitude.z(), Vec3::UnitZ()) *
            Eigen::AngleAxisd(attitude.y(), Vec3::UnitY()) *
            Eigen::AngleAxisd(attitude.x(), Vec3::UnitX()))
        .toRotationMatrix();
}

double wrap_angle(double a) {
    a = std::fmod(a, 2.0 * M_PI);
    if (a > M_PI) a -= 2.0 * M_PI;
    if (a <= -M_PI) a += 2.0 * M_PI;
    return a;
}

static Vec3 componentwise_drag(const Vec3& vel, const Vec3& lin, const Vec3& quad) {
    Vec3 d;
    for (int i = 0; i < 3; ++i)
        d[i] = -lin[i] * vel[i] - quad[i] * vel[i] * std::abs(vel[i]);
    return d;
}

VehicleState step(const VehicleState& state, const ThrusterPwm& pwm, const VehicleParams& params,
                  const ThrusterGeometry& geometry, double dt) {
    std::array<double, 6> thrusts;
    for (std::size_t i = 0; i < 6; ++i)
        thrusts[i] = pwm_to_thrust(pwm.pwm[i], geometry.thrust_max, geometry.deadband_us);
    Wrench w = thruster_wrench(std::span<const double, 6>(thrusts), geometry);

    // weight acts at the CoM, buoyancy at the CoB; both are world-vertical
    const Eigen::Matrix3d R = body_to_world(state.attitude);
    const Vec3 weight_body = R.transpose() * Vec3(0.0, 0.0, params.mass * params.gravity);
    const Vec3 buoy_body = R.transpose() * Vec3(0.0, 0.0, -params.buoyancy);
    w.force += weight_body + buoy_body;
    w.torque += params.cob_offset.cross(buoy_body);

    w.force += componentwise_drag(state.v_body, params.linear_drag, params.quadratic_drag);
    w.torque +=
        componentwise_drag(state.w_body, params.angular_linear_drag, params.angular_quadratic_drag);

    VehicleState next = state;
    next.v_body += (w.force / params.mass) * dt;
    next.w_body += w.torque.cwiseQuotient(params.inertia) * dt;

    // pose follows the updated velocities (semi-implicit Euler)
    next.position += body_to_world(state.attitude) * next.v_body * dt;
    const double phi = state.attitude.x(), theta = state.attitude.y();
    const double p = next.w_body.x(), q = next.w_body.y(), r = next.w_body.z();
    const double sphi = std::sin(phi), cphi = std::cos(phi);
    const double ttheta = std::tan(theta), ctheta = std::cos(theta);
    Vec3 euler_rates{p + (q * sphi + r * cphi) * ttheta, q * cphi - r * sphi,
                     (q * sphi + r * cphi) / ctheta};
    next.attitude += euler_rates * dt;
    for (int i = 0; i < 3; ++i) next.attitude[i] = wrap_angle(next.attitude[i]);
    next.t = state.t + dt;

    for (int i = 0; i < 3; ++i)
        if (!std::isfinite(next.position[i]) || !std::isfinite(next.attitude[i]) ||
            !std::isfinite(next.v_body[i]) || !std::isfinite(next.w_body[i]))
            throw NonFiniteState("non-finite vehicle state at t=" + std::to_string(next.t));
    // Euler attitude is only valid away from gimbal lock; the unactuated,
    // buoyancy-restored pitch axis keeps us there in any supported scenario.
    if (std::abs(next.attitude.y()) > M_PI / 3.0)
        throw NonFiniteState("pitch beyond 60 deg at t=" + std::to_string(next.t));
    return next;
}

} // namespace auvsim::hydro
