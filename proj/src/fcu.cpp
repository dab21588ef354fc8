#include "auvsim/fcu.hpp"

#include <cmath>

namespace auvsim::fcu {

Mixer::Mixer(const hydro::ThrusterGeometry& geometry) {
    Eigen::Matrix<double, 5, 6> wrench_map; // rows Fx, Fy, Fz, tau_x, tau_z
    for (int i = 0; i < 6; ++i) {
        const auto& t = geometry.thrusters[static_cast<std::size_t>(i)];
        hydro::Vec3 tau = t.position.cross(t.direction);
        wrench_map(0, i) = t.direction.x();
        wrench_map(1, i) = t.direction.y();
        wrench_map(2, i) = t.direction.z();
        wrench_map(3, i) = tau.x();
        wrench_map(4, i) = tau.z();
    }
    Eigen::JacobiSVD<Eigen::Matrix<double, 5, 6>> svd(wrench_map);
    if (svd.singularValues().minCoeff() < 1e-9)
        throw std::invalid_argument("thruster geometry does not span the 5 actuated axes");

    alloc_ = wrench_map.completeOrthogonalDecomposition().pseudoInverse();
    for (int j = 0; j < 5; ++j) {
        double peak = alloc_.col(j).cwiseAbs().maxCoeff();
        if (peak > 1e-12) alloc_.col(j) /= peak;
    }
}

std::array<double, 6> Mixer::allocate(const AxisCommands& axes) const {
    // heave is positive-up; body z is down
    Eigen::Matrix<double, 5, 1> demand;
    demand << axes.surge, axes.sway, -axes.heave, axes.roll, axes.yaw;
    Eigen::Matrix<double, 6, 1> cmd = alloc_ * demand;
    std::array<double, 6> out;
    for (int i = 0; i < 6; ++i) out[static_cast<std::size_t>(i)] = cmd(i);
    return out;
}

hydro::ThrusterPwm Mixer::mix(const AxisCommands& axes, bool armed) const {
    hydro::ThrusterPwm pwm;
    if (!armed) return pwm; // all neutral
    auto cmd = allocate(axes);
    for (std::size_t i = 0; i < 6; ++i) {
        long long us = hydro::kPwmNeutral + llround(400.0 * cmd[i]);
        us = std::clamp<long long>(us, hydro::kPwmMin, hydro::kPwmMax);
        pwm.pwm[i] = static_cast<std::uint16_t>(us);
    }
    return pwm;
}

static double channel_norm(const RcChannels& rc, int channel) {
    std::uint16_t v = rc.get(channel);
    if (v == RcChannels::kReleased) return 0.0;
    return std::clamp((static_cast<double>(v) - hydro::kPwmNeutral) / 400.0, -1.0, 1.0);
}

AxisCommands rc_to_axes(const RcChannels& rc) {
    AxisCommands a;
    a.roll = channel_norm(rc, 2);
    a.heave = channel_norm(rc, 3);
    a.yaw = channel_norm(rc, 4);
    a.surge = channel_norm(rc, 5);
    a.sway = channel_norm(rc, 6);
    return a;
}

Fcu::Fcu(const FcuConfig& cfg, const hydro::ThrusterGeometry& geometry)
    : cfg_(cfg), mixer_(geometry) {}

std::vector<mav::Message> Fcu::handle_message(const mav::Message& msg, double now) {
    std::vector<mav::Message> replies;
    const auto& reg = mav::Registry::builtin();
    switch (msg.def().msg_id) {
    case mav::msgid::COMMAND_LONG: {
        if (msg.as_u64("command") == mav::kCmdArmDisarm) {
            armed_ = msg.as_double("param1") >= 0.5;
            disarm_reason_ = armed_ ? "" : "commanded";
            mav::Message ack(*reg.by_id(mav::msgid::COMMAND_ACK));
            ack.set_u64("command", mav::kCmdArmDisarm);
            ack.set_u64("result", 0); // MAV_RESULT_ACCEPTED
            replies.push_back(std::move(ack));
        }
        break;
    }
    case mav::msgid::RC_CHANNELS_OVERRIDE: {
        RcChannels rc;
        for (int i = 1; i <= 8; ++i)
            rc.set(i, static_cast<std::uint16_t>(
                          msg.as_u64("chan" + std::to_string(i) + "_raw")));
        if (rc.valid()) { // out-of-range overrides are rejected wholesale
            rc_ = rc;
            last_rc_rx_ = now;
        }
        break;
    }
    default: break; // heartbeat timing is tracked by the link endpoint
    }
    return replies;
}

AxisCommands Fcu::stabilize(const hydro::VehicleState& vehicle, const AxisCommands& axes,
                            double dt) {
    const double p = vehicle.w_body.x(), r = vehicle.w_body.z();
    double roll_accel_est = have_prev_roll_rate_ ? (p - prev_roll_rate_) / dt : 0.0;
    prev_roll_rate_ = p;
    have_prev_roll_rate_ = true;

    AxisCommands out = axes;
    out.roll = axes.roll - cfg_.gains.roll_rate_p * p - cfg_.gains.roll_rate_d * roll_accel_est;
    out.yaw = axes.yaw - cfg_.gains.yaw_rate_p * r;
    // pitch has no actuator; the coupling factor only scales this diagnostic
    pitch_restore_diag_ = cfg_.gains.pitch_coupling * std::sin(vehicle.pitch());

    out.surge = std::clamp(out.surge, -1.0, 1.0);
    out.sway = std::clamp(out.sway, -1.0, 1.0);
    out.heave = std::clamp(out.heave, -1.0, 1.0);
    out.yaw = std::clamp(out.yaw, -1.0, 1.0);
    out.roll = std::clamp(out.roll, -1.0, 1.0);
    return out;
}

hydro::ThrusterPwm Fcu::control_step(const hydro::VehicleState& vehicle, double dt, double now,
                                     link::LinkState link_state) {
    if (link_state == link::LinkState::Lost && armed_) {
        armed_ = false;
        disarm_reason_ = "link_failsafe";
    }
    RcChannels effective = rc_;
    if (now - last_rc_rx_ > cfg_.rc_timeout) effective = RcChannels{}; // stale: all released
    AxisCommands axes = stabilize(vehicle, rc_to_axes(effective), dt);
    pwm_last_ = mixer_.mix(axes, armed_);
    return pwm_last_;
}

std::vector<mav::Message> Fcu::telemetry_tick(const hydro::VehicleState& vehicle, double now) {
    const auto& reg = mav::Registry::builtin();
    const std::int64_t now_us = llround(now * 1e6);
    std::vector<mav::Message> out;

    if (now_us >= next_att_us_) { // 10 Hz pair
        next_att_us_ += 100000;
        mav::Message att(*reg.by_id(mav::msgid::ATTITUDE));
        att.set_u64("time_boot_ms", static_cast<std::uint64_t>(now_us / 1000));
        att.set("roll", vehicle.roll());
        att.set("pitch", vehicle.pitch());
        att.set("yaw", vehicle.yaw());
        att.set("rollspeed", vehicle.w_body.x());
        att.set("pitchspeed", vehicle.w_body.y());
        att.set("yawspeed", vehicle.w_body.z());
        out.push_back(std::move(att));

        mav::Message pres(*reg.by_id(mav::msgid::SCALED_PRESSURE));
        pres.set_u64("time_boot_ms", static_cast<std::uint64_t>(now_us / 1000));
        pres.set("press_abs", depth_to_pressure_hpa(vehicle.depth()));
        pres.set("press_diff", 0.0);
        pres.set_i64("temperature", 1850); // 18.5 C, fixed bench value
        out.push_back(std::move(pres));
    }
    if (now_us >= next_servo_us_) { // 5 Hz
        next_servo_us_ += 200000;
        mav::Message servo(*reg.by_id(mav::msgid::SERVO_OUTPUT_RAW));
        servo.set_u64("time_usec", static_cast<std::uint64_t>(now_us));
        servo.set_u64("port", 0);
        for (int i = 0; i < 8; ++i)
            servo.set_u64("servo" + std::to_string(i + 1) + "_raw",
                          i < 6 ? pwm_last_.pwm[static_cast<std::size_t>(i)] : 0);
        out.push_back(std::move(servo));
    }
    if (now_us >= next_hb_us_) { // 1 Hz
        next_hb_us_ += 1000000;
        mav::Message hb(*reg.by_id(mav::msgid::HEARTBEAT));
        hb.set_u64("type", 12);     // MAV_TYPE_SUBMARINE
        hb.set_u64("autopilot", 3); // MAV_AUTOPILOT_ARDUPILOTMEGA
        hb.set_u64("base_mode", armed_ ? 0x80 : 0x00);
        hb.set_u64("custom_mode", 0);
        hb.set_u64("system_status", armed_ ? 4 : 3); // ACTIVE / STANDBY
        hb.set_u64("mavlink_version", 3);
        out.push_back(std::move(hb));
    }
    return out;
}

double depth_to_pressure_hpa(double depth_m) { return 1013.25 + 98.1 * depth_m; }
double pressure_to_depth_m(double press_abs_hpa) { return (press_abs_hpa - 1013.25) / 98.1; }

} // namespace auvsim::fcu
