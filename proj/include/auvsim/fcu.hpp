#pragma once

// Simulated flight controller: consumes arm/disarm and RC override messages,
// runs the rate-P stabilizer, mixes axis demands into six thruster PWMs and
// emits the telemetry streams.

#include <array>
#include <cstdint>
#include <optional>
#include <vector>

#include "auvsim/hydro.hpp"
#include "auvsim/link.hpp"
#include "auvsim/mavproto.hpp"

namespace auvsim::fcu {

struct RcChannels {
    static constexpr std::uint16_t kReleased = 0;
    std::array<std::uint16_t, 8> ch{}; // 1-based channels in ch[0..7]; 0 = released

    std::uint16_t get(int channel) const { return ch[static_cast<std::size_t>(channel - 1)]; }
    void set(int channel, std::uint16_t pwm) { ch[static_cast<std::size_t>(channel - 1)] = pwm; }
    static bool valid_value(std::uint16_t pwm) {
        return pwm == kReleased || (pwm >= hydro::kPwmMin && pwm <= hydro::kPwmMax);
    }
    bool valid() const {
        for (auto v : ch)
            if (!valid_value(v)) return false;
        return true;
    }
    bool operator==(const RcChannels&) const = default;
};

struct PidGains {
    double roll_rate_p = 0.100; // from the vehicle tuning table
    double yaw_rate_p = 0.00;   // literal zero: yaw rate is not stabilized
    double pitch_coupling = 1.1;
    double roll_rate_d = 0.02; // damping on the roll rate derivative estimate
};

struct AxisCommands {
    double surge = 0.0, sway = 0.0, heave = 0.0; // heave > 0 is up
    double yaw = 0.0, roll = 0.0;                // normalized [-1, 1]
};

// Pseudo-inverse thruster allocation over the actuated axes
// (Fx, Fy, Fz, tau_x, tau_z), columns scaled to max-abs 1.
class Mixer {
public:
    explicit Mixer(const hydro::ThrusterGeometry& geometry); // throws if rank < 5

    std::array<double, 6> allocate(const AxisCommands& axes) const;
    hydro::ThrusterPwm mix(const AxisCommands& axes, bool armed) const;

    const Eigen::Matrix<double, 6, 5>& allocation() const { return alloc_; }

private:
    Eigen::Matrix<double, 6, 5> alloc_;
};

// ch3 heave (+up), ch4 yaw, ch5 surge, ch6 sway, ch2 roll;
// a = (pwm - 1500) / 400, released channels read as zero.
AxisCommands rc_to_axes(const RcChannels& rc);

struct FcuConfig {
    PidGains gains;
    double rc_timeout = 1.0; // s without fresh override before axes decay to zero
    std::uint8_t sys_id = 1;
    std::uint8_t comp_id = 1;
};

class Fcu {
public:
    Fcu(const FcuConfig& cfg, const hydro::ThrusterGeometry& geometry);

    // Arm/disarm commands are acknowledged; RC overrides update the stored
    // channels. Anything else is ignored. Replies are ready-to-send messages.
    std::vector<mav::Message> handle_message(const mav::Message& msg, double now);

    // Rate stabilization on top of the RC demands. Pitch is unactuated; the
    // coupling factor only scales the restoring diagnostic.
    AxisCommands stabilize(const hydro::VehicleState& vehicle, const AxisCommands& axes, double dt);

    // One 100 Hz control step: effective RC -> stabilize -> mix. A lost link
    // disarms before mixing, so the output drops to neutral the same step.
    hydro::ThrusterPwm control_step(const hydro::VehicleState& vehicle, double dt, double now,
                                    link::LinkState link_state);

    // ATTITUDE + SCALED_PRESSURE at 10 Hz, SERVO_OUTPUT_RAW at 5 Hz,
    // HEARTBEAT at 1 Hz, all on the shared microsecond grid.
    std::vector<mav::Message> telemetry_tick(const hydro::VehicleState& vehicle, double now);

    bool armed() const { return armed_; }
    const RcChannels& rc() const { return rc_; }
    const hydro::ThrusterPwm& last_pwm() const { return pwm_last_; }
    const Mixer& mixer() const { return mixer_; }
    double pitch_restore_diag() const { return pitch_restore_diag_; }
    const char* disarm_reason() const { return disarm_reason_; }
    std::uint8_t next_seq() { return seq_++; }

private:
    FcuConfig cfg_;
    Mixer mixer_;
    bool armed_ = false;
    RcChannels rc_{};
    double last_rc_rx_ = -1e18;
    double prev_roll_rate_ = 0.0;
    bool have_prev_roll_rate_ = false;
    hydro::ThrusterPwm pwm_last_{};
    double pitch_restore_diag_ = 0.0;
    const char* disarm_reason_ = "";
    std::uint8_t seq_ = 0;
    // stream schedules, microseconds
    std::int64_t next_att_us_ = 0;
    std::int64_t next_servo_us_ = 0;
    std::int64_t next_hb_us_ = 0;
};

// surface reference 1013.25 hPa plus rho*g*h at 1000 kg/m^3, i.e. 98.1 hPa/m
double depth_to_pressure_hpa(double depth_m);
double pressure_to_depth_m(double press_abs_hpa);

} // namespace auvsim::fcu
