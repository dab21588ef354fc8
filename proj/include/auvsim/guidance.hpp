#pragma once

// Companion-side autonomy: bounding-box centre offset, direction
// classification, motion primitives as RC overrides, and the gate -> flare
// mission state machine.

#include <limits>
#include <optional>
#include <span>
#include <vector>

#include "auvsim/fcu.hpp"
#include "auvsim/percept.hpp"

namespace auvsim::guidance {

struct GuidanceConfig {
    double score_threshold = 0.75; // strictly-above gate for acting on a detection
    double deadband_px = 30.0;
    int pwm_step = 150;                 // us offset for corrective primitives
    int confirm_frames = 3;             // consecutive sighting ticks to lock a target
    int align_frames = 10;              // consecutive centred ticks before passing
    double pass_duration = 8.0;         // s of surge through the gate
    int search_yaw_pwm = 1550;          // slow yaw sweep while searching
    double stale_detection_age = 1.0;   // s; older detections are dropped
    double lost_target_timeout = 5.0;   // s without target in an align phase
    double touch_box_height_px = 500.0; // flare proximity proxy
    double touch_duration = 3.0;        // s of surge at the flare
    double surface_depth = 0.2;         // m; shallower than this ends the mission
};

enum class Horizontal { Left, Right, Centered };
enum class Vertical { Above, Below, Centered };

struct Direction {
    Horizontal h = Horizontal::Centered;
    Vertical v = Vertical::Centered;
    bool exact_front() const { return h == Horizontal::Centered && v == Vertical::Centered; }
    bool operator==(const Direction&) const = default;
};

enum class Phase {
    Idle,
    SearchGate,
    AlignGate,
    PassGate,
    SearchFlare,
    AlignFlare,
    TouchFlare,
    Surface,
    Disarmed
};
const char* phase_name(Phase p);

enum class Primitive { Hold, SwayLeft, SwayRight, Ascend, Descend, Forward, SearchYaw };

struct MissionState {
    Phase phase = Phase::Idle;
    double phase_entry_t = 0.0;
    int consecutive_sightings = 0;
    int consecutive_centered = 0;
    double last_target_t = -std::numeric_limits<double>::infinity();
};

enum class CommandKind { Arm, Disarm };

struct MissionStepResult {
    Primitive primitive = Primitive::Hold;
    std::vector<CommandKind> commands;
    std::optional<percept::Detection> target; // detection the step acted on
    std::optional<double> dx, dy;             // px, when a target was used
};

// dx = box centre u - frame centre; dy likewise (pixel y grows downward)
std::pair<double, double> center_offset(const percept::Detection& det,
                                        const percept::CameraIntrinsics& cam);

// negative dx is Left, negative dy is Above; both centred means exact front
Direction classify(double dx, double dy, double deadband);

// sway corrections run before vertical ones; exact front creeps forward
Primitive direction_primitive(const Direction& dir);

// only ch2..ch6 are ever driven; untouched channels stay neutral
fcu::RcChannels primitive_to_rc(Primitive primitive, const GuidanceConfig& cfg);

// One 10 Hz decision tick. Mutates the mission state, returns the primitive
// to fly plus any arm/disarm commands to send.
MissionStepResult mission_step(MissionState& ms, std::span<const percept::Detection> detections,
                               double depth, double now, const GuidanceConfig& cfg,
                               const percept::CameraIntrinsics& cam);

// Valid (above-threshold, fresh) detection of the wanted label with the
// largest box area; ties break toward the lowest xmin.
std::optional<percept::Detection> select_target(std::span<const percept::Detection> detections,
                                                percept::ObjectLabel wanted, double now,
                                                const GuidanceConfig& cfg);

} // namespace auvsim::guidance
