#include "auvsim/guidance.hpp"

namespace auvsim::guidance {

const char* phase_name(Phase p) {
    switch (p) {
    case Phase::Idle: return "Idle";
    case Phase::SearchGate: return "SearchGate";
    case Phase::AlignGate: return "AlignGate";
    case Phase::PassGate: return "PassGate";
    case Phase::SearchFlare: return "SearchFlare";
    case Phase::AlignFlare: return "AlignFlare";
    case Phase::TouchFlare: return "TouchFlare";
    case Phase::Surface: return "Surface";
    case Phase::Disarmed: return "Disarmed";
    }
    return "?";
}

std::pair<double, double> center_offset(const percept::Detection& det,
                                        const percept::CameraIntrinsics& cam) {
    return {det.center_x() - cam.cx, det.center_y() - cam.cy};
}

Direction classify(double dx, double dy, double deadband) {
    Direction d;
    if (dx < -deadband)
        d.h = Horizontal::Left;
    else if (dx > deadband)
        d.h = Horizontal::Right;
    if (dy < -deadband)
        d.v = Vertical::Above;
    else if (dy > deadband)
        d.v = Vertical::Below;
    return d;
}

Primitive direction_primitive(const Direction& dir) {
    if (dir.h == Horizontal::Left) return Primitive::SwayLeft;
    if (dir.h == Horizontal::Right) return Primitive::SwayRight;
    if (dir.v == Vertical::Above) return Primitive::Ascend;
    if (dir.v == Vertical::Below) return Primitive::Descend;
    return Primitive::Forward;
}

fcu::RcChannels primitive_to_rc(Primitive primitive, const GuidanceConfig& cfg) {
    fcu::RcChannels rc;
    rc.ch.fill(hydro::kPwmNeutral);
    const auto step = static_cast<std::uint16_t>(cfg.pwm_step);
    switch (primitive) {
    case Primitive::Hold: break;
    case Primitive::SwayLeft: rc.set(6, hydro::kPwmNeutral - step); break;
    case Primitive::SwayRight: rc.set(6, hydro::kPwmNeutral + step); break;
    case Primitive::Ascend: rc.set(3, hydro::kPwmNeutral + step); break;
    case Primitive::Descend: rc.set(3, hydro::kPwmNeutral - step); break;
    case Primitive::Forward: rc.set(5, hydro::kPwmNeutral + step); break;
    case Primitive::SearchYaw: rc.set(4, static_cast<std::uint16_t>(cfg.search_yaw_pwm)); break;
    }
    return rc;
}

std::optional<percept::Detection> select_target(std::span<const percept::Detection> detections,
                                                percept::ObjectLabel wanted, double now,
                                                const GuidanceConfig& cfg) {
    std::optional<percept::Detection> best;
    for (const auto& det : detections) {
        if (det.label != wanted) continue;
        if (!(det.score > cfg.score_threshold)) continue; // strictly above
        if (now - det.t_capture > cfg.stale_detection_age) continue;
        if (!best || det.area() > best->area() ||
            (det.area() == best->area() && det.xmin < best->xmin))
            best = det;
    }
    return best;
}

static void enter(MissionState& ms, Phase phase, double now) {
    ms.phase = phase;
    ms.phase_entry_t = now;
    ms.consecutive_sightings = 0;
    ms.consecutive_centered = 0;
}

static MissionStepResult search_step(MissionState& ms, Phase align_phase,
                                     std::optional<percept::Detection> target, double now,
                                     const GuidanceConfig& cfg) {
    MissionStepResult res;
    res.primitive = Primitive::SearchYaw;
    if (target) {
        ms.consecutive_sightings++;
        ms.last_target_t = now;
        if (ms.consecutive_sightings >= cfg.confirm_frames) {
            enter(ms, align_phase, now);
            res.primitive = Primitive::Hold; // stop the sweep this tick
        }
    } else {
        ms.consecutive_sightings = 0;
    }
    res.target = target;
    return res;
}

// The gate leaves alignment after a run of centred ticks; the flare leaves it
// only on the box-height proximity trigger and otherwise keeps creeping in.
static MissionStepResult align_step(MissionState& ms, Phase search_fallback,
                                    std::optional<Phase> centered_next,
                                    std::optional<percept::Detection> target, double now,
                                    const GuidanceConfig& cfg,
                                    const percept::CameraIntrinsics& cam, bool is_flare) {
    MissionStepResult res;
    if (!target) {
        res.primitive = Primitive::Hold;
        if (now - ms.last_target_t > cfg.lost_target_timeout) enter(ms, search_fallback, now);
        return res;
    }
    ms.last_target_t = now;
    res.target = target;
    auto [dx, dy] = center_offset(*target, cam);
    res.dx = dx;
    res.dy = dy;

    if (is_flare && target->box_height() > cfg.touch_box_height_px) {
        enter(ms, Phase::TouchFlare, now);
        res.primitive = Primitive::Forward;
        return res;
    }

    Direction dir = classify(dx, dy, cfg.deadband_px);
    res.primitive = direction_primitive(dir);
    if (dir.exact_front()) {
        ms.consecutive_centered++;
        if (centered_next && ms.consecutive_centered >= cfg.align_frames)
            enter(ms, *centered_next, now);
    } else {
        ms.consecutive_centered = 0;
    }
    return res;
}

MissionStepResult mission_step(MissionState& ms, std::span<const percept::Detection> detections,
                               double depth, double now, const GuidanceConfig& cfg,
                               const percept::CameraIntrinsics& cam) {
    MissionStepResult res;
    switch (ms.phase) {
    case Phase::Idle:
        res.commands.push_back(CommandKind::Arm);
        enter(ms, Phase::SearchGate, now);
        res.primitive = Primitive::Hold;
        break;
    case Phase::SearchGate:
        res = search_step(ms, Phase::AlignGate,
                          select_target(detections, percept::ObjectLabel::Gate, now, cfg), now, cfg);
        break;
    case Phase::AlignGate:
        res = align_step(ms, Phase::SearchGate, Phase::PassGate,
                         select_target(detections, percept::ObjectLabel::Gate, now, cfg), now, cfg,
                         cam, /*is_flare=*/false);
        break;
    case Phase::PassGate:
        res.primitive = Primitive::Forward;
        if (now - ms.phase_entry_t >= cfg.pass_duration) enter(ms, Phase::SearchFlare, now);
        break;
    case Phase::SearchFlare:
        res = search_step(ms, Phase::AlignFlare,
                          select_target(detections, percept::ObjectLabel::Flare, now, cfg), now,
                          cfg);
        break;
    case Phase::AlignFlare:
        res = align_step(ms, Phase::SearchFlare, std::nullopt,
                         select_target(detections, percept::ObjectLabel::Flare, now, cfg), now, cfg,
                         cam, /*is_flare=*/true);
        break;
    case Phase::TouchFlare:
        res.primitive = Primitive::Forward;
        if (now - ms.phase_entry_t >= cfg.touch_duration) enter(ms, Phase::Surface, now);
        break;
    case Phase::Surface:
        res.primitive = Primitive::Ascend;
        if (depth < cfg.surface_depth) {
            res.commands.push_back(CommandKind::Disarm);
            enter(ms, Phase::Disarmed, now);
            res.primitive = Primitive::Hold;
        }
        break;
    case Phase::Disarmed:
        res.primitive = Primitive::Hold; // absorbing
        break;
    }
    return res;
}

} // namespace auvsim::guidance
