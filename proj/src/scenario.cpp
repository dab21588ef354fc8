#include "auvsim/scenario.hpp"

#include <cmath>
#include <set>

#include <json.hpp>

namespace auvsim::sim {

using nlohmann::json;

namespace {

void require(bool cond, const std::string& field, const std::string& what) {
    if (!cond) throw ValidationError(field, field + ": " + what);
}

hydro::Vec3 vec3_of(const json& j, const std::string& field) {
    require(j.is_array() && j.size() == 3, field, "expected an array of 3 numbers");
    for (const auto& v : j) require(v.is_number(), field, "expected an array of 3 numbers");
    return {j[0].get<double>(), j[1].get<double>(), j[2].get<double>()};
}

void warn_unknown_keys(const json& obj, const std::string& prefix,
                       const std::set<std::string>& known, std::vector<std::string>& warnings) {
    for (auto it = obj.begin(); it != obj.end(); ++it)
        if (!known.count(it.key()))
            warnings.push_back("unknown key ignored: " + prefix + it.key());
}

double num(const json& obj, const char* key, double fallback) {
    if (!obj.contains(key)) return fallback;
    require(obj[key].is_number(), key, "expected a number");
    return obj[key].get<double>();
}

} // namespace

ScenarioLoadResult load_scenario(const std::string& text) {
    json root;
    try {
        root = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ParseError(std::string("scenario JSON: ") + e.what());
    }
    require(root.is_object(), "scenario", "top level must be a JSON object");

    ScenarioLoadResult out;
    Scenario& s = out.scenario;

    warn_unknown_keys(root, "",
                      {"description", "seed", "duration", "vehicle", "thrusters", "link",
                       "guidance", "camera", "detector", "objects"},
                      out.warnings);

    require(root.contains("seed"), "seed", "required key is missing");
    require(root["seed"].is_number_unsigned(), "seed", "must be a non-negative integer");
    s.seed = root["seed"].get<std::uint64_t>();

    if (root.contains("description")) s.description = root["description"].get<std::string>();
    s.duration = num(root, "duration", s.duration);
    require(s.duration > 0.0, "duration", "must be > 0");

    if (root.contains("vehicle")) {
        const json& v = root["vehicle"];
        warn_unknown_keys(v, "vehicle.",
                          {"mass", "inertia", "buoyancy", "cob_offset", "linear_drag",
                           "quadratic_drag", "angular_linear_drag", "angular_quadratic_drag",
                           "initial_position", "initial_attitude"},
                          out.warnings);
        s.vehicle.mass = num(v, "mass", s.vehicle.mass);
        require(s.vehicle.mass > 0.0, "vehicle.mass", "must be > 0");
        if (v.contains("inertia")) s.vehicle.inertia = vec3_of(v["inertia"], "vehicle.inertia");
        require(s.vehicle.inertia.minCoeff() > 0.0, "vehicle.inertia", "must be positive");
        if (v.contains("cob_offset"))
            s.vehicle.cob_offset = vec3_of(v["cob_offset"], "vehicle.cob_offset");
        if (v.contains("linear_drag"))
            s.vehicle.linear_drag = vec3_of(v["linear_drag"], "vehicle.linear_drag");
        if (v.contains("quadratic_drag"))
            s.vehicle.quadratic_drag = vec3_of(v["quadratic_drag"], "vehicle.quadratic_drag");
        if (v.contains("angular_linear_drag"))
            s.vehicle.angular_linear_drag =
                vec3_of(v["angular_linear_drag"], "vehicle.angular_linear_drag");
        if (v.contains("angular_quadratic_drag"))
            s.vehicle.angular_quadratic_drag =
                vec3_of(v["angular_quadratic_drag"], "vehicle.angular_quadratic_drag");
        require(s.vehicle.linear_drag.minCoeff() >= 0.0 &&
                    s.vehicle.quadratic_drag.minCoeff() >= 0.0 &&
                    s.vehicle.angular_linear_drag.minCoeff() >= 0.0 &&
                    s.vehicle.angular_quadratic_drag.minCoeff() >= 0.0,
                "vehicle.drag", "drag coefficients must be >= 0");
        // neutral unless stated otherwise
        s.vehicle.buoyancy = num(v, "buoyancy", s.vehicle.mass * s.vehicle.gravity);
        if (v.contains("initial_position"))
            s.initial.position = vec3_of(v["initial_position"], "vehicle.initial_position");
        if (v.contains("initial_attitude"))
            s.initial.attitude = vec3_of(v["initial_attitude"], "vehicle.initial_attitude");
    } else {
        s.vehicle.buoyancy = s.vehicle.mass * s.vehicle.gravity;
    }

    if (root.contains("thrusters")) {
        const json& t = root["thrusters"];
        warn_unknown_keys(t, "thrusters.", {"thrust_max", "deadband_us"}, out.warnings);
        s.thrusters.thrust_max = num(t, "thrust_max", s.thrusters.thrust_max);
        s.thrusters.deadband_us = num(t, "deadband_us", s.thrusters.deadband_us);
        require(s.thrusters.thrust_max > 0.0, "thrusters.thrust_max", "must be > 0");
    }

    if (root.contains("link")) {
        const json& l = root["link"];
        warn_unknown_keys(l, "link.",
                          {"preset", "latency", "bit_corruption_prob", "heartbeat_interval",
                           "failsafe_timeout"},
                          out.warnings);
        if (l.contains("preset")) {
            std::string preset = l["preset"].get<std::string>();
            // tether presets; the paper distinguishes only wired vs wireless
            if (preset == "wired")
                s.link.latency = 0.005;
            else if (preset == "wireless")
                s.link.latency = 0.03;
            else
                throw ValidationError("link.preset", "link.preset: must be wired or wireless");
        }
        s.link.latency = num(l, "latency", s.link.latency);
        s.link.bit_corruption_prob = num(l, "bit_corruption_prob", s.link.bit_corruption_prob);
        s.link.heartbeat_interval = num(l, "heartbeat_interval", s.link.heartbeat_interval);
        s.link.failsafe_timeout = num(l, "failsafe_timeout", s.link.failsafe_timeout);
        require(s.link.latency >= 0.0 && std::isfinite(s.link.latency), "link.latency",
                "must be finite and >= 0");
        require(s.link.bit_corruption_prob >= 0.0 && s.link.bit_corruption_prob <= 1.0,
                "link.bit_corruption_prob", "must be in [0, 1]");
    }

    if (root.contains("guidance")) {
        const json& g = root["guidance"];
        warn_unknown_keys(g, "guidance.",
                          {"score_threshold", "deadband_px", "pwm_step", "confirm_frames",
                           "align_frames", "pass_duration", "search_yaw_pwm",
                           "stale_detection_age", "lost_target_timeout", "touch_box_height_px",
                           "touch_duration", "surface_depth", "roll_rate_p", "yaw_rate_p",
                           "roll_rate_d", "pitch_coupling"},
                          out.warnings);
        auto& gc = s.guidance;
        gc.score_threshold = num(g, "score_threshold", gc.score_threshold);
        gc.deadband_px = num(g, "deadband_px", gc.deadband_px);
        gc.pwm_step = static_cast<int>(num(g, "pwm_step", gc.pwm_step));
        gc.confirm_frames = static_cast<int>(num(g, "confirm_frames", gc.confirm_frames));
        gc.align_frames = static_cast<int>(num(g, "align_frames", gc.align_frames));
        gc.pass_duration = num(g, "pass_duration", gc.pass_duration);
        gc.search_yaw_pwm = static_cast<int>(num(g, "search_yaw_pwm", gc.search_yaw_pwm));
        gc.stale_detection_age = num(g, "stale_detection_age", gc.stale_detection_age);
        gc.lost_target_timeout = num(g, "lost_target_timeout", gc.lost_target_timeout);
        gc.touch_box_height_px = num(g, "touch_box_height_px", gc.touch_box_height_px);
        gc.touch_duration = num(g, "touch_duration", gc.touch_duration);
        gc.surface_depth = num(g, "surface_depth", gc.surface_depth);
        require(gc.score_threshold > 0.0 && gc.score_threshold < 1.0, "guidance.score_threshold",
                "must be in (0, 1)");
        require(gc.deadband_px > 0.0, "guidance.deadband_px", "must be > 0");
        require(gc.pwm_step > 0 && gc.pwm_step <= 400, "guidance.pwm_step", "must be in (0, 400]");
        // stabilizer gains ride along in this block
        s.fcu.gains.roll_rate_p = num(g, "roll_rate_p", s.fcu.gains.roll_rate_p);
        s.fcu.gains.yaw_rate_p = num(g, "yaw_rate_p", s.fcu.gains.yaw_rate_p);
        s.fcu.gains.roll_rate_d = num(g, "roll_rate_d", s.fcu.gains.roll_rate_d);
        s.fcu.gains.pitch_coupling = num(g, "pitch_coupling", s.fcu.gains.pitch_coupling);
        require(s.fcu.gains.roll_rate_p >= 0.0 && s.fcu.gains.yaw_rate_p >= 0.0 &&
                    s.fcu.gains.roll_rate_d >= 0.0,
                "guidance.gains", "gains must be >= 0");
    }

    if (root.contains("camera")) {
        const json& c = root["camera"];
        warn_unknown_keys(c, "camera.", {"width", "height", "hfov_deg", "fps"}, out.warnings);
        int width = static_cast<int>(num(c, "width", 1280));
        int height = static_cast<int>(num(c, "height", 720));
        double hfov_deg = num(c, "hfov_deg", 65.0);
        double fps = num(c, "fps", 30.0);
        require(width > 0 && height > 0, "camera", "resolution must be positive");
        require(hfov_deg > 0.0 && hfov_deg < 180.0, "camera.hfov_deg", "must be in (0, 180)");
        require(fps > 0.0, "camera.fps", "must be > 0");
        s.camera = percept::CameraIntrinsics::from_hfov(width, height, hfov_deg * M_PI / 180.0, fps);
    }

    if (root.contains("detector")) {
        const json& d = root["detector"];
        warn_unknown_keys(d, "detector.",
                          {"base_score", "score_per_m", "score_per_rad", "score_noise",
                           "min_depth", "max_depth", "latency"},
                          out.warnings);
        auto& dc = s.detector;
        dc.base_score = num(d, "base_score", dc.base_score);
        dc.score_per_m = num(d, "score_per_m", dc.score_per_m);
        dc.score_per_rad = num(d, "score_per_rad", dc.score_per_rad);
        dc.score_noise = num(d, "score_noise", dc.score_noise);
        dc.min_depth = num(d, "min_depth", dc.min_depth);
        dc.max_depth = num(d, "max_depth", dc.max_depth);
        dc.latency = num(d, "latency", dc.latency);
        require(dc.latency >= 0.0, "detector.latency", "must be >= 0");
        require(dc.max_depth > dc.min_depth, "detector.max_depth", "must exceed min_depth");
    }

    require(root.contains("objects"), "objects", "required key is missing");
    require(root["objects"].is_array(), "objects", "must be an array");
    for (std::size_t i = 0; i < root["objects"].size(); ++i) {
        const json& o = root["objects"][i];
        const std::string prefix = "objects[" + std::to_string(i) + "].";
        warn_unknown_keys(o, prefix,
                          {"label", "position", "yaw", "width", "height", "radius"},
                          out.warnings);
        require(o.contains("label"), prefix + "label", "required key is missing");
        require(o.contains("position"), prefix + "position", "required key is missing");
        percept::SceneObject obj;
        std::string label = o["label"].get<std::string>();
        if (label == "gate")
            obj.label = percept::ObjectLabel::Gate;
        else if (label == "flare")
            obj.label = percept::ObjectLabel::Flare;
        else
            throw ValidationError(prefix + "label", prefix + "label: must be gate or flare");
        obj.position = vec3_of(o["position"], prefix + "position");
        obj.yaw = num(o, "yaw", 0.0);
        if (obj.label == percept::ObjectLabel::Gate) {
            obj.gate_width = num(o, "width", obj.gate_width);
            obj.gate_height = num(o, "height", obj.gate_height);
            require(obj.gate_width > 0.0 && obj.gate_height > 0.0, prefix, "extents must be > 0");
        } else {
            obj.flare_radius = num(o, "radius", obj.flare_radius);
            obj.flare_height = num(o, "height", obj.flare_height);
            require(obj.flare_radius > 0.0 && obj.flare_height > 0.0, prefix, "extents must be > 0");
        }
        s.objects.push_back(obj);
    }

    return out;
}

static json vec3_json(const hydro::Vec3& v) { return json::array({v.x(), v.y(), v.z()}); }

std::string scenario_to_json(const Scenario& s) {
    json root;
    root["description"] = s.description;
    root["seed"] = s.seed;
    root["duration"] = s.duration;
    root["vehicle"] = {{"mass", s.vehicle.mass},
                       {"inertia", vec3_json(s.vehicle.inertia)},
                       {"buoyancy", s.vehicle.buoyancy},
                       {"cob_offset", vec3_json(s.vehicle.cob_offset)},
                       {"linear_drag", vec3_json(s.vehicle.linear_drag)},
                       {"quadratic_drag", vec3_json(s.vehicle.quadratic_drag)},
                       {"angular_linear_drag", vec3_json(s.vehicle.angular_linear_drag)},
                       {"angular_quadratic_drag", vec3_json(s.vehicle.angular_quadratic_drag)},
                       {"initial_position", vec3_json(s.initial.position)},
                       {"initial_attitude", vec3_json(s.initial.attitude)}};
    root["thrusters"] = {{"thrust_max", s.thrusters.thrust_max},
                         {"deadband_us", s.thrusters.deadband_us}};
    root["link"] = {{"latency", s.link.latency},
                    {"bit_corruption_prob", s.link.bit_corruption_prob},
                    {"heartbeat_interval", s.link.heartbeat_interval},
                    {"failsafe_timeout", s.link.failsafe_timeout}};
    root["guidance"] = {{"score_threshold", s.guidance.score_threshold},
                        {"deadband_px", s.guidance.deadband_px},
                        {"pwm_step", s.guidance.pwm_step},
                        {"confirm_frames", s.guidance.confirm_frames},
                        {"align_frames", s.guidance.align_frames},
                        {"pass_duration", s.guidance.pass_duration},
                        {"search_yaw_pwm", s.guidance.search_yaw_pwm},
                        {"stale_detection_age", s.guidance.stale_detection_age},
                        {"lost_target_timeout", s.guidance.lost_target_timeout},
                        {"touch_box_height_px", s.guidance.touch_box_height_px},
                        {"touch_duration", s.guidance.touch_duration},
                        {"surface_depth", s.guidance.surface_depth},
                        {"roll_rate_p", s.fcu.gains.roll_rate_p},
                        {"yaw_rate_p", s.fcu.gains.yaw_rate_p},
                        {"roll_rate_d", s.fcu.gains.roll_rate_d},
                        {"pitch_coupling", s.fcu.gains.pitch_coupling}};
    root["camera"] = {{"width", s.camera.width},
                      {"height", s.camera.height},
                      {"hfov_deg", 2.0 * std::atan((s.camera.width / 2.0) / s.camera.fx) * 180.0 / M_PI},
                      {"fps", s.camera.fps}};
    root["detector"] = {{"base_score", s.detector.base_score},
                        {"score_per_m", s.detector.score_per_m},
                        {"score_per_rad", s.detector.score_per_rad},
                        {"score_noise", s.detector.score_noise},
                        {"min_depth", s.detector.min_depth},
                        {"max_depth", s.detector.max_depth},
                        {"latency", s.detector.latency}};
    root["objects"] = json::array();
    for (const auto& o : s.objects) {
        json j = {{"label", std::string(percept::label_name(o.label))},
                  {"position", vec3_json(o.position)},
                  {"yaw", o.yaw}};
        if (o.label == percept::ObjectLabel::Gate) {
            j["width"] = o.gate_width;
            j["height"] = o.gate_height;
        } else {
            j["radius"] = o.flare_radius;
            j["height"] = o.flare_height;
        }
        root["objects"].push_back(j);
    }
    return root.dump(2);
}

Scenario default_scenario() {
    Scenario s;
    s.description = "desk-scale gate + flare course";
    s.seed = 1;
    s.duration = 120.0;
    s.initial.position = {0.0, 0.0, 1.5};
    s.vehicle.buoyancy = s.vehicle.mass * s.vehicle.gravity;

    percept::SceneObject gate;
    gate.label = percept::ObjectLabel::Gate;
    gate.position = {6.0, 1.0, 2.0}; // 6 m ahead, 1 m starboard, 0.5 m deeper
    gate.yaw = M_PI;                 // facing back toward the start
    s.objects.push_back(gate);

    percept::SceneObject flare;
    flare.label = percept::ObjectLabel::Flare;
    flare.position = {14.0, 2.0, 2.0};
    s.objects.push_back(flare);
    return s;
}

} // namespace auvsim::sim
