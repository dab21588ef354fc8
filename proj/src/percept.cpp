#include "auvsim/percept.hpp"

#include <algorithm>
#include <cmath>

namespace auvsim::percept {

CameraIntrinsics CameraIntrinsics::from_hfov(int width, int height, double hfov_rad, double fps) {
    CameraIntrinsics cam;
    cam.width = width;
    cam.height = height;
    cam.fx = (width / 2.0) / std::tan(hfov_rad / 2.0);
    cam.fy = cam.fx;
    cam.cx = width / 2.0;
    cam.cy = height / 2.0;
    cam.fps = fps;
    return cam;
}

CameraIntrinsics CameraIntrinsics::paper_camera() {
    return from_hfov(1280, 720, 65.0 * M_PI / 180.0, 30.0);
}

std::string_view label_name(ObjectLabel l) { return l == ObjectLabel::Gate ? "gate" : "flare"; }

std::vector<hydro::Vec3> SceneObject::extent_points() const {
    std::vector<hydro::Vec3> pts;
    if (label == ObjectLabel::Gate) {
        // rectangle in the plane normal to the gate heading
        hydro::Vec3 lateral{-std::sin(yaw), std::cos(yaw), 0.0};
        for (double sw : {-0.5, 0.5})
            for (double sh : {-0.5, 0.5})
                pts.push_back(position + sw * gate_width * lateral +
                              hydro::Vec3{0.0, 0.0, sh * gate_height});
    } else {
        // vertical cylinder: four rim points at top and bottom
        for (double sz : {-0.5, 0.5}) {
            double z = position.z() + sz * flare_height;
            pts.push_back({position.x() + flare_radius, position.y(), z});
            pts.push_back({position.x() - flare_radius, position.y(), z});
            pts.push_back({position.x(), position.y() + flare_radius, z});
            pts.push_back({position.x(), position.y() - flare_radius, z});
        }
    }
    return pts;
}

std::optional<Eigen::Vector2d> project(const hydro::Vec3& world_point,
                                       const hydro::VehicleState& camera_pose,
                                       const CameraIntrinsics& cam) {
    hydro::Vec3 body = hydro::body_to_world(camera_pose.attitude).transpose() *
                       (world_point - camera_pose.position);
    if (body.x() <= 0.1) return std::nullopt; // behind or inside the near plane
    return Eigen::Vector2d{cam.cx + cam.fx * (body.y() / body.x()),
                           cam.cy + cam.fy * (body.z() / body.x())};
}

hydro::Vec3 unproject(double u, double v, double depth, const hydro::VehicleState& camera_pose,
                      const CameraIntrinsics& cam) {
    hydro::Vec3 body{depth, depth * (u - cam.cx) / cam.fx, depth * (v - cam.cy) / cam.fy};
    return camera_pose.position + hydro::body_to_world(camera_pose.attitude) * body;
}

std::vector<Detection> render_detections(std::span<const SceneObject> scene,
                                         const hydro::VehicleState& camera_pose, double t,
                                         const CameraIntrinsics& cam, const DetectorConfig& cfg,
                                         DetRng& rng) {
    std::vector<Detection> out;
    const Eigen::Matrix3d world_to_body = hydro::body_to_world(camera_pose.attitude).transpose();
    for (const SceneObject& obj : scene) {
        hydro::Vec3 centre_body = world_to_body * (obj.position - camera_pose.position);
        if (centre_body.x() <= cfg.min_depth || centre_body.x() > cfg.max_depth) continue;

        double xmin = 1e9, ymin = 1e9, xmax = -1e9, ymax = -1e9;
        bool all_projectable = true;
        for (const hydro::Vec3& p : obj.extent_points()) {
            auto px = project(p, camera_pose, cam);
            if (!px) {
                all_projectable = false;
                break;
            }
            xmin = std::min(xmin, px->x());
            xmax = std::max(xmax, px->x());
            ymin = std::min(ymin, px->y());
            ymax = std::max(ymax, px->y());
        }
        if (!all_projectable) continue;

        // the raw box centre must land inside the frame; the box is then clipped
        double cu = 0.5 * (xmin + xmax), cv = 0.5 * (ymin + ymax);
        if (cu < 0.0 || cu >= cam.width || cv < 0.0 || cv >= cam.height) continue;

        Detection det;
        det.label = obj.label;
        det.xmin = std::clamp(xmin, 0.0, static_cast<double>(cam.width));
        det.xmax = std::clamp(xmax, 0.0, static_cast<double>(cam.width));
        det.ymin = std::clamp(ymin, 0.0, static_cast<double>(cam.height));
        det.ymax = std::clamp(ymax, 0.0, static_cast<double>(cam.height));
        if (!(det.xmin < det.xmax && det.ymin < det.ymax)) continue; // degenerate after clip

        double distance = centre_body.norm();
        double off_axis = std::atan2(std::hypot(centre_body.y(), centre_body.z()), centre_body.x());
        double noise = cfg.score_noise > 0.0 ? rng.uniform(-cfg.score_noise, cfg.score_noise) : 0.0;
        det.score = std::clamp(
            cfg.base_score - cfg.score_per_m * distance - cfg.score_per_rad * std::abs(off_axis) +
                noise,
            0.0, 1.0);
        det.t_capture = t;
        out.push_back(det);
    }
    return out;
}

void LatencyQueue::push(double t_capture, std::vector<Detection> detections) {
    queue_.emplace_back(t_capture + latency_, std::move(detections));
}

std::vector<Detection> LatencyQueue::deliver(double now) {
    std::vector<Detection> out;
    while (!queue_.empty() && queue_.front().first <= now) {
        auto& batch = queue_.front().second;
        out.insert(out.end(), batch.begin(), batch.end());
        queue_.pop_front();
    }
    return out;
}

} // namespace auvsim::percept
