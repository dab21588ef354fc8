#pragma once

// Synthetic object detector with the same output contract as the onboard
// CNN: pinhole projection of scene objects into labeled, scored bounding
// boxes, delivered through a fixed processing-latency queue.

#include <deque>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "auvsim/hydro.hpp"
#include "auvsim/rng.hpp"

namespace auvsim::percept {

struct CameraIntrinsics {
    int width = 1280;
    int height = 720;
    double fx = 0.0, fy = 0.0; // px; fy = fx (square pixels)
    double cx = 640.0, cy = 360.0;
    double fps = 30.0;

    static CameraIntrinsics from_hfov(int width, int height, double hfov_rad, double fps);
    static CameraIntrinsics paper_camera(); // 1280x720 @ 30 fps, 65 deg HFOV
};

enum class ObjectLabel { Gate, Flare };
std::string_view label_name(ObjectLabel l);

struct SceneObject {
    ObjectLabel label = ObjectLabel::Gate;
    hydro::Vec3 position{0.0, 0.0, 0.0}; // world NED, centre
    double yaw = 0.0;                    // rad; gate plane normal heading
    // gate: planar rectangle; flare: vertical cylinder
    double gate_width = 1.5, gate_height = 1.0;    // m
    double flare_radius = 0.08, flare_height = 1.2; // m

    std::vector<hydro::Vec3> extent_points() const; // world-space corner samples
};

struct Detection {
    ObjectLabel label = ObjectLabel::Gate;
    double xmin = 0.0, ymin = 0.0, xmax = 0.0, ymax = 0.0; // px, clipped to frame
    double score = 0.0;     // [0, 1]
    double t_capture = 0.0; // s

    double center_x() const { return 0.5 * (xmin + xmax); }
    double center_y() const { return 0.5 * (ymin + ymax); }
    double box_width() const { return xmax - xmin; }
    double box_height() const { return ymax - ymin; }
    double area() const { return box_width() * box_height(); }
};

struct DetectorConfig {
    double base_score = 0.95;
    double score_per_m = 0.02;      // confidence drop per metre of range
    double score_per_rad = 0.3;     // drop per radian off the optical axis
    double score_noise = 0.05;      // +- uniform, seeded
    double min_depth = 0.1, max_depth = 10.0; // visibility band along the axis, m
    double latency = 0.5;           // s, processing lag
};

// Camera sits at the body origin looking along +x body; image u is body y,
// image v is body z. None when the point is behind the near plane.
std::optional<Eigen::Vector2d> project(const hydro::Vec3& world_point,
                                       const hydro::VehicleState& camera_pose,
                                       const CameraIntrinsics& cam);

// Inverse of project at a known forward depth, for consistency checks.
hydro::Vec3 unproject(double u, double v, double depth, const hydro::VehicleState& camera_pose,
                      const CameraIntrinsics& cam);

std::vector<Detection> render_detections(std::span<const SceneObject> scene,
                                         const hydro::VehicleState& camera_pose, double t,
                                         const CameraIntrinsics& cam, const DetectorConfig& cfg,
                                         DetRng& rng);

// FIFO of captured batches; nothing is visible younger than the latency.
class LatencyQueue {
public:
    explicit LatencyQueue(double latency = 0.5) : latency_(latency) {}

    void push(double t_capture, std::vector<Detection> detections);
    std::vector<Detection> deliver(double now); // pops everything due, FIFO

    std::size_t size() const { return queue_.size(); }
    bool empty() const { return queue_.empty(); }
    double latency() const { return latency_; }

private:
    double latency_;
    std::deque<std::pair<double, std::vector<Detection>>> queue_; // (t_deliver, batch)
};

} // namespace auvsim::percept
