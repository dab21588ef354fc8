#pragma once

// Scenario configuration: JSON in, validated defaults out. Unknown keys warn
// instead of failing so configs stay forward compatible.

#include <string>
#include <vector>

#include "auvsim/fcu.hpp"
#include "auvsim/guidance.hpp"
#include "auvsim/hydro.hpp"
#include "auvsim/link.hpp"
#include "auvsim/percept.hpp"

namespace auvsim::sim {

struct ParseError : std::runtime_error {
    explicit ParseError(const std::string& what) : std::runtime_error(what) {}
};

struct ValidationError : std::runtime_error {
    ValidationError(std::string field_, const std::string& what)
        : std::runtime_error(what), field(std::move(field_)) {}
    std::string field;
};

struct Scenario {
    std::string description;
    std::uint64_t seed = 0;
    double duration = 120.0; // s
    hydro::VehicleParams vehicle;
    hydro::VehicleState initial;
    hydro::ThrusterGeometry thrusters = hydro::ThrusterGeometry::vectored_default();
    link::LinkConfig link;
    fcu::FcuConfig fcu;
    guidance::GuidanceConfig guidance;
    percept::CameraIntrinsics camera = percept::CameraIntrinsics::paper_camera();
    percept::DetectorConfig detector;
    std::vector<percept::SceneObject> objects;
};

struct ScenarioLoadResult {
    Scenario scenario;
    std::vector<std::string> warnings; // one per unknown key
};

// Throws ParseError on malformed JSON, ValidationError on bad fields.
// "objects" and "seed" are required; everything else has documented defaults.
ScenarioLoadResult load_scenario(const std::string& text);

std::string scenario_to_json(const Scenario& s); // round-trippable dump

// The stock mission: gate 6 m ahead with 1 m lateral and 0.5 m depth offset,
// flare further along the course.
Scenario default_scenario();

} // namespace auvsim::sim
