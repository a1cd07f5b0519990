#include "crossing_lab/config.hpp"

#include <cmath>
#include <set>

#include <json.hpp>

#include "crossing_lab/io.hpp"

namespace crossing_lab {

using nlohmann::json;

namespace {

void reject_unknown(const json& obj, const std::set<std::string>& allowed,
                    const std::string& path) {
    if (!obj.is_object()) throw ConfigError(path + ": expected an object");
    for (const auto& [key, value] : obj.items())
        if (!allowed.contains(key)) throw ConfigError(path + "." + key + ": unknown key");
}

double get_num(const json& obj, const char* key, double fallback, const std::string& path) {
    if (!obj.contains(key)) return fallback;
    const json& v = obj.at(key);
    if (!v.is_number()) throw ConfigError(path + "." + key + ": expected a number");
    return v.get<double>();
}

} // namespace

RunConfig RunConfig::defaults() {
    RunConfig c;
    c.plan = DoePlan::defaults(c.vehicle.wheel_radius);
    json canonical;
    canonical["schema_version"] = kConfigSchemaVersion;
    c.config_hash = fnv1a_hex(canonical.dump());
    return c;
}

RunConfig RunConfig::from_json_text(const std::string& text, const std::string& origin) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ConfigError(origin + ": " + e.what());
    }
    reject_unknown(j, {"schema_version", "vehicle", "contact", "plan", "solver", "paths"},
                   origin);
    if (!j.contains("schema_version"))
        throw ConfigError(origin + ".schema_version: missing required field");
    if (j.at("schema_version").get<int>() != kConfigSchemaVersion)
        throw ConfigError(origin + ".schema_version: unsupported version " +
                          j.at("schema_version").dump());

    RunConfig c;

    if (j.contains("vehicle")) {
        const json& v = j.at("vehicle");
        const std::string p = origin + ".vehicle";
        reject_unknown(v, {"chassis_mass_kg", "chassis_pitch_inertia_kgm2", "axle_mass_kg",
                           "wheel_spin_inertia_kgm2", "wheel_radius_m", "wheelbase_m", "z_cog_m",
                           "susp_stiffness_N_per_mm", "front_longitudinal_stiffness_N_per_mm",
                           "susp_vertical_damping_Nspm",
                           "stroke_limit_m", "vertical_stroke_limit_m", "torque_min_Nm",
                           "torque_max_Nm", "endstop_stiffness_Npm", "strut_length_m"},
                       p);
        VehicleParams& vp = c.vehicle;
        vp.chassis_mass = get_num(v, "chassis_mass_kg", vp.chassis_mass, p);
        vp.chassis_pitch_inertia =
            get_num(v, "chassis_pitch_inertia_kgm2", vp.chassis_pitch_inertia, p);
        vp.axle_mass = get_num(v, "axle_mass_kg", vp.axle_mass, p);
        vp.wheel_spin_inertia = get_num(v, "wheel_spin_inertia_kgm2", vp.wheel_spin_inertia, p);
        vp.wheel_radius = get_num(v, "wheel_radius_m", vp.wheel_radius, p);
        vp.wheelbase = get_num(v, "wheelbase_m", vp.wheelbase, p);
        vp.z_cog = get_num(v, "z_cog_m", vp.z_cog, p);
        vp.susp_stiffness = get_num(v, "susp_stiffness_N_per_mm", 2.26, p) * 1000.0;
        vp.front_longitudinal_stiffness =
            get_num(v, "front_longitudinal_stiffness_N_per_mm",
                    vp.front_longitudinal_stiffness / 1000.0, p) * 1000.0;
        vp.susp_vertical_damping =
            get_num(v, "susp_vertical_damping_Nspm", vp.susp_vertical_damping, p);
        vp.stroke_limit = get_num(v, "stroke_limit_m", vp.stroke_limit, p);
        vp.vertical_stroke_limit =
            get_num(v, "vertical_stroke_limit_m", vp.vertical_stroke_limit, p);
        vp.torque_min = get_num(v, "torque_min_Nm", vp.torque_min, p);
        vp.torque_max = get_num(v, "torque_max_Nm", vp.torque_max, p);
        vp.endstop_stiffness = get_num(v, "endstop_stiffness_Npm", vp.endstop_stiffness, p);
        vp.strut_length = get_num(v, "strut_length_m", vp.strut_length, p);
        vp.validate();
    }

    if (j.contains("contact")) {
        const json& v = j.at("contact");
        const std::string p = origin + ".contact";
        reject_unknown(v, {"stiffness_N_per_mm", "force_exponent", "damping_Ns_per_mm",
                           "penetration_depth_mm", "mu_static", "mu_dynamic",
                           "stiction_transition_vel_mm_s", "friction_transition_vel_mm_s"},
                       p);
        ContactParams& cp = c.contact;
        cp.force_exponent = get_num(v, "force_exponent", cp.force_exponent, p);
        // The penalty law is k * penetration^e, so the N/mm table value
        // scales by 1000^e when the penetration moves to meters.
        cp.stiffness = get_num(v, "stiffness_N_per_mm", 1000.0, p) *
                       std::pow(1000.0, cp.force_exponent);
        cp.damping_max = get_num(v, "damping_Ns_per_mm", 10.0, p) * 1000.0;
        cp.penetration_depth = get_num(v, "penetration_depth_mm", 0.01, p) / 1000.0;
        cp.mu_static = get_num(v, "mu_static", cp.mu_static, p);
        cp.mu_dynamic = get_num(v, "mu_dynamic", cp.mu_dynamic, p);
        cp.stiction_vel = get_num(v, "stiction_transition_vel_mm_s", 1500.0, p) / 1000.0;
        cp.friction_vel = get_num(v, "friction_transition_vel_mm_s", 4000.0, p) / 1000.0;
        cp.validate();
    }

    c.plan = DoePlan::defaults(c.vehicle.wheel_radius);
    if (j.contains("plan")) {
        const json& v = j.at("plan");
        const std::string p = origin + ".plan";
        reject_unknown(v, {"hO_levels_m", "vc_levels_mps", "cAV_levels_Nspm", "replicate_count"},
                       p);
        if (v.contains("hO_levels_m"))
            c.plan.hO_levels = v.at("hO_levels_m").get<std::vector<double>>();
        if (v.contains("vc_levels_mps"))
            c.plan.vc_levels = v.at("vc_levels_mps").get<std::vector<double>>();
        if (v.contains("cAV_levels_Nspm"))
            c.plan.cAV_levels = v.at("cAV_levels_Nspm").get<std::vector<double>>();
        if (v.contains("replicate_count"))
            c.plan.replicate_count = v.at("replicate_count").get<int>();
        c.plan.validate(c.vehicle.wheel_radius);
    }

    if (j.contains("solver")) {
        const json& v = j.at("solver");
        const std::string p = origin + ".solver";
        reject_unknown(v, {"dt_s", "horizon_s", "workers", "obstacle_x_m",
                           "chassis_only_energy"},
                       p);
        c.solver.dt = get_num(v, "dt_s", c.solver.dt, p);
        c.solver.horizon = get_num(v, "horizon_s", c.solver.horizon, p);
        c.solver.obstacle_x = get_num(v, "obstacle_x_m", c.solver.obstacle_x, p);
        if (v.contains("workers")) c.workers = v.at("workers").get<int>();
        if (v.contains("chassis_only_energy"))
            c.solver.chassis_only_energy = v.at("chassis_only_energy").get<bool>();
        if (!(c.solver.dt > 0.0 && c.solver.dt <= 1.0e-4))
            throw ConfigError(p + ".dt_s: must be in (0, 1e-4] for penalty-contact stability");
        if (!(c.solver.horizon > 0.0)) throw ConfigError(p + ".horizon_s: must be > 0");
        if (c.workers < 1) throw ConfigError(p + ".workers: must be >= 1");
    }

    if (j.contains("paths")) {
        const json& v = j.at("paths");
        reject_unknown(v, {"output_dir"}, origin + ".paths");
        if (v.contains("output_dir")) c.output_dir = v.at("output_dir").get<std::string>();
    }

    c.config_hash = fnv1a_hex(j.dump());
    return c;
}

RunConfig RunConfig::load(const std::string& path) {
    std::string text;
    try {
        text = read_text_file(path);
    } catch (const ParseError&) {
        throw ConfigError("config file not found: " + path);
    }
    return from_json_text(text, path);
}

} // namespace crossing_lab
