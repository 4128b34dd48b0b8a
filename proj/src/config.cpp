#include "hilfer/config.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

namespace hilfer::config {

using nlohmann::json;

namespace {

void reject_unknown_keys(const json& obj, const std::set<std::string>& allowed,
                         const std::string& where) {
    for (auto it = obj.begin(); it != obj.end(); ++it)
        if (!allowed.count(it.key()))
            throw ConfigError("unknown key '" + it.key() + "' in " + where);
}

double require_number(const json& obj, const std::string& key, const std::string& where) {
    if (!obj.contains(key)) throw ConfigError("missing key '" + key + "' in " + where);
    if (!obj[key].is_number()) throw ConfigError("'" + key + "' in " + where + " must be a number");
    return obj[key].get<double>();
}

std::string require_string(const json& obj, const std::string& key, const std::string& where) {
    if (!obj.contains(key)) throw ConfigError("missing key '" + key + "' in " + where);
    if (!obj[key].is_string()) throw ConfigError("'" + key + "' in " + where + " must be a string");
    return obj[key].get<std::string>();
}

std::vector<double> require_number_array(const json& obj, const std::string& key,
                                         const std::string& where) {
    if (!obj.contains(key)) throw ConfigError("missing key '" + key + "' in " + where);
    if (!obj[key].is_array()) throw ConfigError("'" + key + "' in " + where + " must be an array");
    std::vector<double> out;
    for (const auto& v : obj[key]) {
        if (!v.is_number()) throw ConfigError("'" + key + "' in " + where + " must contain numbers");
        out.push_back(v.get<double>());
    }
    return out;
}

expr::Expr parse_expr_field(const json& obj, const std::string& key, const std::string& where) {
    std::string src = require_string(obj, key, where);
    try {
        return expr::parse(src);
    } catch (const std::exception& e) {
        throw ConfigError("'" + key + "' in " + where + ": " + e.what());
    }
}

}  // namespace

RunConfig parse_config(const std::string& json_text) {
    json doc;
    try {
        doc = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("invalid JSON: ") + e.what());
    }
    if (!doc.is_object()) throw ConfigError("top-level document must be an object");
    reject_unknown_keys(doc, {"mode", "order", "schedule", "g", "impulses", "x0", "mesh",
                              "lyapunov", "contraction", "envelope", "output"},
                        "top level");

    RunConfig cfg;

    std::string mode = require_string(doc, "mode", "top level");
    if (mode == "non_instantaneous")
        cfg.system.mode = solver::Mode::NonInstantaneous;
    else if (mode == "instantaneous")
        cfg.system.mode = solver::Mode::Instantaneous;
    else
        throw ConfigError("mode must be 'non_instantaneous' or 'instantaneous'");

    if (!doc.contains("order") || !doc["order"].is_object())
        throw ConfigError("missing 'order' object");
    reject_unknown_keys(doc["order"], {"mu", "nu"}, "order");
    double mu = require_number(doc["order"], "mu", "order");
    double nu = require_number(doc["order"], "nu", "order");
    try {
        cfg.system.order = fraccalc::HilferOrder(mu, nu);
    } catch (const std::exception& e) {
        throw ConfigError(e.what());
    }

    if (!doc.contains("schedule") || !doc["schedule"].is_object())
        throw ConfigError("missing 'schedule' object");
    reject_unknown_keys(doc["schedule"], {"t_points", "p_points", "horizon"}, "schedule");
    cfg.system.schedule.t_points = require_number_array(doc["schedule"], "t_points", "schedule");
    if (doc["schedule"].contains("p_points"))
        cfg.system.schedule.p_points = require_number_array(doc["schedule"], "p_points", "schedule");
    cfg.system.schedule.horizon = require_number(doc["schedule"], "horizon", "schedule");
    try {
        cfg.system.schedule.validate(cfg.system.mode);
    } catch (const std::exception& e) {
        throw ConfigError(e.what());
    }

    cfg.system.g = parse_expr_field(doc, "g", "top level");
    if (cfg.system.g.uses("y"))
        throw ConfigError("g(t,x) must not reference the variable y");

    if (!doc.contains("impulses") || !doc["impulses"].is_array())
        throw ConfigError("missing 'impulses' array");
    for (std::size_t i = 0; i < doc["impulses"].size(); ++i) {
        const auto& v = doc["impulses"][i];
        if (!v.is_string()) throw ConfigError("'impulses' must contain expression strings");
        try {
            cfg.system.impulse_maps.push_back(expr::parse(v.get<std::string>()));
        } catch (const std::exception& e) {
            throw ConfigError("impulses[" + std::to_string(i) + "]: " + e.what());
        }
    }

    cfg.system.x0 = require_number(doc, "x0", "top level");

    if (doc.contains("mesh")) {
        if (!doc["mesh"].is_object()) throw ConfigError("'mesh' must be an object");
        reject_unknown_keys(doc["mesh"], {"points_per_interval", "grading"}, "mesh");
        if (doc["mesh"].contains("points_per_interval")) {
            double ppi = require_number(doc["mesh"], "points_per_interval", "mesh");
            if (ppi < 8 || ppi != std::floor(ppi))
                throw ConfigError("mesh.points_per_interval must be an integer >= 8");
            cfg.mesh.points_per_interval = (int)ppi;
        }
        if (doc["mesh"].contains("grading")) {
            cfg.mesh.grading = require_number(doc["mesh"], "grading", "mesh");
            if (cfg.mesh.grading < 0) throw ConfigError("mesh.grading must be >= 0");
        }
    }

    if (doc.contains("lyapunov")) {
        if (!doc["lyapunov"].is_object()) throw ConfigError("'lyapunov' must be an object");
        const auto& L = doc["lyapunov"];
        reject_unknown_keys(L, {"V", "alpha1", "alpha2", "alpha3", "alpha4", "a", "b"}, "lyapunov");
        stability::LyapunovSpec spec;
        spec.V = parse_expr_field(L, "V", "lyapunov");
        spec.alpha1 = require_number(L, "alpha1", "lyapunov");
        spec.alpha2 = require_number(L, "alpha2", "lyapunov");
        spec.alpha3 = require_number(L, "alpha3", "lyapunov");
        spec.alpha4 = require_number(L, "alpha4", "lyapunov");
        spec.a = require_number(L, "a", "lyapunov");
        spec.b = require_number(L, "b", "lyapunov");
        try {
            spec.validate();
        } catch (const std::exception& e) {
            throw ConfigError(e.what());
        }
        cfg.lyapunov = std::move(spec);
    }

    if (doc.contains("contraction")) {
        if (!doc["contraction"].is_object()) throw ConfigError("'contraction' must be an object");
        const auto& C = doc["contraction"];
        reject_unknown_keys(C, {"L", "I", "p"}, "contraction");
        ContractionInputs ci;
        ci.L = require_number(C, "L", "contraction");
        if (C.contains("I")) ci.I_list = require_number_array(C, "I", "contraction");
        if (C.contains("p")) ci.p = require_number(C, "p", "contraction");
        cfg.contraction = std::move(ci);
    }

    if (doc.contains("envelope")) {
        if (!doc["envelope"].is_object()) throw ConfigError("'envelope' must be an object");
        const auto& E = doc["envelope"];
        reject_unknown_keys(E, {"gamma", "h", "envelope_second_param"}, "envelope");
        EnvelopeInputs ei;
        if (E.contains("gamma")) ei.gamma = require_number(E, "gamma", "envelope");
        if (E.contains("h")) ei.h = require_number(E, "h", "envelope");
        if (E.contains("envelope_second_param")) {
            std::string p = require_string(E, "envelope_second_param", "envelope");
            if (p == "lambda")
                ei.param = stability::EnvelopeParam::Lambda;
            else if (p == "nu")
                ei.param = stability::EnvelopeParam::Nu;
            else
                throw ConfigError("envelope_second_param must be 'lambda' or 'nu'");
        }
        cfg.envelope = ei;
    }

    if (doc.contains("output")) {
        if (!doc["output"].is_object()) throw ConfigError("'output' must be an object");
        reject_unknown_keys(doc["output"], {"trajectory_csv"}, "output");
        if (doc["output"].contains("trajectory_csv"))
            cfg.trajectory_csv = require_string(doc["output"], "trajectory_csv", "output");
    }

    return cfg;
}

RunConfig load_config(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot open config file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

}  // namespace hilfer::config
