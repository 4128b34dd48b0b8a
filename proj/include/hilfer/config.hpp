#ifndef HILFER_CONFIG_HPP
#define HILFER_CONFIG_HPP

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "hilfer/solver.hpp"
#include "hilfer/stability.hpp"

namespace hilfer::config {

/// Schema or value violation in a run configuration; maps to exit code 2.
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ContractionInputs {
    double L = 0.0;
    std::vector<double> I_list;
    std::optional<double> p;
};

struct EnvelopeInputs {
    double gamma = 0.0;        // 0 = take alpha3 from the Lyapunov spec
    double h = 0.0;            // 0 = derive from the Lyapunov constants
    stability::EnvelopeParam param = stability::EnvelopeParam::Lambda;
};

/// Parsed and validated run configuration (see schema/run_config.schema.json).
/// Unknown keys anywhere in the document are rejected.
struct RunConfig {
    solver::ImpulsiveSystem system;
    solver::MeshSpec mesh;
    std::optional<stability::LyapunovSpec> lyapunov;
    std::optional<ContractionInputs> contraction;
    std::optional<EnvelopeInputs> envelope;
    std::optional<std::string> trajectory_csv;
};

RunConfig load_config(const std::string& path);
RunConfig parse_config(const std::string& json_text);

}  // namespace hilfer::config

#endif
