#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "runway/cost_model.hpp"
#include "runway/demand_model.hpp"
#include "runway/mc_oracle.hpp"

namespace runway {

enum class ModelKind { deterministic, stochastic };

std::string_view to_string(ModelKind model);

struct SweepSpec {
    std::string param;            ///< one of K0, eta, sigma, lambda, jump_size
    std::vector<double> values;

    bool operator==(const SweepSpec&) const = default;
};

/// Everything one run of the harness needs. Defaults are the baseline airport
/// with a constant -10% jump.
struct ScenarioConfig {
    CostParams cost;
    DemandParams demand;
    CapacitySpec capacity;
    SimConfig sim;
    ModelKind model = ModelKind::stochastic;
    double q0 = 10.0;   ///< starting demand for path simulation
    std::optional<SweepSpec> sweep;

    /// Throws ValidationError naming the offending key.
    void validate() const;

    bool operator==(const ScenarioConfig&) const = default;
};

/// Parses the flat `key = value` format. `#` starts a comment. Unknown keys
/// and malformed values raise ValidationError.
ScenarioConfig parse_config(std::string_view text);

ScenarioConfig load_config(const std::filesystem::path& path);

/// Inverse of parse_config; numbers are written in shortest round-trip form.
std::string emit_config(const ScenarioConfig& config);

/// Applies one `key = value` entry, as from a config line or a --set flag.
void apply_setting(ScenarioConfig& config, std::string_view key, std::string_view value);

/// Sets one of the sweepable parameters (K0, eta, sigma, lambda, jump_size).
void set_sweep_parameter(ScenarioConfig& config, std::string_view name, double value);

bool is_sweepable(std::string_view name);

}  // namespace runway
