#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "fks/grid.hpp"
#include "fks/integrator.hpp"
#include "fks/operators.hpp"

namespace fks {

enum class InitialKind { gaussian, two_bumps, file, constant };

const char* initial_kind_name(InitialKind k);

// gaussian: total mass, standard deviation width, centre.
// two_bumps: two gaussians of mass/2 each, centred at centre -/+ separation/2 along x1.
// file: FKS1 dump whose header must match the grid.
// constant: value everywhere.
struct InitialCondition {
    InitialKind kind = InitialKind::gaussian;
    double mass = 1.0;
    double width = 1.0;
    std::vector<double> center;  // empty: origin
    double separation = 4.0;
    std::string path;
    double value = 0.0;
    std::optional<std::uint64_t> seed;  // reserved for stochastic data; recorded, not used

    bool operator==(const InitialCondition&) const = default;
};

struct DiagnosticsSettings {
    double nu = 0.0;              // 0: model default
    std::vector<double> lp_set;   // extra CSV columns; infinity allowed
    int snapshot_stride = 1;

    bool operator==(const DiagnosticsSettings&) const = default;
};

struct ExperimentConfig {
    ModelParams model;
    GridSpec grid;
    SolverConfig solver;
    InitialCondition initial_condition;
    DiagnosticsSettings diagnostics;
    std::string outputs = "out";

    // Re-validates every referenced type; throws ConfigError naming the field.
    void validate() const;
    bool operator==(const ExperimentConfig&) const = default;
};

// Unknown fields, wrong types and invalid values raise ConfigError with the
// JSON path (or line and column for syntax errors).
ExperimentConfig parse_config(const std::string& json_text);
ExperimentConfig load_config(const std::string& path);
// Fully resolved form (every field written); parse_config(to_json_text(c)) == c.
std::string to_json_text(const ExperimentConfig& cfg, int indent = 2);

PhysicalField build_initial_condition(const ExperimentConfig& cfg);
// Share of |rho| mass outside [-L/4, L/4]^n.
double mass_outside_quarter_box(const PhysicalField& rho);

}  // namespace fks
