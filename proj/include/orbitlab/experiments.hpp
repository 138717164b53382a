#pragma once

#include <json.hpp>

#include <string>
#include <vector>

#include "orbitlab/number_field.hpp"

namespace orbitlab {

using json = nlohmann::json;
using ojson = nlohmann::ordered_json;

inline constexpr const char* kVersion = "0.1.0";

struct RunOptions {
    bool emit_rows = false;
    int workers = 1;
    std::string report_path; // empty: stdout only
    std::string rows_path;   // empty: derive from report path or "rows.csv"
};

struct RunResult {
    ojson record;                      // the ResultRecord document
    std::vector<std::string> csv_rows; // includes the header when non-empty
    int exit_code = 0;                 // 0 ok, 1 failed certified check
};

/// Names accepted by run_experiment.
const std::vector<std::string>& experiment_names();

/// Executes one experiment from its JSON config. Throws ConfigError (or
/// PreconditionViolated from parameter validation) for exit-code-2 problems;
/// any failed certified check yields exit_code 1 and status "failed".
RunResult run_experiment(const std::string& name, const json& config, const RunOptions& opts);

/// Catalog serialization (built-ins plus optional user file).
json field_spec_to_json(const FieldSpec& spec);
FieldSpec field_spec_from_json(const json& j);
std::vector<FieldSpec> load_catalog_file(const std::string& path);
/// Looks a label up in the user catalog (if any) then the built-ins.
FieldSpec resolve_field(const std::string& label, const std::vector<FieldSpec>& extra);

} // namespace orbitlab
