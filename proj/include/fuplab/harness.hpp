#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace fuplab {

struct StageSpec {
    std::string name;
    std::string type;  // generator | porosity | weight-build | modify |
                       // psh-check | fup-scan
    nlohmann::json params;
};

struct ExperimentConfig {
    std::string name;
    std::uint64_t seed = 1;
    std::string output_dir = ".";
    std::map<std::string, double> tolerances;
    std::vector<StageSpec> stages;
};

ExperimentConfig parse_config(const nlohmann::json& j);
ExperimentConfig load_config(const std::string& path);

struct ArtifactEntry {
    std::string file;  // relative to the output directory
    std::string sha256;
};

struct StageRecord {
    std::string name;
    std::string type;
    std::string status;  // pass | fail | skipped
    double seconds = 0.0;
    std::string message;
    std::vector<ArtifactEntry> artifacts;
    nlohmann::json values;
};

struct Manifest {
    std::string experiment;
    std::uint64_t seed = 1;
    std::string config_sha256;
    std::vector<StageRecord> stages;
    bool all_pass = true;
};

/// Runs stages in order inside cfg.output_dir. A stage failure halts the
/// pipeline: later stages are recorded as skipped. Artifacts are hashed as
/// written; the manifest is saved as manifest.json in the output directory.
Manifest run_experiment(const ExperimentConfig& cfg);

void save_manifest(const Manifest& m, const std::string& path);
/// Loads a manifest and re-hashes every artifact against the recorded
/// digest; throws on any mismatch.
Manifest load_manifest(const std::string& path, const std::string& artifact_dir);

/// Writes report.txt plus plot-data CSVs (log-log scan columns, certificate
/// eigenvalue histograms) next to the artifacts. Paths inside the report are
/// relative.
void emit_report(const Manifest& m, const std::string& dir);

}  // namespace fuplab
