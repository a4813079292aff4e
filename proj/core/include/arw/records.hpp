#pragma once

#include <map>
#include <string>
#include <vector>

#include "arw/sampler.hpp"

namespace arw {

inline constexpr int kRecordSchemaVersion = 1;
inline constexpr const char* kArtifactVersion = "0.1.0";

/// Run provenance. Serialized as a '#'-prefixed comment line at the top of
/// output files; the timestamp lives only here, so the record lines that
/// follow are byte-identical across reruns of the same manifest.
struct RunManifest {
    std::string command;
    std::map<std::string, std::string> params;
    std::string version = kArtifactVersion;
    std::string timestamp;  // ISO-8601 UTC; empty means "now" at emit time
    std::vector<std::string> inputs;
    std::vector<std::string> outputs;

    friend bool operator==(const RunManifest&, const RunManifest&) = default;
};

std::string manifest_line(const RunManifest& m);          // "# manifest {...}"
bool is_manifest_line(const std::string& line);
RunManifest parse_manifest_line(const std::string& line);

/// Deterministic single-line JSON record (sorted keys, shortest round-trip
/// doubles, schema_version field). wall_time_s is deliberately not included.
std::string record_line(const ExperimentRecord& r);
ExperimentRecord parse_record_line(const std::string& line);

/// Reads every record line of a record file (comment lines skipped).
std::vector<ExperimentRecord> read_record_file(const std::string& path);

}  // namespace arw
