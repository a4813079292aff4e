#include "arw/records.hpp"

#include <chrono>
#include <cmath>
#include <limits>
#include <fstream>

#include <json.hpp>

#include "arw/errors.hpp"

namespace arw {

namespace {

using nlohmann::json;

std::string now_iso8601() {
    auto now = std::chrono::system_clock::now();
    std::time_t t = std::chrono::system_clock::to_time_t(now);
    char buf[32];
    std::tm tm{};
    gmtime_r(&t, &tm);
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

constexpr const char* kManifestPrefix = "# manifest ";

}  // namespace

std::string manifest_line(const RunManifest& m) {
    json j;
    j["command"] = m.command;
    j["params"] = m.params;
    j["version"] = m.version;
    j["timestamp"] = m.timestamp.empty() ? now_iso8601() : m.timestamp;
    j["inputs"] = m.inputs;
    j["outputs"] = m.outputs;
    return std::string(kManifestPrefix) + j.dump();
}

bool is_manifest_line(const std::string& line) {
    return line.rfind(kManifestPrefix, 0) == 0;
}

RunManifest parse_manifest_line(const std::string& line) {
    if (!is_manifest_line(line)) throw Error("not a manifest line");
    json j = json::parse(line.substr(std::string(kManifestPrefix).size()));
    RunManifest m;
    m.command = j.at("command").get<std::string>();
    m.params = j.at("params").get<std::map<std::string, std::string>>();
    m.version = j.at("version").get<std::string>();
    m.timestamp = j.at("timestamp").get<std::string>();
    m.inputs = j.at("inputs").get<std::vector<std::string>>();
    m.outputs = j.at("outputs").get<std::vector<std::string>>();
    return m;
}

std::string record_line(const ExperimentRecord& r) {
    json j;
    j["schema_version"] = kRecordSchemaVersion;
    j["n"] = r.n;
    j["N"] = r.N;
    j["E"] = r.E;
    j["seed"] = r.seed;
    j["trials"] = r.trials;
    j["grid_M"] = r.grid_M;
    j["sample_mean_L"] = r.sample_mean_L;
    j["sample_var_L"] = r.sample_var_L;
    j["se_mean"] = r.se_mean;
    j["se_var"] = r.se_var;
    j["theory_mean"] = r.theory_mean;
    j["theory_var_leading"] = r.theory_var_leading;
    j["mu4"] = r.mu4;
    j["c_n"] = r.c_n;
    if (std::isfinite(r.r5_error_scale)) j["r5_error_scale"] = r.r5_error_scale;
    else j["r5_error_scale"] = nullptr;
    j["aborted_trials"] = r.aborted_trials;
    return j.dump();
}

ExperimentRecord parse_record_line(const std::string& line) {
    json j = json::parse(line);
    if (j.at("schema_version").get<int>() != kRecordSchemaVersion)
        throw Error("record schema version mismatch");
    ExperimentRecord r;
    r.n = j.at("n").get<u64>();
    r.N = j.at("N").get<int>();
    r.E = j.at("E").get<double>();
    r.seed = j.at("seed").get<u64>();
    r.trials = j.at("trials").get<int>();
    r.grid_M = j.at("grid_M").get<int>();
    r.sample_mean_L = j.at("sample_mean_L").get<double>();
    r.sample_var_L = j.at("sample_var_L").get<double>();
    r.se_mean = j.at("se_mean").get<double>();
    r.se_var = j.at("se_var").get<double>();
    r.theory_mean = j.at("theory_mean").get<double>();
    r.theory_var_leading = j.at("theory_var_leading").get<double>();
    r.mu4 = j.at("mu4").get<double>();
    r.c_n = j.at("c_n").get<double>();
    r.r5_error_scale = j.at("r5_error_scale").is_null()
                           ? std::numeric_limits<double>::quiet_NaN()
                           : j.at("r5_error_scale").get<double>();
    r.aborted_trials = j.at("aborted_trials").get<int>();
    return r;
}

std::vector<ExperimentRecord> read_record_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open record file: " + path);
    std::vector<ExperimentRecord> out;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        out.push_back(parse_record_line(line));
    }
    return out;
}

}  // namespace arw
