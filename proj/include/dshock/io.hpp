#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "dshock/diagnostics.hpp"
#include "dshock/initdata.hpp"
#include "dshock/lagrangian_solver.hpp"
#include "dshock/selfsimilar_frame.hpp"
#include "dshock/verify.hpp"

// Artifact formats. CSV files start with "# schema=1", then optional
// "# key=value" metadata lines, a header row and %.17g values.

namespace dshock::io {

using json = nlohmann::ordered_json;

inline constexpr int kCsvSchema = 1;

struct CsvTable {
    std::vector<std::string> names;
    std::vector<std::vector<double>> cols;
    std::vector<std::pair<std::string, std::string>> meta;

    std::size_t rows() const { return cols.empty() ? 0 : cols.front().size(); }
    void add(std::string name, std::vector<double> col);
    const std::vector<double>& col(const std::string& name) const;  // throws UsageError when absent
    bool has(const std::string& name) const;
    std::string meta_value(const std::string& key) const;  // empty when absent
};

void write_csv(const std::filesystem::path& path, const CsvTable& t);
// Throws UsageError naming the file and line on malformed input or a schema
// other than kCsvSchema.
CsvTable read_csv(const std::filesystem::path& path);

void write_json(const std::filesystem::path& path, const json& j);
json read_json(const std::filesystem::path& path);

std::string sha256_file(const std::filesystem::path& path);

// Files written under a root directory, in write order.
class ArtifactLog {
public:
    explicit ArtifactLog(std::filesystem::path root) : root_(std::move(root)) {}
    const std::filesystem::path& root() const { return root_; }
    std::filesystem::path path(const std::string& rel) const { return root_ / rel; }
    void csv(const std::string& rel, const CsvTable& t);
    void write(const std::string& rel, const json& j);
    void text(const std::string& rel, const std::string& body);
    // Relative path, sha256 and size of every file written so far.
    json listing() const;

private:
    std::filesystem::path root_;
    std::vector<std::string> files_;
};

json to_json(const FitResult& f);
json to_json(const TemporalFit& f);
json to_json(const SpatialFit& f);
json to_json(const TstarEstimate& e);
json to_json(const BlowupReport& r);
json to_json(const BlowupEvent& e);
json to_json(const ModulationState& m);
json to_json(const BootstrapMonitor& b);
json to_json(const ConditionResult& c);
json to_json(const AdmissibilityReport& r);
json to_json(const InequalityReport& r);
json to_json(const std::vector<InequalityReport>& r);
json to_json(const MaxPrincipleReport& r);
json to_json(const DecayCheck& d);

// Inverse of to_json(BlowupReport), for tools that consume report.json.
BlowupReport blowup_report_from_json(const json& j);

}  // namespace dshock::io
