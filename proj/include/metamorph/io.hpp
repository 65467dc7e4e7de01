#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "metamorph/ensemble.hpp"

namespace metamorph {

inline constexpr std::string_view kToolName = "metamorph";
inline constexpr std::string_view kToolVersion = "0.1.0";

// Everything a run needs. ModelParams::lambda is unused here; the grid lives in `lambdas`.
struct RunConfig {
    ModelParams model = default_params(8);
    std::vector<double> lambdas = default_lambda_grid();
    std::size_t realizations = 100;
    int periods = 64;
    std::size_t histogram_bins = 20;
    DiagnosticSet diagnostics;
    PropagatorPath path = PropagatorPath::structured;
    std::uint32_t initial_configuration = 0;
    double walk_threshold = 1e-3;
    double sparsity_threshold = 1e-3;
    std::uint64_t master_seed = 0;
    std::string output_directory = "out";
    std::vector<std::string> formats{"csv"};

    // ConfigError on any inconsistency.
    void validate() const;
    SweepPlan plan() const;

    friend bool operator==(const RunConfig&, const RunConfig&) = default;
};

nlohmann::ordered_json to_json(const RunConfig& config);
// Keys missing from `j` keep their defaults; unknown keys and type mismatches are ConfigError.
RunConfig config_from_json(const nlohmann::json& j);

RunConfig load_config(const std::filesystem::path& path);
void save_config(const RunConfig& config, const std::filesystem::path& path);

std::string_view to_string(PropagatorPath path);

// Shortest round-trip decimal form. ValidationError for NaN or infinity.
std::string format_number(double value);
std::string format_number(std::int64_t value);
std::string format_number(std::uint64_t value);

// Rows of already-formatted fields; an empty field marks an undefined value.
class CsvTable {
public:
    explicit CsvTable(std::vector<std::string> header);

    CsvTable& row();
    CsvTable& add(double value);
    // Blank cell when the value is NaN (an undefined quantity, not a failed computation).
    CsvTable& add_optional(double value);
    CsvTable& add(std::int64_t value);
    CsvTable& add(std::uint64_t value);
    CsvTable& add(int value) { return add(static_cast<std::int64_t>(value)); }
    CsvTable& add(std::uint32_t value) { return add(static_cast<std::uint64_t>(value)); }
    CsvTable& add(std::string_view text);

    const std::vector<std::string>& header() const noexcept { return header_; }
    std::size_t rows() const noexcept { return rows_.size(); }
    const std::vector<std::vector<std::string>>& data() const noexcept { return rows_; }

    // Throws ValidationError when a row has the wrong number of fields.
    std::string render() const;

private:
    std::vector<std::string> header_;
    std::vector<std::vector<std::string>> rows_;
};

struct ParsedCsv {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    // Index of a header name; ArgumentError when absent.
    std::size_t column(std::string_view name) const;
};

ParsedCsv read_csv(const std::filesystem::path& path);

std::string sha256_hex(std::string_view bytes);
std::string sha256_file(const std::filesystem::path& path);

struct FileEntry {
    std::string name;  // relative to the output directory
    std::string sha256;
    std::uint64_t bytes = 0;
    std::size_t rows = 0;  // data rows, header excluded
};

// Writes `table` to dir/name. IoError carries the path on failure.
FileEntry write_table(const std::filesystem::path& dir, const std::string& name, const CsvTable& table);

std::string utc_timestamp();

}  // namespace metamorph
