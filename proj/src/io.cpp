#include "metamorph/io.hpp"

#include <charconv>
#include <cmath>
#include <ctime>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>

#include <openssl/evp.h>

#include "metamorph/errors.hpp"

namespace metamorph {

using nlohmann::json;
using nlohmann::ordered_json;

std::string_view to_string(PropagatorPath path) {
    return path == PropagatorPath::dense ? "dense" : "structured";
}

void RunConfig::validate() const {
    try {
        plan().validate();
    } catch (const ArgumentError& e) {
        throw ConfigError(e.what());
    }
    if (!(walk_threshold > 0.0 && walk_threshold < 1.0))
        throw ConfigError("walk_threshold must lie in (0, 1)");
    if (!(sparsity_threshold > 0.0 && sparsity_threshold < 1.0))
        throw ConfigError("sparsity_threshold must lie in (0, 1)");
    if (output_directory.empty()) throw ConfigError("output directory is empty");
    if (formats.empty()) throw ConfigError("no output format requested");
    for (const auto& f : formats)
        if (f != "csv") throw ConfigError("unsupported output format '" + f + "'");
}

SweepPlan RunConfig::plan() const {
    SweepPlan p;
    p.base = model;
    p.base.lambda = 0.0;
    p.lambdas = lambdas;
    p.realizations = realizations;
    p.master_seed = master_seed;
    p.periods = periods;
    p.diagnostics = diagnostics;
    p.histogram_bins = histogram_bins;
    p.path = path;
    p.dynamics_initial = {initial_configuration};
    return p;
}

ordered_json to_json(const RunConfig& c) {
    ordered_json j;
    j["model"] = {{"sites", c.model.sites},
                  {"t1", c.model.t1},
                  {"t2", c.model.t2},
                  {"t3", c.model.t3},
                  {"rotation_rate", c.model.rotation_rate},
                  {"ising_strength", c.model.ising_strength},
                  {"ising_exponent", c.model.ising_exponent},
                  {"flip_flop", c.model.flip_flop},
                  {"disorder_bound", c.model.disorder_bound}};
    j["sweep"] = {{"lambdas", c.lambdas},
                  {"realizations", c.realizations},
                  {"periods", c.periods},
                  {"histogram_bins", c.histogram_bins},
                  {"diagnostics",
                   {{"ratios", c.diagnostics.ratios},
                    {"fractal", c.diagnostics.fractal},
                    {"dynamics", c.diagnostics.dynamics}}},
                  {"propagator", std::string(to_string(c.path))},
                  {"initial_configuration", c.initial_configuration},
                  {"walk_threshold", c.walk_threshold},
                  {"sparsity_threshold", c.sparsity_threshold}};
    j["master_seed"] = c.master_seed;
    j["output"] = {{"directory", c.output_directory}, {"formats", c.formats}};
    return j;
}

namespace {

void reject_unknown(const json& obj, std::string_view where, std::initializer_list<std::string_view> keys) {
    if (!obj.is_object()) throw ConfigError(std::string(where) + " must be an object");
    const std::set<std::string_view> allowed(keys);
    for (const auto& [key, value] : obj.items())
        if (!allowed.contains(key)) throw ConfigError("unknown key '" + std::string(where) + "." + key + "'");
}

template <class T>
void read(const json& obj, const char* key, T& out, std::string_view where) {
    if (!obj.contains(key)) return;
    const json& v = obj.at(key);
    try {
        if constexpr (std::is_same_v<T, double>) {
            if (!v.is_number()) throw ConfigError("");
        } else if constexpr (std::is_same_v<T, bool>) {
            if (!v.is_boolean()) throw ConfigError("");
        } else if constexpr (std::is_integral_v<T>) {
            if (!v.is_number_integer()) throw ConfigError("");
            if (v.is_number_unsigned()) {
                if (v.get<std::uint64_t>() > static_cast<std::uint64_t>(std::numeric_limits<T>::max()))
                    throw ConfigError("");
            } else {
                const auto x = v.get<std::int64_t>();
                if (x < static_cast<std::int64_t>(std::numeric_limits<T>::min()) ||
                    (x > 0 && static_cast<std::uint64_t>(x) > static_cast<std::uint64_t>(std::numeric_limits<T>::max())))
                    throw ConfigError("");
            }
        } else if constexpr (std::is_same_v<T, std::string>) {
            if (!v.is_string()) throw ConfigError("");
        }
        out = v.get<T>();
    } catch (const std::exception&) {
        throw ConfigError("bad value for '" + std::string(where) + "." + key + "': " + v.dump());
    }
}

}  // namespace

RunConfig config_from_json(const json& j) {
    RunConfig c;
    reject_unknown(j, "config", {"model", "sweep", "master_seed", "output"});
    if (j.contains("model")) {
        const json& m = j.at("model");
        reject_unknown(m, "model", {"sites", "t1", "t2", "t3", "rotation_rate", "ising_strength",
                                    "ising_exponent", "flip_flop", "disorder_bound"});
        read(m, "sites", c.model.sites, "model");
        read(m, "t1", c.model.t1, "model");
        read(m, "t2", c.model.t2, "model");
        read(m, "t3", c.model.t3, "model");
        read(m, "rotation_rate", c.model.rotation_rate, "model");
        read(m, "ising_strength", c.model.ising_strength, "model");
        read(m, "ising_exponent", c.model.ising_exponent, "model");
        read(m, "flip_flop", c.model.flip_flop, "model");
        read(m, "disorder_bound", c.model.disorder_bound, "model");
    }
    if (j.contains("sweep")) {
        const json& s = j.at("sweep");
        reject_unknown(s, "sweep", {"lambdas", "realizations", "periods", "histogram_bins", "diagnostics",
                                    "propagator", "initial_configuration", "walk_threshold",
                                    "sparsity_threshold"});
        if (s.contains("lambdas")) {
            const json& l = s.at("lambdas");
            if (!l.is_array()) throw ConfigError("sweep.lambdas must be an array");
            c.lambdas.clear();
            for (const json& v : l) {
                if (!v.is_number()) throw ConfigError("sweep.lambdas entries must be numbers");
                c.lambdas.push_back(v.get<double>());
            }
        }
        read(s, "realizations", c.realizations, "sweep");
        read(s, "periods", c.periods, "sweep");
        read(s, "histogram_bins", c.histogram_bins, "sweep");
        if (s.contains("diagnostics")) {
            const json& d = s.at("diagnostics");
            reject_unknown(d, "sweep.diagnostics", {"ratios", "fractal", "dynamics"});
            read(d, "ratios", c.diagnostics.ratios, "sweep.diagnostics");
            read(d, "fractal", c.diagnostics.fractal, "sweep.diagnostics");
            read(d, "dynamics", c.diagnostics.dynamics, "sweep.diagnostics");
        }
        if (s.contains("propagator")) {
            std::string name;
            read(s, "propagator", name, "sweep");
            if (name == "dense") c.path = PropagatorPath::dense;
            else if (name == "structured") c.path = PropagatorPath::structured;
            else throw ConfigError("sweep.propagator must be 'dense' or 'structured'");
        }
        read(s, "initial_configuration", c.initial_configuration, "sweep");
        read(s, "walk_threshold", c.walk_threshold, "sweep");
        read(s, "sparsity_threshold", c.sparsity_threshold, "sweep");
    }
    read(j, "master_seed", c.master_seed, "config");
    if (j.contains("output")) {
        const json& o = j.at("output");
        reject_unknown(o, "output", {"directory", "formats"});
        read(o, "directory", c.output_directory, "output");
        if (o.contains("formats")) {
            const json& f = o.at("formats");
            if (!f.is_array()) throw ConfigError("output.formats must be an array");
            c.formats.clear();
            for (const json& v : f) {
                if (!v.is_string()) throw ConfigError("output.formats entries must be strings");
                c.formats.push_back(v.get<std::string>());
            }
        }
    }
    return c;
}

RunConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot read config file: " + path.string());
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw ConfigError("config file " + path.string() + " is not valid JSON: " + e.what());
    }
    return config_from_json(j);
}

void save_config(const RunConfig& config, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write config file", path.string());
    out << to_json(config).dump(2) << '\n';
    if (!out) throw IoError("failed writing config file", path.string());
}

std::string format_number(double value) {
    if (!std::isfinite(value)) throw ValidationError("refusing to write a non-finite number");
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof buf, value);
    return {buf, res.ptr};
}

std::string format_number(std::int64_t value) {
    char buf[24];
    const auto res = std::to_chars(buf, buf + sizeof buf, value);
    return {buf, res.ptr};
}

std::string format_number(std::uint64_t value) {
    char buf[24];
    const auto res = std::to_chars(buf, buf + sizeof buf, value);
    return {buf, res.ptr};
}

CsvTable::CsvTable(std::vector<std::string> header) : header_(std::move(header)) {
    if (header_.empty()) throw ArgumentError("table needs at least one column");
}

CsvTable& CsvTable::row() {
    rows_.emplace_back();
    rows_.back().reserve(header_.size());
    return *this;
}

CsvTable& CsvTable::add(double value) {
    rows_.back().push_back(format_number(value));
    return *this;
}

CsvTable& CsvTable::add_optional(double value) {
    rows_.back().push_back(std::isnan(value) ? std::string() : format_number(value));
    return *this;
}

CsvTable& CsvTable::add(std::int64_t value) {
    rows_.back().push_back(format_number(value));
    return *this;
}

CsvTable& CsvTable::add(std::uint64_t value) {
    rows_.back().push_back(format_number(value));
    return *this;
}

CsvTable& CsvTable::add(std::string_view text) {
    if (text.find_first_of(",\"\n\r") != std::string_view::npos)
        throw ArgumentError("CSV text field needs quoting: " + std::string(text));
    rows_.back().emplace_back(text);
    return *this;
}

std::string CsvTable::render() const {
    std::string out;
    auto line = [&out](const std::vector<std::string>& fields) {
        for (std::size_t k = 0; k < fields.size(); ++k) {
            if (k) out.push_back(',');
            out += fields[k];
        }
        out.push_back('\n');
    };
    line(header_);
    for (const auto& r : rows_) {
        if (r.size() != header_.size())
            throw ValidationError("CSV row has " + std::to_string(r.size()) + " fields, expected " +
                                  std::to_string(header_.size()));
        line(r);
    }
    return out;
}

std::size_t ParsedCsv::column(std::string_view name) const {
    for (std::size_t k = 0; k < header.size(); ++k)
        if (header[k] == name) return k;
    throw ArgumentError("no column named '" + std::string(name) + "'");
}

ParsedCsv read_csv(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open table", path.string());
    auto split = [](const std::string& line) {
        std::vector<std::string> fields;
        std::size_t start = 0;
        while (true) {
            const auto comma = line.find(',', start);
            fields.push_back(line.substr(start, comma - start));
            if (comma == std::string::npos) break;
            start = comma + 1;
        }
        return fields;
    };
    ParsedCsv table;
    std::string line;
    if (!std::getline(in, line)) throw IoError("empty table", path.string());
    table.header = split(line);
    while (std::getline(in, line)) table.rows.push_back(split(line));
    return table;
}

std::string sha256_hex(std::string_view bytes) {
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int length = 0;
    if (EVP_Digest(bytes.data(), bytes.size(), digest, &length, EVP_sha256(), nullptr) != 1)
        throw ValidationError("SHA-256 digest failed");
    static constexpr char hex[] = "0123456789abcdef";
    std::string out;
    out.reserve(2 * length);
    for (unsigned int k = 0; k < length; ++k) {
        out.push_back(hex[digest[k] >> 4]);
        out.push_back(hex[digest[k] & 0xF]);
    }
    return out;
}

std::string sha256_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open file", path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return sha256_hex(buf.str());
}

FileEntry write_table(const std::filesystem::path& dir, const std::string& name, const CsvTable& table) {
    const std::string content = table.render();
    const auto path = dir / name;
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open output file", path.string());
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    out.close();
    if (!out) throw IoError("failed writing output file", path.string());
    return {name, sha256_hex(content), content.size(), table.rows()};
}

std::string utc_timestamp() {
    const std::time_t now = std::time(nullptr);
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

}  // namespace metamorph
