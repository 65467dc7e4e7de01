#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "metamorph/io.hpp"

namespace metamorph {

enum class Command { spectrum, levels, fractal, dynamics, walk, heff, sweep };

std::string_view to_string(Command command);
Command parse_command(std::string_view name);

struct RunReport {
    Command command = Command::spectrum;
    std::filesystem::path directory;
    std::vector<FileEntry> files;
    std::size_t failed_cells = 0;
    std::filesystem::path manifest;
};

// Disorder seed shared by every lambda of the single-realization commands
// (dynamics, walk, heff).
std::uint64_t shared_seed(const RunConfig& config);

// Each command validates `config`, writes its tables into config.output_directory together
// with manifest.json, and returns what it wrote. Data files depend only on the config;
// timestamps and the worker count live in the manifest.
RunReport cmd_spectrum(const RunConfig& config, std::size_t workers = 1);
RunReport cmd_levels(const RunConfig& config, std::size_t workers = 1);
RunReport cmd_fractal(const RunConfig& config, std::size_t workers = 1);
RunReport cmd_dynamics(const RunConfig& config, std::size_t workers = 1);
RunReport cmd_walk(const RunConfig& config, std::size_t workers = 1);
RunReport cmd_heff(const RunConfig& config, std::size_t workers = 1);
RunReport cmd_sweep(const RunConfig& config, std::size_t workers = 1);

RunReport run_command(Command command, const RunConfig& config, std::size_t workers = 1);

}  // namespace metamorph
