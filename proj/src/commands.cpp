#include "metamorph/commands.hpp"

#include <fstream>
#include <limits>

#include "metamorph/errors.hpp"
#include "metamorph/parallel.hpp"

namespace metamorph {

using nlohmann::ordered_json;

std::string_view to_string(Command command) {
    switch (command) {
        case Command::spectrum: return "spectrum";
        case Command::levels: return "levels";
        case Command::fractal: return "fractal";
        case Command::dynamics: return "dynamics";
        case Command::walk: return "walk";
        case Command::heff: return "heff";
        case Command::sweep: return "sweep";
    }
    return "unknown";
}

Command parse_command(std::string_view name) {
    for (Command c : {Command::spectrum, Command::levels, Command::fractal, Command::dynamics,
                      Command::walk, Command::heff, Command::sweep})
        if (to_string(c) == name) return c;
    throw ConfigError("unknown command '" + std::string(name) + "'");
}

std::uint64_t shared_seed(const RunConfig& config) {
    return derive_seed(config.master_seed, 0, 0);
}

namespace {

class Run {
public:
    Run(Command command, const RunConfig& config, std::size_t workers)
        : command_(command), config_(config), workers_(workers), started_(utc_timestamp()) {
        config_.validate();
        dir_ = config_.output_directory;
        std::error_code ec;
        std::filesystem::create_directories(dir_, ec);
        if (ec || !std::filesystem::is_directory(dir_))
            throw IoError("cannot create output directory", dir_.string());
    }

    const RunConfig& config() const { return config_; }
    std::size_t workers() const { return workers_; }

    void write(const std::string& name, const CsvTable& table) {
        report_.files.push_back(write_table(dir_, name, table));
    }

    void add_cells(const EnsembleResult& result) {
        for (const auto& rec : result.records) {
            ordered_json cell{{"lambda_index", rec.lambda_index},
                              {"realization_index", rec.realization_index},
                              {"lambda", rec.lambda},
                              {"seed", rec.seed}};
            if (!rec.ok()) {
                cell["error"] = rec.error;
                ++report_.failed_cells;
            }
            cells_.push_back(std::move(cell));
        }
    }

    void add_shared_cells(std::uint64_t seed) {
        for (std::size_t g = 0; g < config_.lambdas.size(); ++g)
            cells_.push_back({{"lambda_index", g},
                              {"realization_index", 0},
                              {"lambda", config_.lambdas[g]},
                              {"seed", seed}});
    }

    ordered_json& statistics() { return statistics_; }

    RunReport finish() {
        ordered_json m;
        m["tool"] = kToolName;
        m["version"] = kToolVersion;
        m["command"] = to_string(command_);
        m["config"] = to_json(config_);
        m["master_seed"] = config_.master_seed;
        m["units"] = {{"hbar", 1},
                      {"period", config_.model.period()},
                      {"time", "stroboscopic, in drive periods T"},
                      {"quasienergy", "1/T on (-pi/T, pi/T]"}};
        m["workers"] = workers_;
        m["worker_env"] = "METAMORPH_WORKERS";
        m["started_utc"] = started_;
        m["finished_utc"] = utc_timestamp();
        m["cells"] = cells_;
        m["failed_cells"] = report_.failed_cells;
        m["statistics"] = statistics_.is_null() ? ordered_json::object() : statistics_;
        ordered_json files = ordered_json::array();
        for (const auto& f : report_.files)
            files.push_back({{"name", f.name}, {"sha256", f.sha256}, {"bytes", f.bytes}, {"rows", f.rows}});
        m["files"] = files;

        report_.command = command_;
        report_.directory = dir_;
        report_.manifest = dir_ / "manifest.json";
        std::ofstream out(report_.manifest, std::ios::binary | std::ios::trunc);
        if (!out) throw IoError("cannot open manifest", report_.manifest.string());
        out << m.dump(2) << '\n';
        out.close();
        if (!out) throw IoError("failed writing manifest", report_.manifest.string());
        return report_;
    }

private:
    Command command_;
    RunConfig config_;
    std::size_t workers_;
    std::string started_;
    std::filesystem::path dir_;
    ordered_json cells_ = ordered_json::array();
    ordered_json statistics_;
    RunReport report_;
};

EnsembleResult sweep_for(const RunConfig& config, DiagnosticSet diagnostics, std::size_t workers) {
    SweepPlan plan = config.plan();
    plan.diagnostics = diagnostics;
    return run_sweep(plan, workers);
}

std::string indexed_name(std::string_view stem, std::size_t g) {
    return std::string(stem) + "_" + format_number(static_cast<std::uint64_t>(g)) + ".csv";
}

void write_spectrum(Run& run, const EnsembleResult& result) {
    CsvTable t({"lambda", "seed", "alpha", "quasienergy", "re_eigenvalue", "im_eigenvalue"});
    for (const auto& rec : result.records) {
        if (!rec.ok()) continue;
        for (std::size_t a = 0; a < rec.quasienergies.size(); ++a)
            t.row().add(rec.lambda).add(rec.seed).add(static_cast<std::uint64_t>(a))
                .add(rec.quasienergies[a]).add(rec.eigenvalues[a].real()).add(rec.eigenvalues[a].imag());
    }
    run.write("spectrum.csv", t);
}

void write_levels(Run& run, const EnsembleResult& result) {
    CsvTable hist({"lambda", "bin", "lower", "upper", "center", "count", "density", "poisson", "goe", "coe"});
    CsvTable summary({"lambda", "mean_ratio", "ratio_count", "degenerate_pairs", "degenerate_single",
                      "failed_cells"});
    std::uint64_t pairs = 0, singles = 0;
    for (const auto& agg : result.levels) {
        const auto dens = agg.histogram.densities();
        for (std::size_t b = 0; b < agg.histogram.bins(); ++b) {
            const double c = agg.histogram.center(b);
            hist.row().add(agg.lambda).add(static_cast<std::uint64_t>(b)).add(agg.histogram.lower_edge(b))
                .add(agg.histogram.upper_edge(b)).add(c).add(agg.histogram.counts()[b]).add(dens[b])
                .add(reference_density(ReferenceKind::poisson, c)).add(reference_density(ReferenceKind::goe, c))
                .add(reference_density(ReferenceKind::coe, c));
        }
        summary.row().add(agg.lambda);
        if (agg.ratio_count) summary.add(agg.mean_ratio);
        else summary.add_optional(std::numeric_limits<double>::quiet_NaN());
        summary.add(static_cast<std::uint64_t>(agg.ratio_count))
            .add(static_cast<std::uint64_t>(agg.degenerate_pairs))
            .add(static_cast<std::uint64_t>(agg.degenerate_single))
            .add(static_cast<std::uint64_t>(agg.failed_cells));
        pairs += agg.degenerate_pairs;
        singles += agg.degenerate_single;
    }
    CsvTable refs({"kind", "mean_ratio"});
    for (auto k : {ReferenceKind::poisson, ReferenceKind::goe, ReferenceKind::coe})
        refs.row().add(to_string(k)).add(mean_gap_ratio(k));
    run.write("level_histogram.csv", hist);
    run.write("level_summary.csv", summary);
    run.write("reference_means.csv", refs);
    run.statistics()["degenerate_ratio_pairs"] = pairs;
    run.statistics()["degenerate_ratio_single"] = singles;
}

void write_fractal(Run& run, const EnsembleResult& result) {
    CsvTable states({"lambda", "seed", "realization", "alpha", "quasienergy", "fractal_dimension"});
    std::vector<std::size_t> used(result.plan.lambdas.size(), 0);
    for (const auto& rec : result.records) {
        if (!rec.ok() || !rec.fractal_dimensions) continue;
        ++used[rec.lambda_index];
        const auto& d = *rec.fractal_dimensions;
        for (std::size_t a = 0; a < d.size(); ++a)
            states.row().add(rec.lambda).add(rec.seed).add(static_cast<std::uint64_t>(rec.realization_index))
                .add(static_cast<std::uint64_t>(a)).add(rec.quasienergies[a]).add(d[a]);
    }
    CsvTable curve({"lambda", "mean_fractal_dimension", "realizations"});
    const auto values = aggregate_fractal(result);
    for (std::size_t g = 0; g < values.size(); ++g) {
        curve.row().add(result.plan.lambdas[g]);
        if (used[g]) curve.add(values[g]);
        else curve.add_optional(std::numeric_limits<double>::quiet_NaN());
        curve.add(static_cast<std::uint64_t>(used[g]));
    }
    run.write("fractal_states.csv", states);
    run.write("fractal_curve.csv", curve);
}

void write_cell_dynamics(Run& run, const EnsembleResult& result) {
    CsvTable series({"lambda", "seed", "realization", "m", "magnetization"});
    CsvTable power({"lambda", "seed", "realization", "k", "omega", "power"});
    for (const auto& rec : result.records) {
        if (!rec.ok() || !rec.series) continue;
        const auto r = static_cast<std::uint64_t>(rec.realization_index);
        series.row().add(rec.lambda).add(rec.seed).add(r).add(0).add(rec.series->initial_value);
        for (std::size_t m = 1; m <= rec.series->values.size(); ++m)
            series.row().add(rec.lambda).add(rec.seed).add(r).add(static_cast<std::uint64_t>(m))
                .add(rec.series->values[m - 1]);
        for (std::size_t k = 0; k < rec.power->size(); ++k)
            power.row().add(rec.lambda).add(rec.seed).add(r).add(static_cast<std::uint64_t>(k))
                .add(rec.power->frequency(k)).add(rec.power->values[k]);
    }
    run.write("cell_series.csv", series);
    run.write("cell_power.csv", power);
}

DisorderRealization shared_disorder(const RunConfig& config) {
    return sample_disorder(config.model, shared_seed(config));
}

ModelParams at_lambda(const RunConfig& config, double lambda) {
    return config.model.with_lambda(lambda);
}

}  // namespace

RunReport cmd_spectrum(const RunConfig& config, std::size_t workers) {
    Run run(Command::spectrum, config, workers);
    const auto result = sweep_for(run.config(), {false, false, false}, workers);
    run.add_cells(result);
    write_spectrum(run, result);
    return run.finish();
}

RunReport cmd_levels(const RunConfig& config, std::size_t workers) {
    Run run(Command::levels, config, workers);
    const auto result = sweep_for(run.config(), {true, false, false}, workers);
    run.add_cells(result);
    write_levels(run, result);
    return run.finish();
}

RunReport cmd_fractal(const RunConfig& config, std::size_t workers) {
    Run run(Command::fractal, config, workers);
    const auto result = sweep_for(run.config(), {false, true, false}, workers);
    run.add_cells(result);
    write_fractal(run, result);
    return run.finish();
}

RunReport cmd_dynamics(const RunConfig& config, std::size_t workers) {
    Run run(Command::dynamics, config, workers);
    const RunConfig& c = run.config();
    const auto seed = shared_seed(c);
    const auto disorder = shared_disorder(c);
    const Configuration initial{c.initial_configuration};
    run.add_shared_cells(seed);

    CsvTable series({"lambda", "seed", "m", "magnetization"});
    CsvTable power({"lambda", "seed", "k", "omega", "power"});
    for (double lambda : c.lambdas) {
        const auto params = at_lambda(c, lambda);
        const auto s = magnetization_series(params, disorder, initial, c.periods);
        series.row().add(lambda).add(seed).add(0).add(s.initial_value);
        for (std::size_t m = 1; m <= s.values.size(); ++m)
            series.row().add(lambda).add(seed).add(static_cast<std::uint64_t>(m)).add(s.values[m - 1]);
        const auto p = power_spectrum(s);
        for (std::size_t k = 0; k < p.size(); ++k)
            power.row().add(lambda).add(seed).add(static_cast<std::uint64_t>(k)).add(p.frequency(k)).add(p.values[k]);
    }
    const auto maps = fidelity_map(c.model, disorder, c.lambdas, c.periods, workers);
    CsvTable four({"configuration", "lambda", "fidelity"});
    CsvTable two({"configuration", "lambda", "fidelity"});
    for (Eigen::Index i = 0; i < maps.four_t.rows(); ++i)
        for (std::size_t g = 0; g < c.lambdas.size(); ++g) {
            const auto col = static_cast<Eigen::Index>(g);
            four.row().add(static_cast<std::uint64_t>(i)).add(c.lambdas[g]).add_optional(maps.four_t(i, col));
            two.row().add(static_cast<std::uint64_t>(i)).add(c.lambdas[g]).add_optional(maps.two_t(i, col));
        }
    run.write("series.csv", series);
    run.write("power.csv", power);
    run.write("fidelity_4t.csv", four);
    run.write("fidelity_2t.csv", two);
    run.statistics()["undefined_fidelity_4t"] = maps.undefined_four_t;
    run.statistics()["undefined_fidelity_2t"] = maps.undefined_two_t;
    run.statistics()["undefined_fidelity_note"] =
        "blank fidelity cells: the configuration's power spectrum is identically zero";
    return run.finish();
}

RunReport cmd_walk(const RunConfig& config, std::size_t workers) {
    Run run(Command::walk, config, workers);
    const RunConfig& c = run.config();
    const auto seed = shared_seed(c);
    const auto disorder = shared_disorder(c);
    run.add_shared_cells(seed);
    const auto dim = c.model.dimension();

    std::vector<std::string> header{"period"};
    for (std::size_t l = 0; l < dim; ++l) header.push_back("l" + format_number(static_cast<std::uint64_t>(l)));
    CsvTable support({"lambda", "seed", "threshold", "support_size", "configurations"});
    for (std::size_t g = 0; g < c.lambdas.size(); ++g) {
        const auto walk = walk_populations(at_lambda(c, c.lambdas[g]), disorder, {c.initial_configuration}, c.periods);
        CsvTable t(header);
        for (Eigen::Index m = 0; m < walk.populations.rows(); ++m) {
            t.row().add(static_cast<std::uint64_t>(m));
            for (Eigen::Index l = 0; l < walk.populations.cols(); ++l) t.add(walk.populations(m, l));
        }
        run.write(indexed_name("walk", g), t);
        const auto s = walk_support(walk, c.walk_threshold);
        std::string list;
        for (std::size_t k = 0; k < s.size(); ++k) list += (k ? ";" : "") + format_number(static_cast<std::uint64_t>(s[k]));
        support.row().add(c.lambdas[g]).add(seed).add(c.walk_threshold).add(static_cast<std::uint64_t>(s.size())).add(list);
    }
    run.write("walk_support.csv", support);
    return run.finish();
}

RunReport cmd_heff(const RunConfig& config, std::size_t workers) {
    Run run(Command::heff, config, workers);
    const RunConfig& c = run.config();
    const auto seed = shared_seed(c);
    const auto disorder = shared_disorder(c);
    run.add_shared_cells(seed);
    const auto dim = c.model.dimension();

    std::vector<HermitianOperator> heffs(c.lambdas.size(), HermitianOperator(Matrix::Zero(1, 1)));
    parallel_for_index(c.lambdas.size(), workers, [&](std::size_t g) {
        const auto params = at_lambda(c, c.lambdas[g]);
        heffs[g] = effective_hamiltonian(diagonalize_floquet(build_floquet(params, disorder, c.path), params.period()));
    });

    std::vector<std::string> header{"row"};
    for (std::size_t l = 0; l < dim; ++l) header.push_back("c" + format_number(static_cast<std::uint64_t>(l)));
    CsvTable sparsity({"lambda", "seed", "relative_threshold", "sparsity_fraction", "max_magnitude"});
    for (std::size_t g = 0; g < c.lambdas.size(); ++g) {
        const Eigen::MatrixXd mags = heffs[g].matrix().cwiseAbs();
        CsvTable t(header);
        for (Eigen::Index i = 0; i < mags.rows(); ++i) {
            t.row().add(static_cast<std::uint64_t>(i));
            for (Eigen::Index j = 0; j < mags.cols(); ++j) t.add(mags(i, j));
        }
        run.write(indexed_name("heff", g), t);
        sparsity.row().add(c.lambdas[g]).add(seed).add(c.sparsity_threshold)
            .add(sparsity_fraction(heffs[g], c.sparsity_threshold)).add(mags.maxCoeff());
    }
    run.write("heff_sparsity.csv", sparsity);
    return run.finish();
}

RunReport cmd_sweep(const RunConfig& config, std::size_t workers) {
    Run run(Command::sweep, config, workers);
    const auto result = sweep_for(run.config(), run.config().diagnostics, workers);
    run.add_cells(result);
    write_spectrum(run, result);
    if (result.plan.diagnostics.ratios) write_levels(run, result);
    if (result.plan.diagnostics.fractal) write_fractal(run, result);
    if (result.plan.diagnostics.dynamics) write_cell_dynamics(run, result);
    return run.finish();
}

RunReport run_command(Command command, const RunConfig& config, std::size_t workers) {
    switch (command) {
        case Command::spectrum: return cmd_spectrum(config, workers);
        case Command::levels: return cmd_levels(config, workers);
        case Command::fractal: return cmd_fractal(config, workers);
        case Command::dynamics: return cmd_dynamics(config, workers);
        case Command::walk: return cmd_walk(config, workers);
        case Command::heff: return cmd_heff(config, workers);
        case Command::sweep: return cmd_sweep(config, workers);
    }
    throw ConfigError("unknown command");
}

}  // namespace metamorph
