#include "cli.hpp"

#include <iostream>
#include <optional>

#include <CLI11.hpp>

#include "metamorph/commands.hpp"
#include "metamorph/errors.hpp"
#include "metamorph/parallel.hpp"

namespace metamorph {

namespace {

struct Overrides {
    std::string config_path;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> out;
    std::optional<int> sites;
    std::vector<double> lambdas;
    std::optional<std::size_t> realizations;
    std::optional<int> periods;
    std::optional<std::size_t> bins;
    std::optional<std::uint32_t> initial;
    std::optional<std::string> propagator;
    bool print_config = false;
};

void add_options(CLI::App& sub, Overrides& o) {
    sub.add_option("--config", o.config_path, "JSON run configuration");
    sub.add_option("--seed", o.seed, "master seed");
    sub.add_option("--out", o.out, "output directory");
    sub.add_option("--N", o.sites, "number of sites (even, 2..12)");
    sub.add_option("--lambdas", o.lambdas, "comma-separated lambda grid")->delimiter(',');
    sub.add_option("--realizations", o.realizations, "disorder realizations per lambda");
    sub.add_option("--periods", o.periods, "drive periods for time series and walks");
    sub.add_option("--bins", o.bins, "gap-ratio histogram bins");
    sub.add_option("--initial", o.initial, "initial configuration index");
    sub.add_option("--propagator", o.propagator, "structured | dense");
    sub.add_flag("--print-config", o.print_config, "print the resolved configuration and exit");
}

RunConfig resolve(const Overrides& o) {
    RunConfig c = o.config_path.empty() ? RunConfig{} : load_config(o.config_path);
    if (o.sites) c.model = [&] {
        ModelParams m = c.model;
        m.sites = *o.sites;
        return m;
    }();
    if (o.seed) c.master_seed = *o.seed;
    if (o.out) c.output_directory = *o.out;
    if (!o.lambdas.empty()) c.lambdas = o.lambdas;
    if (o.realizations) c.realizations = *o.realizations;
    if (o.periods) c.periods = *o.periods;
    if (o.bins) c.histogram_bins = *o.bins;
    if (o.initial) c.initial_configuration = *o.initial;
    if (o.propagator) {
        if (*o.propagator == "dense") c.path = PropagatorPath::dense;
        else if (*o.propagator == "structured") c.path = PropagatorPath::structured;
        else throw ConfigError("--propagator must be 'structured' or 'dense'");
    }
    c.validate();
    return c;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Exact-diagonalization datasets for a three-segment driven spin chain"};
    app.require_subcommand(1);
    Overrides o;
    std::vector<std::pair<Command, CLI::App*>> subs;
    for (Command c : {Command::spectrum, Command::levels, Command::fractal, Command::dynamics,
                      Command::walk, Command::heff, Command::sweep}) {
        CLI::App* sub = app.add_subcommand(std::string(to_string(c)));
        add_options(*sub, o);
        subs.emplace_back(c, sub);
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::Success&) {
        out << app.help();
        return 0;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << '\n';
        return 2;
    }

    try {
        Command command = Command::spectrum;
        for (auto& [c, sub] : subs)
            if (sub->parsed()) command = c;
        const RunConfig config = resolve(o);
        if (o.print_config) {
            out << to_json(config).dump(2) << '\n';
            return 0;
        }
        const std::size_t workers = default_worker_count();
        const RunReport report = run_command(command, config, workers);
        for (const auto& f : report.files) out << f.name << ' ' << f.rows << " rows " << f.sha256 << '\n';
        out << "manifest " << report.manifest.string() << '\n';
        if (report.failed_cells) {
            err << "error: " << report.failed_cells << " cell(s) failed validation; see manifest\n";
            return 3;
        }
        return 0;
    } catch (const ConfigError& e) {
        err << "config error: " << e.what() << '\n';
        return 2;
    } catch (const ArgumentError& e) {
        err << "config error: " << e.what() << '\n';
        return 2;
    } catch (const ValidationError& e) {
        err << "validation error: " << e.what() << '\n';
        return 3;
    } catch (const IoError& e) {
        err << "i/o error: " << e.what() << '\n';
        return 1;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return 1;
    }
}

}  // namespace metamorph
