// parkcp: scenario generation, paired CP ensembles and coverage analysis.
//
//   parkcp gen --kind circuit --config c.json --out trace.csv
//   parkcp sim --config c.json --trace trace.csv --out results.csv --jobs 4
//   parkcp coverage --area area.csv --parked trace.csv --class A --radius 100
//
// Exit codes: 0 success, 1 bad input data, 2 bad usage or configuration.

#include "parkcp/parkcp.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace {

using namespace parkcp;

constexpr int exit_data = 1;
constexpr int exit_usage = 2;

struct UsageError : std::runtime_error
{
    using std::runtime_error::runtime_error;
};

ExperimentConfig load_or_default(const std::string &path)
{
    if (path.empty()) return {};
    if (!std::filesystem::exists(path)) throw UsageError("config file '" + path + "' does not exist");
    return load_experiment(path);
}

std::ifstream open_input(const std::string &path)
{
    std::ifstream in(path);
    if (!in) throw UsageError("cannot open '" + path + "'");
    return in;
}

// Writes the whole document or fails; nothing partial is left behind on error.
void write_file(const std::string &path, const std::string &text)
{
    const std::string tmp = path + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary);
        if (!out) throw std::runtime_error("cannot write '" + path + "'");
        out << text;
        out.close();
        if (!out) throw std::runtime_error("failed writing '" + path + "'");
    }
    std::filesystem::rename(tmp, path);
}

std::string steps_path(const std::string &out)
{
    std::filesystem::path p(out);
    if (p.extension() == ".csv") p.replace_extension();
    return p.string() + ".steps.csv";
}

struct GenArgs
{
    std::string kind;
    std::string config;
    std::string out;
    std::optional<std::uint64_t> seed;
};

int cmd_gen(const GenArgs &args)
{
    auto cfg = load_or_default(args.config);
    auto &sc = cfg.run.scenario;
    if (!args.kind.empty()) sc.kind = parse_scenario_kind(args.kind);
    if (args.seed) sc.seed = *args.seed;
    sc.validate();
    const auto trace = generate(sc);
    write_file(args.out, serialize_trace(trace, sc.sample_time));
    int parked = 0;
    for (const auto &r : trace) parked += r.kind == MotionKind::Parked;
    std::cout << "wrote " << args.out << ": " << trace.size() << " vehicles (" << trace.size() - parked
              << " moving, " << parked << " parked)\n";
    return 0;
}

struct SimArgs
{
    std::string config;
    std::string trace;
    std::string out;
    std::optional<std::uint64_t> seed;
    int jobs = 1;
    std::string algorithm;
    std::string mode;
    std::vector<double> sigma_r;
    std::vector<double> zone;
    std::optional<int> n_runs;
    bool dump_steps = false;
};

int cmd_sim(const SimArgs &args)
{
    auto cfg = load_or_default(args.config);
    if (args.seed) {
        cfg.run.seed = *args.seed;
        cfg.run.scenario.seed = *args.seed;
    }
    if (!args.algorithm.empty()) cfg.plan.algorithms = parse_algorithms(args.algorithm);
    if (!args.mode.empty()) cfg.modes = parse_modes(args.mode);
    if (!args.sigma_r.empty()) cfg.plan.sigma_ranges = args.sigma_r;
    if (!args.zone.empty()) cfg.plan.zones = args.zone;
    if (args.n_runs) cfg.run.n_runs = *args.n_runs;
    cfg.plan.keep_steps = args.dump_steps;
    if (args.jobs < 1) throw UsageError("--jobs must be at least 1");

    std::vector<VehicleRecord> trace;
    if (args.trace.empty()) {
        trace = generate(cfg.run.scenario);
    } else {
        auto in = open_input(args.trace);
        auto data = read_trace(in);
        if (data.sample_time && std::abs(*data.sample_time - cfg.run.scenario.sample_time) > 1e-12)
            throw ConfigError("trace was sampled at T_s=" + detail::format_double(*data.sample_time) +
                              " but the configuration uses T_s=" +
                              detail::format_double(cfg.run.scenario.sample_time));
        trace = std::move(data.vehicles);
    }

    const auto summary = ensemble(cfg.run, trace, cfg.plan, args.jobs);
    std::ostringstream csv;
    write_results_csv(csv, summary, cfg.modes);
    write_file(args.out, csv.str());
    if (args.dump_steps) {
        std::ostringstream steps;
        write_steps_csv(steps, summary, cfg.modes);
        write_file(steps_path(args.out), steps.str());
    }
    print_summary(std::cout, summary);
    return 0;
}

struct CoverageArgs
{
    std::string config;
    std::string area;
    std::string parked;
    std::vector<double> radius;
    std::string dsrc_class;
    std::optional<double> cell_size;
    std::string out;
};

int cmd_coverage(const CoverageArgs &args)
{
    auto cfg = load_or_default(args.config);
    std::vector<double> radii = args.radius;
    if (!args.dsrc_class.empty()) {
        auto c = dsrc_class_from_string(args.dsrc_class);
        if (!c) throw UsageError("--class must be one of A, B, C, D");
        radii.insert(radii.begin(), dsrc_radius(*c));
    }
    if (radii.empty()) throw UsageError("give at least one --radius or a --class");

    TransitArea area;
    area.cell_size = args.cell_size.value_or(cfg.cell_size);
    {
        auto in = open_input(args.area);
        area.polygons = read_area(in);
    }
    if (area.polygons.empty()) throw ValidationError("area file '" + args.area + "' contains no polygons");
    std::vector<Position2D> parked;
    {
        auto in = open_input(args.parked);
        parked = read_parked(in);
    }

    std::ostringstream csv;
    csv << coverage_header << '\n';
    for (double r : radii) write_coverage_row(csv, r, coverage_report(area, parked, r));
    if (args.out.empty())
        std::cout << csv.str();
    else
        write_file(args.out, csv.str());
    return 0;
}

int cmd_defaults(const std::string &out)
{
    const std::string text = experiment_to_json(ExperimentConfig{}).dump(2) + "\n";
    if (out.empty())
        std::cout << text;
    else
        write_file(out, text);
    return 0;
}

} // namespace

int main(int argc, char **argv)
{
    CLI::App app{"parkcp: cooperative positioning with parked-car anchors"};
    app.require_subcommand(1);
    app.set_help_all_flag("--help-all", "Show help for every subcommand");

    GenArgs gen;
    auto *gen_cmd = app.add_subcommand("gen", "Generate a synthetic mobility trace");
    gen_cmd->add_option("--kind", gen.kind, "Scenario kind")->check(CLI::IsMember({"circuit", "town"}));
    gen_cmd->add_option("--config", gen.config, "JSON experiment manifest");
    gen_cmd->add_option("--out", gen.out, "Trace CSV to write")->required();
    gen_cmd->add_option("--seed", gen.seed, "Scenario seed (overrides the manifest)");

    SimArgs sim;
    auto *sim_cmd = app.add_subcommand("sim", "Run paired Traditional/Proposed ensembles");
    sim_cmd->add_option("--config", sim.config, "JSON experiment manifest");
    sim_cmd->add_option("--trace", sim.trace, "Trace CSV (generated from the manifest when omitted)");
    sim_cmd->add_option("--out", sim.out, "Results CSV to write")->required();
    sim_cmd->add_option("--seed", sim.seed, "Master seed (overrides the manifest)");
    sim_cmd->add_option("--jobs", sim.jobs, "Worker threads")->capture_default_str();
    sim_cmd->add_option("--algorithm", sim.algorithm, "Localiser")->check(CLI::IsMember({"gcpso", "ekf", "both"}));
    sim_cmd->add_option("--mode", sim.mode, "Reported CP modes")
        ->check(CLI::IsMember({"traditional", "proposed", "both"}));
    sim_cmd->add_option("--sigma-r", sim.sigma_r, "Ranging sigma in meters (repeatable)")->expected(1)
        ->multi_option_policy(CLI::MultiOptionPolicy::TakeAll);
    sim_cmd->add_option("--zone", sim.zone, "Communication radius in meters (repeatable)")->expected(1)
        ->multi_option_policy(CLI::MultiOptionPolicy::TakeAll);
    sim_cmd->add_option("--n-runs", sim.n_runs, "Paired runs per cell");
    sim_cmd->add_flag("--dump-steps", sim.dump_steps, "Also write per-step errors to <out>.steps.csv");

    CoverageArgs cov;
    auto *cov_cmd = app.add_subcommand("coverage", "Stationary-car coverage of a transit area");
    cov_cmd->add_option("--config", cov.config, "JSON experiment manifest (coverage.cell_size)");
    cov_cmd->add_option("--area", cov.area, "Transit area polygons CSV (polygon,x,y)")->required();
    cov_cmd->add_option("--parked", cov.parked, "Parked positions CSV (x,y) or a trace")->required();
    cov_cmd->add_option("--radius", cov.radius, "Communication radius in meters (repeatable)")->expected(1)
        ->multi_option_policy(CLI::MultiOptionPolicy::TakeAll);
    cov_cmd->add_option("--class", cov.dsrc_class, "DSRC device class")->check(CLI::IsMember({"A", "B", "C", "D"}));
    cov_cmd->add_option("--cell-size", cov.cell_size, "Raster cell in meters");
    cov_cmd->add_option("--out", cov.out, "Report CSV (stdout when omitted)");

    std::string defaults_out;
    auto *def_cmd = app.add_subcommand("defaults", "Print the default experiment manifest");
    def_cmd->add_option("--out", defaults_out, "File to write instead of stdout");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp &e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp &e) {
        return app.exit(e);
    } catch (const CLI::ParseError &e) {
        app.exit(e);
        return exit_usage;
    }

    try {
        if (*gen_cmd) return cmd_gen(gen);
        if (*sim_cmd) return cmd_sim(sim);
        if (*cov_cmd) return cmd_coverage(cov);
        if (*def_cmd) return cmd_defaults(defaults_out);
    } catch (const UsageError &e) {
        std::cerr << "error: " << e.what() << '\n';
        return exit_usage;
    } catch (const ConfigError &e) {
        std::cerr << "config error: " << e.what() << '\n';
        return exit_usage;
    } catch (const ParseError &e) {
        std::cerr << "parse error: " << e.what() << '\n';
        return exit_data;
    } catch (const std::exception &e) {
        std::cerr << "error: " << e.what() << '\n';
        return exit_data;
    }
    return exit_usage;
}
