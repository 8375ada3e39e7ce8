#include "qcool/cli.hpp"

#include "qcool/json_io.hpp"
#include "qcool/repro.hpp"
#include "qcool/rng.hpp"
#include "qcool/scaling.hpp"
#include "qcool/table.hpp"
#include "qcool/walk.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <iostream>
#include <numbers>
#include <optional>

namespace qcool {

namespace {

struct GlobalOptions {
    std::uint64_t seed = 42;
    std::string out_dir;
    std::string format = "csv";
    int threads = 0;

    TableFormat table_format() const {
        return format == "json" ? TableFormat::json : TableFormat::csv;
    }
};

void emit_table(const ResultTable& table, const GlobalOptions& global) {
    if (global.out_dir.empty()) {
        std::cout << (global.table_format() == TableFormat::csv ? to_csv(table)
                                                                : to_json_string(table));
    } else {
        const auto path = write_table(table, global.out_dir, global.table_format());
        std::cout << "wrote " << path.string() << "\n";
    }
}

ResultTable trajectory_table(const std::vector<Trajectory>& trajectories, bool with_traj_column) {
    ResultTable table;
    table.schema = "walk";
    if (with_traj_column) table.columns.push_back("traj");
    for (const char* c : {"step", "outcome_bit", "x", "energy", "alive", "resets"}) {
        table.columns.push_back(c);
    }
    for (std::size_t i = 0; i < trajectories.size(); ++i) {
        for (const auto& rec : trajectories[i].steps) {
            std::vector<ResultTable::Cell> row;
            if (with_traj_column) row.push_back(static_cast<std::int64_t>(i));
            row.push_back(static_cast<std::int64_t>(rec.step));
            row.push_back(static_cast<std::int64_t>(rec.outcome));
            row.push_back(static_cast<std::int64_t>(rec.x));
            row.push_back(rec.energy);
            row.push_back(static_cast<std::int64_t>(rec.alive ? 1 : 0));
            row.push_back(rec.resets);
            table.rows.push_back(std::move(row));
        }
    }
    return table;
}

nlohmann::json summary_to_json(const MCSummary& summary, const CostEstimate& costs) {
    nlohmann::json j;
    j["mean_fidelity"] = summary.mean_fidelity;
    j["sample_std"] = summary.sample_std;
    j["error_bar"] = summary.error_bar;
    j["fraction_bound"] = summary.fraction_reached_bound;
    j["n_samples"] = summary.n_samples;
    j["n_total"] = summary.n_total;
    j["pred"] = costs.pred;
    j["c_bound"] = costs.c_bound;
    j["c_abs"] = costs.c_abs;
    j["steps_mean"] = summary.steps.mean;
    j["steps_stddev"] = summary.steps.stddev;
    j["steps_min"] = summary.steps.min;
    j["steps_max"] = summary.steps.max;
    return j;
}

std::vector<double> parse_double_list(const std::string& text) {
    std::vector<double> values;
    std::size_t start = 0;
    while (start < text.size()) {
        const auto comma = text.find(',', start);
        const std::string item = text.substr(start, comma == std::string::npos ? comma : comma - start);
        if (!item.empty()) values.push_back(std::stod(item));
        if (comma == std::string::npos) break;
        start = comma + 1;
    }
    return values;
}

void stamp_mc(ResultTable& table, const GlobalOptions& global) {
    table.add_provenance("schema", table.schema);
    table.add_provenance("seed", std::to_string(global.seed));
    table.add_provenance("version", "1.0.0");
}

}  // namespace

int cli_main(std::vector<std::string> args) {
    CLI::App app{"Feedback-driven algorithmic cooling simulator"};
    app.require_subcommand(1);

    GlobalOptions global;
    app.add_option("--seed", global.seed, "Master seed for every stochastic component");
    app.add_option("--out", global.out_dir, "Output directory; print to stdout when omitted");
    app.add_option("--format", global.format, "Table format: csv or json")
        ->check(CLI::IsMember({"csv", "json"}));
    app.add_option("--threads", global.threads, "Worker threads (0 = hardware)");

    // module
    auto* module_cmd = app.add_subcommand("module", "Apply one cooling module and print the outcome");
    std::string ham = "sigma_z", state_desc = "1:1";
    double theta_deg = 10.0;
    double evolution_time = std::numbers::pi / 2.0;
    module_cmd->add_option("--hamiltonian", ham, "sigma_z, sigma_x, identity, or a JSON matrix file");
    module_cmd->add_option("--state", state_desc, "'a:b' ratio, 'alpha,beta', or a JSON state file");
    module_cmd->add_option("--theta-deg", theta_deg, "Energy bias in degrees");
    module_cmd->add_option("--t", evolution_time, "Evolution time");

    // walk
    auto* walk_cmd = app.add_subcommand("walk", "Sample stochastic feedback trajectories");
    int walk_steps = 3;
    long walk_traj = 1;
    std::string strategy_name = "evaporative";
    int reset_threshold = -1;
    walk_cmd->add_option("--hamiltonian", ham);
    walk_cmd->add_option("--state", state_desc);
    walk_cmd->add_option("--theta-deg", theta_deg);
    walk_cmd->add_option("--t", evolution_time);
    walk_cmd->add_option("--steps", walk_steps, "Cooling steps per trajectory");
    walk_cmd->add_option("--traj", walk_traj, "Number of trajectories");
    walk_cmd->add_option("--strategy", strategy_name)->check(CLI::IsMember({"evaporative", "recycling"}));
    walk_cmd->add_option("--threshold", reset_threshold, "Boundary position (negative)");

    // enumerate
    auto* enum_cmd = app.add_subcommand("enumerate", "Exact outcome-tree ensemble tables");
    enum_cmd->add_option("--hamiltonian", ham);
    enum_cmd->add_option("--state", state_desc);
    enum_cmd->add_option("--theta-deg", theta_deg);
    enum_cmd->add_option("--t", evolution_time);
    enum_cmd->add_option("--steps", walk_steps);
    enum_cmd->add_option("--strategy", strategy_name)->check(CLI::IsMember({"evaporative", "recycling"}));
    enum_cmd->add_option("--threshold", reset_threshold);

    // mc
    auto* mc_cmd = app.add_subcommand("mc", "Bounded two-level Monte Carlo cooling runs");
    double gap = 0.02, population = 0.2, mc_t = 1.0, mc_gamma = 0.0, c1 = 2.7;
    long samples = 10000;
    bool filter_bound = false;
    bool refresh = false;
    double assumed_gap = 0.0;
    std::string sweep_gaps, sweep_assumed, refresh_cells;
    double refresh_success = 0.95;
    mc_cmd->add_option("--gap", gap, "True energy gap");
    mc_cmd->add_option("--p", population, "Initial ground population");
    mc_cmd->add_option("--t", mc_t, "Evolution time");
    mc_cmd->add_option("--gamma", mc_gamma, "Energy bias gamma");
    mc_cmd->add_option("--c1", c1, "Cost constant");
    mc_cmd->add_option("--samples", samples, "Trajectories per run");
    mc_cmd->add_flag("--filter-bound", filter_bound, "Exclude bound-reaching trajectories from the mean");
    mc_cmd->add_option("--assumed-gap", assumed_gap, "Compute boundaries from this gap instead");
    mc_cmd->add_option("--sweep-gaps", sweep_gaps, "Comma list of gaps; emits a CSV sweep");
    mc_cmd->add_option("--sweep-assumed", sweep_assumed,
                       "Comma list of assumed gaps; emits the mismatched-boundary curve");
    mc_cmd->add_flag("--refresh", refresh, "Optimal-refresh stopping-time run");
    mc_cmd->add_option("--refresh-cells", refresh_cells,
                       "gap:p pairs, e.g. '0.01:0.1,0.02:0.2'; fits the cost constant");
    mc_cmd->add_option("--refresh-success", refresh_success, "Ground population that stops a refresh run");

    // repro
    auto* repro_cmd = app.add_subcommand("repro", "Reproduce a named figure scenario");
    std::string scenario_name;
    std::string config_path;
    bool list_scenarios = false;
    bool check = false;
    repro_cmd->add_option("scenario", scenario_name, "One of the builtin scenario names");
    repro_cmd->add_option("--config", config_path, "Scenario config file (key = value lines)");
    repro_cmd->add_flag("--list", list_scenarios, "List builtin scenarios");
    repro_cmd->add_flag("--check", check, "Verify the table's structural claims; exit 2 on failure");

    // equiv
    auto* equiv_cmd = app.add_subcommand("equiv", "Beam-path vs circuit equivalence residual");
    int trials = 1000;
    equiv_cmd->add_option("--trials", trials, "Random (alpha, beta, theta) draws");
    equiv_cmd->add_flag("--check", check, "Exit 2 unless the residual stays below 1e-12");

    std::vector<const char*> argv;
    argv.reserve(args.size() + 1);
    argv.push_back("qcool");
    for (const auto& a : args) argv.push_back(a.c_str());

    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        if (module_cmd->parsed()) {
            const auto h = resolve_operator(ham);
            const auto spec = eigendecompose(h);
            const auto params = CoolingParams::from_theta_deg(evolution_time, theta_deg);
            const auto state = build_initial_state(state_desc, spec);
            const ModuleOutcome out = apply_module(state, spec, params);
            std::cout << module_outcome_to_json(out).dump(2) << "\n";
            return 0;
        }

        if (walk_cmd->parsed()) {
            const auto h = resolve_operator(ham);
            const auto spec = eigendecompose(h);
            const auto params = CoolingParams::from_theta_deg(evolution_time, theta_deg);
            const auto state = build_initial_state(state_desc, spec);
            const Strategy strategy{strategy_name == "recycling" ? StrategyKind::recycling
                                                                 : StrategyKind::evaporative,
                                    reset_threshold};
            std::vector<Trajectory> trajectories;
            trajectories.reserve(walk_traj);
            for (long i = 0; i < walk_traj; ++i) {
                trajectories.push_back(run_trajectory(state, spec, params, strategy, walk_steps,
                                                      derive_stream_seed(global.seed, i)));
            }
            ResultTable table = trajectory_table(trajectories, walk_traj > 1);
            table.add_provenance("schema", table.schema);
            table.add_provenance("seed", std::to_string(global.seed));
            table.add_provenance("version", "1.0.0");
            emit_table(table, global);
            return 0;
        }

        if (enum_cmd->parsed()) {
            const auto h = resolve_operator(ham);
            const auto spec = eigendecompose(h);
            const auto params = CoolingParams::from_theta_deg(evolution_time, theta_deg);
            const auto state = build_initial_state(state_desc, spec);
            const Strategy strategy{strategy_name == "recycling" ? StrategyKind::recycling
                                                                 : StrategyKind::evaporative,
                                    reset_threshold};
            const auto ensemble = enumerate_outcome_tree(state, spec, params, strategy, walk_steps);
            ResultTable table;
            table.schema = "ensemble";
            table.columns = {"step", "yield", "mean_energy", "ground_prob"};
            for (const auto& row : ensemble.per_step) {
                table.rows.push_back({static_cast<std::int64_t>(row.step), row.total_probability,
                                      row.mean_energy, row.ground_probability});
            }
            table.add_provenance("schema", table.schema);
            table.add_provenance("seed", std::to_string(global.seed));
            table.add_provenance("version", "1.0.0");
            emit_table(table, global);
            return 0;
        }

        if (mc_cmd->parsed()) {
            MCConfig config;
            config.model = TwoLevelModel::from_gap(gap, population, mc_t, mc_gamma);
            config.c1 = c1;
            config.n_samples = samples;
            config.master_seed = global.seed;
            config.filter_bound_reachers = filter_bound;
            config.n_threads = global.threads;

            if (refresh || !refresh_cells.empty()) {
                std::vector<std::pair<double, double>> cells;
                if (!refresh_cells.empty()) {
                    std::size_t start = 0;
                    const std::string& text = refresh_cells;
                    while (start < text.size()) {
                        const auto comma = text.find(',', start);
                        const std::string item =
                            text.substr(start, comma == std::string::npos ? comma : comma - start);
                        const auto colon = item.find(':');
                        if (colon == std::string::npos) {
                            throw std::invalid_argument("--refresh-cells items must be gap:p");
                        }
                        cells.emplace_back(std::stod(item.substr(0, colon)), std::stod(item.substr(colon + 1)));
                        if (comma == std::string::npos) break;
                        start = comma + 1;
                    }
                } else {
                    cells = {{gap, population}};
                }
                const RefreshFit fit = fit_refresh_scaling(cells, mc_t, samples, global.seed,
                                                           refresh_success, global.threads);
                nlohmann::json j;
                j["c1"] = fit.c1;
                j["success_population"] = refresh_success;
                nlohmann::json jcells = nlohmann::json::array();
                for (const auto& cell : fit.cells) {
                    jcells.push_back({{"gap", cell.gap},
                                      {"t", cell.t},
                                      {"p", cell.p},
                                      {"mean_steps", cell.mean_steps},
                                      {"std_steps", cell.std_steps},
                                      {"n_samples", cell.n_samples},
                                      {"cell_c1", cell.cell_c1}});
                }
                j["cells"] = std::move(jcells);
                std::cout << j.dump(2) << "\n";
                return 0;
            }

            if (!sweep_gaps.empty() || !sweep_assumed.empty()) {
                ResultTable table;
                const bool mismatch = !sweep_assumed.empty();
                table.schema = mismatch ? "mc_mismatch" : "mc_sweep";
                table.columns = {"gap",       "t",           "p",         "c1",
                                 "pred",      "c_bound",     "c_abs",     "n_samples",
                                 "mean_fidelity", "error_bar", "fraction_bound", "seed"};
                if (mismatch) table.columns.insert(table.columns.begin(), "assumed_gap");
                for (const double value : parse_double_list(mismatch ? sweep_assumed : sweep_gaps)) {
                    MCConfig run = config;
                    MCSummary summary;
                    CostEstimate costs;
                    double row_gap = value;
                    if (mismatch) {
                        summary = run_mismatched_bounds_mc(gap, value, run);
                        costs = predicted_costs(value, mc_t, population, c1);
                        row_gap = gap;
                    } else {
                        run.model = TwoLevelModel::from_gap(value, population, mc_t, mc_gamma);
                        summary = run_bounded_mc(run);
                        costs = run.costs();
                    }
                    std::vector<ResultTable::Cell> row;
                    if (mismatch) row.push_back(value);
                    row.push_back(row_gap);
                    row.push_back(mc_t);
                    row.push_back(population);
                    row.push_back(c1);
                    row.push_back(static_cast<std::int64_t>(costs.pred));
                    row.push_back(static_cast<std::int64_t>(costs.c_bound));
                    row.push_back(static_cast<std::int64_t>(costs.c_abs));
                    row.push_back(static_cast<std::int64_t>(summary.n_total));
                    row.push_back(summary.mean_fidelity);
                    row.push_back(summary.error_bar);
                    row.push_back(summary.fraction_reached_bound);
                    row.push_back(static_cast<std::int64_t>(global.seed));
                    table.rows.push_back(std::move(row));
                }
                stamp_mc(table, global);
                emit_table(table, global);
                return 0;
            }

            MCSummary summary;
            CostEstimate costs;
            if (assumed_gap > 0.0) {
                summary = run_mismatched_bounds_mc(gap, assumed_gap, config);
                costs = predicted_costs(assumed_gap, mc_t, population, c1);
            } else {
                summary = run_bounded_mc(config);
                costs = config.costs();
            }
            std::cout << summary_to_json(summary, costs).dump(2) << "\n";
            return 0;
        }

        if (repro_cmd->parsed()) {
            if (list_scenarios) {
                for (const auto& name : builtin_scenario_names()) std::cout << name << "\n";
                return 0;
            }
            Scenario scenario;
            if (!config_path.empty()) {
                scenario = parse_scenario_config(config_path);
            } else if (!scenario_name.empty()) {
                scenario = builtin_scenario(scenario_name);
            } else {
                std::cerr << "repro: give a scenario name, --config, or --list\n";
                return 1;
            }
            const auto tables = run_scenario(scenario, global.seed);
            for (const auto& table : tables) emit_table(table, global);
            if (check) {
                const auto failures = check_scenario_tables(scenario, tables);
                for (const auto& f : failures) std::cerr << "check failed: " << f << "\n";
                if (!failures.empty()) return 2;
                std::cout << "checks passed\n";
            }
            return 0;
        }

        if (equiv_cmd->parsed()) {
            const double residual = optical_equivalence_sweep(trials, global.seed);
            nlohmann::json j;
            j["trials"] = trials;
            j["max_residual"] = residual;
            std::cout << j.dump(2) << "\n";
            if (check && !(residual < 1e-12)) {
                std::cerr << "check failed: residual " << residual << "\n";
                return 2;
            }
            return 0;
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 1;
}

}  // namespace qcool
