#include "qcool/repro.hpp"

#include "qcool/json_io.hpp"
#include "qcool/rng.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace qcool {

namespace {

constexpr double kHalfPi = std::numbers::pi / 2.0;

std::vector<double> linspace_deg(double lo, double hi, double step) {
    std::vector<double> grid;
    for (double v = lo; v <= hi + 1e-9; v += step) grid.push_back(v);
    return grid;
}

std::string strategy_name(const Strategy& s) {
    return s.kind == StrategyKind::evaporative ? "evaporative" : "recycling";
}

std::vector<std::string> split(const std::string& text, char sep) {
    std::vector<std::string> parts;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, sep)) parts.push_back(item);
    return parts;
}

std::string trim(const std::string& s) {
    const auto begin = s.find_first_not_of(" \t\r\n");
    if (begin == std::string::npos) return "";
    const auto end = s.find_last_not_of(" \t\r\n");
    return s.substr(begin, end - begin + 1);
}

// Shared provenance block for every emitted table.
void stamp(ResultTable& table, const Scenario& scenario, std::uint64_t master_seed) {
    table.add_provenance("schema", table.schema);
    table.add_provenance("scenario", scenario.name);
    table.add_provenance("seed", std::to_string(master_seed));
    char hash[32];
    std::snprintf(hash, sizeof(hash), "%016llx",
                  static_cast<unsigned long long>(fnv1a64(scenario.canonical_description())));
    table.add_provenance("scenario_hash", hash);
    table.add_provenance("version", "1.0.0");
}

struct PreparedScenario {
    HermitianOperator hamiltonian;
    SpectralDecomposition spec;
    QuantumState initial;
};

PreparedScenario prepare(const std::string& hamiltonian, const std::string& initial) {
    HermitianOperator h = resolve_operator(hamiltonian);
    SpectralDecomposition spec = eigendecompose(h);
    QuantumState state = build_initial_state(initial, spec);
    return PreparedScenario{std::move(h), std::move(spec), std::move(state)};
}

}  // namespace

QuantumState build_initial_state(const std::string& desc, const SpectralDecomposition& spec) {
    if (desc.find(':') != std::string::npos) {
        const auto parts = split(desc, ':');
        if (parts.size() != 2) throw std::invalid_argument("initial state ratio must be 'a:b'");
        if (spec.dim() != 2) throw std::invalid_argument("ratio initial states need a two-level Hamiltonian");
        const double we = std::stod(parts[0]);
        const double wg = std::stod(parts[1]);
        if (we < 0.0 || wg < 0.0 || we + wg <= 0.0) {
            throw std::invalid_argument("initial state ratio weights must be nonnegative");
        }
        const double alpha = std::sqrt(we / (we + wg));
        const double beta = std::sqrt(wg / (we + wg));
        // Eigenvectors come out ascending: column 0 is |g>, column 1 is |e>.
        return QuantumState::pure_normalized(alpha * spec.eigenvector(1) + beta * spec.eigenvector(0));
    }
    if (desc.find(',') != std::string::npos) {
        const auto parts = split(desc, ',');
        if (parts.size() != 2 || spec.dim() != 2) {
            throw std::invalid_argument("amplitude initial states are 'alpha,beta' over a two-level Hamiltonian");
        }
        const double alpha = std::stod(parts[0]);
        const double beta = std::stod(parts[1]);
        return QuantumState::pure_normalized(alpha * spec.eigenvector(1) + beta * spec.eigenvector(0));
    }
    if (std::filesystem::exists(desc)) {
        std::ifstream in(desc);
        nlohmann::json j;
        in >> j;
        return state_from_json(j);
    }
    throw std::invalid_argument("initial state '" + desc +
                                "' is neither 'a:b', 'alpha,beta', nor an existing state file");
}

std::string Scenario::canonical_description() const {
    std::ostringstream out;
    out << name << "|" << hamiltonian << "|" << initial << "|t=" << format_double(t) << "|steps=" << steps
        << "|strategy=" << strategy_name(strategy) << "|threshold=" << strategy.reset_threshold
        << "|theta_deg=";
    for (double th : theta_grid_deg) out << format_double(th) << ",";
    return out.str();
}

std::vector<std::string> builtin_scenario_names() {
    return {"fig4a_map",    "fig4b_beta_sweep", "fig4c_theta_sweep",
            "fig5_tradeoff", "figS1_single_module", "figS4_ten_steps"};
}

Scenario builtin_scenario(const std::string& name) {
    Scenario s;
    s.name = name;
    s.t = kHalfPi;
    if (name == "fig4a_map") {
        s.theta_grid_deg = linspace_deg(0.0, 90.0, 10.0);
        s.steps = 3;
    } else if (name == "fig4b_beta_sweep") {
        s.theta_grid_deg = {10.0};
        s.steps = 3;
    } else if (name == "fig4c_theta_sweep") {
        s.initial = "4:1";
        s.theta_grid_deg = linspace_deg(0.0, 90.0, 5.0);
        s.steps = 3;
    } else if (name == "fig5_tradeoff") {
        s.theta_grid_deg = linspace_deg(0.0, 90.0, 10.0);
        s.steps = 3;
    } else if (name == "figS1_single_module") {
        s.theta_grid_deg = linspace_deg(0.0, 90.0, 10.0);
        s.steps = 1;
    } else if (name == "figS4_ten_steps") {
        s.theta_grid_deg = {10.0};
        s.steps = 10;
    } else {
        throw std::invalid_argument("unknown scenario '" + name + "'");
    }
    return s;
}

Scenario parse_scenario_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config " + path.string());

    Scenario s;
    s.name = path.stem().string();
    s.t = kHalfPi;

    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const std::string stripped = trim(line);
        if (stripped.empty() || stripped[0] == '#') continue;
        const auto eq = stripped.find('=');
        if (eq == std::string::npos) {
            throw std::invalid_argument("config line " + std::to_string(lineno) + ": expected key = value");
        }
        const std::string key = trim(stripped.substr(0, eq));
        const std::string value = trim(stripped.substr(eq + 1));
        if (key == "name") {
            s.name = value;
        } else if (key == "hamiltonian") {
            s.hamiltonian = value;
        } else if (key == "initial") {
            s.initial = value;
        } else if (key == "t") {
            s.t = std::stod(value);
        } else if (key == "theta_deg") {
            s.theta_grid_deg.clear();
            for (const auto& item : split(value, ',')) s.theta_grid_deg.push_back(std::stod(trim(item)));
        } else if (key == "steps") {
            s.steps = std::stoi(value);
        } else if (key == "strategy") {
            if (value == "evaporative") {
                s.strategy.kind = StrategyKind::evaporative;
            } else if (value == "recycling") {
                s.strategy.kind = StrategyKind::recycling;
            } else {
                throw std::invalid_argument("config: strategy must be evaporative or recycling");
            }
        } else if (key == "reset_threshold") {
            s.strategy.reset_threshold = std::stoi(value);
        } else {
            throw std::invalid_argument("config line " + std::to_string(lineno) + ": unknown key '" + key + "'");
        }
    }
    if (s.theta_grid_deg.empty()) throw std::invalid_argument("config: theta_deg must not be empty");
    return s;
}

namespace {

ResultTable run_energy_map(const Scenario& scenario) {
    ResultTable table;
    table.schema = scenario.name;
    table.columns = {"hamiltonian", "ratio", "theta_deg", "step", "mean_energy", "yield"};
    for (const std::string& ham : {std::string("sigma_z"), std::string("sigma_x")}) {
        for (const std::string& ratio : {std::string("4:1"), std::string("1:1"), std::string("1:4")}) {
            const PreparedScenario prep = prepare(ham, ratio);
            for (double theta_deg : scenario.theta_grid_deg) {
                const auto params = CoolingParams::from_theta_deg(scenario.t, theta_deg);
                const auto ensemble = enumerate_outcome_tree(prep.initial, prep.spec, params,
                                                             scenario.strategy, scenario.steps);
                for (const auto& row : ensemble.per_step) {
                    table.rows.push_back({ham, ratio, theta_deg, static_cast<std::int64_t>(row.step),
                                          row.mean_energy, row.total_probability});
                }
            }
        }
    }
    return table;
}

ResultTable run_beta_sweep(const Scenario& scenario) {
    ResultTable table;
    table.schema = scenario.name;
    table.columns = {"beta_sq", "theta_deg", "step", "mean_energy", "ground_prob", "yield"};
    const double theta_deg = scenario.theta_grid_deg.front();
    const auto params = CoolingParams::from_theta_deg(scenario.t, theta_deg);
    for (int i = 0; i <= 20; ++i) {
        const double beta_sq = i * 0.05;
        const PreparedScenario prep =
            prepare(scenario.hamiltonian,
                    format_double(1.0 - beta_sq) + ":" + format_double(beta_sq));
        const auto ensemble =
            enumerate_outcome_tree(prep.initial, prep.spec, params, scenario.strategy, scenario.steps);
        const auto& last = ensemble.per_step.back();
        table.rows.push_back({beta_sq, theta_deg, static_cast<std::int64_t>(last.step), last.mean_energy,
                              last.ground_probability, last.total_probability});
    }
    return table;
}

ResultTable run_theta_sweep(const Scenario& scenario) {
    ResultTable table;
    table.schema = scenario.name;
    table.columns = {"theta_deg", "step", "mean_energy", "ground_prob", "yield"};
    const PreparedScenario prep = prepare(scenario.hamiltonian, scenario.initial);
    for (double theta_deg : scenario.theta_grid_deg) {
        const auto params = CoolingParams::from_theta_deg(scenario.t, theta_deg);
        const auto ensemble =
            enumerate_outcome_tree(prep.initial, prep.spec, params, scenario.strategy, scenario.steps);
        const auto& last = ensemble.per_step.back();
        table.rows.push_back({theta_deg, static_cast<std::int64_t>(last.step), last.mean_energy,
                              last.ground_probability, last.total_probability});
    }
    return table;
}

ResultTable run_tradeoff(const Scenario& scenario) {
    ResultTable table;
    table.schema = scenario.name;
    table.columns = {"theta_deg", "step",       "e_evap",        "e_recycle",
                     "delta_e",   "yield_evap", "yield_recycle"};
    const PreparedScenario prep = prepare(scenario.hamiltonian, scenario.initial);
    for (double theta_deg : scenario.theta_grid_deg) {
        const auto params = CoolingParams::from_theta_deg(scenario.t, theta_deg);
        const auto evap = enumerate_outcome_tree(prep.initial, prep.spec, params,
                                                 Strategy{StrategyKind::evaporative, -1}, scenario.steps);
        const auto recy = enumerate_outcome_tree(prep.initial, prep.spec, params,
                                                 Strategy{StrategyKind::recycling, -1}, scenario.steps);
        for (std::size_t i = 0; i < recy.per_step.size(); ++i) {
            const bool have_evap = i < evap.per_step.size();
            const double e_evap = have_evap ? evap.per_step[i].mean_energy : std::nan("");
            const double yield_evap = have_evap ? evap.per_step[i].total_probability : 0.0;
            table.rows.push_back({theta_deg, static_cast<std::int64_t>(recy.per_step[i].step), e_evap,
                                  recy.per_step[i].mean_energy, recy.per_step[i].mean_energy - e_evap,
                                  yield_evap, recy.per_step[i].total_probability});
        }
    }
    return table;
}

ResultTable run_single_module(const Scenario& scenario) {
    ResultTable table;
    table.schema = scenario.name;
    table.columns = {"ratio", "theta_deg", "p_cool", "energy_cool", "ground_prob", "bloch_y", "bloch_z"};
    for (const std::string& ratio : {std::string("4:1"), std::string("1:1"), std::string("1:4")}) {
        const PreparedScenario prep = prepare(scenario.hamiltonian, ratio);
        for (double theta_deg : scenario.theta_grid_deg) {
            const auto params = CoolingParams::from_theta_deg(scenario.t, theta_deg);
            const ModuleOutcome out = apply_module(prep.initial, prep.spec, params);
            double energy = std::nan(""), ground = std::nan(""), by = std::nan(""), bz = std::nan("");
            if (out.post_cool) {
                energy = *out.energy_cool;
                const Vector coeffs = prep.spec.eigenvectors.adjoint() * out.post_cool->amplitudes();
                ground = std::norm(coeffs[0]);
                by = 2.0 * std::imag(std::conj(coeffs[0]) * coeffs[1]);
                bz = std::norm(coeffs[1]) - std::norm(coeffs[0]);
            }
            table.rows.push_back({ratio, theta_deg, out.p_cool, energy, ground, by, bz});
        }
    }
    return table;
}

ResultTable run_ten_steps(const Scenario& scenario) {
    ResultTable table;
    table.schema = scenario.name;
    table.columns = {"step", "e_evap", "e_recycle", "delta_e", "yield_evap"};
    const PreparedScenario prep = prepare(scenario.hamiltonian, scenario.initial);
    const auto params = CoolingParams::from_theta_deg(scenario.t, scenario.theta_grid_deg.front());
    const auto rows = compare_strategies(prep.initial, prep.spec, params, scenario.steps);
    for (const auto& row : rows) {
        table.rows.push_back({static_cast<std::int64_t>(row.step), row.e_evap, row.e_recycle, row.delta_e,
                              row.yield_evap});
    }
    return table;
}

ResultTable run_generic(const Scenario& scenario) {
    ResultTable table;
    table.schema = scenario.name;
    table.columns = {"theta_deg", "step", "yield", "mean_energy", "ground_prob"};
    const PreparedScenario prep = prepare(scenario.hamiltonian, scenario.initial);
    for (double theta_deg : scenario.theta_grid_deg) {
        const auto params = CoolingParams::from_theta_deg(scenario.t, theta_deg);
        const auto ensemble =
            enumerate_outcome_tree(prep.initial, prep.spec, params, scenario.strategy, scenario.steps);
        for (const auto& row : ensemble.per_step) {
            table.rows.push_back({theta_deg, static_cast<std::int64_t>(row.step), row.total_probability,
                                  row.mean_energy, row.ground_probability});
        }
    }
    return table;
}

}  // namespace

std::vector<ResultTable> run_scenario(const Scenario& scenario, std::uint64_t master_seed) {
    ResultTable table;
    if (scenario.name == "fig4a_map") {
        table = run_energy_map(scenario);
    } else if (scenario.name == "fig4b_beta_sweep") {
        table = run_beta_sweep(scenario);
    } else if (scenario.name == "fig4c_theta_sweep") {
        table = run_theta_sweep(scenario);
    } else if (scenario.name == "fig5_tradeoff") {
        table = run_tradeoff(scenario);
    } else if (scenario.name == "figS1_single_module") {
        table = run_single_module(scenario);
    } else if (scenario.name == "figS4_ten_steps") {
        table = run_ten_steps(scenario);
    } else {
        table = run_generic(scenario);
    }
    stamp(table, scenario, master_seed);
    std::vector<ResultTable> tables;
    tables.push_back(std::move(table));
    return tables;
}

namespace {

double cell_double(const ResultTable::Cell& cell) { return std::get<double>(cell); }

}  // namespace

std::vector<std::string> check_scenario_tables(const Scenario& scenario,
                                               const std::vector<ResultTable>& tables) {
    std::vector<std::string> failures;
    const double tol = 1e-12;

    for (const auto& table : tables) {
        auto col = [&](const std::string& name) {
            const auto it = std::find(table.columns.begin(), table.columns.end(), name);
            return it == table.columns.end() ? -1
                                             : static_cast<int>(it - table.columns.begin());
        };

        if (table.schema == "fig4a_map") {
            // theta = 0 leaves the energies untouched, and the two builtin
            // Hamiltonians must produce the same theory map.
            const int c_ham = col("hamiltonian"), c_ratio = col("ratio"), c_theta = col("theta_deg");
            const int c_step = col("step"), c_energy = col("mean_energy");
            std::map<std::string, double> theta0_first;
            std::map<std::string, double> by_key;
            for (const auto& row : table.rows) {
                const std::string ham = std::get<std::string>(row[c_ham]);
                const std::string ratio = std::get<std::string>(row[c_ratio]);
                const double theta = cell_double(row[c_theta]);
                const auto step = std::get<std::int64_t>(row[c_step]);
                const double energy = cell_double(row[c_energy]);
                if (theta == 0.0) {
                    const std::string key = ham + "|" + ratio;
                    auto [it, fresh] = theta0_first.emplace(key, energy);
                    if (!fresh && std::abs(it->second - energy) > tol) {
                        failures.push_back("fig4a_map: theta=0 energy drifts for " + key + " at step " +
                                           std::to_string(step));
                    }
                }
                by_key[ratio + "|" + format_double(theta) + "|" + std::to_string(step) + "|" + ham] = energy;
            }
            for (const auto& [key, energy] : by_key) {
                if (key.ends_with("sigma_z")) {
                    const std::string mirror = key.substr(0, key.size() - 7) + "sigma_x";
                    const auto it = by_key.find(mirror);
                    if (it == by_key.end() || std::abs(it->second - energy) > tol) {
                        failures.push_back("fig4a_map: sigma_z/sigma_x maps differ at " + key);
                    }
                }
            }
        }

        const int c_yield_evap = col("yield_evap");
        if (c_yield_evap >= 0) {
            const int c_recycle = col("yield_recycle");
            const int c_delta = col("delta_e");
            const int c_theta = col("theta_deg");
            std::map<std::string, double> last_yield;
            for (const auto& row : table.rows) {
                const std::string key = c_theta >= 0 ? format_double(cell_double(row[c_theta])) : "";
                const double y = cell_double(row[c_yield_evap]);
                const auto it = last_yield.find(key);
                if (it != last_yield.end() && y > it->second + tol) {
                    failures.push_back(table.schema + ": evaporative yield increased");
                }
                last_yield[key] = y;
                if (c_recycle >= 0 && std::abs(cell_double(row[c_recycle]) - 1.0) > tol) {
                    failures.push_back(table.schema + ": recycling mass is not 1");
                }
                if (c_delta >= 0 && !std::isnan(cell_double(row[c_delta])) &&
                    cell_double(row[c_delta]) < -tol) {
                    failures.push_back(table.schema + ": evaporative energy above recycling");
                }
            }
        }
    }
    (void)scenario;
    return failures;
}

FidelityReport revised_fidelity_report(const QuantumState& rho, const QuantumState& theory) {
    FidelityReport report;
    report.fidelity = fidelity_with_pure(rho, theory);
    const DominantProjection dom = dominant_eigenvector_projection(rho);
    report.revised_fidelity = fidelity_with_pure(dom.state, theory);
    report.degenerate = dom.degenerate;
    if (dom.runner_up) report.runner_up_fidelity = fidelity_with_pure(*dom.runner_up, theory);
    return report;
}

SingleModuleAnalytics single_module_analytics(double theta_rad) {
    const auto spec = eigendecompose(HermitianOperator::sigma_z());
    const auto params = CoolingParams::from_theta(kHalfPi, theta_rad);
    const QuantumState balanced =
        QuantumState::pure_normalized(spec.eigenvector(1) + spec.eigenvector(0));
    const ModuleOutcome out = apply_module(balanced, spec, params);

    SingleModuleAnalytics a;
    a.p_cool = out.p_cool;
    if (out.post_cool) {
        const Vector coeffs = spec.eigenvectors.adjoint() * out.post_cool->amplitudes();
        a.pop_ground = std::norm(coeffs[0]);
        a.pop_excited = std::norm(coeffs[1]);
        a.bloch_y = 2.0 * std::imag(std::conj(coeffs[0]) * coeffs[1]);
        a.bloch_z = a.pop_excited - a.pop_ground;
    }
    return a;
}

double optical_path_equivalence(Complex alpha, Complex beta, double theta) {
    const double norm = std::sqrt(std::norm(alpha) + std::norm(beta));
    if (norm == 0.0) throw std::invalid_argument("optical_path_equivalence: zero input state");
    alpha /= norm;
    beta /= norm;

    const Complex i(0.0, 1.0);
    const Complex a = (1.0 + i * std::exp(i * theta)) * 0.5;
    const Complex b = (1.0 - i * std::exp(i * theta)) * 0.5;

    // Basis index = 2 * polarization + path.
    auto idx = [](int pol, int path) { return 2 * pol + path; };

    Eigen::Matrix4cd splitter = Eigen::Matrix4cd::Zero();  // CNOT, polarization controls path
    splitter(idx(0, 0), idx(0, 0)) = 1.0;
    splitter(idx(0, 1), idx(0, 1)) = 1.0;
    splitter(idx(1, 1), idx(1, 0)) = 1.0;
    splitter(idx(1, 0), idx(1, 1)) = 1.0;

    // Wave plates: U0 on path 0 with U0|0> = a|0> + b|1>, U1 on path 1 with
    // U1|1> = a|0> + b|1>, completed to unitaries.
    Eigen::Matrix2cd u0, u1;
    u0 << a, -std::conj(b), b, std::conj(a);
    u1 << std::conj(b), a, -std::conj(a), b;
    Eigen::Matrix4cd plates = Eigen::Matrix4cd::Zero();
    for (int p = 0; p < 2; ++p) {
        for (int q = 0; q < 2; ++q) {
            plates(idx(p, 0), idx(q, 0)) = u0(p, q);
            plates(idx(p, 1), idx(q, 1)) = u1(p, q);
        }
    }

    Eigen::Matrix4cd flip = Eigen::Matrix4cd::Zero();  // polarization flip on path 1
    flip(idx(0, 0), idx(0, 0)) = 1.0;
    flip(idx(1, 0), idx(1, 0)) = 1.0;
    flip(idx(0, 1), idx(1, 1)) = 1.0;
    flip(idx(1, 1), idx(0, 1)) = 1.0;

    Eigen::Vector4cd input = Eigen::Vector4cd::Zero();
    input(idx(0, 0)) = alpha;
    input(idx(1, 0)) = beta;
    const Eigen::Vector4cd optical = flip * splitter * plates * splitter * input;

    // Reference route: jump operators built from the spectral decomposition.
    const auto spec = eigendecompose(HermitianOperator::sigma_z());
    const auto params = CoolingParams::from_theta(kHalfPi, theta);
    const JumpPair jumps = jump_operators(spec, params);
    Vector system(2);
    system << alpha, beta;
    const Vector cool = jumps.lambda_minus * system;
    const Vector heat = jumps.lambda_plus * system;

    double residual = 0.0;
    for (int p = 0; p < 2; ++p) {
        residual = std::max(residual, std::abs(optical(idx(p, 0)) - cool(p)));
        residual = std::max(residual, std::abs(optical(idx(p, 1)) - heat(p)));
    }
    return residual;
}

double optical_equivalence_sweep(int trials, std::uint64_t seed) {
    Xoshiro256ss rng(seed);
    double worst = 0.0;
    for (int n = 0; n < trials; ++n) {
        const Complex alpha(rng.uniform01() * 2.0 - 1.0, rng.uniform01() * 2.0 - 1.0);
        const Complex beta(rng.uniform01() * 2.0 - 1.0, rng.uniform01() * 2.0 - 1.0);
        if (std::norm(alpha) + std::norm(beta) < 1e-6) continue;
        const double theta = (rng.uniform01() * 2.0 - 1.0) * std::numbers::pi;
        worst = std::max(worst, optical_path_equivalence(alpha, beta, theta));
    }
    return worst;
}

}  // namespace qcool
