// Command-line front end: reproducible verification suites, CSV emission, and
// the decoherence timescale calculator.
#include "masslab/harness.hpp"

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <fstream>
#include <iostream>
#include <optional>
#include <string>

namespace {

using masslab::ExperimentConfig;
using masslab::RunReport;

struct CommonArgs {
    std::string config_path;
    std::optional<std::uint64_t> seed;
    std::string out_path;
    std::string units;
};

void add_common(CLI::App* cmd, CommonArgs& args) {
    cmd->add_option("--config", args.config_path, "JSON experiment configuration");
    cmd->add_option("--seed", args.seed, "RNG seed; one stream per case derived from (seed, case)");
    cmd->add_option("--out", args.out_path, "write the suite's CSV to this path");
    cmd->add_option("--units", args.units, "unit system: natural | si")
        ->check(CLI::IsMember({"natural", "si"}));
}

ExperimentConfig load_config(const CommonArgs& args, bool decohere_defaults) {
    ExperimentConfig cfg;
    if (decohere_defaults) cfg = ExperimentConfig::decohere_benchmark();
    if (!args.config_path.empty()) {
        std::ifstream in(args.config_path);
        if (!in) throw std::runtime_error("cannot open config file: " + args.config_path);
        nlohmann::json j;
        in >> j;
        cfg = ExperimentConfig::from_json(j);
        if (decohere_defaults && !j.contains("spectrum")) {
            // keep the shipped benchmark instance unless overridden
            const ExperimentConfig bench = ExperimentConfig::decohere_benchmark();
            cfg.spectrum = bench.spectrum;
            if (!j.contains("state")) cfg.state = bench.state;
            if (!j.contains("observable")) cfg.observable = bench.observable;
            if (!j.contains("hamiltonian") || !j.at("hamiltonian").contains("blocks")) {
                cfg.hamiltonian_blocks = bench.hamiltonian_blocks;
            }
        }
    }
    if (args.seed) cfg.seed = *args.seed;
    if (args.units == "natural") cfg.constants = masslab::PhysicalConstants::natural();
    if (args.units == "si") cfg.constants = masslab::PhysicalConstants::si();
    if (!args.out_path.empty()) cfg.out_path = args.out_path;
    return cfg;
}

int finish(const RunReport& report, const ExperimentConfig& cfg, const std::string& suite) {
    std::cout << report.table();
    std::cout << suite << ": " << (report.all_passed() ? "all checks passed" : "FAILURES")
              << "\n";
    if (!cfg.out_path.empty()) {
        std::ofstream out(cfg.out_path, std::ios::binary);
        if (!out) throw std::runtime_error("cannot write output file: " + cfg.out_path);
        out << (report.csv.empty() ? report.cases_csv() : report.csv);
    }
    return report.all_passed() ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{
        "masslab: verification suites for Galilei central extensions, sectored\n"
        "Hilbert spaces, U(1) averaging and decoherence by temporal averaging"};
    app.require_subcommand(1);

    CommonArgs args;

    auto* group = app.add_subcommand(
        "group-check",
        "Cocycle identities, gauge covariance, 5x5 matrix embedding and the no-go\n"
        "commutator phase. CSV columns: case,passed,deviation,threshold");
    add_common(group, args);

    auto* classical = app.add_subcommand(
        "classical-check",
        "Composition property and symplectic-defect checks for both classical\n"
        "models. CSV columns: case,passed,deviation,threshold");
    add_common(classical, args);

    auto* supersel = app.add_subcommand(
        "supersel",
        "Superselection calculus on random sectored spaces. CSV columns:\n"
        "case,passed,deviation,threshold");
    add_common(supersel, args);

    auto* average = app.add_subcommand(
        "average",
        "U(1) averaging: exact integer grids and long-period decay. CSV columns:\n"
        "kind (K|Theta), parameter (grid size or period), deviation (|avg - tr(rho_B A_B)|)");
    add_common(average, args);

    auto* decohere = app.add_subcommand(
        "decohere",
        "Temporal-averaging sweep on the benchmark (or configured) instance.\n"
        "CSV columns: T (averaging time), value_re/value_im (<<A>>_{psi,T}),\n"
        "reference_re/reference_im (tr(rho_psi A_B)), abs_D (|dephasing D_T|),\n"
        "bound_D (2 hbar N^2 |A| / (dM c^2 T)), abs_R (|residual R_T|),\n"
        "bound_R_intermediate (2 T |A| (sum |H psi_M|)(sum |psi_M|) / hbar),\n"
        "in_window (1 if T_low < T < T_high)");
    add_common(decohere, args);

    auto* model = app.add_subcommand(
        "model",
        "Charge-lattice model: spectrum enumeration, conjugations, time reversal.\n"
        "CSV columns: case,passed,deviation,threshold");
    add_common(model, args);

    auto* timescales = app.add_subcommand(
        "timescales", "Decoherence window T_low/T_high from deltaM, E, N and |A|");
    std::string preset;
    double delta_m = 0.0, energy = 0.0, n_count = 1.0, norm_a = 1.0;
    timescales->add_option("preset", preset,
                           "named preset: electron-hydrogen | macroscopic (SI units)");
    timescales->add_option("--delta-m", delta_m, "smallest occupied mass gap (kg in SI)");
    timescales->add_option("--energy", energy, "energetic content E_psi (J in SI)");
    timescales->add_option("--n", n_count, "number of occupied sectors N_psi");
    timescales->add_option("--norm-a", norm_a, "operator norm of the observable");
    std::string ts_units = "si";
    timescales->add_option("--units", ts_units, "unit system: natural | si")
        ->check(CLI::IsMember({"natural", "si"}));

    CLI11_PARSE(app, argc, argv);

    try {
        if (group->parsed()) {
            const ExperimentConfig cfg = load_config(args, false);
            return finish(masslab::run_group_check(cfg), cfg, "group-check");
        }
        if (classical->parsed()) {
            const ExperimentConfig cfg = load_config(args, false);
            return finish(masslab::run_classical_check(cfg), cfg, "classical-check");
        }
        if (supersel->parsed()) {
            const ExperimentConfig cfg = load_config(args, false);
            return finish(masslab::run_supersel(cfg), cfg, "supersel");
        }
        if (average->parsed()) {
            const ExperimentConfig cfg = load_config(args, false);
            return finish(masslab::run_average(cfg), cfg, "average");
        }
        if (decohere->parsed()) {
            const ExperimentConfig cfg = load_config(args, true);
            return finish(masslab::run_decohere(cfg), cfg, "decohere");
        }
        if (model->parsed()) {
            const ExperimentConfig cfg = load_config(args, false);
            return finish(masslab::run_model(cfg), cfg, "model");
        }
        if (timescales->parsed()) {
            masslab::PhysicalConstants consts = ts_units == "natural"
                                                    ? masslab::PhysicalConstants::natural()
                                                    : masslab::PhysicalConstants::si();
            if (preset == "electron-hydrogen") {
                delta_m = 9.1093837015e-31;                      // electron mass, kg
                energy = 13.605693122994 * 1.602176634e-19;      // hydrogen ground state, J
                consts = masslab::PhysicalConstants::si();
            } else if (preset == "macroscopic") {
                delta_m = 1.0;
                energy = 1.0;
                consts = masslab::PhysicalConstants::si();
            } else if (!preset.empty()) {
                throw std::invalid_argument("unknown preset: " + preset);
            }
            const masslab::TimescaleRow row =
                masslab::compute_timescales(delta_m, energy, n_count, norm_a, consts);
            std::cout << masslab::format_timescales(row);
            return 0;
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 2;
}
