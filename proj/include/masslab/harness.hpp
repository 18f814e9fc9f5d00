// Experiment configuration, deterministic random instance generation, and the
// verification suites behind the command-line front end.
#pragma once

#include "masslab/charge_model.hpp"
#include "masslab/dynamics.hpp"
#include "masslab/galilei.hpp"
#include "masslab/phase_space.hpp"
#include "masslab/sectored.hpp"
#include "masslab/u1_average.hpp"

#include <nlohmann/json_fwd.hpp>

#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

namespace masslab {

struct GridSpec {
    double min = 0.0;
    double max = 0.0;
    int points = 0;

    std::vector<double> log_spaced() const;
};

struct ExperimentConfig {
    std::uint64_t seed = 2026;
    PhysicalConstants constants = PhysicalConstants::natural();
    std::string gauge_kind = "polynomial";  // zero | polynomial | broken
    int cases = 200;

    // Random-instance ranges.
    int min_sectors = 2, max_sectors = 6;
    Eigen::Index min_sector_dim = 1, max_sector_dim = 6;

    // Charge model parameters.
    int model_particles = 2;
    int model_cutoff = 2;
    Eigen::Index model_orbital_dim = 2;

    double hamiltonian_scale = 1e-3;
    bool hamiltonian_real = false;
    double observable_norm = 1.0;

    // Explicit decohere instance; when absent the shipped benchmark is used.
    std::optional<MassSpectrum> spectrum;
    std::optional<VectorXcd> state;
    std::optional<MatrixXcd> observable;
    std::optional<std::vector<MatrixXcd>> hamiltonian_blocks;
    bool benchmark_checks = true;

    std::optional<GridSpec> t_grid;
    GridSpec theta_grid{1.0, 1000.0, 13};

    std::string out_path;

    static ExperimentConfig from_json(const nlohmann::json& j);
    // Two mass sectors {1, 1.5} of dimension two, psi = (e0 + e2)/sqrt(2),
    // A the projector onto psi, weak in-sector Hamiltonians (E_psi ~ 1e-4).
    static ExperimentConfig decohere_benchmark();
};

struct CaseResult {
    std::string name;
    bool passed = false;
    double deviation = 0.0;  // worst measured deviation
    double threshold = 0.0;
    double wall_ms = 0.0;
};

struct RunReport {
    std::vector<CaseResult> cases;
    std::string csv;  // suite-specific data rows, empty if none

    bool all_passed() const;
    std::string table() const;       // human-readable summary
    std::string cases_csv() const;   // name,passed,deviation,threshold
};

RunReport run_group_check(const ExperimentConfig& cfg);
RunReport run_classical_check(const ExperimentConfig& cfg);
RunReport run_supersel(const ExperimentConfig& cfg);
RunReport run_average(const ExperimentConfig& cfg);
RunReport run_decohere(const ExperimentConfig& cfg);
RunReport run_model(const ExperimentConfig& cfg);

struct TimescaleRow {
    double delta_m = 0.0;
    double energy = 0.0;
    double n_count = 1.0;
    double norm_a = 1.0;
    DecoherenceWindow window;
};
TimescaleRow compute_timescales(double delta_m, double energy, double n_count, double norm_a,
                                const PhysicalConstants& k);
std::string format_timescales(const TimescaleRow& row);

// Deterministic formatting used for all emitted CSV numbers.
std::string fmt_double(double x);

namespace gen {

std::uint64_t mix(std::uint64_t seed, std::uint64_t index);
std::mt19937_64 case_rng(std::uint64_t seed, std::uint64_t index);

double uniform(std::mt19937_64& rng, double lo, double hi);
Rotation random_rotation(std::mt19937_64& rng);
GroupElement random_element(std::mt19937_64& rng, double scale = 1.5);
ExtendedElement random_extended(std::mt19937_64& rng, double scale = 1.5);
// Smooth polynomial gauge in the element components, vanishing at the identity.
Gauge random_gauge(std::mt19937_64& rng);
// gamma(e) != 0: construction must fail.
Gauge broken_gauge();

MatrixXcd ginibre(std::mt19937_64& rng, Eigen::Index rows, Eigen::Index cols);
MassSpectrum random_spectrum(std::mt19937_64& rng, int min_sectors, int max_sectors,
                             Eigen::Index min_dim, Eigen::Index max_dim, bool integer_masses,
                             double min_gap = 0.3, double max_gap = 2.0);
StateVector random_state(std::mt19937_64& rng, const SectoredSpace& space,
                         double min_sector_weight = 0.0);
SectorOperator random_operator(std::mt19937_64& rng, const SectoredSpace& space,
                               double norm_target, bool hermitian = true);
DensityOperator random_density(std::mt19937_64& rng, const SectoredSpace& space);
SectorHamiltonian random_hamiltonian(std::mt19937_64& rng, const SectoredSpace& space,
                                     double scale, bool real);
PhaseSpacePointR random_point_r(std::mt19937_64& rng, std::size_t particles);
PhaseSpacePointS1 random_point_s1(std::mt19937_64& rng, std::size_t particles);

}  // namespace gen

}  // namespace masslab
