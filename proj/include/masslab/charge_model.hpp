// Quantized circle model on a truncated charge lattice: per-particle charges
// n_k in Z\{0} with |n_k| <= cutoff, total mass sum |n_k|, charge conjugations,
// and the two time-reversal operations.
#pragma once

#include "masslab/sectored.hpp"

#include <nlohmann/json_fwd.hpp>

#include <vector>

namespace masslab {

// Basis bookkeeping for (charge lattice)^N (x) orbital factor. Lattice order:
// particle charges form the most significant digits (axis values ascending
// -cutoff..-1, 1..cutoff), the orbital index the least significant one.
class ChargeLattice {
public:
    ChargeLattice(int particles, int charge_cutoff, Eigen::Index orbital_dim);

    int particles() const { return particles_; }
    int charge_cutoff() const { return cutoff_; }
    Eigen::Index orbital_dim() const { return orbital_dim_; }
    Eigen::Index axis_size() const { return 2 * cutoff_; }
    Eigen::Index charge_tuples() const { return tuples_; }
    Eigen::Index dim() const { return tuples_ * orbital_dim_; }

    std::vector<int> charges_of(Eigen::Index index) const;
    Eigen::Index orbital_of(Eigen::Index index) const { return index % orbital_dim_; }
    Eigen::Index index_of(const std::vector<int>& charges, Eigen::Index orbital) const;
    int total_mass_of(Eigen::Index index) const;

private:
    int axis_value(Eigen::Index digit) const;   // digit 0..2*cutoff-1 -> charge
    Eigen::Index axis_digit(int charge) const;  // inverse of axis_value

    int particles_;
    int cutoff_;
    Eigen::Index orbital_dim_;
    Eigen::Index tuples_;
};

// The lattice together with the induced sectored space (basis sorted by total
// mass) and the permutation between the two orderings.
class ChargeModelSpace {
public:
    ChargeModelSpace(ChargeLattice lattice, SectoredSpace space,
                     std::vector<Eigen::Index> lattice_to_sector,
                     std::vector<Eigen::Index> sector_to_lattice);

    const ChargeLattice& lattice() const { return lattice_; }
    const SectoredSpace& space() const { return space_; }
    Eigen::Index lattice_to_sector(Eigen::Index i) const {
        return lattice_to_sector_.at(static_cast<std::size_t>(i));
    }
    Eigen::Index sector_to_lattice(Eigen::Index i) const {
        return sector_to_lattice_.at(static_cast<std::size_t>(i));
    }

private:
    ChargeLattice lattice_;
    SectoredSpace space_;
    std::vector<Eigen::Index> lattice_to_sector_;
    std::vector<Eigen::Index> sector_to_lattice_;
};

// Spectrum {N, N+1, ..., N*cutoff} with multiplicities from lattice
// enumeration times the orbital dimension.
ChargeModelSpace build_model_space(int particles, int charge_cutoff, Eigen::Index orbital_dim);

// Amplitudes are indexed in lattice order.
using ModelState = VectorXcd;

// (C_h psi)({n_k}, o) = psi({eta_k n_k}, o) with eta flipping only slot h (0-based).
ModelState charge_conjugation(const ChargeModelSpace& m, int particle, const ModelState& psi);

enum class TimeReversalKind {
    conjugation,  // T': entrywise complex conjugation in the charge basis
    full          // T = T' C_1 ... C_N
};
ModelState time_reversal(const ChargeModelSpace& m, TimeReversalKind kind, const ModelState& psi);

// Operators on the mass-sorted sectored space.
SectorOperator mass_operator(const ChargeModelSpace& m);
SectorOperator charge_conjugation_operator(const ChargeModelSpace& m, int particle);
// Projector onto the simultaneous +1 eigenspace of all C_k.
SectorOperator uncharged_projector(const ChargeModelSpace& m);

StateVector to_sector_basis(const ChargeModelSpace& m, const ModelState& psi);
ModelState from_sector_basis(const ChargeModelSpace& m, const StateVector& psi);

nlohmann::json model_space_to_json(const ChargeModelSpace& m);
ChargeModelSpace model_space_from_json(const nlohmann::json& j);

}  // namespace masslab
