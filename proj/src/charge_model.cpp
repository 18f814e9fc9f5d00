#include "masslab/charge_model.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <stdexcept>

namespace masslab {

ChargeLattice::ChargeLattice(int particles, int charge_cutoff, Eigen::Index orbital_dim)
    : particles_(particles), cutoff_(charge_cutoff), orbital_dim_(orbital_dim) {
    if (particles_ < 1 || cutoff_ < 1 || orbital_dim_ < 1) {
        throw std::invalid_argument("ChargeLattice: parameters must be positive");
    }
    tuples_ = 1;
    for (int k = 0; k < particles_; ++k) tuples_ *= axis_size();
}

int ChargeLattice::axis_value(Eigen::Index digit) const {
    // digits 0..cutoff-1 -> -cutoff..-1, digits cutoff..2*cutoff-1 -> 1..cutoff
    const auto d = static_cast<int>(digit);
    return d < cutoff_ ? d - cutoff_ : d - cutoff_ + 1;
}

Eigen::Index ChargeLattice::axis_digit(int charge) const {
    if (charge == 0 || std::abs(charge) > cutoff_) {
        throw std::invalid_argument("ChargeLattice: charge out of range");
    }
    return charge < 0 ? charge + cutoff_ : charge + cutoff_ - 1;
}

std::vector<int> ChargeLattice::charges_of(Eigen::Index index) const {
    std::vector<int> out(static_cast<std::size_t>(particles_));
    Eigen::Index tuple = index / orbital_dim_;
    for (int k = particles_ - 1; k >= 0; --k) {
        out[static_cast<std::size_t>(k)] = axis_value(tuple % axis_size());
        tuple /= axis_size();
    }
    return out;
}

Eigen::Index ChargeLattice::index_of(const std::vector<int>& charges,
                                     Eigen::Index orbital) const {
    if (charges.size() != static_cast<std::size_t>(particles_)) {
        throw std::invalid_argument("ChargeLattice: wrong particle count");
    }
    if (orbital < 0 || orbital >= orbital_dim_) {
        throw std::invalid_argument("ChargeLattice: orbital index out of range");
    }
    Eigen::Index tuple = 0;
    for (int k = 0; k < particles_; ++k) {
        tuple = tuple * axis_size() + axis_digit(charges[static_cast<std::size_t>(k)]);
    }
    return tuple * orbital_dim_ + orbital;
}

int ChargeLattice::total_mass_of(Eigen::Index index) const {
    int m = 0;
    for (int n : charges_of(index)) m += std::abs(n);
    return m;
}

ChargeModelSpace::ChargeModelSpace(ChargeLattice lattice, SectoredSpace space,
                                   std::vector<Eigen::Index> lattice_to_sector,
                                   std::vector<Eigen::Index> sector_to_lattice)
    : lattice_(std::move(lattice)),
      space_(std::move(space)),
      lattice_to_sector_(std::move(lattice_to_sector)),
      sector_to_lattice_(std::move(sector_to_lattice)) {}

ChargeModelSpace build_model_space(int particles, int charge_cutoff, Eigen::Index orbital_dim) {
    ChargeLattice lattice(particles, charge_cutoff, orbital_dim);

    std::map<int, std::vector<Eigen::Index>> by_mass;
    for (Eigen::Index i = 0; i < lattice.dim(); ++i) {
        by_mass[lattice.total_mass_of(i)].push_back(i);
    }

    std::vector<double> masses;
    std::vector<Eigen::Index> dims;
    std::vector<Eigen::Index> sector_to_lattice;
    sector_to_lattice.reserve(static_cast<std::size_t>(lattice.dim()));
    for (const auto& [mass, indices] : by_mass) {
        masses.push_back(static_cast<double>(mass));
        dims.push_back(static_cast<Eigen::Index>(indices.size()));
        sector_to_lattice.insert(sector_to_lattice.end(), indices.begin(), indices.end());
    }

    std::vector<Eigen::Index> lattice_to_sector(static_cast<std::size_t>(lattice.dim()));
    for (std::size_t i = 0; i < sector_to_lattice.size(); ++i) {
        lattice_to_sector[static_cast<std::size_t>(sector_to_lattice[i])] =
            static_cast<Eigen::Index>(i);
    }

    return ChargeModelSpace(std::move(lattice),
                            SectoredSpace(MassSpectrum(std::move(masses), std::move(dims))),
                            std::move(lattice_to_sector), std::move(sector_to_lattice));
}

namespace {

Eigen::Index flipped_index(const ChargeLattice& lattice, Eigen::Index i, int particle) {
    std::vector<int> charges = lattice.charges_of(i);
    charges[static_cast<std::size_t>(particle)] = -charges[static_cast<std::size_t>(particle)];
    return lattice.index_of(charges, lattice.orbital_of(i));
}

void check_particle(const ChargeModelSpace& m, int particle) {
    if (particle < 0 || particle >= m.lattice().particles()) {
        throw std::invalid_argument("charge model: particle index out of range");
    }
}

void check_state(const ChargeModelSpace& m, const ModelState& psi) {
    if (psi.size() != m.lattice().dim()) {
        throw std::invalid_argument("charge model: state has wrong dimension");
    }
}

}  // namespace

ModelState charge_conjugation(const ChargeModelSpace& m, int particle, const ModelState& psi) {
    check_particle(m, particle);
    check_state(m, psi);
    ModelState out(psi.size());
    for (Eigen::Index i = 0; i < psi.size(); ++i) {
        out(i) = psi(flipped_index(m.lattice(), i, particle));
    }
    return out;
}

ModelState time_reversal(const ChargeModelSpace& m, TimeReversalKind kind, const ModelState& psi) {
    check_state(m, psi);
    if (kind == TimeReversalKind::conjugation) return psi.conjugate();
    ModelState out = psi.conjugate();
    for (int k = 0; k < m.lattice().particles(); ++k) out = charge_conjugation(m, k, out);
    return out;
}

SectorOperator mass_operator(const ChargeModelSpace& m) {
    const SectoredSpace& space = m.space();
    MatrixXcd mat = MatrixXcd::Zero(space.dim(), space.dim());
    for (Eigen::Index s = 0; s < space.sectors(); ++s) {
        for (Eigen::Index i = 0; i < space.sector_dim(s); ++i) {
            mat(space.offset(s) + i, space.offset(s) + i) = space.mass(s);
        }
    }
    return SectorOperator(space, std::move(mat));
}

SectorOperator charge_conjugation_operator(const ChargeModelSpace& m, int particle) {
    check_particle(m, particle);
    const SectoredSpace& space = m.space();
    MatrixXcd mat = MatrixXcd::Zero(space.dim(), space.dim());
    for (Eigen::Index l = 0; l < m.lattice().dim(); ++l) {
        // C maps the basis state at lattice index l to the flipped one.
        mat(m.lattice_to_sector(flipped_index(m.lattice(), l, particle)), m.lattice_to_sector(l)) =
            1.0;
    }
    return SectorOperator(space, std::move(mat));
}

SectorOperator uncharged_projector(const ChargeModelSpace& m) {
    const SectoredSpace& space = m.space();
    MatrixXcd proj = MatrixXcd::Identity(space.dim(), space.dim());
    for (int k = 0; k < m.lattice().particles(); ++k) {
        const MatrixXcd c = charge_conjugation_operator(m, k).matrix();
        proj = proj * 0.5 * (MatrixXcd::Identity(space.dim(), space.dim()) + c);
    }
    return SectorOperator(space, std::move(proj));
}

StateVector to_sector_basis(const ChargeModelSpace& m, const ModelState& psi) {
    check_state(m, psi);
    VectorXcd out(psi.size());
    for (Eigen::Index l = 0; l < psi.size(); ++l) out(m.lattice_to_sector(l)) = psi(l);
    return StateVector(m.space(), std::move(out));
}

ModelState from_sector_basis(const ChargeModelSpace& m, const StateVector& psi) {
    if (!(psi.space() == m.space())) {
        throw std::invalid_argument("charge model: state from a different space");
    }
    ModelState out(psi.coeffs().size());
    for (Eigen::Index l = 0; l < out.size(); ++l) out(l) = psi.coeffs()(m.lattice_to_sector(l));
    return out;
}

nlohmann::json model_space_to_json(const ChargeModelSpace& m) {
    return nlohmann::json{{"particles", m.lattice().particles()},
                          {"charge_cutoff", m.lattice().charge_cutoff()},
                          {"orbital_dim", m.lattice().orbital_dim()}};
}

ChargeModelSpace model_space_from_json(const nlohmann::json& j) {
    return build_model_space(j.at("particles").get<int>(), j.at("charge_cutoff").get<int>(),
                             j.at("orbital_dim").get<Eigen::Index>());
}

}  // namespace masslab
