// Finite-dimensional Hilbert space split into mass sectors, with the
// superselection calculus: sector projectors, block-diagonal projections of
// operators and states, and the pure-state mixture rho_psi.
#pragma once

#include <Eigen/Dense>

#include <complex>
#include <optional>
#include <vector>

namespace masslab {

using MatrixXcd = Eigen::MatrixXcd;
using VectorXcd = Eigen::VectorXcd;

// Strictly increasing, strictly positive mass values with per-sector dimensions.
class MassSpectrum {
public:
    MassSpectrum(std::vector<double> masses, std::vector<Eigen::Index> dims);

    Eigen::Index sectors() const { return static_cast<Eigen::Index>(masses_.size()); }
    double mass(Eigen::Index s) const { return masses_.at(static_cast<std::size_t>(s)); }
    Eigen::Index dim(Eigen::Index s) const { return dims_.at(static_cast<std::size_t>(s)); }
    const std::vector<double>& masses() const { return masses_; }
    const std::vector<Eigen::Index>& dims() const { return dims_; }

    bool operator==(const MassSpectrum&) const = default;

private:
    std::vector<double> masses_;
    std::vector<Eigen::Index> dims_;
};

class SectoredSpace {
public:
    explicit SectoredSpace(MassSpectrum spectrum);

    const MassSpectrum& spectrum() const { return spectrum_; }
    Eigen::Index dim() const { return dim_; }
    Eigen::Index sectors() const { return spectrum_.sectors(); }
    Eigen::Index offset(Eigen::Index s) const { return offsets_.at(static_cast<std::size_t>(s)); }
    Eigen::Index sector_dim(Eigen::Index s) const { return spectrum_.dim(s); }
    double mass(Eigen::Index s) const { return spectrum_.mass(s); }

    // Index of the sector whose mass matches within 1e-12; throws if absent.
    Eigen::Index sector_of_mass(double mass) const;

    bool operator==(const SectoredSpace&) const = default;

private:
    MassSpectrum spectrum_;
    std::vector<Eigen::Index> offsets_;
    Eigen::Index dim_ = 0;
};

class StateVector {
public:
    StateVector(SectoredSpace space, VectorXcd coeffs);

    const SectoredSpace& space() const { return space_; }
    const VectorXcd& coeffs() const { return v_; }
    double norm() const { return v_.norm(); }

    Eigen::VectorBlock<const VectorXcd> component(Eigen::Index s) const {
        return v_.segment(space_.offset(s), space_.sector_dim(s));
    }
    double component_norm(Eigen::Index s) const { return component(s).norm(); }

    StateVector normalized() const;

private:
    SectoredSpace space_;
    VectorXcd v_;
};

// Bounded operator; the operator norm (largest singular value) is cached.
class SectorOperator {
public:
    SectorOperator(SectoredSpace space, MatrixXcd mat);

    const SectoredSpace& space() const { return space_; }
    const MatrixXcd& matrix() const { return m_; }
    double op_norm() const;

    Eigen::Block<const MatrixXcd> block(Eigen::Index s_row, Eigen::Index s_col) const {
        return m_.block(space_.offset(s_row), space_.offset(s_col), space_.sector_dim(s_row),
                        space_.sector_dim(s_col));
    }

    SectorOperator adjoint() const { return SectorOperator(space_, m_.adjoint()); }

private:
    SectoredSpace space_;
    MatrixXcd m_;
    mutable std::optional<double> norm_;
};

// Density operator: Hermitian (1e-10), positive semidefinite (eigenvalue
// floor -1e-10), unit trace (1e-10); all checked on construction.
class DensityOperator {
public:
    DensityOperator(SectoredSpace space, MatrixXcd mat);

    const SectoredSpace& space() const { return space_; }
    const MatrixXcd& matrix() const { return m_; }

    Eigen::Block<const MatrixXcd> block(Eigen::Index s_row, Eigen::Index s_col) const {
        return m_.block(space_.offset(s_row), space_.offset(s_col), space_.sector_dim(s_row),
                        space_.sector_dim(s_col));
    }

private:
    SectoredSpace space_;
    MatrixXcd m_;
};

// Orthogonal projector P_M onto the sector with the given mass.
SectorOperator sector_projector(const SectoredSpace& space, double mass);

// A_B = sum_M P_M A P_M: zeroes every off-diagonal sector block.
SectorOperator superselect_operator(const SectorOperator& a);

// rho_B = sum_M P_M rho P_M; commutes with every P_M, trace preserved.
DensityOperator superselect_state(const DensityOperator& rho);

// rho_psi = sum_M ||psi_M||^2 |phi_M><phi_M| over sectors with ||psi_M|| > 1e-14.
DensityOperator rho_psi(const StateVector& psi);

// tr(rho A); spaces must agree.
std::complex<double> expect(const DensityOperator& rho, const SectorOperator& a);

bool is_block_diagonal(const SectorOperator& a, double tol = 0.0);

}  // namespace masslab
