#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "masslab/charge_model.hpp"
#include "masslab/dynamics.hpp"
#include "masslab/harness.hpp"
#include "masslab/u1_average.hpp"

#include <nlohmann/json.hpp>

#include <cmath>
#include <map>

using namespace masslab;

namespace {

const PhysicalConstants kNat = PhysicalConstants::natural();

// Real-symmetric Hamiltonian depending on the charges only through |n_k|.
SectorHamiltonian absn_hamiltonian(const ChargeModelSpace& m) {
    const ChargeLattice& lat = m.lattice();
    const Eigen::Index d = lat.orbital_dim();
    Eigen::MatrixXd orb = Eigen::MatrixXd::Zero(d, d);
    for (Eigen::Index i = 0; i < d; ++i) {
        for (Eigen::Index j = 0; j <= i; ++j) orb(i, j) = orb(j, i) = 0.1 * double(i + j + 1);
    }
    MatrixXcd full = MatrixXcd::Zero(m.space().dim(), m.space().dim());
    for (Eigen::Index li = 0; li < lat.dim(); ++li) {
        const int mass = lat.total_mass_of(li);
        const Eigen::Index oi = lat.orbital_of(li);
        const Eigen::Index base = li - oi;
        for (Eigen::Index oj = 0; oj < d; ++oj) {
            double val = (0.3 + 0.05 * mass) * orb(oi, oj);
            if (oi == oj) val += mass + 0.2 * mass * mass;
            full(m.lattice_to_sector(li), m.lattice_to_sector(base + oj)) = val;
        }
    }
    return SectorHamiltonian::from_full(m.space(), full);
}

ModelState random_model_state(std::mt19937_64& rng, const ChargeModelSpace& m) {
    ModelState v = gen::ginibre(rng, m.lattice().dim(), 1);
    v.normalize();
    return v;
}

}  // namespace

TEST_CASE("lattice indexing round trip") {
    const ChargeLattice lat(2, 2, 3);
    CHECK(lat.axis_size() == 4);
    CHECK(lat.charge_tuples() == 16);
    CHECK(lat.dim() == 48);
    for (Eigen::Index i = 0; i < lat.dim(); ++i) {
        CHECK(lat.index_of(lat.charges_of(i), lat.orbital_of(i)) == i);
    }
    CHECK_THROWS_AS((void)lat.index_of({0, 1}, 0), std::invalid_argument);
    CHECK_THROWS_AS((void)lat.index_of({3, 1}, 0), std::invalid_argument);
    CHECK_THROWS_AS(ChargeLattice(0, 1, 1), std::invalid_argument);
}

TEST_CASE("model space spectra and multiplicities") {
    const ChargeModelSpace tiny = build_model_space(1, 1, 1);
    CHECK(tiny.space().sectors() == 1);
    CHECK(tiny.space().mass(0) == 1.0);
    CHECK(tiny.space().sector_dim(0) == 2);  // n = +-1

    const ChargeModelSpace single = build_model_space(1, 3, 1);
    CHECK(single.space().sectors() == 3);
    for (Eigen::Index s = 0; s < 3; ++s) {
        CHECK(single.space().mass(s) == double(s + 1));
        CHECK(single.space().sector_dim(s) == 2);
    }

    const ChargeModelSpace pair = build_model_space(2, 2, 1);
    CHECK(pair.space().sectors() == 3);
    CHECK(pair.space().mass(0) == 2.0);
    CHECK(pair.space().mass(2) == 4.0);
    CHECK(pair.space().sector_dim(0) == 4);
    CHECK(pair.space().sector_dim(1) == 8);
    CHECK(pair.space().sector_dim(2) == 4);

    // exhaustive recount with the orbital factor
    const ChargeModelSpace withd = build_model_space(2, 2, 3);
    std::map<int, Eigen::Index> counts;
    for (Eigen::Index i = 0; i < withd.lattice().dim(); ++i) {
        counts[withd.lattice().total_mass_of(i)] += 1;
    }
    for (Eigen::Index s = 0; s < withd.space().sectors(); ++s) {
        CHECK(counts[int(withd.space().mass(s))] == withd.space().sector_dim(s));
    }
}

TEST_CASE("mass operator is diagonal with the sector masses") {
    const ChargeModelSpace m = build_model_space(2, 2, 1);
    const MatrixXcd mop = mass_operator(m).matrix();
    CHECK(mop.isDiagonal());
    CHECK(mop(0, 0).real() == 2.0);
    CHECK(mop(m.space().dim() - 1, m.space().dim() - 1).real() == 4.0);
    // minimum eigenvalue equals the particle count
    double min_mass = 1e9;
    for (Eigen::Index i = 0; i < m.space().dim(); ++i) {
        min_mass = std::min(min_mass, mop(i, i).real());
    }
    CHECK(min_mass == 2.0);
}

TEST_CASE("charge conjugations: involution, commutation, swap action") {
    const ChargeModelSpace m = build_model_space(2, 2, 2);
    const Eigen::Index dim = m.space().dim();
    for (int p = 0; p < 2; ++p) {
        const MatrixXcd c = charge_conjugation_operator(m, p).matrix();
        CHECK((c * c - MatrixXcd::Identity(dim, dim)).cwiseAbs().maxCoeff() == 0.0);
        CHECK((c * c.adjoint() - MatrixXcd::Identity(dim, dim)).cwiseAbs().maxCoeff() == 0.0);
    }
    const MatrixXcd c0 = charge_conjugation_operator(m, 0).matrix();
    const MatrixXcd c1 = charge_conjugation_operator(m, 1).matrix();
    CHECK((c0 * c1 - c1 * c0).cwiseAbs().maxCoeff() == 0.0);

    const MatrixXcd mop = mass_operator(m).matrix();
    CHECK((c0 * mop - mop * c0).cwiseAbs().maxCoeff() == 0.0);

    // N = 1: amplitudes at n and -n swap
    const ChargeModelSpace one = build_model_space(1, 1, 1);
    ModelState v(2);
    v << 1.0, 2.0;
    const ModelState w = charge_conjugation(one, 0, v);
    CHECK(w(0) == std::complex<double>(2.0));
    CHECK(w(1) == std::complex<double>(1.0));

    // matrix and amplitude actions agree
    auto rng = gen::case_rng(23, 0);
    const ModelState psi = random_model_state(rng, m);
    const StateVector via_matrix(
        m.space(), charge_conjugation_operator(m, 1).matrix() * to_sector_basis(m, psi).coeffs());
    const ModelState direct = charge_conjugation(m, 1, psi);
    CHECK((from_sector_basis(m, via_matrix) - direct).cwiseAbs().maxCoeff() == 0.0);

    CHECK_THROWS_AS((void)charge_conjugation(m, 5, psi), std::invalid_argument);
}

TEST_CASE("conjugations commute with |n|-dependent evolution") {
    const ChargeModelSpace m = build_model_space(2, 2, 2);
    const SectorHamiltonian h = absn_hamiltonian(m);
    const MatrixXcd u = evolution_matrix(h, 0.7, kNat);
    for (int p = 0; p < 2; ++p) {
        const MatrixXcd c = charge_conjugation_operator(m, p).matrix();
        CHECK((c * u - u * c).cwiseAbs().maxCoeff() < 1e-12);
    }
}

TEST_CASE("time reversal: antiunitarity and factorization") {
    const ChargeModelSpace m = build_model_space(2, 2, 2);
    auto rng = gen::case_rng(23, 1);
    for (int i = 0; i < 50; ++i) {
        const ModelState phi = gen::ginibre(rng, m.lattice().dim(), 1);
        const ModelState chi = gen::ginibre(rng, m.lattice().dim(), 1);
        for (const auto kind : {TimeReversalKind::conjugation, TimeReversalKind::full}) {
            const std::complex<double> lhs =
                (time_reversal(m, kind, phi).adjoint() * time_reversal(m, kind, chi))(0);
            CHECK(std::abs(lhs - std::conj((phi.adjoint() * chi)(0))) < 1e-12);
        }
        // T = T' C_1 ... C_N, entrywise
        ModelState via = time_reversal(m, TimeReversalKind::conjugation, phi);
        for (int p = 0; p < 2; ++p) via = charge_conjugation(m, p, via);
        CHECK((time_reversal(m, TimeReversalKind::full, phi) - via).cwiseAbs().maxCoeff() == 0.0);
    }

    // real amplitudes: T' acts as the identity
    ModelState real_state = ModelState::Zero(m.lattice().dim());
    real_state(3) = 0.5;
    real_state(7) = -1.5;
    CHECK((time_reversal(m, TimeReversalKind::conjugation, real_state) - real_state)
              .cwiseAbs()
              .maxCoeff() == 0.0);
}

TEST_CASE("time reversal inverts the evolution for real-symmetric H") {
    const ChargeModelSpace m = build_model_space(2, 2, 2);
    const SectorHamiltonian h = absn_hamiltonian(m);
    auto rng = gen::case_rng(23, 2);
    const double t = 0.9;
    for (int i = 0; i < 20; ++i) {
        const ModelState phi = random_model_state(rng, m);
        const ModelState evolved =
            from_sector_basis(m, evolve(to_sector_basis(m, phi), h, t, kNat));
        const ModelState lhs = time_reversal(m, TimeReversalKind::full, evolved);
        const ModelState rhs = from_sector_basis(
            m, evolve(to_sector_basis(m, time_reversal(m, TimeReversalKind::full, phi)), h, -t,
                      kNat));
        CHECK((lhs - rhs).cwiseAbs().maxCoeff() < 1e-12);
    }
}

TEST_CASE("uncharged projector") {
    const ChargeModelSpace m = build_model_space(1, 1, 3);  // dim 6
    const MatrixXcd p = uncharged_projector(m).matrix();
    CHECK((p * p - p).cwiseAbs().maxCoeff() < 1e-14);
    CHECK((p - p.adjoint()).cwiseAbs().maxCoeff() < 1e-14);
    CHECK(p.trace().real() == doctest::Approx(3.0));  // half of the dimension

    // projected states are symmetric under every single flip
    auto rng = gen::case_rng(23, 3);
    const ChargeModelSpace m2 = build_model_space(2, 2, 1);
    const MatrixXcd p2 = uncharged_projector(m2).matrix();
    const ModelState psi = random_model_state(rng, m2);
    const StateVector proj(m2.space(), p2 * to_sector_basis(m2, psi).coeffs());
    const ModelState amps = from_sector_basis(m2, proj);
    for (int q = 0; q < 2; ++q) {
        CHECK((charge_conjugation(m2, q, amps) - amps).cwiseAbs().maxCoeff() < 1e-13);
    }

    const MatrixXcd mop = mass_operator(m2).matrix();
    CHECK((p2 * mop - mop * p2).cwiseAbs().maxCoeff() < 1e-13);
    const MatrixXcd u = evolution_matrix(absn_hamiltonian(m2), 1.3, kNat);
    CHECK((p2 * u - u * p2).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("sector-basis round trip and integer averaging on the model space") {
    const ChargeModelSpace m = build_model_space(2, 2, 1);
    auto rng = gen::case_rng(23, 4);
    const ModelState psi = random_model_state(rng, m);
    CHECK((from_sector_basis(m, to_sector_basis(m, psi)) - psi).cwiseAbs().maxCoeff() == 0.0);

    const DensityOperator rho = gen::random_density(rng, m.space());
    const SectorOperator a = gen::random_operator(rng, m.space(), 1.0, false);
    const AverageReport rep = u1_average_integer(rho, a, 5);  // range 2 -> K > 4
    CHECK(rep.deviation < 1e-12);

    // dynamics machinery runs unchanged on the induced space
    const SectorHamiltonian h = absn_hamiltonian(m);
    const StateVector sv = to_sector_basis(m, psi);
    const ErrorBudget b = error_budget(sv, a, h, 5.0, kNat);
    CHECK(std::abs(b.value - b.reference - b.dephasing - b.residual) < 1e-14);
}

TEST_CASE("space description serializes to JSON") {
    const ChargeModelSpace m = build_model_space(2, 3, 2);
    const nlohmann::json j = model_space_to_json(m);
    CHECK(j.at("particles") == 2);
    CHECK(j.at("charge_cutoff") == 3);
    CHECK(j.at("orbital_dim") == 2);
    const ChargeModelSpace back = model_space_from_json(j);
    CHECK(back.space() == m.space());
    CHECK(back.lattice().dim() == m.lattice().dim());
}
