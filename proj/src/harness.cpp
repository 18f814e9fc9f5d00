#include "masslab/harness.hpp"

#include "masslab/mat_json.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace masslab {

std::string fmt_double(double x) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return buf;
}

std::vector<double> GridSpec::log_spaced() const {
    if (points < 1 || !(min > 0.0) || !(max > min)) {
        throw std::invalid_argument("GridSpec: need 0 < min < max and points >= 1");
    }
    std::vector<double> out;
    if (points == 1) {
        out.push_back(min);
        return out;
    }
    const double lmin = std::log10(min), lmax = std::log10(max);
    for (int i = 0; i < points; ++i) {
        out.push_back(std::pow(10.0, lmin + (lmax - lmin) * i / (points - 1)));
    }
    return out;
}

ExperimentConfig ExperimentConfig::from_json(const nlohmann::json& j) {
    ExperimentConfig cfg;
    if (j.contains("seed")) cfg.seed = j.at("seed").get<std::uint64_t>();
    if (j.contains("units")) {
        const auto u = j.at("units").get<std::string>();
        if (u == "natural") {
            cfg.constants = PhysicalConstants::natural();
        } else if (u == "si") {
            cfg.constants = PhysicalConstants::si();
        } else {
            throw std::invalid_argument("config: units must be 'natural' or 'si'");
        }
    }
    if (j.contains("gauge")) cfg.gauge_kind = j.at("gauge").get<std::string>();
    if (j.contains("cases")) cfg.cases = j.at("cases").get<int>();
    if (cfg.cases < 1) throw std::invalid_argument("config: cases must be >= 1");

    if (j.contains("spectrum")) {
        const auto& s = j.at("spectrum");
        cfg.spectrum = MassSpectrum(s.at("masses").get<std::vector<double>>(),
                                    s.at("dims").get<std::vector<Eigen::Index>>());
    }
    if (j.contains("state")) cfg.state = vector_from_json(j.at("state"));
    if (j.contains("observable")) {
        const auto& o = j.at("observable");
        if (o.contains("matrix")) cfg.observable = matrix_from_json(o.at("matrix"));
        if (o.contains("norm")) cfg.observable_norm = o.at("norm").get<double>();
    }
    if (j.contains("hamiltonian")) {
        const auto& h = j.at("hamiltonian");
        if (h.contains("energy_scale")) cfg.hamiltonian_scale = h.at("energy_scale").get<double>();
        if (h.contains("real")) cfg.hamiltonian_real = h.at("real").get<bool>();
        if (h.contains("blocks")) {
            std::vector<MatrixXcd> blocks;
            for (const auto& b : h.at("blocks")) blocks.push_back(matrix_from_json(b));
            cfg.hamiltonian_blocks = std::move(blocks);
        }
    }
    if (j.contains("model")) {
        const auto& m = j.at("model");
        if (m.contains("particles")) cfg.model_particles = m.at("particles").get<int>();
        if (m.contains("charge_cutoff")) cfg.model_cutoff = m.at("charge_cutoff").get<int>();
        if (m.contains("orbital_dim")) {
            cfg.model_orbital_dim = m.at("orbital_dim").get<Eigen::Index>();
        }
    }
    const auto read_grid = [](const nlohmann::json& g) {
        GridSpec spec{g.at("min").get<double>(), g.at("max").get<double>(),
                      g.at("points").get<int>()};
        spec.log_spaced();  // validate early
        return spec;
    };
    if (j.contains("t_grid")) cfg.t_grid = read_grid(j.at("t_grid"));
    if (j.contains("theta_grid")) cfg.theta_grid = read_grid(j.at("theta_grid"));
    if (j.contains("benchmark_checks")) {
        cfg.benchmark_checks = j.at("benchmark_checks").get<bool>();
    }
    if (j.contains("out")) cfg.out_path = j.at("out").get<std::string>();
    return cfg;
}

ExperimentConfig ExperimentConfig::decohere_benchmark() {
    ExperimentConfig cfg;
    cfg.constants = PhysicalConstants::natural();
    cfg.spectrum = MassSpectrum({1.0, 1.5}, {2, 2});

    VectorXcd psi = VectorXcd::Zero(4);
    psi(0) = 1.0 / std::numbers::sqrt2;
    psi(2) = 1.0 / std::numbers::sqrt2;
    cfg.state = psi;

    MatrixXcd a = psi * psi.adjoint();  // rank-one projector, norm 1
    cfg.observable = a;
    cfg.observable_norm = 1.0;

    MatrixXcd h1(2, 2), h2(2, 2);
    h1 << 0.6, 0.9, 0.9, -0.4;
    h2 << -0.7, 1.0, 1.0, 0.5;
    cfg.hamiltonian_blocks = {1e-4 * h1, 1e-4 * h2};
    cfg.benchmark_checks = true;
    return cfg;
}

bool RunReport::all_passed() const {
    return std::all_of(cases.begin(), cases.end(), [](const CaseResult& c) { return c.passed; });
}

std::string RunReport::table() const {
    std::ostringstream os;
    for (const CaseResult& c : cases) {
        char line[256];
        std::snprintf(line, sizeof(line), "%-38s %s  dev=%-12.3e tol=%-10.3e %7.1f ms\n",
                      c.name.c_str(), c.passed ? "PASS" : "FAIL", c.deviation, c.threshold,
                      c.wall_ms);
        os << line;
    }
    return os.str();
}

std::string RunReport::cases_csv() const {
    std::string out = "case,passed,deviation,threshold\n";
    for (const CaseResult& c : cases) {
        out += c.name + "," + (c.passed ? "1" : "0") + "," + fmt_double(c.deviation) + "," +
               fmt_double(c.threshold) + "\n";
    }
    return out;
}

namespace gen {

std::uint64_t mix(std::uint64_t seed, std::uint64_t index) {
    // splitmix64 over the (seed, index) pair
    std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (index + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

std::mt19937_64 case_rng(std::uint64_t seed, std::uint64_t index) {
    return std::mt19937_64(mix(seed, index));
}

double uniform(std::mt19937_64& rng, double lo, double hi) {
    return std::uniform_real_distribution<double>(lo, hi)(rng);
}

Rotation random_rotation(std::mt19937_64& rng) {
    Vec3 axis;
    do {
        axis = Vec3(uniform(rng, -1, 1), uniform(rng, -1, 1), uniform(rng, -1, 1));
    } while (axis.norm() < 1e-3);
    return Rotation::axis_angle(axis, uniform(rng, -std::numbers::pi, std::numbers::pi));
}

GroupElement random_element(std::mt19937_64& rng, double scale) {
    GroupElement g;
    g.time_shift = uniform(rng, -scale, scale);
    g.space_shift = Vec3(uniform(rng, -scale, scale), uniform(rng, -scale, scale),
                         uniform(rng, -scale, scale));
    g.boost =
        Vec3(uniform(rng, -scale, scale), uniform(rng, -scale, scale), uniform(rng, -scale, scale));
    g.rot = random_rotation(rng);
    return g;
}

ExtendedElement random_extended(std::mt19937_64& rng, double scale) {
    return ExtendedElement{uniform(rng, -scale, scale), random_element(rng, scale)};
}

Gauge random_gauge(std::mt19937_64& rng) {
    std::array<double, 8> a;
    for (double& c : a) c = uniform(rng, -1, 1);
    return Gauge([a](const GroupElement& g) {
        const double c = g.time_shift;
        const Vec3& cv = g.space_shift;
        const Vec3& v = g.boost;
        const Mat3& r = g.rot.matrix();
        return a[0] * c + a[1] * cv.dot(v) + a[2] * v.squaredNorm() +
               a[3] * (3.0 - r.trace()) + a[4] * c * c + a[5] * cv.dot(r * v) +
               a[6] * cv.squaredNorm() + a[7] * c * v.squaredNorm();
    });
}

Gauge broken_gauge() {
    return Gauge([](const GroupElement&) { return 1.0; });
}

MatrixXcd ginibre(std::mt19937_64& rng, Eigen::Index rows, Eigen::Index cols) {
    std::normal_distribution<double> normal(0.0, 1.0);
    MatrixXcd m(rows, cols);
    for (Eigen::Index i = 0; i < rows; ++i) {
        for (Eigen::Index j = 0; j < cols; ++j) {
            m(i, j) = std::complex<double>(normal(rng), normal(rng));
        }
    }
    return m;
}

MassSpectrum random_spectrum(std::mt19937_64& rng, int min_sectors, int max_sectors,
                             Eigen::Index min_dim, Eigen::Index max_dim, bool integer_masses,
                             double min_gap, double max_gap) {
    const int sectors = static_cast<int>(uniform(rng, min_sectors, max_sectors + 1));
    std::vector<double> masses;
    std::vector<Eigen::Index> dims;
    double mass = integer_masses ? std::floor(uniform(rng, 1, 4)) : uniform(rng, 0.5, 2.0);
    for (int s = 0; s < std::max(sectors, min_sectors); ++s) {
        masses.push_back(mass);
        dims.push_back(static_cast<Eigen::Index>(
            uniform(rng, static_cast<double>(min_dim), static_cast<double>(max_dim) + 1)));
        mass += integer_masses ? std::floor(uniform(rng, 1, 4)) : uniform(rng, min_gap, max_gap);
    }
    return MassSpectrum(std::move(masses), std::move(dims));
}

StateVector random_state(std::mt19937_64& rng, const SectoredSpace& space,
                         double min_sector_weight) {
    VectorXcd v(space.dim());
    if (min_sector_weight <= 0.0) {
        v = ginibre(rng, space.dim(), 1);
    } else {
        std::vector<double> weights;
        double total = 0.0;
        for (Eigen::Index s = 0; s < space.sectors(); ++s) {
            weights.push_back(min_sector_weight + uniform(rng, 0.0, 1.0));
            total += weights.back();
        }
        for (Eigen::Index s = 0; s < space.sectors(); ++s) {
            VectorXcd dir = ginibre(rng, space.sector_dim(s), 1);
            dir.normalize();
            v.segment(space.offset(s), space.sector_dim(s)) =
                std::sqrt(weights[static_cast<std::size_t>(s)] / total) * dir;
        }
    }
    v.normalize();
    return StateVector(space, std::move(v));
}

SectorOperator random_operator(std::mt19937_64& rng, const SectoredSpace& space,
                               double norm_target, bool hermitian) {
    MatrixXcd m = ginibre(rng, space.dim(), space.dim());
    if (hermitian) m = 0.5 * (m + MatrixXcd(m.adjoint()));
    const double top = m.jacobiSvd().singularValues()(0);
    return SectorOperator(space, m * (norm_target / top));
}

DensityOperator random_density(std::mt19937_64& rng, const SectoredSpace& space) {
    const MatrixXcd g = ginibre(rng, space.dim(), space.dim());
    MatrixXcd rho = g * g.adjoint();
    rho /= rho.trace().real();
    return DensityOperator(space, std::move(rho));
}

SectorHamiltonian random_hamiltonian(std::mt19937_64& rng, const SectoredSpace& space,
                                     double scale, bool real) {
    std::vector<MatrixXcd> blocks;
    for (Eigen::Index s = 0; s < space.sectors(); ++s) {
        MatrixXcd b = ginibre(rng, space.sector_dim(s), space.sector_dim(s));
        if (real) b = b.real().cast<std::complex<double>>();
        b = 0.5 * scale * (b + MatrixXcd(b.adjoint()));
        blocks.push_back(std::move(b));
    }
    return SectorHamiltonian::from_blocks(space, std::move(blocks));
}

PhaseSpacePointR random_point_r(std::mt19937_64& rng, std::size_t particles) {
    std::vector<Vec3> x, p;
    std::vector<double> zeta, mass;
    for (std::size_t k = 0; k < particles; ++k) {
        x.emplace_back(uniform(rng, -2, 2), uniform(rng, -2, 2), uniform(rng, -2, 2));
        p.emplace_back(uniform(rng, -2, 2), uniform(rng, -2, 2), uniform(rng, -2, 2));
        zeta.push_back(uniform(rng, -3, 3));
        mass.push_back(uniform(rng, 0.5, 3.0));
    }
    return PhaseSpacePointR(uniform(rng, -2, 2), std::move(x), std::move(p), std::move(zeta),
                            std::move(mass));
}

PhaseSpacePointS1 random_point_s1(std::mt19937_64& rng, std::size_t particles) {
    std::vector<Vec3> x, p;
    std::vector<double> zeta, n;
    for (std::size_t k = 0; k < particles; ++k) {
        x.emplace_back(uniform(rng, -2, 2), uniform(rng, -2, 2), uniform(rng, -2, 2));
        p.emplace_back(uniform(rng, -2, 2), uniform(rng, -2, 2), uniform(rng, -2, 2));
        zeta.push_back(uniform(rng, 0, two_pi));
        double charge = uniform(rng, 0.5, 3.0);
        if (uniform(rng, 0, 1) < 0.5) charge = -charge;
        n.push_back(charge);
    }
    return PhaseSpacePointS1(uniform(rng, -2, 2), std::move(x), std::move(p), std::move(zeta),
                             std::move(n));
}

}  // namespace gen

namespace {

class SuiteBuilder {
public:
    explicit SuiteBuilder(const ExperimentConfig& cfg) : cfg_(cfg) {}

    template <class Fn>
    void run(const std::string& name, double threshold, Fn&& fn) {
        const auto start = std::chrono::steady_clock::now();
        CaseResult res;
        res.name = name;
        res.threshold = threshold;
        double dev = 0.0;
        fn(dev);
        res.deviation = dev;
        res.passed = dev <= threshold;
        res.wall_ms = std::chrono::duration<double, std::milli>(
                          std::chrono::steady_clock::now() - start)
                          .count();
        report_.cases.push_back(std::move(res));
        ++case_index_;
    }

    std::mt19937_64 rng() { return gen::case_rng(cfg_.seed, case_index_); }
    Gauge make_gauge(std::mt19937_64& rng) const {
        if (cfg_.gauge_kind == "zero") return Gauge::zero();
        if (cfg_.gauge_kind == "polynomial") return gen::random_gauge(rng);
        if (cfg_.gauge_kind == "broken") return gen::broken_gauge();
        throw std::invalid_argument("config: unknown gauge kind '" + cfg_.gauge_kind + "'");
    }

    RunReport take() { return std::move(report_); }

private:
    const ExperimentConfig& cfg_;
    RunReport report_;
    std::uint64_t case_index_ = 0;
};

double max_abs(double a, double b) { return std::max(a, std::abs(b)); }

double element_deviation(const GroupElement& a, const GroupElement& b) {
    double dev = std::abs(a.time_shift - b.time_shift);
    dev = std::max(dev, (a.space_shift - b.space_shift).cwiseAbs().maxCoeff());
    dev = std::max(dev, (a.boost - b.boost).cwiseAbs().maxCoeff());
    dev = std::max(dev, (a.rot.matrix() - b.rot.matrix()).cwiseAbs().maxCoeff());
    return dev;
}

double point_deviation_r(const PhaseSpacePointR& a, const PhaseSpacePointR& b) {
    double dev = std::abs(a.t - b.t);
    for (std::size_t k = 0; k < a.particles(); ++k) {
        dev = std::max(dev, (a.x[k] - b.x[k]).cwiseAbs().maxCoeff());
        dev = std::max(dev, (a.p[k] - b.p[k]).cwiseAbs().maxCoeff());
        dev = max_abs(dev, a.zeta[k] - b.zeta[k]);
        dev = max_abs(dev, a.mass[k] - b.mass[k]);
    }
    return dev;
}

double point_deviation_s1(const PhaseSpacePointS1& a, const PhaseSpacePointS1& b) {
    double dev = std::abs(a.t - b.t);
    for (std::size_t k = 0; k < a.particles(); ++k) {
        dev = std::max(dev, (a.x[k] - b.x[k]).cwiseAbs().maxCoeff());
        dev = std::max(dev, (a.p[k] - b.p[k]).cwiseAbs().maxCoeff());
        dev = std::max(dev, circle_distance(a.zeta[k], b.zeta[k]));
        dev = max_abs(dev, a.n[k] - b.n[k]);
    }
    return dev;
}

}  // namespace

RunReport run_group_check(const ExperimentConfig& cfg) {
    SuiteBuilder suite(cfg);
    const int n = std::max(cfg.cases, 1);

    suite.run("cocycle-identity", 1e-10, [&](double& dev) {
        auto rng = suite.rng();
        for (int gauge_round = 0; gauge_round < 5; ++gauge_round) {
            const Gauge gauge = suite.make_gauge(rng);
            for (int i = 0; i < n; ++i) {
                const GroupElement g3 = gen::random_element(rng);
                const GroupElement g2 = gen::random_element(rng);
                const GroupElement g1 = gen::random_element(rng);
                const double lhs = cocycle_xi(g3, g2, gauge) + cocycle_xi(compose(g3, g2), g1, gauge);
                const double rhs = cocycle_xi(g3, compose(g2, g1), gauge) + cocycle_xi(g2, g1, gauge);
                dev = max_abs(dev, lhs - rhs);
            }
        }
    });

    suite.run("cocycle-inverse-identity", 1e-10, [&](double& dev) {
        auto rng = suite.rng();
        const Gauge gauge = suite.make_gauge(rng);
        for (int i = 0; i < n; ++i) {
            const GroupElement gp = gen::random_element(rng);
            const GroupElement g = gen::random_element(rng);
            const GroupElement prod = compose(gp, g);
            const double lhs = cocycle_xi(gp, g, gauge) + cocycle_xi(inverse(g), inverse(gp), gauge);
            const double rhs = cocycle_xi(g, inverse(g), gauge) +
                               cocycle_xi(gp, inverse(gp), gauge) -
                               cocycle_xi(prod, inverse(prod), gauge);
            dev = max_abs(dev, lhs - rhs);
        }
    });

    suite.run("cocycle-point-independence", 1e-10, [&](double& dev) {
        auto rng = suite.rng();
        const Gauge gauge = suite.make_gauge(rng);
        for (int i = 0; i < 50; ++i) {
            const GroupElement g2 = gen::random_element(rng);
            const GroupElement g1 = gen::random_element(rng);
            const double at_origin = cocycle_xi(g2, g1, gauge);
            for (int j = 0; j < 50; ++j) {
                const SpacetimePoint p{gen::uniform(rng, -3, 3),
                                       Vec3(gen::uniform(rng, -3, 3), gen::uniform(rng, -3, 3),
                                            gen::uniform(rng, -3, 3))};
                dev = max_abs(dev, cocycle_xi_at(g2, g1, gauge, p) - at_origin);
            }
        }
    });

    suite.run("gauge-covariance", 1e-10, [&](double& dev) {
        auto rng = suite.rng();
        const Gauge zero = Gauge::zero();
        for (int i = 0; i < n; ++i) {
            const Gauge gauge = gen::random_gauge(rng);
            const GroupElement g2 = gen::random_element(rng);
            const GroupElement g1 = gen::random_element(rng);
            const double shift = cocycle_xi(g2, g1, gauge) - cocycle_xi(g2, g1, zero);
            const double coboundary = gauge(g2) + gauge(g1) - gauge(compose(g2, g1));
            dev = max_abs(dev, shift - coboundary);
        }
    });

    suite.run("matrix-homomorphism", 1e-12, [&](double& dev) {
        auto rng = suite.rng();
        for (int i = 0; i < n; ++i) {
            const GroupElement a = gen::random_element(rng);
            const GroupElement b = gen::random_element(rng);
            dev = std::max(dev, (to_matrix(compose(a, b)) - to_matrix(a) * to_matrix(b))
                                    .cwiseAbs()
                                    .maxCoeff());
        }
    });

    suite.run("matrix-inverse", 1e-10, [&](double& dev) {
        auto rng = suite.rng();
        for (int i = 0; i < 200; ++i) {
            const GroupElement g = gen::random_element(rng);
            dev = std::max(dev,
                           (to_matrix(inverse(g)) - to_matrix(g).inverse()).cwiseAbs().maxCoeff());
        }
    });

    suite.run("action-composition", 1e-12, [&](double& dev) {
        auto rng = suite.rng();
        for (int i = 0; i < 100; ++i) {
            const GroupElement a = gen::random_element(rng);
            const GroupElement b = gen::random_element(rng);
            const SpacetimePoint p{gen::uniform(rng, -2, 2),
                                   Vec3(gen::uniform(rng, -2, 2), gen::uniform(rng, -2, 2),
                                        gen::uniform(rng, -2, 2))};
            const SpacetimePoint lhs = act_spacetime(compose(a, b), p);
            const SpacetimePoint rhs = act_spacetime(a, act_spacetime(b, p));
            dev = max_abs(dev, lhs.t - rhs.t);
            dev = std::max(dev, (lhs.x - rhs.x).cwiseAbs().maxCoeff());
        }
    });

    suite.run("group-inverse", 1e-12, [&](double& dev) {
        auto rng = suite.rng();
        for (int i = 0; i < n; ++i) {
            const GroupElement g = gen::random_element(rng);
            dev = std::max(dev, element_deviation(compose(g, inverse(g)), GroupElement::identity()));
            dev = std::max(dev, element_deviation(compose(inverse(g), g), GroupElement::identity()));
        }
    });

    suite.run("commutator-gauge-invariance", 1e-10, [&](double& dev) {
        auto rng = suite.rng();
        for (int i = 0; i < 50; ++i) {
            const Vec3 c(gen::uniform(rng, -2, 2), gen::uniform(rng, -2, 2),
                         gen::uniform(rng, -2, 2));
            const Vec3 v(gen::uniform(rng, -2, 2), gen::uniform(rng, -2, 2),
                         gen::uniform(rng, -2, 2));
            const double mass = gen::uniform(rng, 0.2, 3.0);
            const std::complex<double> ref = bargmann_commutator_phase(c, v, mass, Gauge::zero());
            for (int r = 0; r < 5; ++r) {
                const Gauge gauge = gen::random_gauge(rng);
                dev = std::max(dev, std::abs(bargmann_commutator_phase(c, v, mass, gauge) - ref));
            }
        }
    });

    suite.run("commutator-orthogonal-trivial", 1e-10, [&](double& dev) {
        auto rng = suite.rng();
        const Gauge gauge = suite.make_gauge(rng);
        for (int i = 0; i < 100; ++i) {
            Vec3 c(gen::uniform(rng, -2, 2), gen::uniform(rng, -2, 2), gen::uniform(rng, -2, 2));
            Vec3 v(gen::uniform(rng, -2, 2), gen::uniform(rng, -2, 2), gen::uniform(rng, -2, 2));
            v -= v.dot(c) / c.squaredNorm() * c;  // make c.v = 0
            const double mass = gen::uniform(rng, 0.2, 3.0);
            dev = std::max(dev, std::abs(bargmann_commutator_phase(c, v, mass, gauge) - 1.0));
            dev = std::max(dev, std::abs(bargmann_commutator_phase(c, v, 0.0, gauge) - 1.0));
        }
    });

    suite.run("commutator-phase-formula", 1e-10, [&](double& dev) {
        auto rng = suite.rng();
        const Gauge gauge = suite.make_gauge(rng);
        for (int i = 0; i < 200; ++i) {
            const Vec3 c(gen::uniform(rng, -1, 1), gen::uniform(rng, -1, 1),
                         gen::uniform(rng, -1, 1));
            const Vec3 v(gen::uniform(rng, -1, 1), gen::uniform(rng, -1, 1),
                         gen::uniform(rng, -1, 1));
            const double mass = gen::uniform(rng, 0.2, 2.0);
            const std::complex<double> expected =
                std::exp(std::complex<double>(0.0, -mass * c.dot(v)));
            dev = std::max(dev, std::abs(bargmann_commutator_phase(c, v, mass, gauge) - expected));
        }
    });

    suite.run("no-go-mass-difference", 1e-10, [&](double& dev) {
        auto rng = suite.rng();
        const Gauge gauge = suite.make_gauge(rng);
        const Vec3 c(1, 0, 0), v(1, 0, 0);  // c.v = 1
        for (int i = 0; i < 100; ++i) {
            const double m1 = gen::uniform(rng, 0.5, 3.0);
            const double m2 = m1 + gen::uniform(rng, 0.1, 2.0);
            // no gauge can identify the two representations: the phase at the
            // mass difference stays away from 1
            const double separation =
                std::abs(bargmann_commutator_phase(c, v, m2 - m1, gauge) - 1.0);
            if (separation < 0.05) dev = std::max(dev, 1.0);
        }
    });

    return suite.take();
}

RunReport run_classical_check(const ExperimentConfig& cfg) {
    SuiteBuilder suite(cfg);
    const int n = std::max(cfg.cases, 1);

    suite.run("representation-real-line", 1e-10, [&](double& dev) {
        auto rng = suite.rng();
        for (int round = 0; round < 3; ++round) {
            const Gauge gauge = suite.make_gauge(rng);
            for (int i = 0; i < n; ++i) {
                const ExtendedElement a2 = gen::random_extended(rng);
                const ExtendedElement a1 = gen::random_extended(rng);
                const PhaseSpacePointR pt = gen::random_point_r(rng, 2);
                const PhaseSpacePointR lhs = f_transform(a2, gauge, f_transform(a1, gauge, pt));
                const PhaseSpacePointR rhs = f_transform(ext_compose(a2, a1, gauge), gauge, pt);
                dev = std::max(dev, point_deviation_r(lhs, rhs));
            }
        }
    });

    suite.run("representation-circle", 1e-10, [&](double& dev) {
        auto rng = suite.rng();
        for (int round = 0; round < 3; ++round) {
            const Gauge gauge = suite.make_gauge(rng);
            for (int i = 0; i < n; ++i) {
                const ExtendedElement a2 = gen::random_extended(rng);
                const ExtendedElement a1 = gen::random_extended(rng);
                const PhaseSpacePointS1 pt = gen::random_point_s1(rng, 2);
                const PhaseSpacePointS1 lhs = g_transform(a2, gauge, g_transform(a1, gauge, pt));
                const PhaseSpacePointS1 rhs = g_transform(ext_compose(a2, a1, gauge), gauge, pt);
                dev = std::max(dev, point_deviation_s1(lhs, rhs));
            }
        }
    });

    suite.run("identity-map", 1e-14, [&](double& dev) {
        auto rng = suite.rng();
        const Gauge gauge = Gauge::zero();
        const PhaseSpacePointR pt = gen::random_point_r(rng, 2);
        dev = point_deviation_r(f_transform(ExtendedElement::identity(), gauge, pt), pt);
        const PhaseSpacePointS1 ps = gen::random_point_s1(rng, 2);
        dev = std::max(dev,
                       point_deviation_s1(g_transform(ExtendedElement::identity(), gauge, ps), ps));
    });

    suite.run("canonicity-affine-real-line", 1e-6, [&](double& dev) {
        auto rng = suite.rng();
        const Gauge gauge = suite.make_gauge(rng);
        for (int i = 0; i < 100; ++i) {
            ExtendedElement a = gen::random_extended(rng);
            a.g.time_shift = 0.0;
            const CanonicalMap map{a, gauge, PhaseModel::real_line};
            dev = std::max(dev, symplectic_defect(map, gen::random_point_r(rng, 2)));
        }
    });

    suite.run("canonicity-affine-circle", 1e-6, [&](double& dev) {
        auto rng = suite.rng();
        const Gauge gauge = suite.make_gauge(rng);
        for (int i = 0; i < 100; ++i) {
            ExtendedElement a = gen::random_extended(rng);
            a.g.time_shift = 0.0;
            const CanonicalMap map{a, gauge, PhaseModel::circle};
            dev = std::max(dev, symplectic_defect(map, gen::random_point_s1(rng, 2)));
        }
    });

    suite.run("canonicity-with-flow-real-line", 1e-5, [&](double& dev) {
        auto rng = suite.rng();
        const Gauge gauge = suite.make_gauge(rng);
        for (int i = 0; i < 100; ++i) {
            const ExtendedElement a = gen::random_extended(rng);
            const CanonicalMap map{a, gauge, PhaseModel::real_line};
            dev = std::max(dev, symplectic_defect(map, gen::random_point_r(rng, 2)));
        }
    });

    suite.run("canonicity-with-flow-circle", 1e-5, [&](double& dev) {
        auto rng = suite.rng();
        const Gauge gauge = suite.make_gauge(rng);
        for (int i = 0; i < 100; ++i) {
            const ExtendedElement a = gen::random_extended(rng);
            const CanonicalMap map{a, gauge, PhaseModel::circle};
            dev = std::max(dev, symplectic_defect(map, gen::random_point_s1(rng, 2)));
        }
    });

    suite.run("broken-map-flagged", 1e-9, [&](double& dev) {
        // (x, p) -> (2x, p) must show defect 1
        const auto doubling = [](const Eigen::VectorXd& v) {
            Eigen::VectorXd out = v;
            out(0) *= 2.0;
            return out;
        };
        Eigen::VectorXd at(2);
        at << 0.7, -0.3;
        dev = std::abs(symplectic_defect(doubling, at) - 1.0);
    });

    suite.run("circle-2pi-invariance", 1e-10, [&](double& dev) {
        auto rng = suite.rng();
        const Gauge gauge = suite.make_gauge(rng);
        for (int i = 0; i < 100; ++i) {
            const ExtendedElement a = gen::random_extended(rng);
            PhaseSpacePointS1 pt = gen::random_point_s1(rng, 2);
            PhaseSpacePointS1 shifted = pt;
            shifted.zeta[0] = reduce_angle(shifted.zeta[0] + two_pi);
            shifted.zeta[1] = reduce_angle(shifted.zeta[1] - two_pi);
            dev = std::max(dev, point_deviation_s1(g_transform(a, gauge, pt),
                                                   g_transform(a, gauge, shifted)));
        }
    });

    suite.run("flow-additivity", 1e-10, [&](double& dev) {
        auto rng = suite.rng();
        for (int i = 0; i < 100; ++i) {
            const double t1 = gen::uniform(rng, -2, 2), t2 = gen::uniform(rng, -2, 2);
            const PhaseSpacePointR pt = gen::random_point_r(rng, 2);
            dev = std::max(dev, point_deviation_r(free_flow(free_flow(pt, t1), t2),
                                                  free_flow(pt, t1 + t2)));
            const PhaseSpacePointS1 ps = gen::random_point_s1(rng, 2);
            dev = std::max(dev, point_deviation_s1(free_flow(free_flow(ps, t1), t2),
                                                   free_flow(ps, t1 + t2)));
        }
    });

    suite.run("mass-charge-conservation", 0.0, [&](double& dev) {
        auto rng = suite.rng();
        const Gauge gauge = suite.make_gauge(rng);
        for (int i = 0; i < 100; ++i) {
            const ExtendedElement a = gen::random_extended(rng);
            const PhaseSpacePointR pt = gen::random_point_r(rng, 2);
            const PhaseSpacePointR out = f_transform(a, gauge, pt);
            for (std::size_t k = 0; k < pt.particles(); ++k) {
                dev = max_abs(dev, out.mass[k] - pt.mass[k]);
            }
            const PhaseSpacePointS1 ps = gen::random_point_s1(rng, 2);
            const PhaseSpacePointS1 outs = g_transform(a, gauge, ps);
            for (std::size_t k = 0; k < ps.particles(); ++k) {
                dev = max_abs(dev, outs.n[k] - ps.n[k]);
            }
        }
    });

    return suite.take();
}

RunReport run_supersel(const ExperimentConfig& cfg) {
    SuiteBuilder suite(cfg);
    const int n = std::max(cfg.cases, 1);
    const auto spectrum = [&](std::mt19937_64& rng) {
        return cfg.spectrum ? *cfg.spectrum
                            : gen::random_spectrum(rng, cfg.min_sectors, cfg.max_sectors,
                                                   cfg.min_sector_dim, cfg.max_sector_dim, false);
    };

    suite.run("projector-resolution", 1e-14, [&](double& dev) {
        auto rng = suite.rng();
        for (int i = 0; i < n; ++i) {
            const SectoredSpace space(spectrum(rng));
            MatrixXcd sum = MatrixXcd::Zero(space.dim(), space.dim());
            for (Eigen::Index s = 0; s < space.sectors(); ++s) {
                const MatrixXcd p = sector_projector(space, space.mass(s)).matrix();
                sum += p;
                dev = std::max(dev, (p * p - p).cwiseAbs().maxCoeff());
                dev = std::max(dev, (p - p.adjoint()).cwiseAbs().maxCoeff());
            }
            dev = std::max(
                dev, (sum - MatrixXcd::Identity(space.dim(), space.dim())).cwiseAbs().maxCoeff());
        }
    });

    suite.run("lemma-sector-expectation", 1e-12, [&](double& dev) {
        auto rng = suite.rng();
        for (int i = 0; i < n; ++i) {
            const SectoredSpace space(spectrum(rng));
            const StateVector psi = gen::random_state(rng, space, 0.05);
            const SectorOperator a =
                superselect_operator(gen::random_operator(rng, space, cfg.observable_norm));
            const std::complex<double> direct =
                (psi.coeffs().adjoint() * a.matrix() * psi.coeffs())(0);
            std::complex<double> by_sector = 0.0;
            for (Eigen::Index s = 0; s < space.sectors(); ++s) {
                by_sector += (psi.component(s).adjoint() * a.block(s, s) * psi.component(s))(0);
            }
            const std::complex<double> via_rho = expect(rho_psi(psi), a);
            dev = std::max(dev, std::abs(direct - by_sector));
            dev = std::max(dev, std::abs(direct - via_rho));
        }
    });

    suite.run("superselect-idempotent-linear", 1e-12, [&](double& dev) {
        auto rng = suite.rng();
        for (int i = 0; i < n; ++i) {
            const SectoredSpace space(spectrum(rng));
            const SectorOperator a = gen::random_operator(rng, space, 1.0);
            const SectorOperator b = gen::random_operator(rng, space, 1.0);
            const SectorOperator ab = superselect_operator(a);
            dev = std::max(
                dev, (superselect_operator(ab).matrix() - ab.matrix()).cwiseAbs().maxCoeff());
            const MatrixXcd lin =
                superselect_operator(SectorOperator(space, a.matrix() + 2.0 * b.matrix()))
                    .matrix();
            dev = std::max(dev, (lin - ab.matrix() - 2.0 * superselect_operator(b).matrix())
                                    .cwiseAbs()
                                    .maxCoeff());
            if (!is_block_diagonal(ab, 0.0)) dev = std::max(dev, 1.0);
        }
    });

    suite.run("thm2-fixed-point", 1e-14, [&](double& dev) {
        auto rng = suite.rng();
        for (int i = 0; i < n; ++i) {
            const SectoredSpace space(spectrum(rng));
            const SectorOperator a =
                superselect_operator(gen::random_operator(rng, space, 1.0));
            dev = std::max(
                dev, (superselect_operator(a).matrix() - a.matrix()).cwiseAbs().maxCoeff());
        }
    });

    suite.run("thm2-norm-contraction", 1e-10, [&](double& dev) {
        auto rng = suite.rng();
        for (int i = 0; i < n; ++i) {
            const SectoredSpace space(spectrum(rng));
            const SectorOperator a = gen::random_operator(rng, space, 1.0, false);
            const double excess = superselect_operator(a).op_norm() - a.op_norm();
            dev = std::max(dev, excess);
        }
    });

    suite.run("thm2-adjoint", 1e-14, [&](double& dev) {
        auto rng = suite.rng();
        for (int i = 0; i < n; ++i) {
            const SectoredSpace space(spectrum(rng));
            const SectorOperator a = gen::random_operator(rng, space, 1.0, false);
            dev = std::max(dev, (superselect_operator(a.adjoint()).matrix() -
                                 superselect_operator(a).adjoint().matrix())
                                    .cwiseAbs()
                                    .maxCoeff());
        }
    });

    suite.run("thm2-projector-effect", 1e-10, [&](double& dev) {
        auto rng = suite.rng();
        for (int i = 0; i < n; ++i) {
            const SectoredSpace space(spectrum(rng));
            // random orthogonal projector via a Haar-ish unitary
            const Eigen::HouseholderQR<MatrixXcd> qr(gen::ginibre(rng, space.dim(), space.dim()));
            const MatrixXcd q = qr.householderQ();
            const Eigen::Index rank =
                1 + static_cast<Eigen::Index>(gen::uniform(rng, 0, static_cast<double>(space.dim())));
            const MatrixXcd proj =
                q.leftCols(rank) * q.leftCols(rank).adjoint();
            const SectorOperator pb = superselect_operator(SectorOperator(space, proj));
            const Eigen::SelfAdjointEigenSolver<MatrixXcd> es(pb.matrix(), Eigen::EigenvaluesOnly);
            dev = std::max(dev, -es.eigenvalues().minCoeff());
            dev = std::max(dev, es.eigenvalues().maxCoeff() - 1.0);
        }
    });

    suite.run("thm2-state-equivalence", 1e-10, [&](double& dev) {
        auto rng = suite.rng();
        for (int i = 0; i < std::min(n, 50); ++i) {
            const SectoredSpace space(spectrum(rng));
            const SectorOperator a = gen::random_operator(rng, space, 1.0);
            // forward: off-block noise leaves every allowed expectation fixed
            MatrixXcd noise = gen::ginibre(rng, space.dim(), space.dim());
            for (Eigen::Index s = 0; s < space.sectors(); ++s) {
                noise.block(space.offset(s), space.offset(s), space.sector_dim(s),
                            space.sector_dim(s))
                    .setZero();
            }
            const SectorOperator a2(space, a.matrix() + noise);
            dev = std::max(dev, (superselect_operator(a).matrix() -
                                 superselect_operator(a2).matrix())
                                    .cwiseAbs()
                                    .maxCoeff());
            for (int t = 0; t < 20; ++t) {
                const DensityOperator rho =
                    superselect_state(gen::random_density(rng, space));
                dev = std::max(dev, std::abs(expect(rho, a) - expect(rho, a2)));
            }
            // converse: equal traces on a spanning sector-supported family
            // forces equal block parts, so a strictly in-block perturbation
            // must be seen by some family member
            const Eigen::Index s = 0;
            MatrixXcd bump = MatrixXcd::Zero(space.dim(), space.dim());
            bump(space.offset(s), space.offset(s)) = 0.5;
            const SectorOperator a3(space, a.matrix() + bump);
            double witnessed = 0.0;
            for (Eigen::Index d = 0; d < space.sector_dim(s); ++d) {
                VectorXcd e = VectorXcd::Zero(space.dim());
                e(space.offset(s) + d) = 1.0;
                const DensityOperator rho(space, e * e.adjoint());
                witnessed = std::max(witnessed, std::abs(expect(rho, a) - expect(rho, a3)));
            }
            if (witnessed < 0.25) dev = std::max(dev, 1.0);
        }
    });

    suite.run("thm3-trace-preservation", 1e-12, [&](double& dev) {
        auto rng = suite.rng();
        for (int i = 0; i < n; ++i) {
            const SectoredSpace space(spectrum(rng));
            const DensityOperator rho = gen::random_density(rng, space);
            const DensityOperator rb = superselect_state(rho);
            dev = std::max(dev, std::abs(rb.matrix().trace() - 1.0));
            for (Eigen::Index s = 0; s < space.sectors(); ++s) {
                const MatrixXcd p = sector_projector(space, space.mass(s)).matrix();
                dev = std::max(
                    dev, (p * rb.matrix() - rb.matrix() * p).cwiseAbs().maxCoeff());
            }
            const SectorOperator a =
                superselect_operator(gen::random_operator(rng, space, 1.0));
            dev = std::max(dev, std::abs(expect(rho, a) - expect(rb, a)));
        }
    });

    suite.run("thm3-rank-one", 1e-12, [&](double& dev) {
        auto rng = suite.rng();
        for (int i = 0; i < n; ++i) {
            const SectoredSpace space(spectrum(rng));
            const StateVector psi = gen::random_state(rng, space, 0.05);
            const DensityOperator pure(space, psi.coeffs() * psi.coeffs().adjoint());
            dev = std::max(dev, (superselect_state(pure).matrix() - rho_psi(psi).matrix())
                                    .cwiseAbs()
                                    .maxCoeff());
        }
    });

    suite.run("rho-psi-phase-invariance", 1e-12, [&](double& dev) {
        auto rng = suite.rng();
        for (int i = 0; i < n; ++i) {
            const SectoredSpace space(spectrum(rng));
            const StateVector psi = gen::random_state(rng, space, 0.05);
            VectorXcd twisted = psi.coeffs();
            for (Eigen::Index s = 0; s < space.sectors(); ++s) {
                const std::complex<double> phase =
                    std::exp(std::complex<double>(0.0, gen::uniform(rng, 0, two_pi)));
                twisted.segment(space.offset(s), space.sector_dim(s)) *= phase;
            }
            dev = std::max(dev, (rho_psi(StateVector(space, twisted)).matrix() -
                                 rho_psi(psi).matrix())
                                    .cwiseAbs()
                                    .maxCoeff());
        }
    });

    suite.run("spectrum-positivity-enforced", 0.0, [&](double& dev) {
        bool threw = false;
        try {
            MassSpectrum bad({-1.0, 2.0}, {1, 1});
        } catch (const std::invalid_argument&) {
            threw = true;
        }
        if (!threw) dev = 1.0;
        threw = false;
        try {
            MassSpectrum bad({0.0}, {1});
        } catch (const std::invalid_argument&) {
            threw = true;
        }
        if (!threw) dev = 1.0;
    });

    return suite.take();
}

RunReport run_average(const ExperimentConfig& cfg) {
    SuiteBuilder suite(cfg);
    const int n = std::max(cfg.cases / 4, 8);
    std::string csv = "kind,parameter,deviation\n";

    suite.run("integer-exactness", 1e-12, [&](double& dev) {
        auto rng = suite.rng();
        for (int i = 0; i < n; ++i) {
            const SectoredSpace space(
                gen::random_spectrum(rng, 2, 4, 1, 4, true));
            const DensityOperator rho = gen::random_density(rng, space);
            const SectorOperator a = gen::random_operator(rng, space, 1.0);
            const int range = static_cast<int>(
                std::lround(space.mass(space.sectors() - 1) - space.mass(0)));
            for (const int k : {2 * range + 1, 2 * (2 * range + 1)}) {
                const AverageReport rep = u1_average_integer(rho, a, k);
                dev = std::max(dev, rep.deviation);
                csv += "K," + fmt_double(k) + "," + fmt_double(rep.deviation) + "\n";
            }
        }
    });

    suite.run("integer-grid-stability", 1e-12, [&](double& dev) {
        auto rng = suite.rng();
        for (int i = 0; i < n; ++i) {
            const SectoredSpace space(gen::random_spectrum(rng, 2, 4, 1, 4, true));
            const DensityOperator rho = gen::random_density(rng, space);
            const SectorOperator a = gen::random_operator(rng, space, 1.0);
            const int range = static_cast<int>(
                std::lround(space.mass(space.sectors() - 1) - space.mass(0)));
            const int base = 2 * range + 1;
            const std::complex<double> ref = u1_average_integer(rho, a, base).value;
            for (const int k : {base + 1, 3 * base, 7 * base + 2}) {
                dev = std::max(dev, std::abs(u1_average_integer(rho, a, k).value - ref));
            }
        }
    });

    suite.run("block-diagonal-constant", 1e-13, [&](double& dev) {
        auto rng = suite.rng();
        // single sector: any K >= 1 is admissible and the integrand is constant
        const SectoredSpace single(MassSpectrum({2.0}, {3}));
        const DensityOperator rho1 = gen::random_density(rng, single);
        const SectorOperator a1 = gen::random_operator(rng, single, 1.0);
        for (const int k : {1, 2, 5}) {
            dev = std::max(dev,
                           std::abs(u1_average_integer(rho1, a1, k).value - expect(rho1, a1)));
        }
        for (int i = 0; i < n; ++i) {
            const SectoredSpace space(gen::random_spectrum(rng, 2, 4, 1, 4, true));
            const DensityOperator rho = gen::random_density(rng, space);
            const SectorOperator a =
                superselect_operator(gen::random_operator(rng, space, 1.0));
            const int range = static_cast<int>(
                std::lround(space.mass(space.sectors() - 1) - space.mass(0)));
            const AverageReport rep = u1_average_integer(rho, a, 2 * range + 1);
            dev = std::max(dev, std::abs(rep.value - expect(rho, a)));
            const AverageReport lp = u1_average_longperiod(rho, a, gen::uniform(rng, 0.5, 50));
            dev = std::max(dev, lp.deviation);
        }
    });

    suite.run("cyclic-trace-equality", 1e-12, [&](double& dev) {
        auto rng = suite.rng();
        for (int i = 0; i < n; ++i) {
            const SectoredSpace space(gen::random_spectrum(rng, 2, 4, 1, 4, true));
            const DensityOperator rho = gen::random_density(rng, space);
            const SectorOperator a = gen::random_operator(rng, space, 1.0);
            const int range = static_cast<int>(
                std::lround(space.mass(space.sectors() - 1) - space.mass(0)));
            const int k = 2 * range + 1;
            const AverageReport rep = u1_average_integer(rho, a, k);
            // conjugate the state instead of the observable
            std::complex<double> state_side = 0.0;
            for (int j = 0; j < k; ++j) {
                const double theta = 2.0 * std::numbers::pi * j / k;
                VectorXcd phases(space.dim());
                for (Eigen::Index s = 0; s < space.sectors(); ++s) {
                    phases.segment(space.offset(s), space.sector_dim(s))
                        .setConstant(std::exp(std::complex<double>(0.0, theta * space.mass(s))));
                }
                const MatrixXcd rotated = phases.asDiagonal() * rho.matrix() *
                                          phases.conjugate().asDiagonal();
                state_side += (rotated.cwiseProduct(a.matrix().transpose())).sum();
            }
            state_side /= static_cast<double>(k);
            dev = std::max(dev, std::abs(state_side - rep.value));
        }
    });

    suite.run("longperiod-bound", 1e-12, [&](double& dev) {
        auto rng = suite.rng();
        for (int i = 0; i < n; ++i) {
            const SectoredSpace space(gen::random_spectrum(rng, 2, 5, 1, 4, false));
            const DensityOperator rho = gen::random_density(rng, space);
            const SectorOperator a = gen::random_operator(rng, space, 1.0);
            for (const double theta : cfg.theta_grid.log_spaced()) {
                const AverageReport rep = u1_average_longperiod(rho, a, theta);
                const double bound = longperiod_deviation_bound(rho, a, theta);
                dev = std::max(dev, rep.deviation - bound);
                csv += "Theta," + fmt_double(theta) + "," + fmt_double(rep.deviation) + "\n";
            }
        }
    });

    suite.run("longperiod-one-over-theta", 0.1, [&](double& dev) {
        auto rng = suite.rng();
        // Two sectors with an irrational gap; the probe observable has a
        // single off-diagonal block so the deviation carries one frequency.
        const SectoredSpace space(MassSpectrum({1.0, std::numbers::sqrt2}, {2, 2}));
        const double gap = std::numbers::sqrt2 - 1.0;
        const DensityOperator rho = gen::random_density(rng, space);
        MatrixXcd probe = MatrixXcd::Zero(space.dim(), space.dim());
        probe.block(0, 2, 2, 2) = gen::ginibre(rng, 2, 2);
        probe /= probe.jacobiSvd().singularValues()(0);
        const SectorOperator a(space, probe);
        // theta chosen with gap*theta = 2pi/3 * 2^k: the oscillatory factor
        // keeps the same magnitude at every doubling
        double theta = 2.0 * std::numbers::pi / (3.0 * gap);
        double prev = u1_average_longperiod(rho, a, theta).deviation;
        csv += "Theta," + fmt_double(theta) + "," + fmt_double(prev) + "\n";
        for (int k = 0; k < 7; ++k) {
            theta *= 2.0;
            const double cur = u1_average_longperiod(rho, a, theta).deviation;
            csv += "Theta," + fmt_double(theta) + "," + fmt_double(cur) + "\n";
            dev = std::max(dev, std::abs(prev / cur - 2.0) / 2.0);
            prev = cur;
        }
    });

    suite.run("integer-theta-2pi-match", 1e-12, [&](double& dev) {
        auto rng = suite.rng();
        for (int i = 0; i < n; ++i) {
            const SectoredSpace space(gen::random_spectrum(rng, 2, 4, 1, 4, true));
            const DensityOperator rho = gen::random_density(rng, space);
            const SectorOperator a = gen::random_operator(rng, space, 1.0);
            const int range = static_cast<int>(
                std::lround(space.mass(space.sectors() - 1) - space.mass(0)));
            const AverageReport grid = u1_average_integer(rho, a, 2 * range + 1);
            const AverageReport lp = u1_average_longperiod(rho, a, two_pi);
            dev = std::max(dev, std::abs(grid.value - lp.value));
        }
    });

    RunReport rep = suite.take();
    rep.csv = std::move(csv);
    return rep;
}

RunReport run_decohere(const ExperimentConfig& cfg) {
    SuiteBuilder suite(cfg);

    const ExperimentConfig bench = ExperimentConfig::decohere_benchmark();
    const MassSpectrum spectrum = cfg.spectrum ? *cfg.spectrum : *bench.spectrum;
    const SectoredSpace space{spectrum};
    const StateVector psi(space, cfg.state ? *cfg.state : *bench.state);
    const SectorOperator a(space, cfg.observable ? *cfg.observable : *bench.observable);
    const SectorHamiltonian h = SectorHamiltonian::from_blocks(
        space, cfg.hamiltonian_blocks ? *cfg.hamiltonian_blocks : *bench.hamiltonian_blocks);
    const PhysicalConstants& k = cfg.constants;

    const ErrorBudget probe = error_budget(psi, a, h, 1.0, k);
    const bool window_finite =
        probe.t_low > 0.0 && std::isfinite(probe.t_high) && probe.t_high > probe.t_low;
    const double midpoint = window_finite ? std::sqrt(probe.t_low * probe.t_high) : 1.0;

    GridSpec grid;
    if (cfg.t_grid) {
        grid = *cfg.t_grid;
    } else if (window_finite) {
        grid = GridSpec{midpoint * 1e-3, midpoint * 1e3, 61};
    } else {
        grid = GridSpec{1e-2, 1e4, 61};
    }
    std::vector<double> ts = grid.log_spaced();
    if (window_finite) {
        ts.push_back(probe.t_low / 100.0);
        ts.push_back(midpoint);
    }
    std::sort(ts.begin(), ts.end());

    std::string csv =
        "T,value_re,value_im,reference_re,reference_im,abs_D,bound_D,abs_R,"
        "bound_R_intermediate,in_window\n";
    std::vector<ErrorBudget> budgets;
    for (const double t : ts) {
        const ErrorBudget b = error_budget(psi, a, h, t, k);
        budgets.push_back(b);
        csv += fmt_double(t) + "," + fmt_double(b.value.real()) + "," +
               fmt_double(b.value.imag()) + "," + fmt_double(b.reference.real()) + "," +
               fmt_double(b.reference.imag()) + "," + fmt_double(std::abs(b.dephasing)) + "," +
               fmt_double(b.bound_dephasing) + "," + fmt_double(std::abs(b.residual)) + "," +
               fmt_double(b.bound_residual_intermediate) + "," +
               ((b.t_low < t && t < b.t_high) ? "1" : "0") + "\n";
    }

    suite.run("bounds-dominate", 0.0, [&](double& dev) {
        for (const ErrorBudget& b : budgets) {
            dev = std::max(dev, std::abs(b.dephasing) -
                                    (b.bound_dephasing * (1.0 + 1e-9) + 1e-13));
            dev = std::max(dev, std::abs(b.residual) -
                                    (b.bound_residual_intermediate * (1.0 + 1e-9) + 1e-13));
        }
        dev = std::max(dev, 0.0);
    });

    suite.run("decomposition-identity", 1e-12, [&](double& dev) {
        for (const ErrorBudget& b : budgets) {
            dev = std::max(dev,
                           std::abs(b.value - (b.reference + b.dephasing + b.residual)));
        }
    });

    bool h_is_zero = true;
    for (Eigen::Index s = 0; s < space.sectors(); ++s) {
        if (h.block(s).cwiseAbs().maxCoeff() != 0.0) h_is_zero = false;
    }
    if (h_is_zero) {
        suite.run("free-hamiltonian-zero-residual", 1e-13, [&](double& dev) {
            for (const ErrorBudget& b : budgets) dev = std::max(dev, std::abs(b.residual));
        });
    }

    if (cfg.benchmark_checks && window_finite) {
        suite.run("plateau-at-window-midpoint", 0.01, [&](double& dev) {
            const ErrorBudget b = error_budget(psi, a, h, midpoint, k);
            dev = std::abs(b.value - b.reference) / b.norm_a;
        });
        suite.run("coherence-below-window", 0.0, [&](double& dev) {
            const ErrorBudget b = error_budget(psi, a, h, probe.t_low / 100.0, k);
            // expects a large remnant coherence: deviation is the shortfall
            dev = std::max(0.0, 0.2 - std::abs(b.value - b.reference));
        });
    }

    RunReport rep = suite.take();
    rep.csv = std::move(csv);
    return rep;
}

RunReport run_model(const ExperimentConfig& cfg) {
    SuiteBuilder suite(cfg);
    const ChargeModelSpace model =
        build_model_space(cfg.model_particles, cfg.model_cutoff, cfg.model_orbital_dim);
    const SectoredSpace& space = model.space();
    const PhysicalConstants k = PhysicalConstants::natural();

    // |n|-dependent real-symmetric Hamiltonian: diagonal in the charges with
    // an orbital coupling whose strength depends only on the total mass.
    const auto model_hamiltonian = [&] {
        const Eigen::Index d = model.lattice().orbital_dim();
        Eigen::MatrixXd orb = Eigen::MatrixXd::Zero(d, d);
        for (Eigen::Index i = 0; i < d; ++i) {
            for (Eigen::Index j = 0; j <= i; ++j) {
                orb(i, j) = orb(j, i) = 0.1 * static_cast<double>(i + j + 1);
            }
        }
        MatrixXcd full = MatrixXcd::Zero(space.dim(), space.dim());
        for (Eigen::Index li = 0; li < model.lattice().dim(); ++li) {
            const int mass = model.lattice().total_mass_of(li);
            const Eigen::Index oi = model.lattice().orbital_of(li);
            const Eigen::Index base = li - oi;
            for (Eigen::Index oj = 0; oj < d; ++oj) {
                const Eigen::Index lj = base + oj;
                double val = (0.3 + 0.05 * mass) * orb(oi, oj);
                if (li == lj) val += mass + 0.2 * mass * mass;
                full(model.lattice_to_sector(li), model.lattice_to_sector(lj)) = val;
            }
        }
        return SectorHamiltonian::from_full(space, full);
    }();

    suite.run("spectrum-enumeration", 0.0, [&](double& dev) {
        const int n_particles = cfg.model_particles;
        const int cutoff = cfg.model_cutoff;
        if (space.mass(0) != n_particles) dev = 1.0;
        if (space.mass(space.sectors() - 1) != n_particles * cutoff) dev = 1.0;
        if (space.sectors() != n_particles * cutoff - n_particles + 1) dev = 1.0;
        // recount multiplicities independently of the builder
        std::vector<Eigen::Index> counts(static_cast<std::size_t>(space.sectors()), 0);
        const ChargeLattice& lat = model.lattice();
        for (Eigen::Index i = 0; i < lat.dim(); ++i) {
            counts[static_cast<std::size_t>(lat.total_mass_of(i) - n_particles)] += 1;
        }
        for (Eigen::Index s = 0; s < space.sectors(); ++s) {
            if (counts[static_cast<std::size_t>(s)] != space.sector_dim(s)) dev = 1.0;
        }
    });

    suite.run("conjugation-involution", 0.0, [&](double& dev) {
        for (int p = 0; p < cfg.model_particles; ++p) {
            const MatrixXcd c = charge_conjugation_operator(model, p).matrix();
            dev = std::max(dev, (c * c - MatrixXcd::Identity(space.dim(), space.dim()))
                                    .cwiseAbs()
                                    .maxCoeff());
            for (int q = 0; q < p; ++q) {
                const MatrixXcd c2 = charge_conjugation_operator(model, q).matrix();
                dev = std::max(dev, (c * c2 - c2 * c).cwiseAbs().maxCoeff());
            }
        }
    });

    suite.run("conjugation-mass-commute", 0.0, [&](double& dev) {
        const MatrixXcd m = mass_operator(model).matrix();
        for (int p = 0; p < cfg.model_particles; ++p) {
            const MatrixXcd c = charge_conjugation_operator(model, p).matrix();
            dev = std::max(dev, (c * m - m * c).cwiseAbs().maxCoeff());
        }
    });

    suite.run("conjugation-evolution-commute", 1e-12, [&](double& dev) {
        const MatrixXcd u = evolution_matrix(model_hamiltonian, 0.7, k);
        for (int p = 0; p < cfg.model_particles; ++p) {
            const MatrixXcd c = charge_conjugation_operator(model, p).matrix();
            dev = std::max(dev, (c * u - u * c).cwiseAbs().maxCoeff());
        }
    });

    suite.run("time-reversal-antiunitary", 1e-12, [&](double& dev) {
        auto rng = suite.rng();
        for (int i = 0; i < 50; ++i) {
            const ModelState phi = gen::ginibre(rng, model.lattice().dim(), 1);
            const ModelState chi = gen::ginibre(rng, model.lattice().dim(), 1);
            for (const auto kind : {TimeReversalKind::conjugation, TimeReversalKind::full}) {
                const std::complex<double> lhs =
                    (time_reversal(model, kind, phi).adjoint() * time_reversal(model, kind, chi))(0);
                const std::complex<double> rhs = std::conj((phi.adjoint() * chi)(0));
                dev = std::max(dev, std::abs(lhs - rhs));
            }
        }
    });

    suite.run("time-reversal-factorization", 0.0, [&](double& dev) {
        auto rng = suite.rng();
        for (int i = 0; i < 50; ++i) {
            ModelState phi = gen::ginibre(rng, model.lattice().dim(), 1);
            ModelState via = time_reversal(model, TimeReversalKind::conjugation, phi);
            for (int p = 0; p < cfg.model_particles; ++p) via = charge_conjugation(model, p, via);
            dev = std::max(
                dev, (time_reversal(model, TimeReversalKind::full, phi) - via).cwiseAbs().maxCoeff());
        }
    });

    suite.run("time-reversal-dynamics", 1e-12, [&](double& dev) {
        auto rng = suite.rng();
        const double t = 0.9;
        for (int i = 0; i < 20; ++i) {
            ModelState phi = gen::ginibre(rng, model.lattice().dim(), 1);
            phi.normalize();
            const StateVector sv = to_sector_basis(model, phi);
            const ModelState evolved = from_sector_basis(model, evolve(sv, model_hamiltonian, t, k));
            const ModelState lhs = time_reversal(model, TimeReversalKind::full, evolved);
            const ModelState rhs = from_sector_basis(
                model,
                evolve(to_sector_basis(model, time_reversal(model, TimeReversalKind::full, phi)),
                       model_hamiltonian, -t, k));
            dev = std::max(dev, (lhs - rhs).cwiseAbs().maxCoeff());
        }
    });

    suite.run("uncharged-projector", 1e-12, [&](double& dev) {
        const MatrixXcd p = uncharged_projector(model).matrix();
        dev = std::max(dev, (p * p - p).cwiseAbs().maxCoeff());
        dev = std::max(dev, (p - p.adjoint()).cwiseAbs().maxCoeff());
        const MatrixXcd m = mass_operator(model).matrix();
        dev = std::max(dev, (p * m - m * p).cwiseAbs().maxCoeff());
        const MatrixXcd u = evolution_matrix(model_hamiltonian, 1.3, k);
        dev = std::max(dev, (p * u - u * p).cwiseAbs().maxCoeff());
        // rank = half the tuple count times the orbital factor for cutoff >= 1
        const double rank = p.trace().real();
        const double expected = static_cast<double>(model.lattice().dim()) /
                                std::pow(2.0, cfg.model_particles);
        dev = std::max(dev, std::abs(rank - expected));
        for (int q = 0; q < cfg.model_particles; ++q) {
            const MatrixXcd c = charge_conjugation_operator(model, q).matrix();
            dev = std::max(dev, (c * p - p).cwiseAbs().maxCoeff());
        }
    });

    suite.run("integer-averaging-on-model", 1e-12, [&](double& dev) {
        auto rng = suite.rng();
        const DensityOperator rho = gen::random_density(rng, space);
        const SectorOperator a = gen::random_operator(rng, space, 1.0);
        const int range = static_cast<int>(
            std::lround(space.mass(space.sectors() - 1) - space.mass(0)));
        const AverageReport rep = u1_average_integer(rho, a, 2 * range + 1);
        dev = rep.deviation;
    });

    return suite.take();
}

TimescaleRow compute_timescales(double delta_m, double energy, double n_count, double norm_a,
                                const PhysicalConstants& k) {
    TimescaleRow row;
    row.delta_m = delta_m;
    row.energy = energy;
    row.n_count = n_count;
    row.norm_a = norm_a;
    row.window = decoherence_window(delta_m, energy, n_count, norm_a, k);
    return row;
}

std::string format_timescales(const TimescaleRow& row) {
    std::ostringstream os;
    char buf[256];
    std::snprintf(buf, sizeof(buf),
                  "deltaM = %.6e, E = %.6e, N = %g, |A| = %g\n", row.delta_m, row.energy,
                  row.n_count, row.norm_a);
    os << buf;
    std::snprintf(buf, sizeof(buf), "T_low  = %.6e s   (order 1e%+d)\n", row.window.t_low,
                  static_cast<int>(std::floor(std::log10(row.window.t_low))));
    os << buf;
    std::snprintf(buf, sizeof(buf), "T_high = %.6e s   (order 1e%+d)\n", row.window.t_high,
                  static_cast<int>(std::floor(std::log10(row.window.t_high))));
    os << buf;
    os << (row.window.empty() ? "window: empty (T_low >= T_high)\n"
                              : "window: open (T_low < T_high)\n");
    return os.str();
}

}  // namespace masslab
