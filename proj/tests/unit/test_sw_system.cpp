#include "doctest.h"

#include <cmath>

#include "swlab/sw_system.hpp"

using namespace swlab;
using namespace swlab::sw;

namespace {

constexpr double kPi = 3.14159265358979323846;
const cplx I(0.0, 1.0);

GridSpec grid(int N = 8, int rank = 1) {
    GridSpec g;
    g.N = N;
    g.rank = rank;
    return g;
}

double max_diff(const Field& a, const Field& b) {
    double w = 0;
    for (std::size_t c = 0; c < a.data.size(); ++c)
        for (std::size_t p = 0; p < a.data[c].size(); ++p) w = std::max(w, std::abs(a.data[c][p] - b.data[c][p]));
    return w;
}

}  // namespace

TEST_CASE("Dirac operator on trivial inputs and single modes") {
    const GridSpec g = grid();
    const Connection A(g);
    CHECK(sup_norm(dirac(A, SpinorField::zero(g))) == 0.0);
    SpinorField c = SpinorField::zero(g);
    c.phi = constant_field(g, FormType::k00, Fiber::section, 1.5);
    CHECK(sup_norm(dirac(A, c)) < 1e-13);

    // φ = exp(2πi x1): D = √2 (πi φ, 0)
    SpinorField psi = SpinorField::zero(g);
    psi.phi.at(0) = scalar_field(g, [](double x, double, double, double) { return std::exp(2.0 * kPi * I * x); }).at(0);
    // α = exp(2πi x2): ∂_{z2} α = πi α, Λ∂α = (2i·πi α, 0), D = √2(−i)(−2π α) = 2√2 πi α on dz̄1
    psi.alpha.at(0) = scalar_field(g, [](double, double, double x2, double) { return std::exp(2.0 * kPi * I * x2); }).at(0);
    const Field D = dirac(A, psi);
    double err = 0;
    for (std::size_t p = 0; p < g.points(); ++p) {
        const cplx want0 = std::sqrt(2.0) * (I * kPi * psi.phi.at(0)[p] + 2.0 * kPi * I * psi.alpha.at(0)[p]);
        err = std::max({err, std::abs(D.at(0)[p] - want0), std::abs(D.at(1)[p])});
    }
    CHECK(err < 1e-11);

    CHECK_THROWS_AS(dirac(Connection(grid(16)), psi), std::invalid_argument);
}

TEST_CASE("Dirac adjoint is the formal adjoint") {
    for (int r : {1, 2}) {
        const GridSpec g = grid(8, r);
        const Connection A = random_connection(g, 1, 2, 0.5);
        const SpinorField psi = SpinorField::random(g, 2, 2);
        const Field theta = random_band_limited(g, 3, 2, FormType::k01, Fiber::section);
        const SpinorField back = dirac_adjoint(A, theta);
        const cplx lhs = inner_product(dirac(A, psi), theta);
        const cplx rhs = inner_product(psi.phi, back.phi) + inner_product(psi.alpha, back.alpha);
        CHECK(std::abs(lhs - rhs) < 1e-10 * std::abs(lhs));
    }
}

TEST_CASE("Weitzenböck formula") {
    const GridSpec g = grid();
    SpinorField c = SpinorField::zero(g);
    c.phi = constant_field(g, FormType::k00, Fiber::section, 1.0);
    c.alpha = constant_field(g, FormType::k02, Fiber::section, cplx(0.0, 2.0));
    CHECK(weitzenbock_gap(Connection(g), c) < 1e-12);
    for (int r : {1, 2})
        for (std::uint64_t seed = 0; seed < 3; ++seed) {
            const GridSpec gr = grid(8, r);
            const Connection A = random_connection(gr, 10 + seed, 2, 0.5);
            CHECK(weitzenbock_gap(A, SpinorField::random(gr, 20 + seed, 2)) < 1e-8);
        }
}

TEST_CASE("energy identity") {
    const GridSpec g = grid(8, 2);
    const Connection A = random_connection(g, 30, 2, 0.5);
    const auto e0 = energy_identity(A, SpinorField::zero(g));
    CHECK(e0.lhs == doctest::Approx(0.5 * e0.fplus_sq));
    CHECK(e0.gap < 1e-14);
    CHECK(e0.fplus_sq > 0.0);

    SpinorField psi = SpinorField::random(g, 31, 2);
    const auto e1 = energy_identity(A, psi);
    CHECK(e1.gap < 1e-8);

    // Ψ ↦ 2Ψ: quadratic pieces ×4, quartic ×16, the cross term in the gap ×4
    psi *= 2.0;
    const auto e2 = energy_identity(A, psi);
    CHECK(e2.gap < 1e-8);
    CHECK(e2.dirac_sq == doctest::Approx(4 * e1.dirac_sq).epsilon(1e-12));
    CHECK(e2.nabla_sq == doctest::Approx(4 * e1.nabla_sq).epsilon(1e-12));
    CHECK(e2.quad_sq == doctest::Approx(16 * e1.quad_sq).epsilon(1e-12));
    CHECK(e2.fplus_sq == doctest::Approx(e1.fplus_sq).epsilon(1e-12));
    const double cross = e1.fplus_sq + e1.quad_sq - e1.gap_sq;
    CHECK(e2.gap_sq == doctest::Approx(e1.fplus_sq + 16 * e1.quad_sq - 4 * cross).epsilon(1e-10));
}

TEST_CASE("curvature pairing sees only the self-dual part") {
    for (int r : {1, 2}) {
        const GridSpec g = grid(8, r);
        const auto pc = curvature_pairing(random_connection(g, 40, 2, 0.5), SpinorField::random(g, 41, 2));
        CHECK(std::abs(pc.full) > 1e-3);
        CHECK(pc.gap < 1e-10);
    }
}

TEST_CASE("SW residuals: zero data, formulation equivalence, gauge invariance") {
    const GridSpec g = grid(8, 2);
    const auto r0 = sw_star_residual(Connection(g), SpinorField::zero(g));
    CHECK(r0.max() == 0.0);

    const Connection A = random_connection(g, 50, 2, 0.5);
    const SpinorField psi = SpinorField::random(g, 51, 2);
    const Field s = random_band_limited(grid(8, 2), 52, 2, FormType::k00, Fiber::scalar);
    Field sr = s;
    for (auto& v : sr.at(0)) v = std::real(v);
    for (const auto& sopt : {std::optional<Field>{}, std::optional<Field>{sr}}) {
        const auto res = sw_star_residual(A, psi, sopt);
        CHECK(res.gamma_gap > 0.1);
        CHECK(std::abs(res.gamma_gap - res.aggregate()) < 1e-10 * res.gamma_gap);

        const Gauge G = random_exact_gauge(g, 53, 1);
        const SpinorField pg{gauge_transform(G, psi.phi), gauge_transform(G, psi.alpha)};
        const auto rg = sw_star_residual(gauge_transform(G, A), pg, sopt);
        CHECK(std::abs(rg.dirac_norm - res.dirac_norm) < 1e-10 * res.dirac_norm);
        CHECK(std::abs(rg.eq20_norm - res.eq20_norm) < 1e-10 * res.eq20_norm);
        CHECK(std::abs(rg.eq02_norm - res.eq02_norm) < 1e-10 * res.eq02_norm);
        CHECK(std::abs(rg.eqLambda_norm - res.eqLambda_norm) < 1e-10 * res.eqLambda_norm);
        CHECK(std::abs(rg.gamma_gap - res.gamma_gap) < 1e-10 * res.gamma_gap);
    }
}

TEST_CASE("sign flip of alpha leaves the quadratic terms unchanged") {
    const GridSpec g = grid(8);
    const Connection flat(g);
    SpinorField psi = SpinorField::random(g, 60, 2);
    const auto a = sw_star_residual(flat, psi);
    psi.alpha *= -1.0;
    const auto b = sw_star_residual(flat, psi);
    CHECK(a.eq20_norm == doctest::Approx(b.eq20_norm).epsilon(1e-14));
    CHECK(a.eq02_norm == doctest::Approx(b.eq02_norm).epsilon(1e-14));
    CHECK(a.eqLambda_norm == doctest::Approx(b.eqLambda_norm).epsilon(1e-14));
}

TEST_CASE("dichotomy: reducible, inconsistent and both branches") {
    const GridSpec g = grid(8);
    const auto red = dichotomy_analyze(Connection(g), SpinorField::zero(g), std::nullopt, 1e-8);
    CHECK(red.branch == Branch::reducible);
    CHECK(std::abs(red.J) < 1e-10);

    const auto bad = dichotomy_analyze(Connection(g), SpinorField::random(g, 70, 2), std::nullopt, 1e-8);
    CHECK(bad.branch == Branch::inconsistent);
    CHECK_FALSE(bad.diagnostic.empty());

    GridSpec lg = g;
    lg.backend = Backend::link;
    lg.d1 = 1;
    const Connection A(lg);
    const Field phi = holomorphic_section(lg);
    // s = −t with ∫t = 6π: J = 2·1 − 3 < 0
    Field s = constant_field(lg, FormType::k00, Fiber::scalar, -6.0 * kPi);
    SpinorField psi = SpinorField::zero(lg);
    psi.phi = phi;
    const auto a = dichotomy_analyze(A, psi, s, 5.0 / 64.0);
    CHECK(a.J == doctest::Approx(-1.0));
    CHECK(a.branch == Branch::A);
    CHECK(a.alpha_norm == 0.0);

    const auto conj = conjugate_pair(A, phi, s);
    CHECK(conj.A.grid.d1 == -1);
    CHECK(chern_weil_degree(conj.A) == doctest::Approx(-1.0));
    const auto b = dichotomy_analyze(conj.A, conj.psi, conj.s, 5.0 / 64.0);
    CHECK(b.J == doctest::Approx(1.0));
    CHECK(b.branch == Branch::B);
    CHECK(b.phi_norm == 0.0);
    // the conjugate construction maps the branch-A system onto the branch-B system
    CHECK(b.system[1] == doctest::Approx(a.system[1]).epsilon(1e-10));
    CHECK(b.system[2] == doctest::Approx(a.system[2]).epsilon(1e-10));

    CHECK_THROWS_AS(conjugate_pair(Connection(grid(8, 2)), Field(grid(8, 2), FormType::k00, Fiber::section), std::nullopt),
                    std::invalid_argument);
}
