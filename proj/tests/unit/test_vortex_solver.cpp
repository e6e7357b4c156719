#include "doctest.h"

#include <cmath>

#include "swlab/vortex_solver.hpp"

using namespace swlab;
using namespace swlab::vortex;

namespace {

constexpr double kPi = 3.14159265358979323846;
const cplx I(0.0, 1.0);

GridSpec grid(int N = 8, int rank = 1) {
    GridSpec g;
    g.N = N;
    g.rank = rank;
    return g;
}

double sup_diff(const Field& a, const Field& b) {
    double w = 0;
    for (std::size_t c = 0; c < a.data.size(); ++c)
        for (std::size_t p = 0; p < a.data[c].size(); ++p) w = std::max(w, std::abs(a.data[c][p] - b.data[c][p]));
    return w;
}

Field real_part(Field f) {
    for (auto& c : f.data)
        for (auto& v : c) v = std::real(v);
    return f;
}

Field constant_section(const GridSpec& g, cplx c) { return constant_field(g, FormType::k00, Fiber::section, c); }

// t making u* an exact solution of the discrete equation on the trivial bundle
Field manufactured_t(const Field& ustar, double w) {
    const auto& g = ustar.grid;
    const Grid lap = Spectral(g).laplacian(ustar.at(0));
    Field t(g, FormType::k00, Fiber::scalar);
    for (std::size_t p = 0; p < g.points(); ++p)
        t.at(0)[p] = 2.0 * (std::real(lap[p]) + 0.5 * std::exp(2.0 * std::real(ustar.at(0)[p])) * w);
    return t;
}

}  // namespace

TEST_CASE("parameters: mean, slope and Laplace substitution") {
    const GridSpec g = grid();
    const auto c = VortexParameters::constant(g, 3.0);
    CHECK(c.t_m == doctest::Approx(3.0).epsilon(1e-14));
    CHECK(c.lambda == doctest::Approx(3.0 / (4 * kPi)));
    CHECK(sup_norm(c.v) < 1e-14);

    const auto p = VortexParameters::cosine(g, 2.0, {{{1, 0, 0, 0}, 1.0}});
    CHECK(std::abs(p.t_m - 2.0) < 1e-12);
    // Δv = cos(2πx1) with Δ = −Σ∂²: v = cos(2πx1)/(4π²)
    const Field want = scalar_field(g, [](double x, double, double, double) { return std::cos(2 * kPi * x) / (4 * kPi * kPi); });
    CHECK(sup_diff(p.v, want) < 1e-12);
    // iΛ∂̄∂v = ½(t − t_m): Λ(dz̄_k∧dz_k) = 2i, ∂_{z̄}∂_z = ¼(∂x² + ∂y²)
    Spectral sp(g);
    Grid lhs(g.points(), 0.0);
    for (int a = 0; a < 4; ++a) {
        const Grid d2 = sp.derivative(sp.derivative(p.v.at(0), a), a);
        for (std::size_t q = 0; q < g.points(); ++q) lhs[q] += I * 2.0 * I * 0.25 * d2[q];
    }
    double err = 0;
    for (std::size_t q = 0; q < g.points(); ++q) err = std::max(err, std::abs(lhs[q] - 0.5 * (p.t.at(0)[q] - p.t_m)));
    CHECK(err < 1e-10);
    CHECK(std::abs(mean(p.v)) < 1e-14);
}

TEST_CASE("moment map: trivial, constant, skew-Hermitian, equivariant") {
    const GridSpec g = grid(8, 2);
    const Field zero_t = constant_field(g, FormType::k00, Fiber::scalar, 0.0);
    CHECK(sup_norm(moment_map(Connection(g), Field(g, FormType::k00, Fiber::section), zero_t)) == 0.0);

    const GridSpec g1 = grid();
    const Field m = moment_map(Connection(g1), constant_section(g1, cplx(1.0, 1.0)),
                               constant_field(g1, FormType::k00, Fiber::scalar, 5.0));
    for (std::size_t p = 0; p < g1.points(); p += 101) CHECK(std::abs(m.at(0)[p] - I * (-0.5 * 2.0 + 0.5 * 5.0)) < 1e-14);

    const Connection A = random_connection(g, 1, 2, 0.5);
    const Field phi = random_band_limited(g, 2, 2, FormType::k00, Fiber::section);
    const Field t = real_part(random_band_limited(g, 3, 2, FormType::k00, Fiber::scalar));
    const Field mt = moment_map(A, phi, t);
    CHECK(sup_norm(mt + adjoint(mt)) < 1e-13);

    const Gauge G = random_exact_gauge(g, 4, 1);
    const Field lhs = moment_map(gauge_transform(G, A), gauge_transform(G, phi), t);
    CHECK(sup_diff(lhs, gauge_transform(G, mt)) < 1e-10);
}

TEST_CASE("moment map derivative equals the symplectic pairing") {
    for (int r : {1, 2})
        for (std::uint64_t seed = 0; seed < 4; ++seed) {
            const GridSpec g = grid(8, r);
            const Connection A = random_connection(g, 100 + seed, 2, 0.5);
            const Field phi = random_band_limited(g, 200 + seed, 2, FormType::k00, Fiber::section);
            const Field t = real_part(random_band_limited(g, 300 + seed, 2, FormType::k00, Fiber::scalar));
            const Field a = skew_hermitian_part(random_band_limited(g, 400 + seed, 2, FormType::k00, Fiber::endo));
            const Tangent X{skew_hermitian_part(random_band_limited(g, 500 + seed, 2, FormType::k1, Fiber::endo)),
                            random_band_limited(g, 600 + seed, 2, FormType::k00, Fiber::section)};
            const auto chk = moment_derivative_check(A, phi, a, X, t);
            CHECK(chk.relative_error < 1e-6);
            // along the orbit direction both sides vanish
            const auto self = moment_derivative_check(A, phi, a, infinitesimal_action(A, phi, a), t);
            CHECK(std::abs(self.pairing) < 1e-12);
            CHECK(self.relative_error < 1e-6);
        }
    const GridSpec g = grid();
    CHECK_THROWS_AS(moment_derivative_check(Connection(g), constant_section(g, 1.0), constant_field(g, FormType::k00, Fiber::endo, I),
                                            Tangent{Field(g, FormType::k1, Fiber::endo), Field(g, FormType::k00, Fiber::section)},
                                            constant_field(g, FormType::k00, Fiber::scalar, 0.0)),
                    std::invalid_argument);
}

TEST_CASE("moment derivative for a central element reduces to the abelian formula") {
    const GridSpec g = grid();
    const Connection A = random_connection(g, 7, 2, 0.5);
    const Field phi = random_band_limited(g, 8, 2, FormType::k00, Fiber::section);
    const Field t = constant_field(g, FormType::k00, Fiber::scalar, 1.0);
    const Field chi = real_part(random_band_limited(g, 9, 2, FormType::k00, Fiber::scalar));
    Field a(g, FormType::k00, Fiber::endo);
    for (std::size_t p = 0; p < g.points(); ++p) a.at(0)[p] = I * chi.at(0)[p];
    const Tangent X{skew_hermitian_part(random_band_limited(g, 10, 2, FormType::k1, Fiber::endo)),
                    random_band_limited(g, 11, 2, FormType::k00, Fiber::section)};
    // ṁ = (∂0Ȧ1 − ∂1Ȧ0 + ∂2Ȧ3 − ∂3Ȧ2) − i Re(φ̇ φ̄); pairing with a = iχ
    Spectral sp(g);
    const auto d = [&](int comp, int axis) { return sp.derivative(X.A_dot.at(comp), axis); };
    const Grid d01 = d(1, 0), d10 = d(0, 1), d23 = d(3, 2), d32 = d(2, 3);
    double direct = 0;
    for (std::size_t p = 0; p < g.points(); ++p) {
        const cplx mdot = d01[p] - d10[p] + d23[p] - d32[p] - I * std::real(X.phi_dot.at(0)[p] * std::conj(phi.at(0)[p]));
        direct += std::real(mdot * std::conj(a.at(0)[p]));
    }
    direct *= g.cell_volume();
    const auto chk = moment_derivative_check(A, phi, a, X, t);
    CHECK(chk.finite_difference == doctest::Approx(direct).epsilon(1e-7));
    CHECK(chk.pairing == doctest::Approx(direct).epsilon(1e-10));
}

TEST_CASE("solver: constant case is exact") {
    const GridSpec g = grid();
    const double tau = 3.0, c = 0.7;
    const auto sol = kazdan_warner_solve(Connection(g), constant_section(g, std::sqrt(c)), VortexParameters::constant(g, tau));
    CHECK(sol.report.converged);
    double err = 0;
    for (auto v : sol.u.at(0)) err = std::max(err, std::abs(v - 0.5 * std::log(tau / c)));
    CHECK(err < 1e-12);
    CHECK(std::max({sol.report.vt_residual[0], sol.report.vt_residual[1], sol.report.vt_residual[2]}) < 1e-8);
}

TEST_CASE("solver: manufactured solutions, monotone functional") {
    // N = 16 keeps the aliased content of e^{2u*} out of the Nyquist modes
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        const GridSpec g = grid(16);
        const Field ustar = real_part(random_band_limited(g, 700 + seed, 2, FormType::k00, Fiber::scalar, 0.1));
        const double w = 0.5 + 0.1 * double(seed);
        const auto params = VortexParameters::from_function(manufactured_t(ustar, w));
        const auto sol = kazdan_warner_solve(Connection(g), constant_section(g, std::sqrt(w)), params);
        CHECK(sup_diff(sol.u, ustar) < 1e-8);
        for (std::size_t k = 1; k < sol.report.trace.size(); ++k)
            CHECK(sol.report.trace[k].functional <= sol.report.trace[k - 1].functional + 1e-12);
        CHECK(std::max({sol.report.vt_residual[0], sol.report.vt_residual[1], sol.report.vt_residual[2]}) < 1e-8);
    }
}

TEST_CASE("solver errors") {
    const GridSpec g = grid();
    const Field phi = constant_section(g, 1.0);
    CHECK_THROWS_AS(kazdan_warner_solve(Connection(g), phi, VortexParameters::constant(g, -1.0)), UnstablePair);
    CHECK_THROWS_AS(kazdan_warner_solve(Connection(g), phi, VortexParameters::constant(g, 0.0)), UnstablePair);
    CHECK_THROWS_AS(kazdan_warner_solve(Connection(g), constant_section(g, 0.0), VortexParameters::constant(g, 1.0)),
                    std::invalid_argument);
    CHECK_THROWS_AS(kazdan_warner_solve(Connection(g), random_band_limited(g, 5, 2, FormType::k00, Fiber::section),
                                        VortexParameters::constant(g, 1.0)),
                    NotHolomorphic);
    CHECK_THROWS_AS(kazdan_warner_solve(Connection(grid(8, 2)), Field(grid(8, 2), FormType::k00, Fiber::section),
                                        VortexParameters::constant(grid(8, 2), 1.0)),
                    std::invalid_argument);
    SolverOptions opt;
    opt.max_iterations = 1;
    try {
        kazdan_warner_solve(Connection(g), phi, VortexParameters::cosine(g, 20.0, {{{1, 0, 0, 0}, 5.0}}), opt);
        FAIL("expected NonConvergence");
    } catch (const NonConvergence& e) {
        CHECK(e.report.trace.size() == 2);
        CHECK_FALSE(e.report.converged);
    }
}

TEST_CASE("vortex residual: zero, random, gauge invariant") {
    const GridSpec g = grid();
    const Field zero_t = constant_field(g, FormType::k00, Fiber::scalar, 0.0);
    CHECK(vortex_residual(Connection(g), Field(g, FormType::k00, Fiber::section), zero_t).max() == 0.0);
    const Connection A = random_connection(g, 1, 2, 0.5);
    const Field phi = random_band_limited(g, 2, 2, FormType::k00, Fiber::section);
    const auto r = vortex_residual(A, phi, zero_t);
    CHECK(r.integrability > 0);
    CHECK(r.holomorphy > 0);
    CHECK(r.moment > 0);
    const Gauge G = random_exact_gauge(g, 3, 1);
    const auto rg = vortex_residual(gauge_transform(G, A), gauge_transform(G, phi), zero_t);
    CHECK(rg.integrability == doctest::Approx(r.integrability).epsilon(1e-10));
    CHECK(rg.holomorphy == doctest::Approx(r.holomorphy).epsilon(1e-10));
    CHECK(rg.moment == doctest::Approx(r.moment).epsilon(1e-10));
}

TEST_CASE("Bradlow functional: normalization, gradient, cocycle") {
    const GridSpec g = grid();
    const Field phi0 = constant_section(g, 0.8);
    const auto params = VortexParameters::cosine(g, 2.0, {{{0, 1, 1, 0}, 0.5}});
    const ScalarProblem P = scalar_problem(Connection(g), phi0, params.t);
    CHECK(bradlow_functional(P, Field(g, FormType::k00, Fiber::scalar)) == 0.0);

    const Field u = real_part(random_band_limited(g, 11, 2, FormType::k00, Fiber::scalar, 0.3));
    const Field eta = real_part(random_band_limited(g, 12, 2, FormType::k00, Fiber::scalar));
    const double eps = 1e-4;
    const double fd = (bradlow_functional(P, u + eps * eta) - bradlow_functional(P, u - eps * eta)) / (2 * eps);
    const double grad = 2.0 * std::real(inner_product(kw_residual(P, u), eta));
    CHECK(std::abs(fd - grad) < 1e-6 * (1.0 + std::abs(grad)));

    const Field u2 = real_part(random_band_limited(g, 13, 2, FormType::k00, Fiber::scalar, 0.3));
    const double lhs = bradlow_functional(P, u) + bradlow_functional(shifted_problem(P, u), u2 - u);
    CHECK(std::abs(lhs - bradlow_functional(P, u2)) < 1e-8);
}

TEST_CASE("transport to the constant-parameter equation") {
    const GridSpec g = grid();
    const Field phi0 = constant_section(g, 1.0);
    // two parameter functions with the same mean
    const auto p1 = VortexParameters::cosine(g, 2.0, {{{1, 0, 0, 0}, 0.7}});
    const auto p2 = VortexParameters::cosine(g, 2.0, {{{0, 0, 1, 1}, 0.4}, {{0, 1, 0, 0}, 0.3}});
    for (const auto* p : {&p1, &p2}) {
        const auto sol = kazdan_warner_solve(Connection(g), phi0, *p);
        const ScalarProblem R = reduced_problem(scalar_problem(Connection(g), phi0, p->t), *p);
        Field up = sol.u - 0.5 * p->v;
        CHECK(sup_norm(kw_residual(R, up)) < 1e-8);
        const auto rsol = kazdan_warner_solve(R);
        CHECK(sup_diff(rsol.u, up) < 1e-8);
    }
}

TEST_CASE("stability verdicts") {
    using topology::BundleTopology;
    const BundleTopology line{1, {}, 0};
    CHECK(stability_check(line, Rational(0), Rational(1)).verdict == Verdict::stable);
    const auto u = stability_check(line, Rational(0), Rational(0));
    CHECK(u.verdict == Verdict::unstable);
    CHECK(u.reason.find("(1)") != std::string::npos);
    CHECK(stability_check(line, Rational(0), 0.1).verdict == Verdict::stable);

    const BundleTopology two{2, {}, 0};
    const auto w2 = stability_check(two, Rational(0), Rational(1), {{1, Rational(2), true, false}});
    CHECK(w2.verdict == Verdict::unstable);
    CHECK(w2.reason.find("(1)") != std::string::npos);
    // μ(E/F) = λ with φ ∈ F
    const auto q = stability_check(two, Rational(1), Rational(1), {{1, Rational(0), true, false}});
    CHECK(q.verdict == Verdict::unstable);
    CHECK_FALSE(stability_check(two, Rational(1, 2), Rational(1), {{1, Rational(-1, 2), true, false}}).reason.empty());
    const auto inner = stability_check(two, Rational(2), Rational(3, 2), {{1, Rational(1, 2), true, false}});
    CHECK(inner.verdict == Verdict::unstable);
    CHECK(inner.reason.find("(2)") != std::string::npos);
    const auto split = stability_check(two, Rational(2), Rational(3, 2), {{1, Rational(1, 2), true, true}});
    CHECK(split.verdict == Verdict::split_case);
    const auto border = stability_check(two, Rational(0), Rational(1), {{1, Rational(1), false, false}});
    CHECK(border.verdict == Verdict::borderline);
    CHECK_THROWS_AS(stability_check(two, Rational(0), Rational(1), {{2, Rational(0), false, false}}), std::invalid_argument);
}

TEST_CASE("moduli chain: solved, unstable and reducible instances") {
    const GridSpec g = grid();
    const Field phi0 = constant_section(g, 1.0);
    const auto solved = moduli_chain_check(Connection(g), phi0, VortexParameters::cosine(g, 1.0, {{{1, 0, 0, 0}, 0.5}}), 1e-8);
    CHECK(solved.outcome == "solved");
    for (const auto& s : solved.stages) CHECK_MESSAGE(s.passed, s.name << " = " << s.value);
    CHECK(solved.stages.size() == 5);

    const auto unstable = moduli_chain_check(Connection(g), phi0, VortexParameters::constant(g, -1.0), 1e-8);
    CHECK(unstable.outcome == "unstable");
    CHECK(unstable.stability.verdict == Verdict::unstable);
    CHECK(unstable.all_passed());

    const auto reducible = moduli_chain_check(Connection(g), phi0, VortexParameters::constant(g, 0.0), 1e-8);
    CHECK(reducible.outcome == "reducible");
    CHECK(reducible.all_passed());
    REQUIRE(reducible.dichotomy.has_value());
    CHECK(reducible.dichotomy->branch == sw::Branch::reducible);
}
