#include "doctest.h"

#include <cmath>

#include "swlab/field_calculus.hpp"

using namespace swlab;

namespace {

constexpr double kPi = 3.14159265358979323846;
const cplx I(0.0, 1.0);

GridSpec spectral_grid(int N = 8, int rank = 1, double a1 = 1.0, double a2 = 1.0) {
    GridSpec g;
    g.N = N;
    g.rank = rank;
    g.a1 = a1;
    g.a2 = a2;
    return g;
}

GridSpec link_grid(int N, int d1, int d2, int rank = 1) {
    GridSpec g = spectral_grid(N, rank);
    g.backend = Backend::link;
    g.d1 = d1;
    g.d2 = d2;
    return g;
}

double max_diff(const Field& a, const Field& b) {
    double w = 0;
    for (std::size_t c = 0; c < a.data.size(); ++c)
        for (std::size_t p = 0; p < a.data[c].size(); ++p) w = std::max(w, std::abs(a.data[c][p] - b.data[c][p]));
    return w;
}

// Λ^{02} coefficient of a 2-form: dz̄1∧dz̄2 = e02 − i e03 − i e12 − e13
Field part02_oracle(const Field& F) {
    Field out(F.grid, FormType::k02, F.fiber);
    for (int e = 0; e < F.fiber_dim(); ++e)
        for (std::size_t p = 0; p < F.grid.points(); ++p)
            out.at(0, e)[p] = 0.25 * (F.at(1, e)[p] + I * F.at(2, e)[p] + I * F.at(3, e)[p] - F.at(4, e)[p]);
    return out;
}

}  // namespace

TEST_CASE("grid spec validation and indexing") {
    GridSpec g = spectral_grid();
    CHECK_NOTHROW(g.validate());
    g.N = 7;
    CHECK_THROWS_AS(g.validate(), std::invalid_argument);
    g = spectral_grid();
    g.d1 = 1;
    CHECK_THROWS_AS(g.validate(), std::invalid_argument);
    g = spectral_grid(8, 1, 2.0, 0.5);
    CHECK(g.volume() == doctest::Approx(1.0));
    CHECK(g.length(0) == doctest::Approx(std::sqrt(2.0)));
    const std::size_t p = g.index({7, 0, 3, 5});
    CHECK(g.coords(g.shift(p, 0, 1)) == std::array<int, 4>{0, 0, 3, 5});
    CHECK(g.coords(g.shift(p, 1, -1)) == std::array<int, 4>{7, 7, 3, 5});
}

TEST_CASE("spectral Laplacian and its inverse") {
    const GridSpec g = spectral_grid(8);
    Spectral sp(g);
    const Field f = scalar_field(g, [](double x, double, double, double y2) {
        return std::exp(I * 2.0 * kPi * (x + 2.0 * y2));
    });
    const Grid lap = sp.laplacian(f.at(0));
    double err = 0;
    for (std::size_t p = 0; p < g.points(); ++p) err = std::max(err, std::abs(lap[p] - 4.0 * kPi * kPi * 5.0 * f.at(0)[p]));
    CHECK(err < 1e-9);
    const Grid back = sp.solve_laplace(lap);
    err = 0;
    for (std::size_t p = 0; p < g.points(); ++p) err = std::max(err, std::abs(back[p] - f.at(0)[p]));
    CHECK(err < 1e-12);
    CHECK_THROWS_AS(sp.solve_laplace(Grid(g.points(), 1.0)), std::domain_error);
}

TEST_CASE("dbar of constants and of a single Fourier mode") {
    const GridSpec g = spectral_grid(8);
    const Connection A(g);
    const Field c = constant_field(g, FormType::k00, Fiber::section, cplx(2.0, -1.0));
    CHECK(sup_norm(dbar(A, c)) < 1e-13);

    Field f(g, FormType::k00, Fiber::section);
    f.at(0) = scalar_field(g, [](double x, double, double, double) { return std::exp(I * 2.0 * kPi * x); }).at(0);
    const Field d = dbar(A, f);
    // ½(∂x + i∂y) exp(2πi x) = πi exp(2πi x)
    double err0 = 0, err1 = 0;
    for (std::size_t p = 0; p < g.points(); ++p) {
        err0 = std::max(err0, std::abs(d.at(0)[p] - I * kPi * f.at(0)[p]));
        err1 = std::max(err1, std::abs(d.at(1)[p]));
    }
    CHECK(err0 < 1e-12);
    CHECK(err1 < 1e-12);
    CHECK_THROWS_AS(dbar(A, constant_field(g, FormType::k02, Fiber::section, 1.0)), std::invalid_argument);
    CHECK_THROWS_AS(partial(A, constant_field(g, FormType::k01, Fiber::section, 1.0)), std::invalid_argument);
}

TEST_CASE("Leibniz rule against scalar functions") {
    for (int r : {1, 2}) {
        const GridSpec g = spectral_grid(8, r);
        const Connection A = random_connection(g, 11, 2, 0.5);
        const Connection flat(g);
        const Field u = random_band_limited(g, 12, 2, FormType::k00, Fiber::scalar);
        const Field f = random_band_limited(g, 13, 2, FormType::k00, Fiber::section);
        const Field lhs = dbar(A, multiply(u, f));
        const Field du = dbar(flat, u);
        Field rhs = multiply(u, dbar(A, f));
        for (int k = 0; k < 2; ++k)
            for (int i = 0; i < r; ++i)
                for (std::size_t p = 0; p < g.points(); ++p) rhs.at(k, i)[p] += du.at(k)[p] * f.at(0, i)[p];
        CHECK(max_diff(lhs, rhs) < 1e-10);
    }
}

TEST_CASE("dbar squared is the (0,2) curvature") {
    for (int r : {1, 2}) {
        const GridSpec g = spectral_grid(8, r);
        const Field f = random_band_limited(g, 21, 2, FormType::k00, Fiber::section);
        CHECK(sup_norm(dbar(Connection(g), dbar(Connection(g), f))) < 1e-12);
        const Connection A = random_connection(g, 22, 2, 0.3);
        const Field lhs = dbar(A, dbar(A, f));
        const Field F02 = part02(curvature(A));
        CHECK(max_diff(F02, part02_oracle(curvature(A))) < 1e-13);
        Field rhs(g, FormType::k02, Fiber::section);
        for (std::size_t p = 0; p < g.points(); ++p) rhs.set_value(0, p, F02.value(0, p) * f.value(0, p));
        CHECK(max_diff(lhs, rhs) < 1e-9);
    }
}

TEST_CASE("dbar adjoint and Lambda adjointness") {
    for (int r : {1, 2}) {
        const GridSpec g = spectral_grid(8, r);
        const Connection A = random_connection(g, 31, 2, 0.5);
        const Field f = random_band_limited(g, 32, 2, FormType::k00, Fiber::section);
        const Field th = random_band_limited(g, 33, 2, FormType::k01, Fiber::section);
        const cplx lhs = inner_product(dbar(A, f), th), rhs = inner_product(f, dbar_adjoint(A, th));
        CHECK(std::abs(lhs - rhs) < 1e-10 * std::abs(lhs));

        const Field F = random_band_limited(g, 34, 2, FormType::k2, Fiber::endo);
        const Field h = random_band_limited(g, 35, 2, FormType::k00, Fiber::endo);
        const cplx a = inner_product(lambda_contract(F), h), b = inner_product(F, wedge_omega(h));
        CHECK(std::abs(a - b) < 1e-10 * std::abs(a));
    }
}

TEST_CASE("Kähler form, star and self-dual projection") {
    const GridSpec g = spectral_grid(8);
    const Field one = constant_field(g, FormType::k00, Fiber::scalar, 1.0);
    const Field omega = wedge_omega(one);
    CHECK(max_diff(lambda_contract(omega), constant_field(g, FormType::k00, Fiber::scalar, 2.0)) == 0.0);

    const Field F = random_band_limited(g, 41, 2, FormType::k2, Fiber::scalar);
    CHECK(max_diff(hodge_star(hodge_star(F)), F) < 1e-15);
    const Field asd = F - hodge_star(F);
    CHECK(sup_norm(selfdual_plus(asd)) < 1e-14);
    const Field plus = selfdual_plus(F);
    CHECK(max_diff(hodge_star(plus), plus) < 1e-14);
    CHECK(max_diff(selfdual_plus(plus), plus) < 1e-14);
    // F⁺ = F²⁰ + F⁰² + ½(ΛF)ω, reassembled on the real coframe
    const Field f20 = part20(F), f02 = part02(F), lam = lambda_contract(F);
    Field re(g, FormType::k2, Fiber::scalar);
    for (std::size_t p = 0; p < g.points(); ++p) {
        const cplx a = f20.at(0)[p], b = f02.at(0)[p], c = 0.5 * lam.at(0)[p];
        re.at(0)[p] = c;
        re.at(5)[p] = c;
        re.at(1)[p] = a + b;                 // e02
        re.at(2)[p] = I * a - I * b;         // e03
        re.at(3)[p] = I * a - I * b;         // e12
        re.at(4)[p] = -a - b;                // e13
    }
    CHECK(max_diff(re, plus) < 1e-14);
}

TEST_CASE("curvature: trivial, Bianchi, and constant background") {
    const GridSpec g = spectral_grid(8, 2);
    CHECK(sup_norm(curvature(Connection(g))) == 0.0);
    for (int r : {1, 2}) {
        const Connection A = random_connection(spectral_grid(8, r), 51, 2, 0.2);
        CHECK(sup_norm(covariant_exterior(A, curvature(A))) < 1e-10);
        CHECK(std::abs(chern_weil_degree(A)) < 1e-10);
    }
    const Connection B(link_grid(8, 1, 0));
    const Field lam = lambda_contract(curvature(B));
    double err = 0;
    for (std::size_t p = 0; p < B.grid.points(); ++p) err = std::max(err, std::abs(I * lam.at(0)[p] - 2.0 * kPi));
    CHECK(err < 1e-12);
    CHECK(chern_weil_degree(B) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(chern_weil_degree(Connection(link_grid(8, 1, 1))) == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(chern_weil_degree(Connection(link_grid(8, 2, -1))) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("Chern–Weil degree is deformation and gauge invariant on the link backend") {
    for (int r : {1, 2}) {
        const GridSpec g = link_grid(8, 1, 1, r);
        const Gauge G = random_exact_gauge(g, 60, 1);
        for (std::uint64_t seed = 0; seed < 10; ++seed) {
            const Connection A = random_connection(g, 600 + seed, 2, 0.3);
            const double d = chern_weil_degree(A);
            CHECK(std::abs(d - 2.0 * r) < 1e-8);
            CHECK(std::abs(chern_weil_degree(gauge_transform(G, A)) - d) < 1e-8);
        }
    }
}

TEST_CASE("link curvature branch failure on rough fields") {
    const GridSpec g = link_grid(8, 0, 0);
    const Connection A = random_connection(g, 70, 4, 200.0);
    CHECK_THROWS_AS(curvature(A), std::runtime_error);
}

TEST_CASE("random fields are deterministic per seed") {
    const GridSpec g = spectral_grid(8, 2);
    const Field a = random_band_limited(g, 5, 2, FormType::k01, Fiber::section);
    const Field b = random_band_limited(g, 5, 2, FormType::k01, Fiber::section);
    const Field c = random_band_limited(g, 6, 2, FormType::k01, Fiber::section);
    CHECK(max_diff(a, b) == 0.0);
    CHECK(max_diff(a, c) > 0.0);
    CHECK(random_connection(g, 5, 2).skew_defect() < 1e-14);
    CHECK_THROWS_AS(random_band_limited(g, 1, 5, FormType::k00, Fiber::scalar), std::invalid_argument);
}

TEST_CASE("gauge transformations: unitarity, covariance, curvature conjugation") {
    for (int r : {1, 2}) {
        const GridSpec g = spectral_grid(8, r);
        const Gauge G = random_exact_gauge(g, 80 + r, 1);
        const Connection A = random_connection(g, 90, 2, 0.4);
        const Connection Ag = gauge_transform(G, A);
        CHECK(Ag.skew_defect() < 1e-13);

        const Field f = random_band_limited(g, 91, 2, FormType::k00, Fiber::section);
        const Field fg = gauge_transform(G, f);
        for (std::size_t p = 0; p < g.points(); p += 37) CHECK(fg.value(0, p).norm() == doctest::Approx(f.value(0, p).norm()));
        CHECK(max_diff(dbar(Ag, fg), gauge_transform(G, dbar(A, f))) < 1e-10);
        CHECK(max_diff(curvature(Ag), gauge_transform(G, curvature(A))) < 1e-10);

        // values-only gauge: Maurer–Cartan form by spectral differentiation
        const Gauge H = gauge_from_values(G.g);
        CHECK(max_diff(gauge_transform(H, A).potential, Ag.potential) < 1e-10);
    }
}

TEST_CASE("link backend gauge covariance is exact") {
    const GridSpec g = link_grid(8, 1, 0, 2);
    const Gauge G = random_exact_gauge(g, 100, 1);
    const Connection A = random_connection(g, 101, 2, 0.3);
    const Connection Ag = gauge_transform(G, A);
    const Field f = random_band_limited(g, 102, 2, FormType::k00, Fiber::section);
    CHECK(max_diff(dbar(Ag, gauge_transform(G, f)), gauge_transform(G, dbar(A, f))) < 1e-12);
    CHECK(max_diff(curvature(Ag), gauge_transform(G, curvature(A))) < 1e-10);
}

TEST_CASE("theta section is holomorphic up to second-order discretization error") {
    std::vector<double> defect;
    for (int N : {8, 16}) {
        const GridSpec g = link_grid(N, 1, 1);
        const Field s = holomorphic_section(g);
        defect.push_back(sup_norm(dbar(Connection(g), s)) / sup_norm(s));
    }
    CHECK(defect[1] < defect[0] / 3.5);
    CHECK_THROWS_AS(holomorphic_section(link_grid(8, -1, 0)), std::domain_error);
}

TEST_CASE("link derivative converges at second order on the trivial bundle") {
    std::vector<double> err;
    for (int N : {8, 16}) {
        GridSpec g = link_grid(N, 0, 0);
        Field f(g, FormType::k00, Fiber::section);
        f.at(0) = scalar_field(g, [](double x, double y, double, double) {
                      return std::exp(I * 2.0 * kPi * x) * std::cos(2.0 * kPi * y);
                  }).at(0);
        const Field d = dbar(Connection(g), f);
        double e = 0;
        for (std::size_t p = 0; p < g.points(); ++p) {
            const double x = g.coordinate(p, 0), y = g.coordinate(p, 1);
            const cplx exact = 0.5 * std::exp(I * 2.0 * kPi * x) *
                               (I * 2.0 * kPi * std::cos(2.0 * kPi * y) - I * 2.0 * kPi * std::sin(2.0 * kPi * y));
            e = std::max(e, std::abs(d.at(0)[p] - exact));
        }
        err.push_back(e);
    }
    CHECK(std::log2(err[0] / err[1]) > 1.9);
}
