#include <pybind11/eigen.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <cmath>

#include "swlab/spin_algebra.hpp"
#include "swlab/surface_topology.hpp"
#include "swlab/sw_system.hpp"
#include "swlab/vortex_solver.hpp"

namespace py = pybind11;
using namespace swlab;

namespace {

// Rationals cross as (numerator, denominator); the Python side wraps them in Fraction.
py::tuple rat(const Rational& r) { return py::make_tuple(r.num(), r.den()); }

GridSpec make_grid(int N, const std::string& backend, int d1, int d2, int rank) {
    GridSpec g;
    g.N = N;
    g.backend = parse_backend(backend);
    g.d1 = d1;
    g.d2 = d2;
    g.rank = rank;
    g.validate();
    return g;
}

py::array_t<double> real_grid(const Field& f) {
    const int N = f.grid.N;
    py::array_t<double> out({N, N, N, N});
    auto* p = out.mutable_data();
    for (std::size_t i = 0; i < f.grid.points(); ++i) p[i] = std::real(f.at(0)[i]);
    return out;
}

py::dict surface(const std::string& name) {
    const auto s = topology::preset(name);
    py::dict d;
    d["name"] = s.name;
    d["b2"] = s.b2;
    d["signature"] = s.sigma;
    d["euler"] = s.euler;
    d["chi_O"] = s.chiO;
    d["K"] = s.K;
    d["Q"] = s.Q;
    return d;
}

py::tuple spinor_chern(const std::string& name, const topology::IntVector& L) {
    const auto c = topology::spinor_chern(topology::preset(name), L);
    return py::make_tuple(rat(c.c2_plus), rat(c.c2_minus));
}

py::list divisors(const std::string& name, const topology::IntVector& H0, std::int64_t n, int box) {
    const auto res = topology::divisor_search(topology::preset(name), H0, n, box);
    py::list out;
    for (const auto& c : res.solutions) {
        py::dict d;
        d["D"] = c.D;
        d["L"] = c.L;
        d["effective_candidate"] = c.effective_candidate;
        out.append(d);
    }
    return out;
}

py::dict identities(int N, std::uint64_t seed, int cutoff, int rank) {
    const GridSpec g = make_grid(N, "spectral", 0, 0, rank);
    const Connection A = random_connection(g, seed + 1, cutoff, 0.5);
    const auto psi = sw::SpinorField::random(g, seed + 2, cutoff);
    const auto res = sw::sw_star_residual(A, psi);
    py::dict d;
    d["weitzenbock"] = sw::weitzenbock_gap(A, psi);
    d["energy"] = sw::energy_identity(A, psi).gap;
    d["curvature_pairing"] = sw::curvature_pairing(A, psi).gap;
    d["formulation_equivalence"] = std::abs(res.gamma_gap - res.aggregate()) / (1.0 + res.aggregate());
    return d;
}

double chern_weil(int N, int d1, int d2, std::uint64_t seed, double amplitude) {
    const GridSpec g = make_grid(N, "link", d1, d2, 1);
    return chern_weil_degree(amplitude > 0 ? random_connection(g, seed, 2, amplitude) : Connection(g));
}

py::dict solve(int N, double t_m, const std::vector<std::tuple<int, int, int, int, double>>& cosine,
               const std::string& backend, int d1, int d2, double tol) {
    const GridSpec g = make_grid(N, backend, d1, d2, 1);
    std::vector<vortex::VortexParameters::CosineMode> modes;
    for (const auto& [k1, k2, k3, k4, a] : cosine) modes.push_back({{k1, k2, k3, k4}, a});
    const auto params = vortex::VortexParameters::cosine(g, t_m, modes);
    const Field phi0 = g.twisted() ? holomorphic_section(g) : constant_field(g, FormType::k00, Fiber::section, 1.0);
    const auto rep = vortex::moduli_chain_check(Connection(g), phi0, params, tol);
    py::dict d;
    d["outcome"] = rep.outcome;
    d["stability"] = vortex::to_string(rep.stability.verdict);
    d["all_passed"] = rep.all_passed();
    py::dict stages;
    for (const auto& s : rep.stages) stages[py::str(s.name)] = py::make_tuple(s.passed, s.value);
    d["stages"] = stages;
    if (rep.solution) {
        d["u"] = real_grid(rep.solution->u);
        d["iterations"] = rep.solution->report.iterations;
        d["residual"] = rep.solution->report.residual;
    }
    if (rep.dichotomy) {
        d["J"] = rep.dichotomy->J;
        d["branch"] = sw::to_string(rep.dichotomy->branch);
    }
    return d;
}

spin::Covector covector(const std::array<std::complex<double>, 4>& u) {
    spin::Covector c;
    for (int a = 0; a < 4; ++a) c[a] = u[a];
    return c;
}

}  // namespace

PYBIND11_MODULE(_swlab, m) {
    m.doc() = "Numerical laboratory for vortex and monopole equations on the flat 4-torus";

    m.def("preset_names", &topology::preset_names);
    m.def("surface", &surface, py::arg("name"));
    m.def("spinor_chern", &spinor_chern, py::arg("name"), py::arg("L"),
          "(c2 of the positive spinor bundle, c2 of the negative one) as (num, den) pairs");
    m.def("count_spinc_lifts", [](const std::string& name, const topology::IntVector& torsion) {
        auto s = topology::preset(name);
        s.torsion = torsion;
        return topology::count_spinc_lifts(s, true);
    }, py::arg("name"), py::arg("torsion") = topology::IntVector{});
    m.def("divisors", &divisors, py::arg("name"), py::arg("H"), py::arg("n") = 0, py::arg("box") = 6);

    m.def("gamma", [](const std::array<std::complex<double>, 4>& u) { return spin::Mat4(spin::gamma(covector(u))); },
          py::arg("u"), "Clifford multiplication on the full spinor fiber (4x4)");
    m.def("gamma_two", [](std::complex<double> l20, std::complex<double> l02, std::complex<double> f) {
        return spin::Mat2(spin::gamma_two(l20, l02, f));
    }, py::arg("lambda20"), py::arg("lambda02"), py::arg("f"));

    m.def("identities", &identities, py::arg("N") = 16, py::arg("seed") = 0, py::arg("cutoff") = 4, py::arg("rank") = 1);
    m.def("chern_weil", &chern_weil, py::arg("N"), py::arg("d1"), py::arg("d2"), py::arg("seed") = 0,
          py::arg("amplitude") = 0.0);
    m.def("solve", &solve, py::arg("N"), py::arg("t_m"),
          py::arg("cosine") = std::vector<std::tuple<int, int, int, int, double>>{}, py::arg("backend") = "spectral",
          py::arg("d1") = 0, py::arg("d2") = 0, py::arg("tol") = 1e-8);
}
