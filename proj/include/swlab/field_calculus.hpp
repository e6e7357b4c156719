#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "swlab/grid.hpp"

// Fields, connections and the covariant calculus on the flat Kähler torus.
//
// Form components are coefficients on the constant coframe:
//   k00 : 1            k10 : dz1, dz2          k01 : dz̄1, dz̄2
//   k20 : dz1∧dz2      k02 : dz̄1∧dz̄2
//   k1  : e0..e3       k2  : e01,e02,e03,e12,e13,e23
//   k3  : e012,e013,e023,e123
// with e0 = dx1, e1 = dy1, e2 = dx2, e3 = dy2. Pointwise norms use the
// metric weights |dz|^2 = 2, |dz1∧dz2|^2 = 4.
namespace swlab {

enum class FormType { k00, k10, k01, k20, k02, k1, k2, k3 };
enum class Fiber { scalar, section, endo };

int component_count(FormType k);
double component_weight(FormType k);
std::string to_string(FormType k);
std::string to_string(Fiber f);
FormType parse_form_type(const std::string& s);
Fiber parse_fiber(const std::string& s);

class Field {
public:
    Field() = default;
    Field(const GridSpec& g, FormType k, Fiber f);

    GridSpec grid;
    FormType kind = FormType::k00;
    Fiber fiber = Fiber::scalar;
    std::vector<Grid> data;  ///< data[comp * fiber_dim + entry]

    int components() const { return component_count(kind); }
    int fiber_dim() const;
    int rank() const { return fiber == Fiber::scalar ? 1 : grid.rank; }

    Grid& at(int comp, int entry = 0) { return data[static_cast<std::size_t>(comp * fiber_dim() + entry)]; }
    const Grid& at(int comp, int entry = 0) const { return data[static_cast<std::size_t>(comp * fiber_dim() + entry)]; }

    /// Fiber value at a point: r×r for endo, r×1 for section, 1×1 for scalar.
    Eigen::MatrixXcd value(int comp, std::size_t p) const;
    void set_value(int comp, std::size_t p, const Eigen::MatrixXcd& m);

    bool same_shape(const Field& o) const;

    Field& operator+=(const Field& o);
    Field& operator-=(const Field& o);
    Field& operator*=(cplx s);
    friend Field operator+(Field a, const Field& b) { return a += b; }
    friend Field operator-(Field a, const Field& b) { return a -= b; }
    friend Field operator*(cplx s, Field a) { return a *= s; }
    friend Field operator*(Field a, cplx s) { return a *= s; }
};

Field constant_field(const GridSpec& g, FormType k, Fiber f, cplx value);
/// Scalar k00 field from a function of the four coordinates.
template <class Fn>
Field scalar_field(const GridSpec& g, Fn&& fn) {
    Field out(g, FormType::k00, Fiber::scalar);
    for (std::size_t p = 0; p < g.points(); ++p)
        out.at(0)[p] = fn(g.coordinate(p, 0), g.coordinate(p, 1), g.coordinate(p, 2), g.coordinate(p, 3));
    return out;
}

/// A = background(bidegree) + a, with a a skew-Hermitian k1 endo field.
/// On the link backend the connection may instead carry explicit links
/// (4·r² grids, axis-major), produced e.g. by gauge transformations.
struct Connection {
    GridSpec grid;
    Field potential;
    std::vector<Grid> links;

    Connection() = default;
    explicit Connection(const GridSpec& g);
    bool has_explicit_links() const { return !links.empty(); }
    double skew_defect() const;
};

/// Link variables U_a(n) (parallel transport from n + e_a back to n).
class LinkSet {
public:
    explicit LinkSet(const Connection& A);
    Eigen::MatrixXcd at(int axis, std::size_t p) const;
    cplx scalar(int axis, std::size_t p) const { return u_[static_cast<std::size_t>(axis * r_ * r_)][p]; }
    int rank() const { return r_; }
    const std::vector<Grid>& raw() const { return u_; }

private:
    int r_;
    std::vector<Grid> u_;
};

/// Background link phase of the constant-curvature line bundle.
cplx background_link(const GridSpec& g, int axis, std::size_t p);

// Covariant calculus ------------------------------------------------------

/// ∇_a acting componentwise; sections by the fundamental action, endo
/// fields by the adjoint action, scalar fields by plain differentiation.
Field nabla(const Connection& A, const Field& f, int axis);
Field dbar(const Connection& A, const Field& f);     ///< k00→k01, k01→k02
Field partial(const Connection& A, const Field& f);  ///< k00→k10, k10→k20
/// Λ(∂_A α) for α of type (0,2), a (0,1) field.
Field lambda_partial(const Connection& A, const Field& alpha);
/// Formal adjoint of ∂̄_A on (0,1) forms.
Field dbar_adjoint(const Connection& A, const Field& theta);

Field curvature(const Connection& A);
/// d_A on End-valued 2-forms (k2 → k3).
Field covariant_exterior(const Connection& A, const Field& F);
/// Exterior derivative of scalar-fiber forms, k00→k1, k1→k2, k2→k3 (spectral).
Field exterior_derivative(const Field& f);
/// (1/2π) ∫ Tr(i F_A) ∧ ω.
double chern_weil_degree(const Connection& A);

// Algebra on forms ---------------------------------------------------------

Field lambda_contract(const Field& F);  ///< k2 → k00
Field wedge_omega(const Field& f);      ///< k00 → k2
Field hodge_star(const Field& F);
Field selfdual_plus(const Field& F);
Field part20(const Field& F);  ///< k2 → k20
Field part02(const Field& F);  ///< k2 → k02
Field trace(const Field& f);    ///< endo → scalar
Field adjoint(const Field& f);  ///< pointwise conjugate transpose (endo) / conjugate
/// Pointwise product of a scalar k00 field with any field.
Field multiply(const Field& scalar, const Field& f);
/// Pointwise product of an endo k00 field with a section or endo field.
Field apply(const Field& endo, const Field& f);

cplx inner_product(const Field& f, const Field& g);
double norm(const Field& f);
double sup_norm(const Field& f);
/// ∫ of every fiber entry of component `comp`, summed over the trace for endo fields.
cplx integrate(const Field& f, int comp = 0);
double mean(const Field& scalar);

// Randomness and gauge -----------------------------------------------------

/// Random field with Fourier modes |k_a| < cutoff on every axis.
Field random_band_limited(const GridSpec& g, std::uint64_t seed, int cutoff, FormType k, Fiber f,
                          double amplitude = 1.0);
/// Connection with a random band-limited skew-Hermitian potential.
Connection random_connection(const GridSpec& g, std::uint64_t seed, int cutoff, double amplitude = 1.0);
Field skew_hermitian_part(const Field& f);
Field hermitian_part(const Field& f);

struct Gauge {
    Field g;                        ///< k00 endo, unitary pointwise
    std::optional<Field> maurer_cartan;  ///< g^{-1} dg as a k1 endo field when known exactly
};

/// g = W diag(exp(2πi n_j·x/L)) V with Haar-like constant unitaries and
/// integer windings |n_j,a| ≤ max_winding.
Gauge random_exact_gauge(const GridSpec& g, std::uint64_t seed, int max_winding = 1);
/// Gauge from pointwise values; the Maurer–Cartan form is spectral.
Gauge gauge_from_values(const Field& g);

/// (A, ψ)^g = (g^{-1} A g + g^{-1} dg, g^{-1} ψ).
Connection gauge_transform(const Gauge& g, const Connection& A);
Field gauge_transform(const Gauge& g, const Field& f);

/// Holomorphic section of the background line bundle of bidegree (d1, d2),
/// d_k ≥ 0, as a product of theta functions.
Field holomorphic_section(const GridSpec& g);

}  // namespace swlab
