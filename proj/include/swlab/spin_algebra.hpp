#pragma once

#include <array>
#include <complex>

#include <Eigen/Dense>

// Fiber algebra of the canonical Spin^c structure of a Kähler surface at a
// single point. Coframe: e0 = dx1, e1 = dy1, e2 = dx2, e3 = dy2 with
// dz_k = dx_k + i dy_k, so |dz_k|^2 = 2 and ω = e0∧e1 + e2∧e3.
//
// Spinors are written in orthonormal components:
//   Σ+ : (φ, α̂)     with α = α_c dz̄1∧dz̄2 and α̂ = 2 α_c
//   Σ- : (θ̂1, θ̂2)   with θ = θ1 dz̄1 + θ2 dz̄2 and θ̂_k = √2 θ_k
// Everything is a small dense matrix in these bases.
namespace swlab::spin {

using cplx = std::complex<double>;
using Mat2 = Eigen::Matrix2cd;
using Mat4 = Eigen::Matrix4cd;
using Vec2 = Eigen::Vector2cd;
using Vec4 = Eigen::Vector4cd;

/// A complexified cotangent vector given by its coefficients on e0..e3.
using Covector = std::array<cplx, 4>;

/// u = Σ c_k dz_k + d_k dz̄_k.
struct Bidegree1 {
    std::array<cplx, 2> c;  ///< (1,0) part
    std::array<cplx, 2> d;  ///< (0,1) part
};
Bidegree1 split(const Covector& u);

/// Complex-bilinear extension of the metric: g(dx_k, dx_k) = g(dy_k, dy_k) = 1.
cplx metric_c(const Covector& u, const Covector& v);
Covector basis_covector(int a);

/// γ(u): Σ+ → Σ-.
Mat2 gamma_plus(const Covector& u);
/// γ(u)^#: Σ- → Σ+. For real u this is the adjoint of gamma_plus(u).
Mat2 gamma_sharp(const Covector& u);
/// γ(u) on Σ = Σ+ ⊕ Σ- (rows/cols: φ, α̂, θ̂1, θ̂2); the Σ- block is −γ(u)^#.
Mat4 gamma(const Covector& u);

struct SpinorFiber {
    cplx phi{};
    cplx alpha{};                 ///< α̂, orthonormal
    std::array<cplx, 2> theta{};  ///< θ̂, orthonormal
    Vec4 vec() const { return Vec4(phi, alpha, theta[0], theta[1]); }
    static SpinorFiber from_vec(const Vec4& v) { return {v(0), v(1), {v(2), v(3)}}; }
};
SpinorFiber gamma(const Covector& u, const SpinorFiber& psi);

/// Decomposition of a 2-form along Λ^{20} ⊕ Λ^{02} ⊕ Λ^{00}ω ⊕ Λ^-.
/// lambda20, lambda02 are coefficients of dz1∧dz2, dz̄1∧dz̄2.
struct TwoFormFiber {
    cplx lambda20{};
    cplx lambda02{};
    cplx f{};                    ///< coefficient of ω
    std::array<cplx, 6> minus{};  ///< anti-self-dual part on e01,e02,e03,e12,e13,e23

    /// Components on e01, e02, e03, e12, e13, e23.
    static TwoFormFiber from_components(const std::array<cplx, 6>& F);
    std::array<cplx, 6> components() const;
    double minus_norm() const;
};

/// Pairs (a,b), a < b, in the component order used throughout.
inline constexpr std::array<std::array<int, 2>, 6> kPairs{{{0, 1}, {0, 2}, {0, 3}, {1, 2}, {1, 3}, {2, 3}}};

/// Hodge star on 2-form components (orientation e0∧e1∧e2∧e3).
std::array<cplx, 6> hodge_star(const std::array<cplx, 6>& F);

/// Γ on the self-dual part as an endomorphism of Σ+. Throws
/// std::invalid_argument when the anti-self-dual part exceeds `tol`.
Mat2 gamma_two(const TwoFormFiber& form, double tol = 1e-12);
/// Same, taking the self-dual data directly.
Mat2 gamma_two(cplx lambda20, cplx lambda02, cplx f);
/// Σ+ block of Γ(e^a ∧ e^b) = γ(e^a)γ(e^b) for a ≠ b.
Mat2 gamma_basis_plus(int a, int b);
/// Γ(u ∧ v) = ½[γ(u), γ(v)] on Σ.
Mat4 gamma_wedge(const Covector& u, const Covector& v);

/// (ΨΨ̄)_0 for a rank-r positive spinor: Ψ Ψ* minus ½ Id_{Σ+} ⊗ (partial trace).
/// Index order is Σ+-major: row s*r + i.
Eigen::MatrixXcd spinor_quadratic(const Eigen::VectorXcd& phi, const Eigen::VectorXcd& alpha_hat);
/// Partial trace over the Σ+ index of a 2r×2r matrix.
Eigen::MatrixXcd partial_trace_plus(const Eigen::MatrixXcd& m, int r);

}  // namespace swlab::spin
