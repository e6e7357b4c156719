#pragma once

#include <optional>
#include <string>

#include "swlab/field_calculus.hpp"

// Coupled Seiberg–Witten system for the canonical Spin^c structure on the
// flat Kähler torus. A positive spinor is (φ, α) with φ a section of E and
// α the coefficient of dz̄1∧dz̄2 (so its orthonormal component is 2α).
//
// The determinant connection is flat; an optional scalar field `s` emulates
// its curvature through F_c = −(i/2) s ω, entering only as
// iΛF_{A,c} = iΛF_A + ½ s.
namespace swlab::sw {

struct SpinorField {
    Field phi;    ///< k00 section
    Field alpha;  ///< k02 section

    static SpinorField zero(const GridSpec& g);
    static SpinorField random(const GridSpec& g, std::uint64_t seed, int cutoff, double amplitude = 1.0);
    SpinorField& operator*=(cplx s);
};

double norm(const SpinorField& psi);
double norm_phi(const SpinorField& psi);
double norm_alpha(const SpinorField& psi);

/// D⁺Ψ = √2(∂̄_A φ − iΛ ∂_A α), a (0,1) section.
Field dirac(const Connection& A, const SpinorField& psi);
/// Formal adjoint D⁻ : Λ^{01} ⊗ E → Σ⁺ ⊗ E.
SpinorField dirac_adjoint(const Connection& A, const Field& theta);

struct SWResidual {
    double dirac_norm = 0;
    double eq20_norm = 0;
    double eq02_norm = 0;
    double eqLambda_norm = 0;
    double eq4_norm = 0;
    double gamma_gap = 0;

    double max() const;
    /// sqrt(4‖eq20‖² + 4‖eq02‖² + 2‖eqΛ‖²): what gamma_gap must equal.
    double aggregate() const;
};

/// Residuals of the Kähler form of the equations and of the Clifford form.
/// `s` is the emulated determinant curvature (scalar k00 field) or none.
SWResidual sw_star_residual(const Connection& A, const SpinorField& psi, const std::optional<Field>& s = std::nullopt);

/// Pointwise Γ(F⁺_{A,c}) − (ΨΨ̄)_0 as a 2r×2r matrix (Σ⁺-major).
Eigen::MatrixXcd clifford_gap_at(const Field& F, const SpinorField& psi, std::size_t p, const Field* s);

struct EnergyIdentity {
    double dirac_sq = 0;   ///< ‖DΨ‖²
    double gap_sq = 0;     ///< ‖Γ(F⁺) − (ΨΨ̄)_0‖²
    double nabla_sq = 0;   ///< ‖∇Ψ‖²
    double fplus_sq = 0;   ///< ‖Γ(F⁺)‖²
    double quad_sq = 0;    ///< ‖(ΨΨ̄)_0‖²
    double lhs = 0;
    double rhs = 0;
    double gap = 0;        ///< |lhs − rhs| / (1 + lhs)
};
EnergyIdentity energy_identity(const Connection& A, const SpinorField& psi);

/// sup over the grid of |D⁻D⁺Ψ − ∇*∇Ψ − Γ(F_A)Ψ| in orthonormal components.
double weitzenbock_gap(const Connection& A, const SpinorField& psi);

struct PairingCheck {
    double full = 0;   ///< ∫ (Γ(F_A)|Σ⁺, ΨΨ*)
    double plus = 0;   ///< ∫ (Γ(F⁺_A), (ΨΨ̄)_0)
    double gap = 0;
};
/// The curvature term only sees F⁺ and the trace-free part of ΨΨ*.
PairingCheck curvature_pairing(const Connection& A, const SpinorField& psi);

enum class Branch { A, B, reducible, inconsistent };
std::string to_string(Branch b);

struct DichotomyReport {
    double chern_weil = 0;
    double J = 0;
    Branch branch = Branch::reducible;
    double phi_norm = 0;
    double alpha_norm = 0;
    double system[3] = {0, 0, 0};  ///< residuals of the branch system (i)-(iii)
    double sw_max = 0;
    std::string diagnostic;
};

/// Classifies a near-solution of the equations by the sign of
/// J = (1/π) ∫ Tr(iΛF_{A,c}) dvol. `tol` bounds what counts as "small".
DichotomyReport dichotomy_analyze(const Connection& A, const SpinorField& psi, const std::optional<Field>& s,
                                  double tol);

/// Conjugate pair (Ā, 0, α = φ̄/2) realizing E ↦ E^∨ ⊗ K on the torus;
/// the emulated curvature changes sign. Rank 1 only.
struct ConjugatePair {
    Connection A;
    SpinorField psi;
    std::optional<Field> s;
};
ConjugatePair conjugate_pair(const Connection& A, const Field& phi, const std::optional<Field>& s);

}  // namespace swlab::sw
