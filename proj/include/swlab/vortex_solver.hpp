#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "swlab/field_calculus.hpp"
#include "swlab/rational.hpp"
#include "swlab/surface_topology.hpp"
#include "swlab/sw_system.hpp"

// Rank-1 generalized vortex equations
//   ∂̄_A² = 0,  ∂̄_A φ = 0,  iΛF_A + ½ φφ* − ½ t = 0
// solved in metric gauge h = h0 e^{2u}, where they reduce to
//   Δu + ½ e^{2u} |φ0|² = ½ t − iΛF0,   Δ = −Σ ∂_a².
namespace swlab::vortex {

struct VortexParameters {
    Field t;            ///< real scalar k00
    double t_m = 0;     ///< mean of t
    double lambda = 0;  ///< t_m Vol / 4π
    Field v;            ///< mean-zero, Δv = t − t_m
    bool s_embed = true;

    static VortexParameters from_function(const Field& t);
    static VortexParameters constant(const GridSpec& g, double tau);
    /// t = t_m + Σ amplitude_i cos(2π k_i·x / L)
    struct CosineMode {
        std::array<int, 4> k;
        double amplitude;
    };
    static VortexParameters cosine(const GridSpec& g, double t_m, const std::vector<CosineMode>& modes);
};

// Moment map ---------------------------------------------------------------

/// m_t = ΛF_A − (i/2) φφ* + (i/2) t id, a k00 endo field.
Field moment_map(const Connection& A, const Field& phi, const Field& t);
/// ⟨m_t, a⟩ = ∫ Re Tr(m_t a*).
double moment_component(const Connection& A, const Field& phi, const Field& t, const Field& a);

struct Tangent {
    Field A_dot;    ///< k1 endo, skew-Hermitian
    Field phi_dot;  ///< k00 section
};
/// Infinitesimal action of a ∈ Lie(G): a^# = (d_A a, −a φ).
Tangent infinitesimal_action(const Connection& A, const Field& phi, const Field& a);
/// ∫ Tr(X_A ∧ Y_A) ∧ ω + ∫ Im ⟨Y_φ, X_φ⟩.
double symplectic_form(const Tangent& X, const Tangent& Y);

struct MomentDerivativeCheck {
    double finite_difference = 0;
    double pairing = 0;
    double relative_error = 0;
};
MomentDerivativeCheck moment_derivative_check(const Connection& A, const Field& phi, const Field& a, const Tangent& tangent,
                                              const Field& t, double eps = 1e-4);

// Laplace substitution ------------------------------------------------------

/// Mean-zero v with Δv = t − t_m (equivalently iΛ∂̄∂v = ½(t − t_m)).
Field laplace_substitute(const Field& t);

// Kazdan–Warner solver --------------------------------------------------------

struct UnstablePair : std::runtime_error {
    explicit UnstablePair(const std::string& m) : std::runtime_error(m) {}
};
struct NotHolomorphic : std::runtime_error {
    explicit NotHolomorphic(const std::string& m) : std::runtime_error(m) {}
};

struct IterationRecord {
    int iteration = 0;
    double residual = 0;    ///< sup |G(u)|
    double functional = 0;  ///< Bradlow functional M(u)
    double step = 0;
    int cg_iterations = 0;
};

struct SolveReport {
    bool converged = false;
    int iterations = 0;
    double residual = 0;
    std::vector<IterationRecord> trace;
    double vt_residual[3] = {0, 0, 0};
    std::string verdict;
};

struct NonConvergence : std::runtime_error {
    NonConvergence(const std::string& m, SolveReport r) : std::runtime_error(m), report(std::move(r)) {}
    SolveReport report;
};

struct SolverOptions {
    int max_iterations = 50;
    double tolerance = 1e-10;
    /// Allowed ‖∂̄_0 φ0‖/‖φ0‖; negative selects the backend default.
    double holomorphy_tolerance = -1;
};

/// Background data entering the scalar equation.
struct ScalarProblem {
    Field f0;  ///< iΛF0, real scalar
    Field w;   ///< |φ0|², real scalar
    Field t;   ///< real scalar
};
ScalarProblem scalar_problem(const Connection& A0, const Field& phi0, const Field& t);
/// G(u) = Δu + ½ e^{2u} w − ½ t + f0.
Field kw_residual(const ScalarProblem& P, const Field& u);

struct Solution {
    Field u;
    SolveReport report;
};
/// Newton iteration from u = 0. Throws UnstablePair, NotHolomorphic or NonConvergence.
Solution kazdan_warner_solve(const Connection& A0, const Field& phi0, const VortexParameters& params,
                             const SolverOptions& opt = {});
Solution kazdan_warner_solve(const ScalarProblem& P, const SolverOptions& opt = {});

/// Unitary pair (A0 + ∂u − ∂̄u, e^u φ0) for the metric h0 e^{2u}.
struct Pair {
    Connection A;
    Field phi;
};
Pair reconstruct_pair(const Connection& A0, const Field& phi0, const Field& u);

struct VortexResidual {
    double integrability = 0;  ///< ‖F^{02}‖
    double holomorphy = 0;     ///< ‖∂̄_A φ‖
    double moment = 0;         ///< ‖iΛF + ½φφ* − ½t‖
    double max() const { return std::max({integrability, holomorphy, moment}); }
};
VortexResidual vortex_residual(const Connection& A, const Field& phi, const Field& t);

/// M(u) = ∫ |∇u|² + 2u f0 + ½(e^{2u} − 1) w − t u. Its gradient is 2 G(u).
double bradlow_functional(const ScalarProblem& P, const Field& u);
/// Base data after moving the reference metric by e^{2u1}.
ScalarProblem shifted_problem(const ScalarProblem& P, const Field& u1);
/// Problem for h' = h e^{-v}: weight e^v w and constant t_m.
ScalarProblem reduced_problem(const ScalarProblem& P, const VortexParameters& params);

// Stability -------------------------------------------------------------------

enum class Verdict { stable, unstable, borderline, split_case };
std::string to_string(Verdict v);

struct Witness {
    int rank = 1;
    Rational degree;
    bool contains_phi = false;
    bool direct_summand = false;
};

struct StabilityVerdict {
    Verdict verdict = Verdict::stable;
    std::string reason;
};

StabilityVerdict stability_check(const topology::BundleTopology& bundle, const Rational& degree, const Rational& lambda,
                                 const std::vector<Witness>& witnesses = {});
StabilityVerdict stability_check(const topology::BundleTopology& bundle, const Rational& degree, double lambda,
                                 const std::vector<Witness>& witnesses = {});

// Moduli chain ----------------------------------------------------------------------

struct StageResult {
    std::string name;
    bool passed = false;
    double value = 0;
    std::string detail;
};

struct ChainReport {
    bool solved = false;
    std::string outcome;  ///< "solved", "unstable" or "reducible"
    StabilityVerdict stability;
    std::vector<StageResult> stages;
    std::optional<Solution> solution;
    std::optional<sw::DichotomyReport> dichotomy;
    bool all_passed() const;
};

/// Solve, then check stability, the Seiberg–Witten embedding (s = −t) and
/// the transport to the constant-parameter equation.
ChainReport moduli_chain_check(const Connection& A0, const Field& phi0, const VortexParameters& params, double tol,
                               const SolverOptions& opt = {});

}  // namespace swlab::vortex
