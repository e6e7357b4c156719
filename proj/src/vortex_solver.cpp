#include "swlab/vortex_solver.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

namespace swlab::vortex {

namespace {

const cplx I{0.0, 1.0};
constexpr double kPi = std::numbers::pi;

Field real_scalar(const GridSpec& g) { return Field(g, FormType::k00, Fiber::scalar); }

double sup_abs(const Field& f) {
    double m = 0;
    for (auto v : f.at(0)) m = std::max(m, std::abs(v));
    return m;
}

std::string fmt(double x) {
    std::ostringstream os;
    os.precision(6);
    os << x;
    return os.str();
}

}  // namespace

// Parameters -----------------------------------------------------------------------

VortexParameters VortexParameters::from_function(const Field& t) {
    if (t.kind != FormType::k00 || t.fiber != Fiber::scalar) throw std::invalid_argument("t must be a scalar function");
    VortexParameters p;
    p.t = t;
    for (auto& v : p.t.at(0)) v = std::real(v);
    p.t_m = mean(p.t);
    p.lambda = p.t_m * t.grid.volume() / (4.0 * kPi);
    p.v = laplace_substitute(p.t);
    return p;
}

VortexParameters VortexParameters::constant(const GridSpec& g, double tau) {
    return from_function(constant_field(g, FormType::k00, Fiber::scalar, tau));
}

VortexParameters VortexParameters::cosine(const GridSpec& g, double t_m, const std::vector<CosineMode>& modes) {
    Field t = scalar_field(g, [&](double x0, double x1, double x2, double x3) {
        const double x[4] = {x0, x1, x2, x3};
        double s = t_m;
        for (const auto& m : modes) {
            double arg = 0;
            for (int a = 0; a < 4; ++a) arg += 2.0 * kPi * m.k[static_cast<std::size_t>(a)] * x[a] / g.length(a);
            s += m.amplitude * std::cos(arg);
        }
        return cplx(s);
    });
    return from_function(t);
}

// Moment map --------------------------------------------------------------------------

Field moment_map(const Connection& A, const Field& phi, const Field& t) {
    const auto& g = A.grid;
    const Field L = lambda_contract(curvature(A));
    Field m(g, FormType::k00, Fiber::endo);
    for (std::size_t p = 0; p < g.points(); ++p) {
        const Eigen::MatrixXcd ph = phi.value(0, p);
        Eigen::MatrixXcd v = L.value(0, p) - 0.5 * I * ph * ph.adjoint();
        v += 0.5 * I * t.at(0)[p] * Eigen::MatrixXcd::Identity(v.rows(), v.cols());
        m.set_value(0, p, v);
    }
    return m;
}

double moment_component(const Connection& A, const Field& phi, const Field& t, const Field& a) {
    return std::real(inner_product(moment_map(A, phi, t), a));
}

Tangent infinitesimal_action(const Connection& A, const Field& phi, const Field& a) {
    Tangent out{Field(A.grid, FormType::k1, Fiber::endo), apply(a, phi)};
    out.phi_dot *= -1.0;
    for (int ax = 0; ax < 4; ++ax) {
        const Field d = nabla(A, a, ax);
        for (int e = 0; e < d.fiber_dim(); ++e) out.A_dot.at(ax, e) = d.at(0, e);
    }
    return out;
}

double symplectic_form(const Tangent& X, const Tangent& Y) {
    const auto& g = X.A_dot.grid;
    double s = 0;
    for (std::size_t p = 0; p < g.points(); ++p) {
        const auto x = [&](int a) { return X.A_dot.value(a, p); };
        const auto y = [&](int a) { return Y.A_dot.value(a, p); };
        const Eigen::MatrixXcd w = x(0) * y(1) - x(1) * y(0) + x(2) * y(3) - x(3) * y(2);
        s += std::real(w.trace());
        for (int e = 0; e < X.phi_dot.fiber_dim(); ++e)
            s += std::imag(std::conj(Y.phi_dot.at(0, e)[p]) * X.phi_dot.at(0, e)[p]);
    }
    return s * g.cell_volume();
}

MomentDerivativeCheck moment_derivative_check(const Connection& A, const Field& phi, const Field& a, const Tangent& tangent,
                                              const Field& t, double eps) {
    const double tnorm = std::hypot(norm(tangent.A_dot), norm(tangent.phi_dot));
    if (tnorm == 0.0) throw std::invalid_argument("moment_derivative_check: degenerate (zero) tangent");
    const auto shifted = [&](double s) {
        Connection B = A;
        B.potential += s * tangent.A_dot;
        return moment_component(B, phi + s * tangent.phi_dot, t, a);
    };
    MomentDerivativeCheck out;
    out.finite_difference = (shifted(eps) - shifted(-eps)) / (2.0 * eps);
    const Tangent act = infinitesimal_action(A, phi, a);
    out.pairing = symplectic_form(act, tangent);
    const double scale = std::hypot(norm(act.A_dot), norm(act.phi_dot)) * tnorm;
    out.relative_error = std::abs(out.finite_difference - out.pairing) / std::max(scale, 1e-300);
    return out;
}

Field laplace_substitute(const Field& t) {
    if (t.kind != FormType::k00 || t.fiber != Fiber::scalar) throw std::invalid_argument("t must be a scalar function");
    const double tm = mean(t);
    Grid rhs = t.at(0);
    for (auto& v : rhs) v = std::real(v) - tm;
    Field v = real_scalar(t.grid);
    v.at(0) = Spectral(t.grid).solve_laplace(rhs);
    for (auto& x : v.at(0)) x = std::real(x);
    return v;
}

// Scalar problem ---------------------------------------------------------------------------

ScalarProblem scalar_problem(const Connection& A0, const Field& phi0, const Field& t) {
    const auto& g = A0.grid;
    if (g.rank != 1) throw std::invalid_argument("the Newton solver is rank 1 only");
    const Field L = lambda_contract(curvature(A0));
    ScalarProblem P{real_scalar(g), real_scalar(g), real_scalar(g)};
    for (std::size_t p = 0; p < g.points(); ++p) {
        P.f0.at(0)[p] = std::real(I * L.at(0)[p]);
        P.w.at(0)[p] = std::norm(phi0.at(0)[p]);
        P.t.at(0)[p] = std::real(t.at(0)[p]);
    }
    return P;
}

Field kw_residual(const ScalarProblem& P, const Field& u) {
    Field G = real_scalar(u.grid);
    G.at(0) = Spectral(u.grid).laplacian(u.at(0));
    for (std::size_t p = 0; p < u.grid.points(); ++p) {
        const double uu = std::real(u.at(0)[p]);
        G.at(0)[p] = std::real(G.at(0)[p]) + 0.5 * std::exp(2 * uu) * std::real(P.w.at(0)[p]) -
                     0.5 * std::real(P.t.at(0)[p]) + std::real(P.f0.at(0)[p]);
    }
    return G;
}

namespace {

struct FunctionalValue {
    double value = 0;
    double scale = 0;  ///< ∫ of the absolute integrand, for roundoff-aware comparisons
};

FunctionalValue bradlow_with_scale(const ScalarProblem& P, const Field& u) {
    const auto& g = u.grid;
    const Grid lap = Spectral(g).laplacian(u.at(0));
    double s = 0, c = 0, a = 0;
    for (std::size_t p = 0; p < g.points(); ++p) {
        const double uu = std::real(u.at(0)[p]);
        const double term = uu * std::real(lap[p]) + 2 * uu * std::real(P.f0.at(0)[p]) +
                            0.5 * std::expm1(2 * uu) * std::real(P.w.at(0)[p]) - std::real(P.t.at(0)[p]) * uu;
        const double t = s + term;
        c += std::abs(s) >= std::abs(term) ? (s - t) + term : (term - t) + s;
        s = t;
        a += std::abs(term);
    }
    return {(s + c) * g.cell_volume(), a * g.cell_volume()};
}

}  // namespace

double bradlow_functional(const ScalarProblem& P, const Field& u) { return bradlow_with_scale(P, u).value; }

ScalarProblem shifted_problem(const ScalarProblem& P, const Field& u1) {
    ScalarProblem Q = P;
    const Grid lap = Spectral(u1.grid).laplacian(u1.at(0));
    for (std::size_t p = 0; p < u1.grid.points(); ++p) {
        Q.f0.at(0)[p] = std::real(P.f0.at(0)[p]) + std::real(lap[p]);
        Q.w.at(0)[p] = std::exp(2 * std::real(u1.at(0)[p])) * std::real(P.w.at(0)[p]);
    }
    return Q;
}

ScalarProblem reduced_problem(const ScalarProblem& P, const VortexParameters& params) {
    ScalarProblem Q = P;
    for (std::size_t p = 0; p < P.w.grid.points(); ++p) {
        Q.w.at(0)[p] = std::exp(std::real(params.v.at(0)[p])) * std::real(P.w.at(0)[p]);
        Q.t.at(0)[p] = params.t_m;
    }
    return Q;
}

namespace {

// Preconditioned CG for (Δ + c) δ = b with c ≥ 0 pointwise.
Grid pcg(const Spectral& sp, const Grid& c, const Grid& b, double shift, int& iterations) {
    const std::size_t n = b.size();
    const auto apply_op = [&](const Grid& x) {
        Grid y = sp.laplacian(x);
        for (std::size_t i = 0; i < n; ++i) y[i] = std::real(y[i]) + std::real(c[i]) * std::real(x[i]);
        return y;
    };
    const auto dot = [&](const Grid& x, const Grid& y) {
        double s = 0;
        for (std::size_t i = 0; i < n; ++i) s += std::real(x[i]) * std::real(y[i]);
        return s;
    };
    Grid x(n, 0.0), r = b;
    Grid z = sp.shifted_inverse(r, shift);
    for (auto& v : z) v = std::real(v);
    Grid p = z;
    double rz = dot(r, z);
    const double bnorm = std::sqrt(dot(b, b));
    iterations = 0;
    for (int it = 0; it < 500 && std::sqrt(dot(r, r)) > 1e-14 * bnorm; ++it) {
        const Grid Ap = apply_op(p);
        const double alpha = rz / dot(p, Ap);
        for (std::size_t i = 0; i < n; ++i) {
            x[i] += alpha * p[i];
            r[i] -= alpha * Ap[i];
        }
        z = sp.shifted_inverse(r, shift);
        for (auto& v : z) v = std::real(v);
        const double rz_new = dot(r, z);
        const double beta = rz_new / rz;
        rz = rz_new;
        for (std::size_t i = 0; i < n; ++i) p[i] = z[i] + beta * p[i];
        ++iterations;
    }
    return x;
}

}  // namespace

Solution kazdan_warner_solve(const ScalarProblem& P, const SolverOptions& opt) {
    const auto& g = P.w.grid;
    double wmax = 0;
    for (auto v : P.w.at(0)) wmax = std::max(wmax, std::real(v));
    if (wmax == 0.0) throw std::invalid_argument("kazdan_warner_solve: phi0 vanishes identically");

    double budget = 0;
    for (std::size_t p = 0; p < g.points(); ++p) budget += 0.5 * std::real(P.t.at(0)[p]) - std::real(P.f0.at(0)[p]);
    budget *= g.cell_volume();
    if (budget <= 1e-12 * g.volume()) {
        throw UnstablePair("integral of (t/2 - i Lambda F0) is " + fmt(budget) +
                           " <= 0: deg(E) >= lambda, condition mu(E) < lambda fails, no solution exists");
    }

    const Spectral sp(g);
    Solution sol{real_scalar(g), {}};
    Field& u = sol.u;
    Field G = kw_residual(P, u);
    double res = sup_abs(G);
    double M = bradlow_functional(P, u);
    sol.report.trace.push_back({0, res, M, 0.0, 0});
    const double eps = std::numeric_limits<double>::epsilon();

    for (int it = 1; it <= opt.max_iterations && res >= opt.tolerance; ++it) {
        Grid c(g.points()), rhs(g.points());
        double cmean = 0;
        for (std::size_t p = 0; p < g.points(); ++p) {
            c[p] = std::exp(2 * std::real(u.at(0)[p])) * std::real(P.w.at(0)[p]);
            cmean += std::real(c[p]);
            rhs[p] = -std::real(G.at(0)[p]);
        }
        cmean /= static_cast<double>(g.points());
        int cg = 0;
        const Grid delta = pcg(sp, c, rhs, cmean, cg);

        double step = 1.0;
        bool accepted = false;
        for (int half = 0; half < 40; ++half, step *= 0.5) {
            Field trial = u;
            for (std::size_t p = 0; p < g.points(); ++p) trial.at(0)[p] += step * std::real(delta[p]);
            const Field Gt = kw_residual(P, trial);
            const double rt = sup_abs(Gt);
            const auto [Mt, Mscale] = bradlow_with_scale(P, trial);
            // the functional may not rise beyond the roundoff of its own quadrature
            if (rt < res && Mt <= M + 64 * eps * (1.0 + Mscale)) {
                u = std::move(trial);
                G = Gt;
                res = rt;
                M = Mt;
                accepted = true;
                break;
            }
        }
        sol.report.trace.push_back({it, res, M, accepted ? step : 0.0, cg});
        sol.report.iterations = it;
        if (!accepted) {
            sol.report.residual = res;
            sol.report.verdict = "line search failed";
            throw NonConvergence("Newton line search failed at iteration " + std::to_string(it) +
                                     " (residual " + fmt(res) + ")",
                                 sol.report);
        }
    }
    sol.report.residual = res;
    if (res >= opt.tolerance) {
        sol.report.verdict = "max iterations";
        throw NonConvergence("no convergence after " + std::to_string(opt.max_iterations) + " Newton iterations (residual " +
                                 fmt(res) + ")",
                             sol.report);
    }
    sol.report.converged = true;
    sol.report.verdict = "converged";
    return sol;
}

Solution kazdan_warner_solve(const Connection& A0, const Field& phi0, const VortexParameters& params,
                             const SolverOptions& opt) {
    const auto& g = A0.grid;
    if (g.rank != 1) throw std::invalid_argument("the Newton solver is rank 1 only");
    const double pn = norm(phi0);
    if (pn == 0.0) throw std::invalid_argument("kazdan_warner_solve: phi0 vanishes identically");
    double tol = opt.holomorphy_tolerance;
    if (tol < 0) {
        const double h = std::max(g.spacing(0), g.spacing(2));
        tol = g.backend == Backend::spectral ? 1e-8 : 50.0 * h * h;
    }
    const double defect = norm(dbar(A0, phi0)) / pn;
    if (defect > tol)
        throw NotHolomorphic("phi0 is not holomorphic for the background: |dbar phi0|/|phi0| = " + fmt(defect) +
                             " > " + fmt(tol));
    ScalarProblem P = scalar_problem(A0, phi0, params.t);
    Solution sol = kazdan_warner_solve(P, opt);
    const Pair pair = reconstruct_pair(A0, phi0, sol.u);
    const auto vr = vortex_residual(pair.A, pair.phi, params.t);
    sol.report.vt_residual[0] = vr.integrability;
    sol.report.vt_residual[1] = vr.holomorphy;
    sol.report.vt_residual[2] = vr.moment;
    return sol;
}

Pair reconstruct_pair(const Connection& A0, const Field& phi0, const Field& u) {
    if (A0.has_explicit_links()) throw std::invalid_argument("reconstruct_pair: background must be given by a potential");
    const auto& g = A0.grid;
    const auto du = Spectral(g).gradient(u.at(0));
    Pair out{A0, phi0};
    for (int k = 0; k < 2; ++k) {
        auto& ax = out.A.potential.at(2 * k);
        auto& ay = out.A.potential.at(2 * k + 1);
        for (std::size_t p = 0; p < g.points(); ++p) {
            ax[p] += -I * std::real(du[static_cast<std::size_t>(2 * k + 1)][p]);
            ay[p] += I * std::real(du[static_cast<std::size_t>(2 * k)][p]);
        }
    }
    for (std::size_t p = 0; p < g.points(); ++p) out.phi.at(0)[p] *= std::exp(std::real(u.at(0)[p]));
    return out;
}

VortexResidual vortex_residual(const Connection& A, const Field& phi, const Field& t) {
    const auto& g = A.grid;
    const Field F = curvature(A);
    VortexResidual r;
    r.integrability = norm(part02(F));
    r.holomorphy = norm(dbar(A, phi));
    Field m(g, FormType::k00, Fiber::endo);
    for (std::size_t p = 0; p < g.points(); ++p) {
        const Eigen::MatrixXcd ph = phi.value(0, p);
        Eigen::MatrixXcd v = I * (F.value(0, p) + F.value(5, p)) + 0.5 * ph * ph.adjoint();
        v -= 0.5 * std::real(t.at(0)[p]) * Eigen::MatrixXcd::Identity(v.rows(), v.cols());
        m.set_value(0, p, v);
    }
    r.moment = norm(m);
    return r;
}

// Stability ----------------------------------------------------------------------------------

std::string to_string(Verdict v) {
    switch (v) {
        case Verdict::stable: return "stable";
        case Verdict::unstable: return "unstable";
        case Verdict::borderline: return "borderline";
        case Verdict::split_case: return "split-case";
    }
    return "?";
}

namespace {

template <class Cmp>
StabilityVerdict stability_impl(const topology::BundleTopology& bundle, const Rational& degree,
                                const std::vector<Witness>& witnesses, Cmp cmp, const std::string& lambda_text) {
    const int r = bundle.rank;
    if (r < 1) throw std::invalid_argument("stability_check: rank must be >= 1");
    for (const auto& w : witnesses)
        if (w.rank < 1 || w.rank >= r)
            throw std::invalid_argument("stability_check: witness rank " + std::to_string(w.rank) +
                                        " out of range [1, " + std::to_string(r - 1) + "]");
    StabilityVerdict out;
    const Rational mu = degree / Rational(r);
    if (cmp(mu) >= 0) {
        out.verdict = Verdict::unstable;
        out.reason = "condition (1) fails: mu(E) = " + mu.str() + " >= lambda = " + lambda_text;
        return out;
    }
    bool split = false, border = false;
    std::string split_reason, border_reason;
    for (const auto& w : witnesses) {
        const Rational muF = w.degree / Rational(w.rank);
        const int c1 = cmp(muF);
        if (c1 > 0 || (c1 == 0 && w.contains_phi)) {
            out.verdict = Verdict::unstable;
            out.reason = "condition (1) fails on a subsheaf: mu(F) = " + muF.str() + (c1 > 0 ? " > " : " = ") +
                         "lambda = " + lambda_text;
            return out;
        }
        if (c1 == 0) {
            border = true;
            border_reason = "subsheaf with mu(F) = lambda = " + lambda_text;
        }
        if (w.contains_phi) {
            const Rational muQ = (degree - w.degree) / Rational(r - w.rank);
            const int c2 = cmp(muQ);
            if (c2 < 0 || (c2 == 0 && !w.direct_summand)) {
                out.verdict = Verdict::unstable;
                out.reason = "condition (2) fails: mu(E/F) = " + muQ.str() + (c2 < 0 ? " < " : " = ") +
                             "lambda = " + lambda_text + " for a subsheaf containing phi";
                return out;
            }
            if (c2 == 0) {
                split = true;
                split_reason = "phi lies in a direct summand F with mu(E/F) = lambda: split case";
            }
        }
    }
    if (split) {
        out.verdict = Verdict::split_case;
        out.reason = split_reason;
    } else if (border) {
        out.verdict = Verdict::borderline;
        out.reason = border_reason;
    } else {
        out.verdict = Verdict::stable;
        out.reason = "mu(E) = " + mu.str() + " < lambda = " + lambda_text +
                     (witnesses.empty() ? "" : " and all witnesses satisfy (1)-(2)");
    }
    return out;
}

}  // namespace

StabilityVerdict stability_check(const topology::BundleTopology& bundle, const Rational& degree, const Rational& lambda,
                                 const std::vector<Witness>& witnesses) {
    return stability_impl(
        bundle, degree, witnesses, [&](const Rational& x) { return x < lambda ? -1 : (x == lambda ? 0 : 1); },
        lambda.str());
}

StabilityVerdict stability_check(const topology::BundleTopology& bundle, const Rational& degree, double lambda,
                                 const std::vector<Witness>& witnesses) {
    return stability_impl(
        bundle, degree, witnesses,
        [&](const Rational& x) {
            const double v = x.to_double();
            return v < lambda ? -1 : (v == lambda ? 0 : 1);
        },
        fmt(lambda));
}

// Moduli chain ----------------------------------------------------------------------------------

bool ChainReport::all_passed() const {
    for (const auto& s : stages)
        if (!s.passed) return false;
    return true;
}

ChainReport moduli_chain_check(const Connection& A0, const Field& phi0, const VortexParameters& params, double tol,
                               const SolverOptions& opt) {
    const auto& g = A0.grid;
    ChainReport rep;
    const double cw = chern_weil_degree(A0);
    const Rational degree(std::llround(cw));
    const topology::BundleTopology bundle{1, {}, 0};
    rep.stability = stability_check(bundle, degree, params.lambda);

    Field s = params.t;
    s *= -1.0;

    try {
        rep.solution = kazdan_warner_solve(A0, phi0, params, opt);
    } catch (const UnstablePair& e) {
        rep.solved = false;
        rep.outcome = "unstable";
        const bool agree = rep.stability.verdict != Verdict::stable;
        rep.stages.push_back({"solver/stability agreement", agree, 0.0,
                              std::string("solver: ") + e.what() + "; stability: " + to_string(rep.stability.verdict)});
        if (sup_abs(params.t) == 0.0) {
            rep.outcome = "reducible";
            rep.dichotomy = sw::dichotomy_analyze(A0, sw::SpinorField::zero(g), s, tol);
            const bool red = rep.dichotomy->branch == sw::Branch::reducible;
            rep.stages.push_back({"reducible verdict", red, rep.dichotomy->J,
                                  "t = -s = 0: " + rep.dichotomy->diagnostic});
        }
        return rep;
    }
    rep.solved = true;
    rep.outcome = "solved";
    const auto& sol = *rep.solution;

    rep.stages.push_back({"stability", rep.stability.verdict == Verdict::stable, 0.0, rep.stability.reason});

    const Pair pair = reconstruct_pair(A0, phi0, sol.u);
    const auto vr = vortex_residual(pair.A, pair.phi, params.t);
    rep.stages.push_back({"vortex residual", vr.max() < tol, vr.max(), "max of the three vortex equations"});

    sw::SpinorField psi{pair.phi, Field(g, FormType::k02, Fiber::section)};
    const auto swr = sw::sw_star_residual(pair.A, psi, s);
    const double sw_max = std::max({swr.eq20_norm, swr.eq02_norm, swr.eqLambda_norm, swr.eq4_norm});
    rep.stages.push_back({"sw embedding", sw_max < tol, sw_max, "four Kahler-form equations with s = -t, alpha = 0"});

    rep.dichotomy = sw::dichotomy_analyze(pair.A, psi, s, tol);
    const sw::Branch expected = rep.dichotomy->J < 0 ? sw::Branch::A : sw::Branch::B;
    rep.stages.push_back({"dichotomy", rep.dichotomy->branch == expected && rep.dichotomy->J < 0, rep.dichotomy->J,
                          "branch " + sw::to_string(rep.dichotomy->branch)});

    // transport to the constant-parameter equation: u' = u − v/2
    const ScalarProblem P = scalar_problem(A0, phi0, params.t);
    const ScalarProblem R = reduced_problem(P, params);
    Field up = sol.u;
    for (std::size_t p = 0; p < g.points(); ++p) up.at(0)[p] -= 0.5 * std::real(params.v.at(0)[p]);
    const double reduced_res = sup_abs(kw_residual(R, up));
    double gap = reduced_res;
    try {
        const Solution rsol = kazdan_warner_solve(R, opt);
        double diff = 0;
        for (std::size_t p = 0; p < g.points(); ++p) diff = std::max(diff, std::abs(rsol.u.at(0)[p] - up.at(0)[p]));
        gap = std::max(gap, diff);
    } catch (const std::exception&) {
        gap = std::numeric_limits<double>::infinity();
    }
    rep.stages.push_back({"transport", gap < tol, gap, "reduced residual and distance to the reduced solution"});
    return rep;
}

}  // namespace swlab::vortex
