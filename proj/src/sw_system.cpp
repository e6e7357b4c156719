#include "swlab/sw_system.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include <unsupported/Eigen/KroneckerProduct>

#include "swlab/spin_algebra.hpp"

namespace swlab::sw {

namespace {

const cplx I{0.0, 1.0};
const double kSqrt2 = std::sqrt(2.0);

void check_spinor(const Connection& A, const SpinorField& psi) {
    if (!(psi.phi.grid == A.grid) || !(psi.alpha.grid == A.grid))
        throw std::invalid_argument("spinor and connection live on different grids");
    if (psi.phi.kind != FormType::k00 || psi.alpha.kind != FormType::k02 || psi.phi.fiber != Fiber::section ||
        psi.alpha.fiber != Fiber::section)
        throw std::invalid_argument("spinor must be (k00 section, k02 section)");
}

// a ↦ ½(∇_x + σ i ∇_y) on factor k, σ = +1 for z̄, −1 for z.
Field dz(const Connection& A, const Field& f, int factor, double sigma) {
    Field out = nabla(A, f, 2 * factor);
    const Field dy = nabla(A, f, 2 * factor + 1);
    for (std::size_t c = 0; c < out.data.size(); ++c)
        for (std::size_t p = 0; p < out.data[c].size(); ++p)
            out.data[c][p] = 0.5 * (out.data[c][p] + sigma * I * dy.data[c][p]);
    return out;
}

// ½ ΛF_{A,c} as an r×r matrix at p.
Eigen::MatrixXcd half_lambda(const Field& F, std::size_t p, const Field* s) {
    Eigen::MatrixXcd f = 0.5 * (F.value(0, p) + F.value(5, p));
    if (s) f -= 0.25 * I * s->at(0)[p] * Eigen::MatrixXcd::Identity(f.rows(), f.cols());
    return f;
}

Eigen::MatrixXcd gamma_plus_block(const Field& F, std::size_t p, const Field* s) {
    const int r = F.grid.rank;
    const Eigen::MatrixXcd f = half_lambda(F, p, s);
    const auto comp = [&](int c) { return F.value(c, p); };
    // λ20 = ¼(F02 − iF03 − iF12 − F13), λ02 = ¼(F02 + iF03 + iF12 − F13)
    const Eigen::MatrixXcd l20 = 0.25 * (comp(1) - I * comp(2) - I * comp(3) - comp(4));
    const Eigen::MatrixXcd l02 = 0.25 * (comp(1) + I * comp(2) + I * comp(3) - comp(4));
    Eigen::MatrixXcd G(2 * r, 2 * r);
    G.topLeftCorner(r, r) = -2.0 * I * f;
    G.topRightCorner(r, r) = -4.0 * l20;
    G.bottomLeftCorner(r, r) = 4.0 * l02;
    G.bottomRightCorner(r, r) = 2.0 * I * f;
    return G;
}

Eigen::MatrixXcd quadratic_at(const SpinorField& psi, std::size_t p) {
    return spin::spinor_quadratic(psi.phi.value(0, p).col(0), 2.0 * psi.alpha.value(0, p).col(0));
}

}  // namespace

SpinorField SpinorField::zero(const GridSpec& g) {
    return {Field(g, FormType::k00, Fiber::section), Field(g, FormType::k02, Fiber::section)};
}

SpinorField SpinorField::random(const GridSpec& g, std::uint64_t seed, int cutoff, double amplitude) {
    return {random_band_limited(g, seed, cutoff, FormType::k00, Fiber::section, amplitude),
            random_band_limited(g, seed ^ 0x9e3779b97f4a7c15ULL, cutoff, FormType::k02, Fiber::section, 0.5 * amplitude)};
}

SpinorField& SpinorField::operator*=(cplx s) {
    phi *= s;
    alpha *= s;
    return *this;
}

double norm_phi(const SpinorField& psi) { return norm(psi.phi); }
double norm_alpha(const SpinorField& psi) { return norm(psi.alpha); }
double norm(const SpinorField& psi) { return std::hypot(norm(psi.phi), norm(psi.alpha)); }

Field dirac(const Connection& A, const SpinorField& psi) {
    check_spinor(A, psi);
    Field theta = dbar(A, psi.phi);
    const Field lp = lambda_partial(A, psi.alpha);
    for (std::size_t c = 0; c < theta.data.size(); ++c)
        for (std::size_t p = 0; p < theta.data[c].size(); ++p)
            theta.data[c][p] = kSqrt2 * (theta.data[c][p] - I * lp.data[c][p]);
    return theta;
}

SpinorField dirac_adjoint(const Connection& A, const Field& theta) {
    if (theta.kind != FormType::k01) throw std::invalid_argument("dirac_adjoint: expected a k01 field");
    SpinorField out = SpinorField::zero(theta.grid);
    // φ = −2√2 Σ ∇_{z_k} θ_k,  α = −√2 (∇_{z̄2} θ1 − ∇_{z̄1} θ2)
    const Field z1 = dz(A, theta, 0, -1.0), z2 = dz(A, theta, 1, -1.0);
    const Field zb1 = dz(A, theta, 0, 1.0), zb2 = dz(A, theta, 1, 1.0);
    for (int e = 0; e < theta.fiber_dim(); ++e)
        for (std::size_t p = 0; p < theta.grid.points(); ++p) {
            out.phi.at(0, e)[p] = -2.0 * kSqrt2 * (z1.at(0, e)[p] + z2.at(1, e)[p]);
            out.alpha.at(0, e)[p] = -kSqrt2 * (zb2.at(0, e)[p] - zb1.at(1, e)[p]);
        }
    return out;
}

double SWResidual::max() const {
    return std::max({dirac_norm, eq20_norm, eq02_norm, eqLambda_norm, eq4_norm, gamma_gap});
}

double SWResidual::aggregate() const {
    return std::sqrt(4 * eq20_norm * eq20_norm + 4 * eq02_norm * eq02_norm + 2 * eqLambda_norm * eqLambda_norm);
}

Eigen::MatrixXcd clifford_gap_at(const Field& F, const SpinorField& psi, std::size_t p, const Field* s) {
    return gamma_plus_block(F, p, s) - quadratic_at(psi, p);
}

SWResidual sw_star_residual(const Connection& A, const SpinorField& psi, const std::optional<Field>& s) {
    check_spinor(A, psi);
    const auto& g = A.grid;
    const Field F = curvature(A);
    const Field* sp = s ? &*s : nullptr;
    SWResidual res;

    const Field theta = dirac(A, psi);
    res.dirac_norm = norm(theta);
    res.eq4_norm = res.dirac_norm / kSqrt2;

    Field e20 = part20(F), e02 = part02(F);
    Field eL(g, FormType::k00, Fiber::endo);
    double gap_sq = 0;
    for (std::size_t p = 0; p < g.points(); ++p) {
        const Eigen::MatrixXcd phi = psi.phi.value(0, p);
        const Eigen::MatrixXcd ac = psi.alpha.value(0, p);
        const Eigen::MatrixXcd ah = 2.0 * ac;
        e20.set_value(0, p, e20.value(0, p) + 0.5 * phi * ac.adjoint());
        e02.set_value(0, p, e02.value(0, p) - 0.5 * ac * phi.adjoint());
        Eigen::MatrixXcd lam = I * (F.value(0, p) + F.value(5, p)) + 0.5 * (phi * phi.adjoint() - ah * ah.adjoint());
        if (sp) lam += 0.5 * sp->at(0)[p] * Eigen::MatrixXcd::Identity(lam.rows(), lam.cols());
        eL.set_value(0, p, lam);
        gap_sq += clifford_gap_at(F, psi, p, sp).squaredNorm();
    }
    res.eq20_norm = norm(e20);
    res.eq02_norm = norm(e02);
    res.eqLambda_norm = norm(eL);
    res.gamma_gap = std::sqrt(gap_sq * g.cell_volume());
    return res;
}

EnergyIdentity energy_identity(const Connection& A, const SpinorField& psi) {
    check_spinor(A, psi);
    const auto& g = A.grid;
    const Field F = curvature(A);
    EnergyIdentity e;
    const double dv = g.cell_volume();
    const double n = norm(dirac(A, psi));
    e.dirac_sq = n * n;
    for (int a = 0; a < 4; ++a) {
        const double np = norm(nabla(A, psi.phi, a)), na = norm(nabla(A, psi.alpha, a));
        e.nabla_sq += np * np + na * na;
    }
    for (std::size_t p = 0; p < g.points(); ++p) {
        const Eigen::MatrixXcd G = gamma_plus_block(F, p, nullptr);
        const Eigen::MatrixXcd q = quadratic_at(psi, p);
        e.gap_sq += (G - q).squaredNorm() * dv;
        e.fplus_sq += G.squaredNorm() * dv;
        e.quad_sq += q.squaredNorm() * dv;
    }
    e.lhs = e.dirac_sq + 0.5 * e.gap_sq;
    e.rhs = e.nabla_sq + 0.5 * e.fplus_sq + 0.5 * e.quad_sq;
    e.gap = std::abs(e.lhs - e.rhs) / (1.0 + e.lhs);
    return e;
}

double weitzenbock_gap(const Connection& A, const SpinorField& psi) {
    check_spinor(A, psi);
    const auto& g = A.grid;
    const int r = g.rank;
    const SpinorField dd = dirac_adjoint(A, dirac(A, psi));
    SpinorField lap = SpinorField::zero(g);
    for (int a = 0; a < 4; ++a) {
        lap.phi -= nabla(A, nabla(A, psi.phi, a), a);
        lap.alpha -= nabla(A, nabla(A, psi.alpha, a), a);
    }
    const Field F = curvature(A);
    std::array<Eigen::Matrix2cd, 6> basis;
    for (int k = 0; k < 6; ++k) basis[static_cast<std::size_t>(k)] = spin::gamma_basis_plus(spin::kPairs[k][0], spin::kPairs[k][1]);

    double worst = 0;
    for (std::size_t p = 0; p < g.points(); ++p) {
        Eigen::VectorXcd v(2 * r);
        v << psi.phi.value(0, p).col(0), 2.0 * psi.alpha.value(0, p).col(0);
        Eigen::VectorXcd gv = Eigen::VectorXcd::Zero(2 * r);
        for (int k = 0; k < 6; ++k) {
            const Eigen::MatrixXcd Fk = F.value(k, p);
            const auto& B = basis[static_cast<std::size_t>(k)];
            for (int s = 0; s < 2; ++s)
                for (int t = 0; t < 2; ++t)
                    if (B(s, t) != cplx(0)) gv.segment(s * r, r) += B(s, t) * (Fk * v.segment(t * r, r));
        }
        Eigen::VectorXcd lhs(2 * r), lp(2 * r);
        lhs << dd.phi.value(0, p).col(0), 2.0 * dd.alpha.value(0, p).col(0);
        lp << lap.phi.value(0, p).col(0), 2.0 * lap.alpha.value(0, p).col(0);
        worst = std::max(worst, (lhs - lp - gv).norm());
    }
    return worst;
}

PairingCheck curvature_pairing(const Connection& A, const SpinorField& psi) {
    check_spinor(A, psi);
    const auto& g = A.grid;
    const int r = g.rank;
    const Field F = curvature(A);
    PairingCheck out;
    for (std::size_t p = 0; p < g.points(); ++p) {
        Eigen::MatrixXcd full = Eigen::MatrixXcd::Zero(2 * r, 2 * r);
        for (int k = 0; k < 6; ++k) {
            const Eigen::Matrix2cd B = spin::gamma_basis_plus(spin::kPairs[k][0], spin::kPairs[k][1]);
            full += Eigen::kroneckerProduct(B, F.value(k, p));
        }
        Eigen::VectorXcd v(2 * r);
        v << psi.phi.value(0, p).col(0), 2.0 * psi.alpha.value(0, p).col(0);
        const Eigen::MatrixXcd pp = v * v.adjoint();
        out.full += std::real((full * pp.adjoint()).trace());
        out.plus += std::real((gamma_plus_block(F, p, nullptr) * quadratic_at(psi, p).adjoint()).trace());
    }
    out.full *= g.cell_volume();
    out.plus *= g.cell_volume();
    out.gap = std::abs(out.full - out.plus) / (1.0 + std::abs(out.full));
    return out;
}

std::string to_string(Branch b) {
    switch (b) {
        case Branch::A: return "A";
        case Branch::B: return "B";
        case Branch::reducible: return "reducible";
        case Branch::inconsistent: return "inconsistent";
    }
    return "?";
}

DichotomyReport dichotomy_analyze(const Connection& A, const SpinorField& psi, const std::optional<Field>& s,
                                  double tol) {
    check_spinor(A, psi);
    const auto& g = A.grid;
    DichotomyReport rep;
    rep.chern_weil = chern_weil_degree(A);
    const double s_int = s ? std::real(integrate(*s)) : 0.0;
    rep.J = 2.0 * rep.chern_weil + g.rank * s_int / (2.0 * std::numbers::pi);
    rep.phi_norm = norm_phi(psi);
    rep.alpha_norm = norm(psi.alpha);
    rep.sw_max = sw_star_residual(A, psi, s).max();

    const Field F = curvature(A);
    const Field* sp = s ? &*s : nullptr;
    const auto lambda_eq = [&](bool use_phi) {
        Field e(g, FormType::k00, Fiber::endo);
        for (std::size_t p = 0; p < g.points(); ++p) {
            Eigen::MatrixXcd m = I * (F.value(0, p) + F.value(5, p));
            if (use_phi) {
                const Eigen::MatrixXcd phi = psi.phi.value(0, p);
                m += 0.5 * phi * phi.adjoint();
            } else {
                const Eigen::MatrixXcd ah = 2.0 * psi.alpha.value(0, p);
                m -= 0.5 * ah * ah.adjoint();
            }
            if (sp) m += 0.5 * sp->at(0)[p] * Eigen::MatrixXcd::Identity(m.rows(), m.cols());
            e.set_value(0, p, m);
        }
        return norm(e);
    };
    rep.system[0] = norm(part02(F));

    const double jtol = 1e-6;
    if (rep.J < -jtol) {
        rep.branch = Branch::A;
        rep.system[1] = norm(dbar(A, psi.phi));
        rep.system[2] = lambda_eq(true);
        if (rep.alpha_norm > tol) {
            rep.branch = Branch::inconsistent;
            rep.diagnostic = "J < 0 forces alpha = 0 on a solution (integrate the Lambda-equation against |alpha|^2), "
                             "but ||alpha|| = " + std::to_string(rep.alpha_norm);
        }
    } else if (rep.J > jtol) {
        rep.branch = Branch::B;
        rep.system[1] = norm(lambda_partial(A, psi.alpha));
        rep.system[2] = lambda_eq(false);
        if (rep.phi_norm > tol) {
            rep.branch = Branch::inconsistent;
            rep.diagnostic = "J > 0 forces phi = 0 on a solution (integrate the Lambda-equation against |phi|^2), "
                             "but ||phi|| = " + std::to_string(rep.phi_norm);
        }
    } else {
        rep.branch = Branch::reducible;
        rep.system[1] = norm(selfdual_plus(F));
        rep.system[2] = norm(psi);
        rep.diagnostic = "J = 0: only reducible solutions (A, 0) with vanishing self-dual curvature";
        if (rep.phi_norm > tol || rep.alpha_norm > tol) {
            rep.branch = Branch::inconsistent;
            rep.diagnostic = "J = 0 forces Psi = 0 on a solution, but ||Psi|| = " + std::to_string(norm(psi));
        }
    }
    return rep;
}

ConjugatePair conjugate_pair(const Connection& A, const Field& phi, const std::optional<Field>& s) {
    if (A.grid.rank != 1) throw std::invalid_argument("conjugate_pair: rank 1 only");
    GridSpec g = A.grid;
    g.d1 = -g.d1;
    g.d2 = -g.d2;
    ConjugatePair out{Connection(g), SpinorField::zero(g), std::nullopt};
    for (int a = 0; a < 4; ++a)
        for (std::size_t p = 0; p < g.points(); ++p) out.A.potential.at(a)[p] = std::conj(A.potential.at(a)[p]);
    if (A.has_explicit_links()) {
        out.A.links = A.links;
        for (auto& l : out.A.links)
            for (auto& v : l) v = std::conj(v);
    }
    for (std::size_t p = 0; p < g.points(); ++p) out.psi.alpha.at(0)[p] = 0.5 * std::conj(phi.at(0)[p]);
    if (s) {
        Field ns = *s;
        ns.grid = g;
        ns *= -1.0;
        out.s = ns;
    }
    return out;
}

}  // namespace swlab::sw
