#include "swlab/spin_algebra.hpp"

#include <cmath>
#include <stdexcept>

namespace swlab::spin {

namespace {
const cplx I{0.0, 1.0};
}

Bidegree1 split(const Covector& u) {
    Bidegree1 b;
    for (int k = 0; k < 2; ++k) {
        b.c[k] = 0.5 * (u[2 * k] - I * u[2 * k + 1]);
        b.d[k] = 0.5 * (u[2 * k] + I * u[2 * k + 1]);
    }
    return b;
}

cplx metric_c(const Covector& u, const Covector& v) {
    cplx s = 0;
    for (int a = 0; a < 4; ++a) s += u[a] * v[a];
    return s;
}

Covector basis_covector(int a) {
    Covector e{};
    e.at(a) = 1.0;
    return e;
}

Mat2 gamma_plus(const Covector& u) {
    const auto b = split(u);
    Mat2 m;
    m << 2.0 * b.d[0], 2.0 * b.c[1],
         2.0 * b.d[1], -2.0 * b.c[0];
    return m;
}

Mat2 gamma_sharp(const Covector& u) {
    const auto b = split(u);
    Mat2 m;
    m << 2.0 * b.c[0], 2.0 * b.c[1],
         2.0 * b.d[1], -2.0 * b.d[0];
    return m;
}

Mat4 gamma(const Covector& u) {
    Mat4 g = Mat4::Zero();
    g.block<2, 2>(0, 2) = -gamma_sharp(u);
    g.block<2, 2>(2, 0) = gamma_plus(u);
    return g;
}

SpinorFiber gamma(const Covector& u, const SpinorFiber& psi) { return SpinorFiber::from_vec(gamma(u) * psi.vec()); }

std::array<cplx, 6> hodge_star(const std::array<cplx, 6>& F) {
    // *e01 = e23, *e02 = -e13, *e03 = e12 and the reverse
    return {F[5], -F[4], F[3], F[2], -F[1], F[0]};
}

TwoFormFiber TwoFormFiber::from_components(const std::array<cplx, 6>& F) {
    TwoFormFiber t;
    t.lambda20 = 0.25 * (F[1] - I * F[2] - I * F[3] - F[4]);
    t.lambda02 = 0.25 * (F[1] + I * F[2] + I * F[3] - F[4]);
    t.f = 0.5 * (F[0] + F[5]);
    const auto plus = TwoFormFiber{t.lambda20, t.lambda02, t.f, {}}.components();
    for (int i = 0; i < 6; ++i) t.minus[i] = F[i] - plus[i];
    return t;
}

std::array<cplx, 6> TwoFormFiber::components() const {
    // dz1∧dz2 = e02 + i e03 + i e12 − e13, dz̄1∧dz̄2 = e02 − i e03 − i e12 − e13
    std::array<cplx, 6> F{};
    F[0] = f + minus[0];
    F[5] = f + minus[5];
    F[1] = lambda20 + lambda02 + minus[1];
    F[2] = I * (lambda20 - lambda02) + minus[2];
    F[3] = I * (lambda20 - lambda02) + minus[3];
    F[4] = -(lambda20 + lambda02) + minus[4];
    return F;
}

double TwoFormFiber::minus_norm() const {
    double s = 0;
    for (auto m : minus) s += std::norm(m);
    return std::sqrt(s);
}

Mat2 gamma_two(cplx lambda20, cplx lambda02, cplx f) {
    Mat2 m;
    m << -2.0 * I * f, -4.0 * lambda20,
         4.0 * lambda02, 2.0 * I * f;
    return m;
}

Mat2 gamma_two(const TwoFormFiber& form, double tol) {
    if (form.minus_norm() > tol)
        throw std::invalid_argument("gamma_two: form has a nonzero anti-self-dual part");
    return gamma_two(form.lambda20, form.lambda02, form.f);
}

Mat2 gamma_basis_plus(int a, int b) {
    return -gamma_sharp(basis_covector(a)) * gamma_plus(basis_covector(b));
}

Mat4 gamma_wedge(const Covector& u, const Covector& v) {
    const Mat4 gu = gamma(u), gv = gamma(v);
    return 0.5 * (gu * gv - gv * gu);
}

Eigen::MatrixXcd spinor_quadratic(const Eigen::VectorXcd& phi, const Eigen::VectorXcd& alpha_hat) {
    const auto r = phi.size();
    if (alpha_hat.size() != r) throw std::invalid_argument("spinor_quadratic: rank mismatch");
    Eigen::VectorXcd psi(2 * r);
    psi << phi, alpha_hat;
    Eigen::MatrixXcd q = psi * psi.adjoint();
    const Eigen::MatrixXcd half = 0.5 * partial_trace_plus(q, static_cast<int>(r));
    q.topLeftCorner(r, r) -= half;
    q.bottomRightCorner(r, r) -= half;
    return q;
}

Eigen::MatrixXcd partial_trace_plus(const Eigen::MatrixXcd& m, int r) {
    return m.topLeftCorner(r, r) + m.bottomRightCorner(r, r);
}

}  // namespace swlab::spin
