#include <gtest/gtest.h>

#include "fionf/birkhoff.hpp"
#include "support.hpp"

using namespace fionf;

namespace {

exact q(long p, long d = 1) { return exact(make_rational(p, d)); }

template <typename K>
void check_identity(const Jet<K>& p, const BirkhoffResult<K>& b)
{
    const int n = p.trunc();
    EXPECT_EQ(compose(p, b.kappa) - b.p0 - b.r, p.empty_like().with_trunc(n));
    EXPECT_TRUE(poisson(b.p0, b.r).is_zero());
    EXPECT_TRUE(symplectic_defect(b.kappa).is_zero());
}

} // namespace

TEST(QuadraticNormalize, FloatBlocks)
{
    Eigen::MatrixXd hyp(2, 2);
    hyp << 0.7, 0.0, 0.0, -0.7;
    const auto qh = quadratic_normalize(hyp);
    EXPECT_EQ(qh.n_hr, 1);
    EXPECT_NEAR(qh.blocks[0].a.real(), 0.7, 1e-14);
    EXPECT_LT(qh.residual, 1e-12);

    Eigen::MatrixXd ell(2, 2);
    ell << 0.0, 1.3, -1.3, 0.0;
    const auto qe = quadratic_normalize(ell);
    EXPECT_EQ(qe.n_e, 1);
    EXPECT_NEAR(qe.blocks[0].a.real(), 1.3, 1e-14);

    Eigen::MatrixXd lox = Eigen::MatrixXd::Zero(4, 4);
    Eigen::MatrixXd c(2, 2);
    c << 0.4, -0.9, 0.9, 0.4;
    lox.block(0, 0, 2, 2) = c;
    lox.block(2, 2, 2, 2) = -c.transpose();
    Eigen::MatrixXd g = test::rand_hamiltonian(2, 0.3);
    const Eigen::MatrixXd s = matrix_exp(g);
    const auto ql = quadratic_normalize(Eigen::MatrixXd(s * lox * s.inverse()));
    EXPECT_EQ(ql.n_hc, 1);
    EXPECT_NEAR(ql.blocks[0].a.real(), 0.4, 1e-10);
    EXPECT_NEAR(std::abs(ql.blocks[0].b.real()), 0.9, 1e-10);
    EXPECT_LT(ql.residual, 1e-10);
}

TEST(QuadraticNormalize, ExactHyperbolicFlip)
{
    xmatrix b(2, 2);
    b(0, 0) = q(-2);
    b(1, 1) = q(2);
    const auto qn = quadratic_normalize(b);
    EXPECT_EQ(qn.n_hr, 1);
    EXPECT_EQ(qn.blocks[0].a, q(2));
}

TEST(BirkhoffReduce, TrivialCases)
{
    const xjet s = xjet::phase(1, 6);
    const xjet x = xjet::variable(s, 0), xi = xjet::variable(s, 1);
    const xjet p0 = (x * xi).scaled(q(3));
    auto a = birkhoff_reduce(p0, 6);
    EXPECT_TRUE(a.r.is_zero());
    EXPECT_EQ(a.kappa, xmap::identity(1, 6));
    auto b = birkhoff_reduce(p0 + x * x * xi * xi, 6);
    EXPECT_EQ(b.r, x * x * xi * xi);
    EXPECT_EQ(b.kappa, xmap::identity(1, 6));
}

TEST(BirkhoffReduce, EllipticCubicOracle)
{
    const xjet s = xjet::phase(1, 6);
    const xjet x = xjet::variable(s, 0), xi = xjet::variable(s, 1);
    const xjet p = (x * x + xi * xi).scaled(q(1, 2)) + x * x * x;
    auto b = birkhoff_reduce(p, 6);
    check_identity(p, b);
    const auto qn = quadratic_normalize(hamilton_matrix(quadratic_part(p).with_trunc(2)));
    const xjet f = to_actions(b.p0 + b.r, qn);
    EXPECT_EQ(f.coeff({1}), q(1));
    EXPECT_EQ(f.coeff({2}), q(-15, 4));
}

TEST(BirkhoffReduce, RandomHyperbolicTwoDof)
{
    const xjet s = xjet::phase(2, 6);
    const xjet x1 = xjet::variable(s, 0), x2 = xjet::variable(s, 1), e1 = xjet::variable(s, 2), e2 = xjet::variable(s, 3);
    const xjet p = (x1 * e1).scaled(q(1)) + (x2 * e2).scaled(q(7, 3)) + test::rand_jet(s, 3, 5, 0.3);
    auto b = birkhoff_reduce(p, 6);
    check_identity(p, b);
}

TEST(BirkhoffReduce, LoxodromicExact)
{
    const xjet s = xjet::phase(2, 6);
    const xjet x1 = xjet::variable(s, 0), x2 = xjet::variable(s, 1), e1 = xjet::variable(s, 2), e2 = xjet::variable(s, 3);
    const xjet p0 = (x1 * e1 + x2 * e2).scaled(q(1, 2)) - (x1 * e2 - x2 * e1).scaled(q(3));
    const xjet p = p0 + test::rand_jet(s, 3, 4, 0.3);
    auto b = birkhoff_reduce(p, 6);
    check_identity(p, b);
    const auto qn = quadratic_normalize(hamilton_matrix(p0.with_trunc(2)));
    EXPECT_EQ(qn.n_hc, 1);
    const xjet f = to_actions(p0, qn);
    EXPECT_EQ(f.coeff({1, 0}), q(1, 2));
    EXPECT_EQ(f.coeff({0, 1}), q(-3));
    EXPECT_EQ(actions_substitute(to_actions(b.p0 + b.r, qn), qn, 6), b.p0 + b.r);
}

TEST(BirkhoffReduce, FloatRealOutputs)
{
    const fjet s = fjet::phase(1, 6);
    const fjet x = fjet::variable(s, 0), xi = fjet::variable(s, 1);
    const fjet p = (x * x + xi * xi).scaled(cplx(0.5)) + x * x * x + x * xi * xi.scaled(cplx(0.25));
    auto b = birkhoff_reduce(p, 6);
    EXPECT_LT(b.check, 1e-10);
    EXPECT_TRUE(jet_is_real(b.r));
    for (const auto& c : b.kappa.comp)
        EXPECT_TRUE(jet_is_real(c, 1e-12));
}

TEST(ToActions, Examples)
{
    const xjet s = xjet::phase(1, 4);
    const xjet x = xjet::variable(s, 0), xi = xjet::variable(s, 1);
    const auto qh = quadratic_normalize(hamilton_matrix((x * xi).scaled(q(5)).with_trunc(2)));
    EXPECT_EQ(to_actions((x * xi).scaled(q(5)), qh).coeff({1}), q(5));
    const xjet osc = (x * x + xi * xi).scaled(q(7, 2));
    const auto qe = quadratic_normalize(hamilton_matrix(osc.with_trunc(2)));
    EXPECT_EQ(to_actions(osc, qe).coeff({1}), q(7));
    EXPECT_THROW(to_actions(osc + x * x * x, qe), precondition_error);
}
