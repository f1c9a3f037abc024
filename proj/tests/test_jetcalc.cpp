#include <gtest/gtest.h>

#include "fionf/transport.hpp"
#include "fionf/weylq.hpp"
#include "support.hpp"

using namespace fionf;
using fionf::test::rand_jet;

namespace {

struct Vars {
    xjet x, xi;
    explicit Vars(int trunc) : x(xjet::variable(xjet::phase(1, trunc), 0)), xi(xjet::variable(xjet::phase(1, trunc), 1)) {}
};

xjet num(const xjet& shape, long p, long q = 1) { return xjet::constant(shape, exact(make_rational(p, q))); }

} // namespace

TEST(Poisson, CanonicalPair)
{
    Vars v(4);
    EXPECT_EQ(poisson(v.x, v.xi), num(v.x, -1));
    EXPECT_EQ(poisson(v.xi, v.x), num(v.x, 1));
}

TEST(Poisson, HamiltonFieldOfXXi)
{
    Vars v(4);
    EXPECT_EQ(poisson(v.x * v.xi, v.x), v.x);
    EXPECT_EQ(poisson(v.x * v.xi, v.xi), -v.xi);
}

TEST(Poisson, AntisymmetryJacobiLeibniz)
{
    const xjet s = xjet::phase(2, 6);
    for (int it = 0; it < 5; ++it) {
        const xjet a = rand_jet(s, 1, 3, 0.4), b = rand_jet(s, 1, 3, 0.4), c = rand_jet(s, 1, 3, 0.4);
        EXPECT_TRUE(poisson(a, a).is_zero());
        EXPECT_EQ(poisson(a, b), -poisson(b, a));
        const xjet jac = poisson(a, poisson(b, c)) + poisson(b, poisson(c, a)) + poisson(c, poisson(a, b));
        EXPECT_TRUE(jac.with_trunc(2).is_zero());
        const xjet lhs = poisson(a, b * c);
        const xjet rhs = poisson(a, b) * c + b * poisson(a, c);
        EXPECT_EQ(lhs.with_trunc(4), rhs.with_trunc(4));
    }
}

TEST(Compose, Examples)
{
    Vars v(5);
    const xmap scale{{v.x.scaled(exact(2)), v.xi.scaled(exact(make_rational(1, 2)))}};
    EXPECT_EQ(compose(v.x * v.xi, scale), v.x * v.xi);
    EXPECT_EQ(compose(v.x * v.x, xmap::identity(1, 5)), v.x * v.x);
    const xmap shear{{v.x + v.xi * v.xi, v.xi}};
    EXPECT_EQ(compose(v.x, shear), v.x + v.xi * v.xi);
}

TEST(Compose, RightAction)
{
    const xjet s = xjet::phase(1, 5);
    const xjet x = xjet::variable(s, 0), xi = xjet::variable(s, 1);
    const xmap m1{{x + xi * xi, xi + x * x * x}};
    const xmap m2{{x.scaled(exact(2)) + x * xi, xi - xi * xi}};
    const xjet a = rand_jet(s, 1, 5);
    EXPECT_EQ(compose(a, compose(m1, m2)), compose(compose(a, m1), m2));
}

TEST(Compose, InverseMap)
{
    const xjet s = xjet::phase(1, 6);
    const xjet x = xjet::variable(s, 0), xi = xjet::variable(s, 1);
    const xmap m{{x + xi * xi, xi + x * x * x}};
    EXPECT_EQ(compose(m, inverse(m)), xmap::identity(1, 6));
}

TEST(FlowJet, HyperbolicLinear)
{
    const exp_model e1 = exp_model::exp_base(rational(1));
    Vars v(4);
    const xmap f = flow_jet(v.x * v.xi, exact(1), 4, e1);
    EXPECT_EQ(f.comp[0], v.x.scaled(exact::tau()));
    EXPECT_EQ(f.comp[1], v.xi.scaled(exact::tau_pow(-1)));
}

TEST(FlowJet, ZeroAndShear)
{
    Vars v(4);
    EXPECT_EQ(flow_jet(v.x.empty_like(), exact(1), 3), xmap::identity(1, 3));
    const xmap f = flow_jet((v.xi * v.xi * v.xi).scaled(exact(make_rational(1, 3))), exact(1), 3);
    const xjet s3 = xjet::phase(1, 3);
    EXPECT_EQ(f.comp[0], xjet::variable(s3, 0) + xjet::variable(s3, 1) * xjet::variable(s3, 1));
    EXPECT_EQ(f.comp[1], xjet::variable(s3, 1));
}

TEST(FlowJet, RejectsLinearPart)
{
    Vars v(4);
    EXPECT_THROW(flow_jet(v.x + v.x * v.xi, exact(1), 3), precondition_error);
}

TEST(FlowJet, GroupLawAndSymplectic)
{
    const xjet s = xjet::phase(2, 5);
    const xjet p = rand_jet(s, 3, 5, 0.3);
    const xmap a = flow_jet(p, exact(make_rational(1, 3)), 4);
    const xmap b = flow_jet(p, exact(make_rational(2, 3)), 4);
    EXPECT_EQ(compose(a, b), flow_jet(p, exact(1), 4));
    EXPECT_TRUE(symplectic_defect(flow_jet(p, exact(1), 4)).is_zero());
}

TEST(FlowJet, FloatEllipticGroupLaw)
{
    const fjet s = fjet::phase(1, 5);
    const fjet x = fjet::variable(s, 0), xi = fjet::variable(s, 1);
    const fjet p = (x * x + xi * xi).scaled(cplx(0.5)) + x * x * x + x * xi * xi.scaled(cplx(0.3));
    const fmap a = flow_jet(p, cplx(0.4), 4), b = flow_jet(p, cplx(0.6), 4);
    const fmap d = compose(a, b) - flow_jet(p, cplx(1.0), 4);
    for (const auto& c : d.comp)
        EXPECT_LT(test::max_abs(c), 1e-12);
}

TEST(HJetOps, InverseExpLog)
{
    const xjet s = xjet::semiclassical(1, 6, 3);
    const xjet x = xjet::variable(s, 0), h = xjet::variable(s, 2);
    const xjet one = xjet::constant(s, exact(1));
    const xjet a = one + x.scaled(exact(2)) + h * x * x + x * x * x;
    EXPECT_EQ(a * hjet_inverse(a), one);
    const xjet b = x * x + h.scaled(exact(3)) + h * x;
    EXPECT_EQ(hjet_log(hjet_exp(b)), b);
    EXPECT_EQ(hjet_exp(hjet_log(one + b)), one + b);
}

TEST(HJetOps, GeometricSeries)
{
    const xjet s = xjet::semiclassical(1, 6, 3);
    const xjet x = xjet::variable(s, 0), h = xjet::variable(s, 2);
    const xjet one = xjet::constant(s, exact(1));
    const xjet hx = h * x;
    EXPECT_EQ(hjet_inverse(one + hx), one - hx + hx * hx);
}

TEST(HJetOps, NonEllipticRejected)
{
    const xjet s = xjet::semiclassical(1, 4, 2);
    EXPECT_THROW(hjet_inverse(xjet::variable(s, 0)), precondition_error);
}
