#include <gtest/gtest.h>

#include "fionf/weylq.hpp"
#include "support.hpp"

using namespace fionf;
using fionf::test::rand_jet;

namespace {

exact q(long p, long d = 1) { return exact(make_rational(p, d)); }

const exp_model e1 = exp_model::exp_base(rational(1));

struct H1 {
    xjet s;
    xjet x, xi, h, one;
    H1(int n, int m)
        : s(xjet::semiclassical(1, n, m)), x(xjet::variable(s, 0)), xi(xjet::variable(s, 1)), h(xjet::variable(s, 2)),
          one(xjet::constant(s, exact(1)))
    {
    }
};

struct F1 {
    fjet s;
    fjet x, xi, h;
    F1(int n, int m) : s(fjet::semiclassical(1, n, m)), x(fjet::variable(s, 0)), xi(fjet::variable(s, 1)), h(fjet::variable(s, 2)) {}
};

} // namespace

TEST(Moyal, Examples)
{
    H1 v(6, 3);
    EXPECT_EQ(moyal(v.x, v.one), v.x);
    EXPECT_EQ(moyal(v.x, v.xi) - moyal(v.xi, v.x), v.h.scaled(exact::i()));
    EXPECT_EQ(moyal(v.x * v.x, v.xi * v.xi),
              v.x * v.x * v.xi * v.xi + (v.h * v.x * v.xi).scaled(q(2) * exact::i()) - (v.h * v.h).scaled(q(1, 2)));
}

TEST(Moyal, AssociativityExact)
{
    const xjet s = xjet::semiclassical(2, 6, 3);
    for (int it = 0; it < 3; ++it) {
        const xjet a = rand_jet(s, 0, 3, 0.3, 1), b = rand_jet(s, 0, 3, 0.3, 1), c = rand_jet(s, 0, 3, 0.3, 1);
        EXPECT_EQ(moyal(moyal(a, b), c), moyal(a, moyal(b, c)));
    }
}

TEST(Moyal, CommutatorAndConjugation)
{
    const xjet s = xjet::semiclassical(1, 6, 3);
    const xjet h = xjet::variable(s, 2);
    const xjet a = rand_jet(s, 0, 4, 0.5), b = rand_jet(s, 0, 4, 0.5);
    const xjet comm = moyal(a, b) - moyal(b, a);
    const xjet lead = (h * poisson(a, b)).scaled(-exact::i());
    const xjet rest = comm - lead;
    for (int j = 0; j < 3; ++j)
        EXPECT_TRUE(rest.layer(j).is_zero());
    const xjet ac = rand_jet(s, 0, 3, 0.5, 1).map_coeffs([](const exact& c) { return c * (exact(1) + exact::i()); });
    EXPECT_EQ(hjet_conj(moyal(ac, b)), moyal(hjet_conj(b), hjet_conj(ac)));
}

TEST(Moyal, AssociativityFloat)
{
    const fjet s = fjet::semiclassical(2, 6, 3);
    const fjet a = rand_jet(s, 0, 3, 0.3, 1), b = rand_jet(s, 0, 3, 0.3, 1), c = rand_jet(s, 0, 3, 0.3, 1);
    EXPECT_LT(test::max_abs(moyal(moyal(a, b), c) - moyal(a, moyal(b, c))), 1e-12);
}

TEST(SharpExp, LogInverts)
{
    H1 v(6, 2);
    const xjet a = v.x * v.xi + v.h * v.x.scaled(q(2)) + v.x * v.x * v.x;
    EXPECT_EQ(sharp_log(sharp_exp(a)), a);
}

TEST(ConjugationTransport, Examples)
{
    H1 v(6, 2);
    const xjet p = (v.x * v.xi).scaled(q(2)) + v.x * v.x * v.x + v.h * v.x * v.xi;
    EXPECT_EQ(conjugation_transport(p, p, exact(1), e1), p);
    const xjet a = v.x * v.x + v.xi * v.xi * v.x;
    EXPECT_EQ(conjugation_transport(p, a, exact(0), e1), a);
    const xjet at = conjugation_transport(p, a, exact(1), e1);
    const xjet p0 = detail::classical_layer0(p).layer(0);
    EXPECT_EQ(at.layer(0), compose(a.layer(0), flow_jet(p0, exact(1), 6, e1)));
}

TEST(ConjugationTransport, GroupLaw)
{
    H1 v(5, 2);
    const xjet p = v.x * v.x * v.xi + v.h * v.xi * v.xi + v.x * v.x * v.x * v.xi;
    const xjet a = v.x * v.x + v.h * v.xi + v.x * v.xi * v.xi;
    const xjet half = conjugation_transport(p, a, q(1, 2));
    EXPECT_EQ(conjugation_transport(p, half, q(1, 2)), conjugation_transport(p, a, exact(1)));
}

TEST(OperatorLog, TrivialAmplitudes)
{
    H1 v(6, 2);
    const xjet p = (v.x * v.xi).scaled(q(2)) + v.x * v.x * v.x;
    const xjet pc = detail::classical_layer0(p).layer(0);
    const xjet amp1 = xjet::constant(xjet::semiclassical(1, 4, 1), exact(1));
    const auto r = operator_log(FormalFIO<exact>{pc, amp1}, 6, 2, e1);
    EXPECT_EQ(r.P, detail::embed_classical(pc, r.P));

    const fjet pf = fjet::phase(1, 6);
    const fjet px = fjet::variable(pf, 0), pxi = fjet::variable(pf, 1);
    const fjet fp = (px * px + pxi * pxi).scaled(cplx(0.5)) + px * px * px;
    const double c = 0.8;
    const fjet ampc = fjet::constant(fjet::semiclassical(1, 4, 1), std::exp(cplx(0.0, c)));
    const auto rc = operator_log(FormalFIO<cplx>{fp, ampc}, 6, 2);
    const fjet expect = detail::embed_classical(fp, rc.P) - fjet::variable(rc.P, rc.P.hvar(), cplx(c));
    EXPECT_LT(test::max_abs(rc.P - expect), 1e-12);
}

TEST(OperatorLog, GaugeNormalized)
{
    const fjet pf = fjet::phase(1, 6);
    const fjet px = fjet::variable(pf, 0), pxi = fjet::variable(pf, 1);
    const fjet fp = (px * px + pxi * pxi).scaled(cplx(0.5));
    const fjet amp = fjet::constant(fjet::semiclassical(1, 4, 1), std::exp(cplx(0.0, 3.0)));
    const auto r = operator_log(FormalFIO<cplx>{fp, amp}, 6, 2);
    EXPECT_GT(r.constant.real(), -std::numbers::pi);
    EXPECT_LE(r.constant.real(), std::numbers::pi);
}

TEST(OperatorLog, RoundTripExact)
{
    H1 v(6, 2);
    const xjet pc = detail::classical_layer0((v.x * v.xi).scaled(q(1)) + v.x * v.x * v.xi).layer(0);
    const xjet as = xjet::semiclassical(1, 4, 1);
    const xjet amp = xjet::constant(as, exact(1)) + rand_jet(as, 1, 4, 0.5, 1) + rand_jet(as, 0, 2, 0.5, 1).filtered([&](mkey k) { return as.hpow(k) == 1; });
    const auto r = operator_log(FormalFIO<exact>{pc, amp}, 6, 2, e1);
    for (double w : r.residual_by_weight)
        EXPECT_EQ(w, 0.0);
    EXPECT_EQ(amplitude_of(r.P, e1), amp);
    EXPECT_EQ(r.P.layer(0), detail::embed_classical(pc, r.P).layer(0));
}

TEST(OperatorLog, ExactNeedsUnitConstant)
{
    H1 v(6, 2);
    const xjet pc = detail::classical_layer0((v.x * v.xi).scaled(q(1))).layer(0);
    const xjet amp = xjet::constant(xjet::semiclassical(1, 4, 1), exact(2));
    EXPECT_THROW(operator_log(FormalFIO<exact>{pc, amp}, 6, 2, e1), not_representable_error);
    EXPECT_THROW(operator_log(FormalFIO<exact>{pc, amp.empty_like()}, 6, 2, e1), precondition_error);
}

TEST(OperatorLog, UnitaryGivesRealP)
{
    F1 v(6, 2);
    const fjet big_p = (v.x * v.x + v.xi * v.xi).scaled(cplx(0.6)) + v.x * v.x * v.x.scaled(cplx(0.3)) +
                       v.h * v.x * v.xi.scaled(cplx(0.7)) + v.h.scaled(cplx(0.2)) + v.h * v.h.scaled(cplx(-0.1));
    const fjet amp = amplitude_of(big_p);
    EXPECT_LT(test::max_abs(moyal(hjet_conj(amp), amp) - fjet::constant(amp, cplx(1.0))), 1e-12);
    const auto r = operator_log(FormalFIO<cplx>{detail::classical_layer0(big_p).layer(0), amp}, 6, 2);
    EXPECT_LT(r.imag_discarded, 1e-12);
    EXPECT_TRUE(jet_is_real(r.P, 0.0));
    EXPECT_LT(test::max_abs(r.P - big_p), 1e-12);
}

TEST(OperatorLog, TwoHomotopiesDifferByTwoPiH)
{
    F1 v(6, 2);
    const fjet pc = (v.x * v.xi).scaled(cplx(0.5)) + v.x * v.x * v.x;
    const fjet as = fjet::semiclassical(1, 4, 1);
    const fjet amp = fjet::constant(as, std::exp(cplx(0.1, 2.5))) + rand_jet(as, 1, 3, 0.5, 1);
    const FormalFIO<cplx> u{detail::classical_layer0(pc).layer(0), amp};
    const auto lin = operator_log_along(u, 6, 2, homotopy_kind::linear);
    const auto ex = operator_log_along(u, 6, 2, homotopy_kind::exp_sharp, 1);
    const fjet d = ex.P - lin.P;
    const cplx dc = d.coeff(d.unit(d.hvar()));
    const double k = dc.real() / (2.0 * std::numbers::pi);
    EXPECT_NEAR(k, std::round(k), 1e-12);
    EXPECT_NE(std::lround(k), 0);
    EXPECT_LT(test::max_abs(d - fjet::variable(d, d.hvar(), dc)), 1e-12);
}

TEST(QuantumBNF, Examples)
{
    H1 v(6, 2);
    const exact mu = q(2);
    const xjet p0 = (v.x * v.xi).scaled(mu);
    const auto a = quantum_bnf(p0);
    EXPECT_TRUE(a.Q.is_zero());
    EXPECT_TRUE(a.R.is_zero());
    const auto b = quantum_bnf(p0 + v.h * v.x * v.x);
    EXPECT_EQ(b.Q.layer(0), (v.x * v.x).scaled(q(1) / (q(2) * mu)).layer(0));
    EXPECT_TRUE(b.R.layer(1).is_zero());
    EXPECT_EQ(b.check, 0.0);
    const auto c = quantum_bnf(p0 + v.h * v.x * v.xi);
    EXPECT_TRUE(c.Q.is_zero());
    EXPECT_EQ(c.R, v.h * v.x * v.xi);
}

TEST(QuantumBNF, ConjugationIdentityAndResonance)
{
    H1 v(6, 2);
    const xjet p = (v.x * v.xi).scaled(q(2)) + v.x * v.x * v.xi * v.xi + v.h * v.x * v.x * v.xi + v.h * v.h * v.xi +
                   (v.h * v.x * v.x * v.x * v.xi).scaled(q(5));
    const auto r = quantum_bnf(p);
    EXPECT_EQ(r.check, 0.0);
    EXPECT_EQ(r.commutator, 0.0);
    EXPECT_EQ(sharp_conjugate(r.Q, p), r.P0 + r.R);
}

TEST(QuantumBNF, RealInputRealOutput)
{
    F1 v(6, 2);
    const fjet p = (v.x * v.x + v.xi * v.xi).scaled(cplx(0.5)) + (v.x * v.x + v.xi * v.xi) * (v.x * v.x + v.xi * v.xi) +
                   v.h * v.x * v.x.scaled(cplx(0.3)) + v.h * v.h * v.xi.scaled(cplx(0.2));
    const auto r = quantum_bnf(p);
    EXPECT_TRUE(jet_is_real(r.Q, 1e-12));
    EXPECT_TRUE(jet_is_real(r.R, 1e-12));
    EXPECT_LT(r.check, 1e-10);
}

TEST(QuantumBNF, RequiresClassicalNormalForm)
{
    H1 v(6, 2);
    EXPECT_THROW(quantum_bnf((v.x * v.xi).scaled(q(2)) + v.x * v.x * v.x), precondition_error);
}

TEST(FioNormalForm, QuadraticElliptic)
{
    const fjet s = fjet::phase(1, 6);
    const fjet x = fjet::variable(s, 0), xi = fjet::variable(s, 1);
    const double nu = 0.9;
    const fjet p = (x * x + xi * xi).scaled(cplx(nu / 2));
    const fjet amp = fjet::constant(fjet::semiclassical(1, 4, 1), cplx(1.0));
    const auto rep = fio_normal_form(FormalFIO<cplx>{p, amp}, 6, 2);
    EXPECT_NEAR(std::abs(rep.F[0].coeff({1}) - cplx(nu)), 0.0, 1e-12);
    EXPECT_EQ(rep.F[0].size(), 1u);
    EXPECT_TRUE(rep.F[1].is_zero());
}

TEST(FioNormalForm, ConstantAmplitudePhase)
{
    const fjet s = fjet::phase(1, 6);
    const fjet x = fjet::variable(s, 0), xi = fjet::variable(s, 1);
    const fjet p = (x * x + xi * xi).scaled(cplx(0.45));
    const double c = -0.6;
    const fjet amp = fjet::constant(fjet::semiclassical(1, 4, 1), std::exp(cplx(0.0, c)));
    const auto rep = fio_normal_form(FormalFIO<cplx>{p, amp}, 6, 2);
    EXPECT_NEAR(std::abs(rep.F[1].coeff({0}) - cplx(-c)), 0.0, 1e-12);
}

TEST(FioNormalForm, PlantedExact)
{
    H1 v(6, 2);
    const xjet io = v.x * v.xi;
    const xjet nf = io.scaled(q(2)) + io * io.scaled(q(3)) + v.h * io.scaled(q(5)) + (v.h * v.h).scaled(q(7)) + io * io * io;
    const xjet gen = v.x * v.x * v.x + v.h * v.xi + (v.x * v.x * v.xi * v.xi).scaled(q(2));
    const xjet big_p = sharp_conjugate(gen.scaled(q(-1)), nf);
    const auto rep = fio_normal_form(FormalFIO<exact>{detail::classical_layer0(big_p).layer(0), amplitude_of(big_p, e1)}, 6, 2, e1);
    EXPECT_EQ(rep.F[0].coeff({1}), q(2));
    EXPECT_EQ(rep.F[0].coeff({2}), q(3));
    EXPECT_EQ(rep.F[0].coeff({3}), q(1));
    EXPECT_EQ(rep.F[1].coeff({1}), q(5));
    EXPECT_EQ(rep.F[2].coeff({0}), q(7));
    EXPECT_EQ(rep.F[0].size() + rep.F[1].size() + rep.F[2].size(), 5u);
}
