#pragma once

// Semiclassical layer: Weyl-symbol products on h-jets, conjugation
// transport, operator logarithm and quantum normal forms.
//
// h-jets carry a trailing variable h of weight 2, so every term of the
// Moyal series is weight-homogeneous and truncation by weight is exact.

#include <cmath>
#include <complex>
#include <map>
#include <numbers>
#include <string>
#include <vector>

#include "fionf/birkhoff.hpp"
#include "fionf/errors.hpp"
#include "fionf/frame.hpp"
#include "fionf/homology.hpp"
#include "fionf/jet.hpp"
#include "fionf/maplog.hpp"
#include "fionf/transport.hpp"

namespace fionf {

// ---------------------------------------------------------------------------
// Pointwise h-jet algebra
// ---------------------------------------------------------------------------

template <typename K>
K jet_constant(const Jet<K>& a)
{
    return a.coeff(0);
}

// a^-1 for a(0) != 0, as a geometric series
template <typename K>
Jet<K> hjet_inverse(const Jet<K>& a)
{
    const K c = jet_constant(a);
    if (scalar_near_zero(c, 1e-300))
        throw precondition_error("inverse: leading constant vanishes");
    const K ci = K(1) / c;
    const Jet<K> u = (a.scaled(ci) - Jet<K>::constant(a, K(1)));
    Jet<K> term = Jet<K>::constant(a, K(1));
    Jet<K> sum = term;
    for (int k = 1; k <= a.trunc(); ++k) {
        term = (term * u).scaled(K(-1));
        if (term.is_zero())
            break;
        sum += term;
    }
    return sum.scaled(ci);
}

// exp(a) with a(0) = 0 (exact) or arbitrary (float)
template <typename K>
Jet<K> hjet_exp(const Jet<K>& a)
{
    const K c = jet_constant(a);
    K ec = K(1);
    if (!is_zero(c)) {
        if constexpr (scalar_traits<K>::is_exact)
            throw not_representable_error("exp: nonzero constant term in the exact field");
        else
            ec = std::exp(c);
    }
    const Jet<K> u = a - Jet<K>::constant(a, c);
    Jet<K> term = Jet<K>::constant(a, K(1));
    Jet<K> sum = term;
    for (int k = 1; k <= a.trunc(); ++k) {
        term = (term * u).scaled(K(1) / K(k));
        if (term.is_zero())
            break;
        sum += term;
    }
    return sum.scaled(ec);
}

// log(a) with a(0) = 1 (exact) or a(0) != 0 (float, principal branch)
template <typename K>
Jet<K> hjet_log(const Jet<K>& a)
{
    const K c = jet_constant(a);
    if (scalar_near_zero(c, 1e-300))
        throw precondition_error("log: leading constant vanishes");
    K lc = K(0);
    if (!(c == K(1))) {
        if constexpr (scalar_traits<K>::is_exact)
            throw not_representable_error("log: leading constant is not 1 in the exact field");
        else
            lc = std::log(c);
    }
    const Jet<K> u = a.scaled(K(1) / c) - Jet<K>::constant(a, K(1));
    Jet<K> pw = Jet<K>::constant(a, K(1));
    Jet<K> sum = Jet<K>::constant(a, lc);
    for (int k = 1; k <= a.trunc(); ++k) {
        pw = pw * u;
        if (pw.is_zero())
            break;
        sum += pw.scaled(K((k % 2) ? 1 : -1) / K(k));
    }
    return sum;
}

// ---------------------------------------------------------------------------
// Moyal product
// ---------------------------------------------------------------------------

namespace detail {

// multisets m over pairing entries with |m| = k, as count vectors
inline void multisets(int nent, int k, const std::function<void(const std::vector<int>&)>& f)
{
    std::vector<int> m(static_cast<std::size_t>(nent), 0);
    std::function<void(int, int)> rec = [&](int e, int left) {
        if (e == nent - 1) {
            m[static_cast<std::size_t>(e)] = left;
            f(m);
            return;
        }
        for (int v = left; v >= 0; --v) {
            m[static_cast<std::size_t>(e)] = v;
            rec(e + 1, left - v);
        }
    };
    if (nent > 0)
        rec(0, k);
}

template <typename K>
class deriv_cache {
public:
    explicit deriv_cache(const Jet<K>& a) : a_(a) {}
    // derivative by a multi-index of rho variables (exponent vector)
    const Jet<K>& get(const std::vector<int>& idx)
    {
        auto it = memo_.find(idx);
        if (it != memo_.end())
            return it->second;
        int v = -1;
        for (std::size_t i = 0; i < idx.size(); ++i)
            if (idx[i] > 0) {
                v = static_cast<int>(i);
                break;
            }
        if (v < 0)
            return memo_.emplace(idx, a_).first->second;
        std::vector<int> lower = idx;
        --lower[static_cast<std::size_t>(v)];
        Jet<K> d = get(lower).derivative(v);
        return memo_.emplace(idx, std::move(d)).first->second;
    }

private:
    const Jet<K>& a_;
    std::map<std::vector<int>, Jet<K>> memo_;
};

// B^k(a, b) / k! for the bivector pi
template <typename K, typename C>
Jet<K> bidiff(deriv_cache<K>& da, deriv_cache<K>& db, const Pairing<C>& pi, int k, const Jet<K>& shape)
{
    using S = std::conditional_t<std::is_same_v<C, long>, K, C>;
    const int nent = static_cast<int>(pi.entries.size());
    const int nr = shape.nrho();
    Jet<K> r = shape.empty_like();
    multisets(nent, k, [&](const std::vector<int>& m) {
        std::vector<int> ia(static_cast<std::size_t>(nr), 0), ib(static_cast<std::size_t>(nr), 0);
        S coef = scalar_from_long<S>(1);
        for (int e = 0; e < nent; ++e) {
            const int c = m[static_cast<std::size_t>(e)];
            if (!c)
                continue;
            const auto& en = pi.entries[static_cast<std::size_t>(e)];
            ia[static_cast<std::size_t>(en.k)] += c;
            ib[static_cast<std::size_t>(en.l)] += c;
            for (int j = 1; j <= c; ++j)
                coef = coef * static_cast<S>(en.c) / scalar_from_long<S>(j);
        }
        const Jet<K>& x = da.get(ia);
        if (x.is_zero())
            return;
        const Jet<K>& y = db.get(ib);
        if (y.is_zero())
            return;
        r += (x * y).scaled(static_cast<K>(coef));
    });
    return r;
}

template <typename K>
Jet<K> times_h(const Jet<K>& a, int k)
{
    if (k == 0)
        return a;
    return a.shifted(mkey(k) * a.unit(a.hvar()));
}

} // namespace detail

template <typename K, typename C>
Jet<K> moyal(const Jet<K>& a, const Jet<K>& b, const Pairing<C>& pi)
{
    a.check_shape(b);
    if (!a.has_h())
        throw precondition_error("moyal: operands must be h-jets");
    const int tr = std::min(a.trunc(), b.trunc());
    const int htr = std::min(a.htrunc(), b.htrunc());
    Jet<K> r = (a * b).with_trunc(tr, htr);
    detail::deriv_cache<K> da(a), db(b);
    // (h / 2i)^k = h^k (-i/2)^k
    using S = std::conditional_t<std::is_same_v<C, long>, K, C>;
    const S step = -scalar_traits<S>::i() / scalar_from_long<S>(2);
    S fac = scalar_from_long<S>(1);
    for (int k = 1; k <= htr; ++k) {
        fac = fac * step;
        Jet<K> t = detail::bidiff(da, db, pi, k, r);
        if (t.is_zero())
            continue;
        r += detail::times_h(t.scaled(static_cast<K>(fac)), k).with_trunc(tr, htr);
    }
    return r.with_trunc(tr, htr);
}

template <typename K>
Jet<K> moyal(const Jet<K>& a, const Jet<K>& b)
{
    return moyal(a, b, Pairing<long>::canonical(a.n_dof()));
}

// i/h [P, a]_#  =  sum_m (-1)^m h^2m / (4^m (2m+1)!) B^{2m+1}(P, a)
template <typename K, typename C>
Jet<K> moyal_derivation(const Jet<K>& p, const Jet<K>& a, const Pairing<C>& pi)
{
    const int tr = a.trunc();
    Jet<K> r = a.empty_like();
    if (p.is_zero() || a.is_zero())
        return r;
    detail::deriv_cache<K> dp(p), da(a);
    using S = std::conditional_t<std::is_same_v<C, long>, K, C>;
    S den = scalar_from_long<S>(1);
    for (int m = 0; 2 * m <= a.htrunc(); ++m) {
        const int k = 2 * m + 1;
        if (m > 0)
            den = den * scalar_from_long<S>(-4);
        Jet<K> t = detail::bidiff(dp, da, pi, k, a);
        if (t.is_zero())
            continue;
        r += detail::times_h(t.scaled(static_cast<K>(scalar_from_long<S>(1) / den)), 2 * m).with_trunc(tr);
    }
    return r;
}

template <typename K>
Jet<K> hjet_conj(const Jet<K>& a)
{
    return a.map_coeffs([](const K& c) { return conj(c); });
}

// exp_#(a) with a(0) = 0 (exact) or arbitrary constant (float)
template <typename K>
Jet<K> sharp_exp(const Jet<K>& a)
{
    const K c = jet_constant(a);
    K ec = K(1);
    if (!is_zero(c)) {
        if constexpr (scalar_traits<K>::is_exact)
            throw not_representable_error("exp: nonzero constant term in the exact field");
        else
            ec = std::exp(c);
    }
    const Jet<K> u = a - Jet<K>::constant(a, c);
    Jet<K> term = Jet<K>::constant(a, K(1));
    Jet<K> sum = term;
    for (int k = 1; k <= a.trunc(); ++k) {
        term = moyal(term, u).scaled(K(1) / K(k));
        if (term.is_zero())
            break;
        sum += term;
    }
    return sum.scaled(ec);
}

// log_#(a), principal branch on the constant
template <typename K>
Jet<K> sharp_log(const Jet<K>& a)
{
    const K c = jet_constant(a);
    if (scalar_near_zero(c, 1e-300))
        throw precondition_error("log: amplitude is not elliptic (a(0) = 0)");
    K lc = K(0);
    if (!(c == K(1))) {
        if constexpr (scalar_traits<K>::is_exact)
            throw not_representable_error("log: leading constant is not 1 in the exact field");
        else
            lc = std::log(c);
    }
    const Jet<K> u = a.scaled(K(1) / c) - Jet<K>::constant(a, K(1));
    Jet<K> pw = Jet<K>::constant(a, K(1));
    Jet<K> sum = Jet<K>::constant(a, lc);
    for (int k = 1; k <= a.trunc(); ++k) {
        pw = moyal(pw, u);
        if (pw.is_zero())
            break;
        sum += pw.scaled(K((k % 2) ? 1 : -1) / K(k));
    }
    return sum;
}

// ---------------------------------------------------------------------------
// Conjugation transport: symbol of e^{itP/h} Op(A) e^{-itP/h}
// ---------------------------------------------------------------------------

namespace detail {

template <typename K>
Jet<K> classical_layer0(const Jet<K>& p)
{
    return p.filtered([&](mkey k) { return p.hpow(k) == 0; });
}

template <typename K>
void require_generator(const Jet<K>& p, const char* who)
{
    for (const auto& [k, c] : p.terms())
        if (p.hpow(k) == 0 && key_weight(k) < 2)
            throw precondition_error(std::string(who) + ": h^0 layer of the generator must vanish to second order");
}

// drop terms that commute with everything
template <typename K>
Jet<K> without_constants(const Jet<K>& p)
{
    return p.filtered([&](mkey k) { return p.rho_degree(k) > 0; });
}

} // namespace detail

template <typename K>
Jet<K> conjugation_transport(const Jet<K>& p, const Jet<K>& a, const K& t, const exp_model& model = {}, double tol = 1e-10)
{
    p.check_shape(a);
    if (!p.has_h())
        throw precondition_error("conjugation_transport: operands must be h-jets");
    detail::require_generator(p, "conjugation_transport");
    const Jet<K> p2 = quadratic_part(p);
    const Jet<K> rest = detail::without_constants(p - p2).with_trunc(a.trunc() + 2);
    if (p2.is_zero()) {
        const auto pi = Pairing<long>::canonical(a.n_dof());
        Jet<K> term = a, sum = a;
        for (int k = 1; k <= 2 * a.trunc() + 2; ++k) {
            term = moyal_derivation(rest, term, pi).scaled(t / K(k));
            if (term.is_zero())
                break;
            sum += term;
        }
        return sum;
    }
    const Frame<K> fr = make_frame(hamilton_matrix(p2), model, tol);
    const Transport<K> tr(fr);
    const tjet<K> ry = lift<ExpPoly<K>>(fr.to_frame(rest));
    auto g = [&](const tjet<K>& f) { return moyal_derivation(ry, f, fr.pi); };
    const tjet<K> sol = tr.solve(fr.to_frame(a), g);
    return fr.from_frame(tr.evaluate(sol, t));
}

// ---------------------------------------------------------------------------
// Formal FIOs  U = exp(-i p/h) Op(A)
// ---------------------------------------------------------------------------

template <typename K>
struct FormalFIO {
    Jet<K> p_ref;  // classical, flow_jet(p_ref, 1) = kappa
    Jet<K> amp;    // h-jet, amp(0) != 0
    int gauge = 0;
};

namespace detail {

// (P - p) / h on the lowered shape (trunc - 2, htrunc - 1)
template <typename K>
Jet<K> divide_h(const Jet<K>& a)
{
    Jet<K> r(a.nv(), a.trunc() - 2, true, std::max(0, a.htrunc() - 1));
    const mkey hu = a.unit(a.hvar());
    for (const auto& [k, c] : a.terms())
        if (a.hpow(k) > 0)
            r.add_term(k - hu, c);
    return r;
}

template <typename K>
Jet<K> multiply_h(const Jet<K>& a, const Jet<K>& shape)
{
    Jet<K> r = shape.empty_like();
    const mkey hu = shape.unit(shape.hvar());
    for (const auto& [k, c] : a.terms())
        r.add_term(k + hu, c);
    return r;
}

template <typename K>
Jet<K> embed_classical(const Jet<K>& p, const Jet<K>& shape)
{
    Jet<K> r = shape.empty_like();
    r.add_layer(0, p.with_trunc(shape.trunc()));
    return r;
}

} // namespace detail

// Amplitude e^{ip/h} e^{-iP/h} with p the h^0 layer of P; shape (N-2, M-1).
template <typename K>
Jet<K> amplitude_of(const Jet<K>& big_p, const exp_model& model = {}, double tol = 1e-10)
{
    if (!big_p.has_h())
        throw precondition_error("amplitude: P must be an h-jet");
    const Jet<K> p = detail::classical_layer0(big_p);
    detail::require_generator(p, "amplitude");
    Jet<K> d = detail::divide_h(big_p);
    const K c0 = jet_constant(d);
    K phase = K(1);
    if (!is_zero(c0)) {
        if constexpr (scalar_traits<K>::is_exact)
            throw not_representable_error("amplitude: h^1 constant must vanish in the exact field");
        else
            phase = std::exp(-scalar_traits<K>::i() * c0);
    }
    d -= Jet<K>::constant(d, c0);
    const Jet<K> p2 = quadratic_part(p);
    const Frame<K> fr = make_frame(hamilton_matrix(p2), model, tol);
    const Transport<K> tr(fr);
    const Jet<K> rest = detail::without_constants(p - p2).with_trunc(d.trunc() + 2);
    const tjet<K> ry = lift<ExpPoly<K>>(fr.to_frame(rest.with_trunc(d.trunc() + 2, d.htrunc())));
    auto g = [&](const tjet<K>& f) { return moyal_derivation(ry, f, fr.pi); };
    const tjet<K> di = tr.solve(fr.to_frame(d), g);
    tjet<K> v = tjet<K>::constant(di, ExpPoly<K>(1L));
    tjet<K> vk = v;
    const ExpPoly<K> mi(-scalar_traits<K>::i());
    for (int k = 1; k <= d.trunc() + 1; ++k) {
        vk = tr.integrate_plain(moyal(di, vk, fr.pi)).scaled(mi);
        if (vk.is_zero())
            break;
        v += vk;
    }
    return fr.from_frame(tr.evaluate(v, K(1))).scaled(phase);
}

template <typename K>
struct OperatorLogResult {
    Jet<K> P;
    K constant;                 // h^1 constant term
    int turns = 0;              // branch shift applied to log a(0)
    std::string homotopy = "exp_sharp";
    std::vector<double> residual_by_weight;
    double imag_discarded = 0.0;  // max |Im| dropped when P is made real
};

enum class homotopy_kind { exp_sharp, linear };

// continuous log of a00(s) along the homotopy, at s = 1
inline cplx path_log(cplx a00, homotopy_kind h, int turns, int samples = 4096)
{
    if (h == homotopy_kind::exp_sharp)
        return std::log(a00) + cplx(0.0, 2.0 * std::numbers::pi * turns);
    cplx acc = 0.0;
    cplx prev = 1.0;
    for (int i = 1; i <= samples; ++i) {
        const double s = static_cast<double>(i) / samples;
        const cplx cur = (1.0 - s) + s * a00;
        if (std::abs(cur) < 1e-12)
            throw precondition_error("operator_log: linear homotopy passes through a non-elliptic amplitude");
        acc += std::log(cur / prev);
        prev = cur;
    }
    return acc;
}

namespace detail {

template <typename K>
OperatorLogResult<K> operator_log_impl(const FormalFIO<K>& u, int big_n, int big_m, const K& c0, const exp_model& model,
                                       double tol)
{
    if (!u.amp.has_h())
        throw precondition_error("operator_log: amplitude must be an h-jet");
    const int n = u.p_ref.n_dof();
    const Jet<K> pshape = Jet<K>::semiclassical(n, big_n, big_m);
    const Jet<K> amp = u.amp.with_trunc(big_n - 2, big_m - 1);
    const K a00 = jet_constant(amp);
    Jet<K> big_p = detail::embed_classical(u.p_ref, pshape);
    if (!is_zero(c0))
        big_p += Jet<K>::variable(pshape, pshape.hvar(), c0);
    const Frame<K> fr = frame_of(quadratic_part(u.p_ref).with_trunc(2), model, tol);
    const K scale = scalar_traits<K>::i() / a00;
    for (int w = 1; w <= big_n - 2; ++w) {
        const Jet<K> delta = (amp.with_trunc(w) - amplitude_of(big_p.with_trunc(w + 2), model, tol)).part(w);
        if (jet_norm(delta) <= (scalar_traits<K>::is_exact ? 0.0 : 1e-300))
            continue;
        const Jet<K> corr = solve_averaged(delta.scaled(scale), fr);
        big_p += detail::multiply_h(corr, pshape);
    }
    OperatorLogResult<K> out;
    out.constant = c0;
    const Jet<K> res = amplitude_of(big_p, model, tol) - amp;
    for (int w = 0; w <= big_n - 2; ++w)
        out.residual_by_weight.push_back(jet_norm(res.part(w)));
    if constexpr (!scalar_traits<K>::is_exact) {
        // unitary amplitude: P is real
        const Jet<K> un = moyal(hjet_conj(amp), amp) - Jet<K>::constant(amp, K(1));
        if (jet_norm(un) <= 1e-12 && jet_is_real(u.p_ref)) {
            for (const auto& [k, c] : big_p.terms())
                out.imag_discarded = std::max(out.imag_discarded, std::abs(c.imag()));
            big_p = real_part(big_p);
        }
    }
    out.P = big_p;
    return out;
}

} // namespace detail

// P with e^{-iP/h} = U; the h^1 constant is normalized into (-pi, pi].
template <typename K>
OperatorLogResult<K> operator_log(const FormalFIO<K>& u, int big_n, int big_m, const exp_model& model = {}, double tol = 1e-10)
{
    if (big_n < 3 || big_m < 1)
        throw precondition_error("operator_log: need trunc >= 3 and h-trunc >= 1");
    const K a00 = jet_constant(u.amp);
    if (scalar_near_zero(a00, 1e-300))
        throw precondition_error("operator_log: amplitude is not elliptic (a(0) = 0)");
    K c0 = K(0);
    if constexpr (scalar_traits<K>::is_exact) {
        if (!(a00 == K(1)))
            throw not_representable_error("operator_log: a(0) must be 1 in the exact field; use the float field");
    }
    else {
        c0 = scalar_traits<K>::i() * std::log(a00);
        double re = std::remainder(c0.real(), 2.0 * std::numbers::pi);
        if (re <= -std::numbers::pi)
            re += 2.0 * std::numbers::pi;
        c0 = K(re, c0.imag());
    }
    auto out = detail::operator_log_impl(u, big_n, big_m, c0, model, tol);
    return out;
}

// Float operator log along an explicit homotopy; the branch of log a(0) is
// the one continued along the path (no gauge normalization).
inline OperatorLogResult<cplx> operator_log_along(const FormalFIO<cplx>& u, int big_n, int big_m, homotopy_kind h, int turns = 0,
                                                  const exp_model& model = {}, double tol = 1e-10)
{
    const cplx a00 = jet_constant(u.amp);
    if (std::abs(a00) == 0.0)
        throw precondition_error("operator_log: amplitude is not elliptic (a(0) = 0)");
    const cplx c0 = cplx(0.0, 1.0) * path_log(a00, h, turns);
    auto out = detail::operator_log_impl(u, big_n, big_m, c0, model, tol);
    out.turns = turns;
    out.homotopy = h == homotopy_kind::linear ? "linear" : "exp_sharp";
    return out;
}

// ---------------------------------------------------------------------------
// Quantum Birkhoff normal form
// ---------------------------------------------------------------------------

// e^{i ad_Q} P
template <typename K>
Jet<K> sharp_conjugate(const Jet<K>& q, const Jet<K>& p)
{
    Jet<K> term = p, sum = p;
    const K i = scalar_traits<K>::i();
    for (int k = 1; k <= 2 * p.trunc() + 2; ++k) {
        term = (moyal(q, term) - moyal(term, q)).scaled(i / K(k));
        if (term.is_zero())
            break;
        sum += term;
    }
    return sum;
}

template <typename K>
struct QuantumBNF {
    Jet<K> Q;
    Jet<K> R;   // resonant in every layer
    Jet<K> P0;  // quadratic part
    double check = 0.0;       // |e^{i ad_Q} P - P0 - R|, independent transport
    double commutator = 0.0;  // |[P0, R]_#|
};

template <typename K>
QuantumBNF<K> quantum_bnf(const Jet<K>& big_p, double tol = 1e-10)
{
    if (!big_p.has_h())
        throw precondition_error("quantum_bnf: P must be an h-jet");
    const Jet<K> p0 = quadratic_part(big_p);
    const Frame<K> fr = frame_of(p0.layer(0).with_trunc(2), {}, tol);
    if (fr.has_nil)
        throw precondition_error("quantum_bnf: quadratic part is not diagonalizable");
    const Jet<K> l0 = big_p.layer(0);
    if (jet_norm(solve_h_p0(l0 - p0.layer(0).with_trunc(l0.trunc()), fr).u) > tol)
        throw precondition_error("quantum_bnf: h^0 layer is not in classical normal form (run birkhoff_reduce first)");
    const bool real = jet_is_real(big_p);
    Jet<K> q = big_p.empty_like();
    Jet<K> cur = big_p;
    const int htr = big_p.htrunc();
    for (int it = 0; it < 4 * (big_p.trunc() + 2) * (htr + 1); ++it) {
        bool changed = false;
        for (int w = 2; w <= big_p.trunc() && !changed; ++w)
            for (int j = 1; j <= htr && 2 * j <= w; ++j) {
                const Jet<K> part = cur.layer(j).part(w - 2 * j);
                if (part.is_zero())
                    continue;
                Jet<K> u = solve_h_p0(part, fr).u;
                if constexpr (!scalar_traits<K>::is_exact)
                    if (real)
                        u = real_part(u);
                if (jet_norm(u) <= (scalar_traits<K>::is_exact ? 0.0 : 1e-14))
                    continue;
                q.add_layer(j - 1, u);
                changed = true;
            }
        if (!changed)
            break;
        cur = sharp_conjugate(q, big_p);
        if constexpr (!scalar_traits<K>::is_exact)
            if (real)
                cur = real_part(cur);
    }
    QuantumBNF<K> out;
    out.Q = q;
    out.P0 = p0;
    out.R = cur - p0;
    const Jet<K> hq = detail::multiply_h(q.with_trunc(big_p.trunc() - 2, std::max(0, htr - 1)), big_p);
    out.check = jet_norm(conjugation_transport(hq, big_p, K(1)) - p0 - out.R);
    out.commutator = jet_norm(moyal(p0, out.R) - moyal(out.R, p0));
    return out;
}

// ---------------------------------------------------------------------------
// Normal form of a formal FIO
// ---------------------------------------------------------------------------

template <typename K>
struct NormalFormReport {
    OperatorLogResult<K> log;
    QuadraticNormalForm<K> qnf;
    BirkhoffResult<K> birkhoff;
    QuantumBNF<K> quantum;
    std::vector<Jet<K>> F;  // F_j(iota), coefficient of h^j
    std::vector<std::string> actions;
};

namespace detail {

inline QuadraticNormalForm<cplx> normalize_quadratic(const Jet<cplx>& p2)
{
    const cmatrix b = hamilton_matrix(p2);
    Eigen::MatrixXd br(b.rows(), b.cols());
    for (int i = 0; i < b.rows(); ++i)
        for (int j = 0; j < b.cols(); ++j)
            br(i, j) = b(i, j).real();
    return quadratic_normalize(br);
}

inline QuadraticNormalForm<exact> normalize_quadratic(const Jet<exact>& p2) { return quadratic_normalize(hamilton_matrix(p2)); }

template <typename K>
std::vector<std::string> action_names(const QuadraticNormalForm<K>& q)
{
    std::vector<NormalBlock<cplx>> bl;
    for (const auto& b : q.blocks)
        bl.push_back({b.kind, b.dofs, b.actions, cplx(0.0), cplx(0.0)});
    return action_definitions(bl);
}

} // namespace detail

// stage, when given, names the step currently running
template <typename K>
NormalFormReport<K> fio_normal_form(const FormalFIO<K>& u, int big_n, int big_m, const exp_model& model = {}, double tol = 1e-10,
                                    std::string* stage = nullptr)
{
    auto enter = [&](const char* s) {
        if (stage)
            *stage = s;
    };
    NormalFormReport<K> rep;
    enter("operator_log");
    rep.log = operator_log(u, big_n, big_m, model, tol);
    enter("quadratic_normalize");
    const Jet<K> p2 = quadratic_part(u.p_ref).with_trunc(2);
    rep.qnf = detail::normalize_quadratic(p2);
    Jet<K> cur = Frame<K>::substitute(rep.log.P, rep.qnf.kappa0);
    enter("birkhoff_reduce");
    rep.birkhoff = birkhoff_reduce(cur.layer(0), big_n, tol);
    enter("conjugation_transport");
    for (const auto& g : rep.birkhoff.generators)
        cur = conjugation_transport(detail::embed_classical(g.with_trunc(big_n), cur), cur, K(1), model, tol);
    if constexpr (!scalar_traits<K>::is_exact)
        if (jet_is_real(rep.log.P))
            cur = real_part(cur);
    enter("quantum_bnf");
    rep.quantum = quantum_bnf(cur, tol);
    enter("to_actions");
    const Jet<K> nf = rep.quantum.P0 + rep.quantum.R;
    for (int j = 0; j <= big_m; ++j)
        rep.F.push_back(to_actions(nf.layer(j), rep.qnf));
    rep.actions = detail::action_names(rep.qnf);
    return rep;
}

// Resonant h-jet F(iota(rho); h) in normal coordinates from action layers.
template <typename K>
Jet<K> actions_to_symbol(const std::vector<Jet<K>>& f, const QuadraticNormalForm<K>& q, int big_n, int big_m)
{
    Jet<K> r = Jet<K>::semiclassical(q.n, big_n, big_m);
    for (int j = 0; j <= big_m && j < static_cast<int>(f.size()); ++j)
        r.add_layer(j, actions_substitute(f[static_cast<std::size_t>(j)], q, big_n - 2 * j));
    return r;
}

} // namespace fionf
