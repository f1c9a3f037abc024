#pragma once

// Exact transport along the flow of a frame's Lie action.
//
// Solves  a_t = e^{tL_D} a_0 + int_0^t e^{(t-s)L_D} (L_N + G)(a_s) ds
// weight by weight, where G is a linear operator that strictly raises the
// weight. Coefficients are exponential polynomials in t, so the result is
// exact for every t.

#include <functional>
#include <map>
#include <unordered_map>

#include "fionf/exppoly.hpp"
#include "fionf/frame.hpp"
#include "fionf/jet.hpp"

namespace fionf {

template <typename C>
using tjet = Jet<ExpPoly<C>>;

// frequency of a frame monomial: its rho exponents
template <typename K>
mkey frequency(const Jet<K>& shape, mkey k)
{
    mkey f = key_exps(k);
    if (shape.has_h())
        f &= ~(mkey(0xFF) << key_shift(shape.hvar()));
    return f;
}

template <typename C>
class Transport {
public:
    explicit Transport(const Frame<C>& fr) : fr_(fr) {}

    const Frame<C>& frame() const { return fr_; }

    tjet<C> free_flow(const Jet<C>& a0) const
    {
        tjet<C> r(a0.nv(), a0.trunc(), a0.has_h(), a0.htrunc());
        for (const auto& [k, c] : a0.terms())
            r.add_term(k, ExpPoly<C>::term(frequency(a0, k), 0, c));
        return r;
    }

    // int_0^t e^{(t-s)L_D} f(s) ds, termwise
    tjet<C> integrate(const tjet<C>& f) const { return integrate_impl(f, false); }

    // int_0^t f(s) ds
    tjet<C> integrate_plain(const tjet<C>& f) const { return integrate_impl(f, true); }

private:
    tjet<C> integrate_impl(const tjet<C>& f, bool plain) const
    {
        tjet<C> r = f.empty_like();
        for (const auto& [k, ep] : f.terms()) {
            const mkey fk = plain ? mkey(0) : frequency(f, k);
            const C lam = beta_of(fk);
            ExpPoly<C> out;
            for (const auto& [ix, c] : ep.terms()) {
                const mkey fb = ix.first;
                const int j = ix.second;
                const C b = beta_of(fb);
                if (fr_.same_beta(b, lam)) {
                    out.add({fb, j + 1}, c / scalar_from_long<C>(j + 1));
                    continue;
                }
                const C d = b - lam;
                const C dinv = scalar_from_long<C>(1) / d;
                // e^{bt} sum_i (-1)^i j!/(j-i)! t^{j-i} / d^{i+1}
                C fall = scalar_from_long<C>(1);
                C dpow = dinv;
                for (int i = 0; i <= j; ++i) {
                    C v = c * fall * dpow;
                    if (i % 2)
                        v = -v;
                    out.add({fb, j - i}, v);
                    fall = fall * scalar_from_long<C>(j - i);
                    dpow = dpow * dinv;
                }
                // - e^{lam t} (-1)^j j! / d^{j+1}
                C tail = c * factorial(j);
                for (int i = 0; i <= j; ++i)
                    tail = tail * dinv;
                if (j % 2 == 0)
                    tail = -tail;
                out.add({fk, 0}, tail);
            }
            r.add_term(k, out);
        }
        return r;
    }

public:
    // Full solve; g must raise the weight of its argument.
    tjet<C> solve(const Jet<C>& a0, const std::function<tjet<C>(const tjet<C>&)>& g) const
    {
        tjet<C> acc = free_flow(a0).empty_like();
        std::vector<tjet<C>> images;
        const int lo = a0.is_zero() ? a0.trunc() + 1 : a0.min_weight();
        for (int w = lo; w <= a0.trunc(); ++w) {
            tjet<C> src = acc.empty_like();
            for (const auto& im : images)
                src += im.part(w);
            const tjet<C> base = free_flow(a0.part(w));
            tjet<C> cur = base + integrate(src);
            if (fr_.has_nil) {
                for (int it = 0; it < 64 * (w + 2); ++it) {
                    tjet<C> next = base + integrate(src + fr_.apply_nil(cur));
                    if (next == cur)
                        break;
                    cur = std::move(next);
                }
            }
            if (cur.is_zero())
                continue;
            acc += cur;
            if (g && w < a0.trunc())
                images.push_back(g(cur));
        }
        return acc;
    }

    Jet<C> evaluate(const tjet<C>& a, const C& t) const
    {
        Jet<C> r(a.nv(), a.trunc(), a.has_h(), a.htrunc());
        std::unordered_map<mkey, C> expcache;
        for (const auto& [k, ep] : a.terms()) {
            C v = scalar_from_long<C>(0);
            for (const auto& [ix, c] : ep.terms()) {
                auto it = expcache.find(ix.first);
                if (it == expcache.end()) {
                    const C b = beta_of(ix.first);
                    C e = is_zero(b) ? scalar_from_long<C>(1) : field_exp(b * t, fr_.model);
                    it = expcache.emplace(ix.first, e).first;
                }
                C tp = scalar_from_long<C>(1);
                for (int i = 0; i < ix.second; ++i)
                    tp = tp * t;
                v += c * tp * it->second;
            }
            r.add_term(k, v);
        }
        return r;
    }

private:
    C beta_of(mkey f) const
    {
        auto it = beta_cache_.find(f);
        if (it != beta_cache_.end())
            return it->second;
        C b = scalar_from_long<C>(0);
        for (int v = 0; v < 2 * fr_.n; ++v) {
            const int e = key_exp(f, v);
            if (e)
                b += scalar_from_long<C>(e) * fr_.lam[static_cast<std::size_t>(v)];
        }
        beta_cache_.emplace(f, b);
        return b;
    }

    static C factorial(int j)
    {
        C f = scalar_from_long<C>(1);
        for (int i = 2; i <= j; ++i)
            f = f * scalar_from_long<C>(i);
        return f;
    }

    const Frame<C>& fr_;
    mutable std::unordered_map<mkey, C> beta_cache_;
};

// ---------------------------------------------------------------------------
// Hamiltonian flow jets
// ---------------------------------------------------------------------------

namespace detail {

template <typename C>
void require_no_linear_part(const Jet<C>& p, const char* who)
{
    for (const auto& [k, c] : p.terms())
        if (key_weight(k) == 1)
            throw precondition_error(std::string(who) + ": generator has a nonzero linear part");
}

// Lie series e^{t H_p} rho for p without quadratic part
template <typename C>
MapJet<C> lie_series_flow(const Jet<C>& p, const C& t, int trunc)
{
    MapJet<C> m;
    const Jet<C> pp = p.with_trunc(trunc + 1);
    const Jet<C> shape = Jet<C>::phase(p.n_dof(), trunc);
    for (int i = 0; i < p.nrho(); ++i) {
        Jet<C> term = Jet<C>::variable(shape, i);
        Jet<C> sum = term;
        for (int k = 1; k <= trunc; ++k) {
            term = poisson(pp, term).with_trunc(trunc).scaled(t / scalar_from_long<C>(k));
            if (term.is_zero())
                break;
            sum += term;
        }
        m.comp.push_back(sum);
    }
    return m;
}

} // namespace detail

// Time-t flow germ of H_p. Components are exact through degree
// min(trunc, p.trunc() - 1).
template <typename C>
MapJet<C> flow_jet(const Jet<C>& p, const C& t, int trunc, const exp_model& model = {}, double tol = 1e-10)
{
    detail::require_no_linear_part(p, "flow_jet");
    const int out = std::min(trunc, p.trunc() - 1);
    if (out < 1)
        throw precondition_error("flow_jet: truncation too small");
    const Jet<C> p2 = quadratic_part(p);
    Jet<C> hi = p.filtered([](mkey k) { return key_weight(k) >= 3; });
    if (p2.is_zero())
        return detail::lie_series_flow(hi, t, out);
    const Frame<C> fr = make_frame(hamilton_matrix(p2), model, tol);
    const Transport<C> tr(fr);
    const tjet<C> hy = lift<ExpPoly<C>>(fr.to_frame(hi.with_trunc(out + 1)));
    auto g = [&](const tjet<C>& f) { return bracket(hy, f, fr.pi); };
    const Jet<C> shape = Jet<C>::phase(p.n_dof(), out);
    std::vector<Jet<C>> yk;
    for (int k = 0; k < p.nrho(); ++k) {
        const tjet<C> sol = tr.solve(Jet<C>::variable(shape, k), g);
        yk.push_back(tr.evaluate(sol, t));
    }
    MapJet<C> m;
    for (int i = 0; i < p.nrho(); ++i) {
        Jet<C> c = shape.empty_like();
        for (int k = 0; k < p.nrho(); ++k)
            if (!is_zero(fr.Tinv(i, k)))
                c += yk[static_cast<std::size_t>(k)].scaled(fr.Tinv(i, k));
        m.comp.push_back(fr.from_frame(c));
    }
    return m;
}

} // namespace fionf
