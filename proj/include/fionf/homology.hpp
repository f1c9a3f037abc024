#pragma once

// Resonance analysis and homological solvers.

#include <cmath>
#include <functional>
#include <map>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "fionf/errors.hpp"
#include "fionf/frame.hpp"
#include "fionf/jet.hpp"

namespace fionf {

// ---------------------------------------------------------------------------
// Resonance scan
// ---------------------------------------------------------------------------

// mu = re + i im + 2 pi i turns, all rational
struct exact_mu {
    rational re, im, turns;
    std::string str() const
    {
        return re.get_str() + "+" + im.get_str() + "i+2pi i*" + turns.get_str();
    }
};

enum class resonance_condition { map_log, diagonal, quantum };

inline const char* condition_name(resonance_condition c)
{
    switch (c) {
    case resonance_condition::map_log: return "map_log";
    case resonance_condition::diagonal: return "diagonal";
    case resonance_condition::quantum: return "quantum";
    }
    return "?";
}

struct ResonanceViolation {
    std::vector<int> k;
    int degree = 0;
    std::string value;
};

struct ResonanceReport {
    std::vector<std::string> mus;
    int degree_bound = 0;
    resonance_condition condition = resonance_condition::diagonal;
    std::vector<ResonanceViolation> violations;
    bool resonant() const { return !violations.empty(); }
    // float mode: smallest |(e^beta - 1)/beta| over scanned nonzero k
    std::optional<double> min_factor;
    std::optional<double> min_abs_sum;
};

namespace detail {

// all nonzero k with |k|_1 <= m and first nonzero entry positive
inline void enumerate_k(int n, int m, const std::function<void(const std::vector<int>&)>& f)
{
    std::vector<int> k(static_cast<std::size_t>(n), 0);
    std::function<void(int, int)> rec = [&](int j, int left) {
        if (j == n) {
            int first = 0;
            for (int v : k)
                if (v) {
                    first = v;
                    break;
                }
            if (first > 0)
                f(k);
            return;
        }
        for (int v = -left; v <= left; ++v) {
            k[static_cast<std::size_t>(j)] = v;
            rec(j + 1, left - std::abs(v));
        }
        k[static_cast<std::size_t>(j)] = 0;
    };
    rec(0, m);
}

inline int l1(const std::vector<int>& k)
{
    int s = 0;
    for (int v : k)
        s += std::abs(v);
    return s;
}

} // namespace detail

inline ResonanceReport resonance_scan(const std::vector<exact_mu>& mus, int m_max, resonance_condition cond)
{
    if (m_max < 1)
        throw precondition_error("resonance_scan: degree bound must be positive");
    ResonanceReport rep;
    rep.degree_bound = m_max;
    rep.condition = cond;
    for (const auto& m : mus)
        rep.mus.push_back(m.str());
    detail::enumerate_k(static_cast<int>(mus.size()), m_max, [&](const std::vector<int>& k) {
        exact_mu s{0, 0, 0};
        for (std::size_t j = 0; j < k.size(); ++j) {
            s.re += k[j] * mus[j].re;
            s.im += k[j] * mus[j].im;
            s.turns += k[j] * mus[j].turns;
        }
        bool bad = false;
        const bool lattice = s.re == 0 && s.im == 0 && s.turns.get_den() == 1;
        switch (cond) {
        case resonance_condition::diagonal: bad = s.re == 0 && s.im == 0 && s.turns == 0; break;
        case resonance_condition::quantum: bad = lattice; break;
        case resonance_condition::map_log: bad = lattice && s.turns != 0; break;
        }
        if (bad)
            rep.violations.push_back({k, detail::l1(k), s.str()});
    });
    return rep;
}

inline ResonanceReport resonance_scan(const std::vector<cplx>& mus, int m_max, resonance_condition cond, double tol = 1e-9)
{
    if (m_max < 1)
        throw precondition_error("resonance_scan: degree bound must be positive");
    ResonanceReport rep;
    rep.degree_bound = m_max;
    rep.condition = cond;
    for (const auto& m : mus)
        rep.mus.push_back(scalar_str(m));
    double min_factor = std::numeric_limits<double>::infinity();
    double min_abs = std::numeric_limits<double>::infinity();
    const double two_pi = 2.0 * std::numbers::pi;
    detail::enumerate_k(static_cast<int>(mus.size()), m_max, [&](const std::vector<int>& k) {
        cplx s = 0.0;
        for (std::size_t j = 0; j < k.size(); ++j)
            s += static_cast<double>(k[j]) * mus[j];
        const double turns = std::round(s.imag() / two_pi);
        const bool lattice = std::abs(s - cplx(0.0, two_pi * turns)) <= tol;
        const bool zero = std::abs(s) <= tol;
        bool bad = false;
        switch (cond) {
        case resonance_condition::diagonal: bad = zero; break;
        case resonance_condition::quantum: bad = lattice; break;
        case resonance_condition::map_log: bad = lattice && !zero; break;
        }
        if (bad)
            rep.violations.push_back({k, detail::l1(k), scalar_str(s)});
        min_abs = std::min(min_abs, std::abs(s));
        if (!zero)
            min_factor = std::min(min_factor, std::abs((std::exp(s) - 1.0) / s));
    });
    if (std::isfinite(min_factor))
        rep.min_factor = min_factor;
    if (std::isfinite(min_abs))
        rep.min_abs_sum = min_abs;
    return rep;
}

// ---------------------------------------------------------------------------
// Averaged transport  u -> int_0^1 u o exp(t H_p0) dt
// ---------------------------------------------------------------------------

template <typename C>
Frame<C> frame_of(const Jet<C>& p0, const exp_model& model = {}, double tol = 1e-10)
{
    const Jet<C> q = quadratic_part(p0);
    if (!(p0.filtered([](mkey k) { return key_weight(k) == 2; }) - q).is_zero() ||
        !(p0.filtered([](mkey k) { return key_weight(k) != 2; })).is_zero())
        throw precondition_error("p0 must be a homogeneous quadratic form");
    return make_frame(hamilton_matrix(q), model, tol);
}

namespace detail {

// I_k(b) = int_0^1 t^k e^{bt} dt, k = 0..kmax
template <typename C>
std::vector<C> moment_integrals(const Frame<C>& fr, const C& b, int kmax)
{
    std::vector<C> out;
    if (fr.beta_zero(b)) {
        for (int k = 0; k <= kmax; ++k)
            out.push_back(scalar_from_long<C>(1) / scalar_from_long<C>(k + 1));
        return out;
    }
    const C e = field_exp(b, fr.model);
    const C binv = scalar_from_long<C>(1) / b;
    C prev = (e - scalar_from_long<C>(1)) * binv;
    out.push_back(prev);
    for (int k = 1; k <= kmax; ++k) {
        prev = (e - scalar_from_long<C>(k) * prev) * binv;
        out.push_back(prev);
    }
    return out;
}

template <typename C>
class averager {
public:
    explicit averager(const Frame<C>& fr) : fr_(fr) {}

    const std::vector<C>& moments(mkey f, int kmax)
    {
        auto it = cache_.find(f);
        if (it == cache_.end() || static_cast<int>(it->second.size()) <= kmax)
            it = cache_.insert_or_assign(f, moment_integrals(fr_, fr_.beta(f), std::max(kmax, 4))).first;
        return it->second;
    }

    // frame jet g -> sum_k I_k(beta) N^k g / k!
    template <typename K>
    Jet<K> apply(const Jet<K>& g)
    {
        Jet<K> r = g.empty_like();
        Jet<K> cur = g;
        C fact = scalar_from_long<C>(1);
        for (int k = 0; !cur.is_zero(); ++k) {
            if (k > 0)
                fact = fact * scalar_from_long<C>(k);
            for (const auto& [key, c] : cur.terms()) {
                const auto& m = moments(key_exps(key), k);
                r.add_term(key, c * static_cast<K>(m[static_cast<std::size_t>(k)] / fact));
            }
            if (!fr_.has_nil)
                break;
            cur = fr_.apply_nil(cur);
        }
        return r;
    }

    // divide termwise by I_0(beta)
    template <typename K>
    Jet<K> divide(const Jet<K>& g)
    {
        Jet<K> r = g.empty_like();
        for (const auto& [key, c] : g.terms()) {
            const mkey f = key_exps(key);
            const C i0 = moments(f, 0)[0];
            if (scalar_near_zero(i0, 1e-9)) {
                const C b = fr_.beta(f);
                throw resonance_error(fr_.resonance_vector(key), key_weight(key), scalar_str(b),
                                      "averaged transport is singular: exp(beta) = 1 with beta = " + scalar_str(b) +
                                          " at degree " + std::to_string(key_weight(key)));
            }
            r.add_term(key, c * static_cast<K>(scalar_from_long<C>(1) / i0));
        }
        return r;
    }

private:
    const Frame<C>& fr_;
    std::map<mkey, std::vector<C>> cache_;
};

} // namespace detail

template <typename C>
Jet<C> averaged_transport(const Jet<C>& u, const Frame<C>& fr)
{
    detail::averager<C> av(fr);
    return fr.from_frame(av.apply(fr.to_frame(u)));
}

template <typename C>
Jet<C> averaged_transport(const Jet<C>& u, const Jet<C>& p0, const exp_model& model = {}, double tol = 1e-10)
{
    return averaged_transport(u, frame_of(p0, model, tol));
}

// Inverse of the averaged transport; throws resonance_error on a vanishing factor.
template <typename C>
Jet<C> solve_averaged(const Jet<C>& v, const Frame<C>& fr)
{
    detail::averager<C> av(fr);
    const Jet<C> g = fr.to_frame(v);
    Jet<C> u = av.divide(g);
    if (fr.has_nil) {
        for (int it = 0; it < 256; ++it) {
            const Jet<C> res = g - av.apply(u);
            bool done;
            if constexpr (scalar_traits<C>::is_exact)
                done = res.is_zero();
            else {
                double mx = 0.0;
                for (const auto& [k, c] : res.terms())
                    mx = std::max(mx, std::abs(c));
                done = mx <= 1e-15;
            }
            if (done)
                break;
            u += av.divide(res);
        }
    }
    return fr.from_frame(u);
}

template <typename C>
Jet<C> solve_averaged(const Jet<C>& v, const Jet<C>& p0, const exp_model& model = {}, double tol = 1e-10)
{
    return solve_averaged(v, frame_of(p0, model, tol));
}

// ---------------------------------------------------------------------------
// H_p0 u = v + r  and  H_p u = v + r
// ---------------------------------------------------------------------------

template <typename K>
struct ResonantSplit {
    Jet<K> u;
    Jet<K> r;
};

template <typename C, typename K>
ResonantSplit<K> solve_h_p0(const Jet<K>& v, const Frame<C>& fr)
{
    if (fr.has_nil)
        throw precondition_error("solve_h_p0: quadratic part is not diagonalizable");
    const Jet<K> g = fr.to_frame(v);
    Jet<K> u = g.empty_like(), r = g.empty_like();
    for (const auto& [key, c] : g.terms()) {
        const C b = fr.beta(key_exps(key));
        if (fr.beta_zero(b)) {
            const auto k = fr.resonance_vector(key);
            for (int x : k)
                if (x != 0)
                    throw resonance_error(k, key_weight(key), scalar_str(b),
                                          "small divisor vanishes for a non-resonant monomial at degree " +
                                              std::to_string(key_weight(key)));
            r.add_term(key, -c);
        }
        else
            u.add_term(key, c * static_cast<K>(scalar_from_long<C>(1) / b));
    }
    return {fr.from_frame(u), fr.from_frame(r)};
}

template <typename C>
ResonantSplit<C> solve_h_p0(const Jet<C>& v, const Jet<C>& p0, double tol = 1e-10)
{
    return solve_h_p0(v, frame_of(p0, {}, tol));
}

// Degree by degree: u_m from v_m - [H_{p - p0} u_{<m}]_m.
template <typename C>
ResonantSplit<C> solve_h_p(const Jet<C>& v, const Jet<C>& p, double tol = 1e-10)
{
    const Jet<C> p0 = quadratic_part(p);
    const Frame<C> fr = frame_of(p0, {}, tol);
    const Jet<C> tail = p.filtered([](mkey k) { return key_weight(k) >= 3; }).with_trunc(v.trunc() + 1);
    ResonantSplit<C> out{v.empty_like(), v.empty_like()};
    if (v.is_zero())
        return out;
    for (int m = v.min_weight(); m <= v.trunc(); ++m) {
        Jet<C> target = v.part(m);
        if (!out.u.is_zero() && !tail.is_zero())
            target -= poisson(tail, out.u.with_trunc(v.trunc() + 1)).with_trunc(v.trunc()).part(m);
        if (target.is_zero())
            continue;
        auto s = solve_h_p0(target, fr);
        out.u += s.u;
        out.r += s.r;
    }
    return out;
}

} // namespace fionf
