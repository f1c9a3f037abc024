#pragma once

// Truncated polynomial jets in phase-space variables (x_1..x_n, xi_1..xi_n),
// optionally with a trailing semiclassical variable h of weight 2.
//
// Truncation is by weighted total degree: a monomial rho^g h^j has weight
// |g| + 2j and is kept iff weight <= trunc and j <= htrunc.

#include <algorithm>
#include <functional>
#include <initializer_list>
#include <map>
#include <sstream>
#include <string>
#include <unordered_map>
#include <vector>

#include "fionf/errors.hpp"
#include "fionf/matrix.hpp"
#include "fionf/monomial.hpp"
#include "fionf/scalar.hpp"

namespace fionf {

template <typename K>
struct ring_traits {
    static K from_int(long v) { return K(v); }
    static bool zero(const K& x) { return is_zero(x); }
};

template <>
struct ring_traits<cplx> {
    static cplx from_int(long v) { return {static_cast<double>(v), 0.0}; }
    static bool zero(const cplx& x) { return x == cplx(0.0, 0.0); }
};

template <typename K>
class Jet {
public:
    using coeff_type = K;
    using map_type = std::map<mkey, K>;

    Jet() = default;
    Jet(int nv, int trunc, bool has_h = false, int htrunc = max_exponent)
        : nv_(nv), trunc_(trunc), htrunc_(has_h ? htrunc : 0), has_h_(has_h)
    {
        if (nv < 1 || nv > max_vars)
            throw precondition_error("jet supports 1.." + std::to_string(max_vars) + " variables");
        if (trunc < 0 || trunc > 255)
            throw precondition_error("jet truncation out of range");
    }

    // phase-space jet in n degrees of freedom
    static Jet phase(int n, int trunc) { return Jet(2 * n, trunc); }
    // semiclassical jet in n degrees of freedom
    static Jet semiclassical(int n, int trunc, int htrunc) { return Jet(2 * n + 1, trunc, true, htrunc); }

    static Jet variable(const Jet& shape, int v, const K& c = ring_traits<K>::from_int(1))
    {
        Jet j = shape.empty_like();
        j.add_term(shape.unit(v), c);
        return j;
    }
    static Jet constant(const Jet& shape, const K& c)
    {
        Jet j = shape.empty_like();
        j.add_term(0, c);
        return j;
    }

    int nv() const { return nv_; }
    int nrho() const { return has_h_ ? nv_ - 1 : nv_; }
    int n_dof() const { return nrho() / 2; }
    bool has_h() const { return has_h_; }
    int hvar() const { return nv_ - 1; }
    int trunc() const { return trunc_; }
    int htrunc() const { return htrunc_; }

    int var_weight(int v) const { return has_h_ && v == nv_ - 1 ? 2 : 1; }
    std::array<int, max_vars> weights() const
    {
        std::array<int, max_vars> w{};
        for (int v = 0; v < nv_; ++v)
            w[static_cast<std::size_t>(v)] = var_weight(v);
        return w;
    }
    mkey unit(int v) const { return unit_key(v, var_weight(v)); }
    mkey key(const expvec& e) const { return pack(e, weights()); }
    mkey key(std::initializer_list<int> e) const
    {
        expvec x{};
        int v = 0;
        for (int a : e)
            x[static_cast<std::size_t>(v++)] = a;
        return key(x);
    }
    int hpow(mkey k) const { return has_h_ ? key_exp(k, nv_ - 1) : 0; }
    // rho-degree of a key
    int rho_degree(mkey k) const { return key_weight(k) - 2 * hpow(k); }

    bool admissible(mkey k) const { return key_weight(k) <= trunc_ && (!has_h_ || key_exp(k, nv_ - 1) <= htrunc_); }

    Jet empty_like() const
    {
        Jet j;
        j.nv_ = nv_;
        j.trunc_ = trunc_;
        j.htrunc_ = htrunc_;
        j.has_h_ = has_h_;
        return j;
    }
    Jet with_trunc(int trunc, int htrunc = -1) const
    {
        Jet j = empty_like();
        j.trunc_ = trunc;
        if (htrunc >= 0 && has_h_)
            j.htrunc_ = htrunc;
        for (const auto& [k, c] : t_)
            if (j.admissible(k))
                j.t_.emplace(k, c);
        return j;
    }

    const map_type& terms() const { return t_; }
    bool is_zero() const { return t_.empty(); }
    std::size_t size() const { return t_.size(); }

    K coeff(mkey k) const
    {
        auto it = t_.find(k);
        return it == t_.end() ? K{} : it->second;
    }
    K coeff(std::initializer_list<int> e) const { return coeff(key(e)); }

    void add_term(mkey k, const K& c)
    {
        if (!admissible(k) || ring_traits<K>::zero(c))
            return;
        auto [it, fresh] = t_.emplace(k, c);
        if (!fresh) {
            it->second += c;
            if (ring_traits<K>::zero(it->second))
                t_.erase(it);
        }
    }
    void add_term(std::initializer_list<int> e, const K& c) { add_term(key(e), c); }

    // raw accumulation without zero checks; call prune() afterwards
    void accumulate(mkey k, const K& c) { t_[k] += c; }
    void prune()
    {
        for (auto it = t_.begin(); it != t_.end();)
            it = ring_traits<K>::zero(it->second) ? t_.erase(it) : std::next(it);
    }
    void erase(mkey k) { t_.erase(k); }

    int min_weight() const { return t_.empty() ? -1 : key_weight(t_.begin()->first); }
    int max_weight() const { return t_.empty() ? -1 : key_weight(t_.rbegin()->first); }

    // part of exact weight w
    Jet part(int w) const
    {
        Jet j = empty_like();
        for (const auto& [k, c] : t_)
            if (key_weight(k) == w)
                j.t_.emplace(k, c);
        return j;
    }
    Jet parts(int lo, int hi) const
    {
        Jet j = empty_like();
        for (const auto& [k, c] : t_)
            if (key_weight(k) >= lo && key_weight(k) <= hi)
                j.t_.emplace(k, c);
        return j;
    }
    Jet filtered(const std::function<bool(mkey)>& keep) const
    {
        Jet j = empty_like();
        for (const auto& [k, c] : t_)
            if (keep(k))
                j.t_.emplace(k, c);
        return j;
    }

    template <typename F>
    auto map_coeffs(F f) const -> Jet<decltype(f(std::declval<const K&>()))>
    {
        using R = decltype(f(std::declval<const K&>()));
        Jet<R> j(nv_, trunc_, has_h_, has_h_ ? htrunc_ : max_exponent);
        for (const auto& [k, c] : t_)
            j.add_term(k, f(c));
        return j;
    }

    Jet& operator+=(const Jet& o)
    {
        check_shape(o);
        clamp_to(o);
        for (const auto& [k, c] : o.t_)
            add_term(k, c);
        return *this;
    }
    Jet& operator-=(const Jet& o)
    {
        check_shape(o);
        clamp_to(o);
        for (const auto& [k, c] : o.t_)
            add_term(k, -c);
        return *this;
    }
    friend Jet operator+(Jet a, const Jet& b) { return a += b; }
    friend Jet operator-(Jet a, const Jet& b) { return a -= b; }
    friend Jet operator-(Jet a)
    {
        for (auto& [k, c] : a.t_)
            c = -c;
        return a;
    }

    template <typename S>
    Jet scaled(const S& s) const
    {
        Jet j = empty_like();
        for (const auto& [k, c] : t_)
            j.add_term(k, c * static_cast<K>(s));
        return j;
    }

    friend Jet operator*(const Jet& a, const Jet& b)
    {
        a.check_shape(b);
        Jet r = a.empty_like();
        r.trunc_ = std::min(a.trunc_, b.trunc_);
        r.htrunc_ = std::min(a.htrunc_, b.htrunc_);
        const int hv = a.nv_ - 1;
        for (const auto& [ka, ca] : a.t_) {
            const int wa = key_weight(ka);
            if (wa > r.trunc_)
                break;
            for (const auto& [kb, cb] : b.t_) {
                if (wa + key_weight(kb) > r.trunc_)
                    break;
                const mkey k = ka + kb;
                if (r.has_h_ && key_exp(k, hv) > r.htrunc_)
                    continue;
                r.accumulate(k, ca * cb);
            }
        }
        r.prune();
        return r;
    }

    // multiply by the monomial with key m
    Jet shifted(mkey m) const
    {
        Jet j = empty_like();
        for (const auto& [k, c] : t_)
            if (j.admissible(k + m))
                j.t_.emplace(k + m, c);
        return j;
    }

    Jet derivative(int v) const
    {
        Jet j = empty_like();
        const mkey u = unit(v);
        for (const auto& [k, c] : t_) {
            const int e = key_exp(k, v);
            if (e == 0)
                continue;
            j.t_.emplace(k - u, c * ring_traits<K>::from_int(e));
        }
        return j;
    }

    // drop h: the coefficient of h^j as a jet without h
    Jet layer(int j) const
    {
        if (!has_h_)
            return j == 0 ? *this : empty_like();
        Jet r(nv_ - 1, std::max(0, trunc_ - 2 * j));
        for (const auto& [k, c] : t_)
            if (key_exp(k, nv_ - 1) == j) {
                const mkey kk = key_exps(k) - (mkey(j) << key_shift(nv_ - 1));
                r.t_.emplace(kk | (mkey(key_weight(k) - 2 * j) << 56), c);
            }
        return r;
    }

    // embed a jet without h as the coefficient of h^j
    void add_layer(int j, const Jet& a)
    {
        if (!has_h_ || a.nv_ != nv_ - 1)
            throw precondition_error("add_layer: shape mismatch");
        const mkey hk = mkey(j) * unit(nv_ - 1);
        for (const auto& [k, c] : a.t_)
            add_term(k + hk, c);
    }

    friend bool operator==(const Jet& a, const Jet& b) { return a.nv_ == b.nv_ && a.t_ == b.t_; }
    friend bool operator!=(const Jet& a, const Jet& b) { return !(a == b); }

    void check_shape(const Jet& o) const
    {
        if (nv_ != o.nv_ || has_h_ != o.has_h_)
            throw precondition_error("jet shape mismatch (" + std::to_string(nv_) + " vs " + std::to_string(o.nv_) +
                                     " variables)");
    }

    std::string str() const
    {
        if (t_.empty())
            return "0";
        std::ostringstream os;
        bool first = true;
        for (const auto& [k, c] : t_) {
            os << (first ? "" : " + ") << c;
            first = false;
            for (int v = 0; v < nv_; ++v) {
                const int e = key_exp(k, v);
                if (e == 0)
                    continue;
                os << "*" << var_name(v) << (e > 1 ? "^" + std::to_string(e) : "");
            }
        }
        return os.str();
    }

    std::string var_name(int v) const
    {
        if (has_h_ && v == nv_ - 1)
            return "h";
        const int n = nrho() / 2;
        if (nrho() % 2 != 0 || n == 0)
            return "t" + std::to_string(v + 1);
        return (v < n ? "x" : "xi") + std::to_string((v % n) + 1);
    }

private:
    void clamp_to(const Jet& o)
    {
        if (o.trunc_ < trunc_ || (has_h_ && o.htrunc_ < htrunc_)) {
            trunc_ = std::min(trunc_, o.trunc_);
            htrunc_ = std::min(htrunc_, o.htrunc_);
            for (auto it = t_.begin(); it != t_.end();)
                it = admissible(it->first) ? std::next(it) : t_.erase(it);
        }
    }

    template <typename>
    friend class Jet;

    int nv_ = 2;
    int trunc_ = 0;
    int htrunc_ = 0;
    bool has_h_ = false;
    map_type t_;
};

using fjet = Jet<cplx>;
using xjet = Jet<exact>;

template <typename K, typename C>
Jet<K> lift(const Jet<C>& a)
{
    return a.map_coeffs([](const C& c) { return K(c); });
}

// ---------------------------------------------------------------------------
// Poisson structures
// ---------------------------------------------------------------------------

// Constant bivector sum_{k,l} pi_kl d_k (x) d_l on the rho variables.
template <typename C>
struct Pairing {
    struct entry {
        int k;
        int l;
        C c;
    };
    int nrho = 0;
    std::vector<entry> entries;

    // {a,b} = sum_j d_xi a d_x b - d_x a d_xi b
    static Pairing canonical(int n)
    {
        Pairing p;
        p.nrho = 2 * n;
        for (int j = 0; j < n; ++j) {
            p.entries.push_back({n + j, j, C(1)});
            p.entries.push_back({j, n + j, C(-1)});
        }
        return p;
    }

    // bivector in coordinates y = T rho: pi_y = T pi T^t
    static Pairing transformed(const Matrix<C>& t, int n)
    {
        Pairing base = canonical(n);
        Matrix<C> pi(2 * n, 2 * n);
        for (const auto& e : base.entries)
            pi(e.k, e.l) = e.c;
        Matrix<C> py = t * pi * t.transpose();
        Pairing p;
        p.nrho = 2 * n;
        for (int k = 0; k < 2 * n; ++k)
            for (int l = 0; l < 2 * n; ++l)
                if (!is_zero(py(k, l)))
                    p.entries.push_back({k, l, py(k, l)});
        return p;
    }

    Matrix<C> matrix() const
    {
        Matrix<C> m(nrho, nrho);
        for (const auto& e : entries)
            m(e.k, e.l) = e.c;
        return m;
    }
};

// {a,b} under the bivector pi
template <typename K, typename C>
Jet<K> bracket(const Jet<K>& a, const Jet<K>& b, const Pairing<C>& pi)
{
    a.check_shape(b);
    Jet<K> r = a.empty_like();
    if (a.is_zero() || b.is_zero())
        return r.with_trunc(std::min(a.trunc(), b.trunc()));
    std::vector<Jet<K>> da(static_cast<std::size_t>(a.nrho())), db(static_cast<std::size_t>(a.nrho()));
    std::vector<bool> ha(da.size(), false), hb(db.size(), false);
    for (const auto& e : pi.entries) {
        auto& xa = da[static_cast<std::size_t>(e.k)];
        auto& xb = db[static_cast<std::size_t>(e.l)];
        if (!ha[static_cast<std::size_t>(e.k)]) {
            xa = a.derivative(e.k);
            ha[static_cast<std::size_t>(e.k)] = true;
        }
        if (!hb[static_cast<std::size_t>(e.l)]) {
            xb = b.derivative(e.l);
            hb[static_cast<std::size_t>(e.l)] = true;
        }
        if (xa.is_zero() || xb.is_zero())
            continue;
        r += (xa * xb).scaled(e.c);
    }
    return r.with_trunc(std::min(a.trunc(), b.trunc()));
}

template <typename K>
Jet<K> poisson(const Jet<K>& a, const Jet<K>& b)
{
    return bracket(a, b, Pairing<long>::canonical(a.n_dof()));
}

// ---------------------------------------------------------------------------
// Map jets
// ---------------------------------------------------------------------------

// Images of the rho coordinates; each component is a jet in the same variables.
template <typename K>
struct MapJet {
    std::vector<Jet<K>> comp;

    int nrho() const { return static_cast<int>(comp.size()); }
    int n_dof() const { return nrho() / 2; }
    int trunc() const
    {
        int t = 255;
        for (const auto& c : comp)
            t = std::min(t, c.trunc());
        return comp.empty() ? 0 : t;
    }

    static MapJet identity(const Jet<K>& shape)
    {
        MapJet m;
        for (int v = 0; v < shape.nrho(); ++v)
            m.comp.push_back(Jet<K>::variable(shape, v));
        return m;
    }
    static MapJet identity(int n, int trunc) { return identity(Jet<K>::phase(n, trunc)); }

    // rho -> M rho
    static MapJet linear(const Matrix<K>& m, const Jet<K>& shape)
    {
        MapJet r;
        for (int i = 0; i < m.rows(); ++i) {
            Jet<K> c = shape.empty_like();
            for (int j = 0; j < m.cols(); ++j)
                c.add_term(shape.unit(j), m(i, j));
            r.comp.push_back(std::move(c));
        }
        return r;
    }

    Matrix<K> linear_part() const
    {
        Matrix<K> m(nrho(), nrho());
        for (int i = 0; i < nrho(); ++i)
            for (int j = 0; j < nrho(); ++j)
                m(i, j) = comp[static_cast<std::size_t>(i)].coeff(comp[static_cast<std::size_t>(i)].unit(j));
        return m;
    }

    MapJet with_trunc(int t) const
    {
        MapJet r;
        for (const auto& c : comp)
            r.comp.push_back(c.with_trunc(t));
        return r;
    }

    friend MapJet operator-(const MapJet& a, const MapJet& b)
    {
        MapJet r;
        for (std::size_t i = 0; i < a.comp.size(); ++i)
            r.comp.push_back(a.comp[i] - b.comp[i]);
        return r;
    }
    friend bool operator==(const MapJet& a, const MapJet& b) { return a.comp == b.comp; }

    bool is_zero() const
    {
        for (const auto& c : comp)
            if (!c.is_zero())
                return false;
        return true;
    }
    // lowest weight present in any component, -1 if all zero
    int min_weight() const
    {
        int w = -1;
        for (const auto& c : comp)
            if (!c.is_zero())
                w = w < 0 ? c.min_weight() : std::min(w, c.min_weight());
        return w;
    }
};

using fmap = MapJet<cplx>;
using xmap = MapJet<exact>;

// a o m: substitute the rho variables of a by the components of m; h passes through.
// The components of m must vanish at 0 and share the variable layout of a.
template <typename K>
Jet<K> compose(const Jet<K>& a, const std::vector<Jet<K>>& m)
{
    if (static_cast<int>(m.size()) != a.nrho())
        throw precondition_error("compose: map has " + std::to_string(m.size()) + " components, jet has " +
                                 std::to_string(a.nrho()) + " phase variables");
    for (const auto& c : m) {
        a.check_shape(c);
        if (!ring_traits<K>::zero(c.coeff(0)))
            throw precondition_error("compose: map must fix the origin");
    }
    Jet<K> r = a.empty_like();
    const int nr = a.nrho();
    const mkey rho_mask = [&] {
        mkey mask = 0;
        for (int v = 0; v < nr; ++v)
            mask |= mkey(0xFF) << key_shift(v);
        return mask;
    }();
    std::unordered_map<mkey, Jet<K>> memo;
    memo.emplace(0, Jet<K>::constant(a, ring_traits<K>::from_int(1)));
    std::function<const Jet<K>&(mkey)> power = [&](mkey ek) -> const Jet<K>& {
        auto it = memo.find(ek);
        if (it != memo.end())
            return it->second;
        int last = nr - 1;
        while (((ek >> key_shift(last)) & 0xFF) == 0)
            --last;
        const mkey prev = ek - (mkey(1) << key_shift(last));
        Jet<K> p = power(prev) * m[static_cast<std::size_t>(last)];
        return memo.emplace(ek, std::move(p)).first->second;
    };
    for (const auto& [k, c] : a.terms()) {
        const mkey ek = k & rho_mask;
        const int hp = a.hpow(k);
        const Jet<K>& p = power(ek);
        const mkey hk = hp ? mkey(hp) * a.unit(a.hvar()) : 0;
        for (const auto& [pk, pc] : p.terms())
            if (r.admissible(pk + hk))
                r.accumulate(pk + hk, pc * c);
    }
    r.prune();
    return r;
}

template <typename K>
Jet<K> compose(const Jet<K>& a, const MapJet<K>& m)
{
    if (!a.has_h() || (!m.comp.empty() && m.comp[0].has_h()))
        return compose(a, m.comp);
    // semiclassical jet composed with a classical map: lift the map
    std::vector<Jet<K>> lifted;
    for (const auto& c : m.comp) {
        Jet<K> l = a.empty_like();
        for (const auto& [k, v] : c.terms())
            l.add_term(k, v);
        lifted.push_back(std::move(l));
    }
    return compose(a, lifted);
}

template <typename K>
MapJet<K> compose(const MapJet<K>& a, const MapJet<K>& b)
{
    MapJet<K> r;
    for (const auto& c : a.comp)
        r.comp.push_back(compose(c, b));
    return r;
}

// Inverse of a map jet with invertible linear part, by degreewise
// back-substitution: G = L^-1 (rho - (m - L rho) o G).
template <typename K>
MapJet<K> inverse(const MapJet<K>& m)
{
    const Matrix<K> lin = m.linear_part();
    const Matrix<K> linv = lin.inverse();
    const Jet<K>& shape = m.comp.at(0);
    MapJet<K> nl;
    for (int i = 0; i < m.nrho(); ++i) {
        Jet<K> c = m.comp[static_cast<std::size_t>(i)];
        for (int j = 0; j < m.nrho(); ++j)
            c.erase(c.unit(j));
        nl.comp.push_back(std::move(c));
    }
    MapJet<K> g = MapJet<K>::linear(linv, shape);
    const MapJet<K> id = MapJet<K>::identity(shape);
    for (int it = 1; it < m.trunc(); ++it) {
        MapJet<K> rhs = id - compose(nl, g);
        MapJet<K> next;
        for (int i = 0; i < m.nrho(); ++i) {
            Jet<K> c = shape.empty_like();
            for (int j = 0; j < m.nrho(); ++j)
                if (!ring_traits<K>::zero(linv(i, j)))
                    c += rhs.comp[static_cast<std::size_t>(j)].scaled(linv(i, j));
            next.comp.push_back(std::move(c));
        }
        g = std::move(next);
    }
    return g;
}

// Jacobian identity D^t J D = J up to the map's truncation minus one.
template <typename K>
MapJet<K> symplectic_defect(const MapJet<K>& m)
{
    const int nr = m.nrho();
    const int n = nr / 2;
    MapJet<K> defect;
    for (int a = 0; a < nr; ++a)
        for (int b = 0; b < nr; ++b) {
            // sigma(d_a m, d_b m) = sum_j d_a xi_j d_b x_j - d_a x_j d_b xi_j
            Jet<K> s = m.comp[0].empty_like().with_trunc(std::max(0, m.trunc() - 1));
            for (int j = 0; j < n; ++j) {
                const auto& xj = m.comp[static_cast<std::size_t>(j)];
                const auto& ej = m.comp[static_cast<std::size_t>(n + j)];
                s += ej.derivative(a) * xj.derivative(b) - xj.derivative(a) * ej.derivative(b);
            }
            const long target = (a >= n && b == a - n) ? 1 : (b >= n && a == b - n) ? -1 : 0;
            if (target != 0)
                s.add_term(0, ring_traits<K>::from_int(-target));
            defect.comp.push_back(s.with_trunc(std::max(0, m.trunc() - 1)));
        }
    return defect;
}

} // namespace fionf
