#pragma once

// Exponential polynomials in a time variable t:
//   sum_i c_i t^(j_i) exp(beta(f_i) t)
// where the frequency f is a packed monomial key (weight byte cleared) and
// beta(f) = sum_v f_v lam_v is resolved against a spectrum. Products add
// frequencies, so beta is additive without being stored.

#include <map>
#include <utility>

#include "fionf/monomial.hpp"
#include "fionf/scalar.hpp"

namespace fionf {

template <typename C>
class ExpPoly {
public:
    using index = std::pair<mkey, int>; // (frequency, power of t)
    using map_type = std::map<index, C>;

    ExpPoly() = default;
    ExpPoly(const C& c)
    {
        if (!is_zero(c))
            t_.emplace(index{0, 0}, c);
    }
    ExpPoly(long v) : ExpPoly(scalar_from_long<C>(v)) {}
    ExpPoly(int v) : ExpPoly(static_cast<long>(v)) {}

    static ExpPoly term(mkey freq, int j, const C& c)
    {
        ExpPoly e;
        if (!is_zero(c))
            e.t_.emplace(index{freq, j}, c);
        return e;
    }

    const map_type& terms() const { return t_; }
    bool empty() const { return t_.empty(); }

    bool is_constant() const { return t_.empty() || (t_.size() == 1 && t_.begin()->first == index{0, 0}); }
    C constant() const { return t_.empty() ? scalar_from_long<C>(0) : t_.begin()->second; }

    void add(const index& ix, const C& c)
    {
        if (is_zero(c))
            return;
        auto [it, fresh] = t_.emplace(ix, c);
        if (!fresh) {
            it->second += c;
            if (is_zero(it->second))
                t_.erase(it);
        }
    }

    ExpPoly& operator+=(const ExpPoly& o)
    {
        for (const auto& [ix, c] : o.t_)
            add(ix, c);
        return *this;
    }
    ExpPoly& operator-=(const ExpPoly& o)
    {
        for (const auto& [ix, c] : o.t_)
            add(ix, -c);
        return *this;
    }
    friend ExpPoly operator+(ExpPoly a, const ExpPoly& b) { return a += b; }
    friend ExpPoly operator-(ExpPoly a, const ExpPoly& b) { return a -= b; }
    friend ExpPoly operator-(ExpPoly a)
    {
        for (auto& [ix, c] : a.t_)
            c = -c;
        return a;
    }

    friend ExpPoly operator*(const ExpPoly& a, const ExpPoly& b)
    {
        if (a.t_.empty() || b.t_.empty())
            return {};
        if (b.is_constant())
            return a.times(b.constant());
        if (a.is_constant())
            return b.times(a.constant());
        ExpPoly r;
        for (const auto& [ia, ca] : a.t_)
            for (const auto& [ib, cb] : b.t_)
                r.add(index{ia.first + ib.first, ia.second + ib.second}, ca * cb);
        return r;
    }

    ExpPoly times(const C& s) const
    {
        ExpPoly r;
        if (is_zero(s))
            return r;
        for (const auto& [ix, c] : t_) {
            C v = c * s;
            if (!is_zero(v))
                r.t_.emplace(ix, std::move(v));
        }
        return r;
    }

    friend bool operator==(const ExpPoly& a, const ExpPoly& b) { return a.t_ == b.t_; }

private:
    map_type t_;
};

template <typename C>
bool is_zero(const ExpPoly<C>& e)
{
    return e.empty();
}

template <typename C>
std::ostream& operator<<(std::ostream& os, const ExpPoly<C>& e)
{
    os << "{";
    bool first = true;
    for (const auto& [ix, c] : e.terms()) {
        os << (first ? "" : " + ") << c << "*t^" << ix.second << "*E[" << std::hex << ix.first << std::dec << "]";
        first = false;
    }
    return os << "}";
}

} // namespace fionf
