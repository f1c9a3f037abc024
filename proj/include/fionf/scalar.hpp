#pragma once

// Coefficient fields used by every jet type in the library.
//
//   cplx      complex double, general spectra
//   gauss     exact Gaussian rationals a + i b, a, b in Q
//   exact     rational functions in one transcendental symbol tau with
//             Gaussian-rational coefficients; tau is interpreted by an
//             ExpModel (tau = e^delta or tau = log r)

#include <gmpxx.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <ostream>
#include <sstream>
#include <string>
#include <type_traits>
#include <utility>
#include <vector>

#include "fionf/errors.hpp"

namespace fionf {

using cplx = std::complex<double>;
using rational = mpq_class;

inline rational make_rational(long num, long den = 1)
{
    rational r(num, den);
    r.canonicalize();
    return r;
}

// ---------------------------------------------------------------------------
// Gaussian rationals
// ---------------------------------------------------------------------------

struct gauss {
    rational re{0};
    rational im{0};

    gauss() = default;
    gauss(int v) : re(v) {}
    gauss(long v) : re(v) {}
    gauss(rational r) : re(std::move(r)) {}
    gauss(rational r, rational i) : re(std::move(r)), im(std::move(i)) {}

    static gauss i() { return {rational(0), rational(1)}; }

    bool is_zero() const { return sgn(re) == 0 && sgn(im) == 0; }
    bool is_real() const { return sgn(im) == 0; }

    gauss conj() const { return {re, -im}; }
    rational norm2() const { return re * re + im * im; }

    gauss& operator+=(const gauss& o)
    {
        re += o.re;
        im += o.im;
        return *this;
    }
    gauss& operator-=(const gauss& o)
    {
        re -= o.re;
        im -= o.im;
        return *this;
    }
    gauss& operator*=(const gauss& o)
    {
        if (sgn(im) == 0 && sgn(o.im) == 0) {
            re *= o.re;
            return *this;
        }
        rational r = re * o.re - im * o.im;
        rational i = re * o.im + im * o.re;
        re = std::move(r);
        im = std::move(i);
        return *this;
    }
    gauss& operator/=(const gauss& o)
    {
        if (o.is_zero())
            throw precondition_error("division by zero (gauss)");
        if (sgn(o.im) == 0) {
            re /= o.re;
            im /= o.re;
            return *this;
        }
        rational d = o.norm2();
        rational r = (re * o.re + im * o.im) / d;
        rational i = (im * o.re - re * o.im) / d;
        re = std::move(r);
        im = std::move(i);
        return *this;
    }

    friend gauss operator+(gauss a, const gauss& b) { return a += b; }
    friend gauss operator-(gauss a, const gauss& b) { return a -= b; }
    friend gauss operator*(gauss a, const gauss& b) { return a *= b; }
    friend gauss operator/(gauss a, const gauss& b) { return a /= b; }
    friend gauss operator-(const gauss& a) { return {-a.re, -a.im}; }
    friend bool operator==(const gauss& a, const gauss& b) { return a.re == b.re && a.im == b.im; }
    friend bool operator!=(const gauss& a, const gauss& b) { return !(a == b); }

    cplx to_cplx() const { return {re.get_d(), im.get_d()}; }

    std::string str() const
    {
        std::ostringstream os;
        if (sgn(im) == 0)
            os << re;
        else if (sgn(re) == 0)
            os << im << "i";
        else
            os << "(" << re << (sgn(im) > 0 ? "+" : "") << im << "i)";
        return os.str();
    }
    friend std::ostream& operator<<(std::ostream& os, const gauss& g) { return os << g.str(); }
};

// ---------------------------------------------------------------------------
// Univariate polynomials over gauss (dense, low degree first)
// ---------------------------------------------------------------------------

class gpoly {
public:
    gpoly() = default;
    explicit gpoly(gauss c)
    {
        if (!c.is_zero())
            c_.push_back(std::move(c));
    }
    static gpoly monomial(int deg, gauss c = gauss(1))
    {
        gpoly p;
        if (c.is_zero())
            return p;
        p.c_.assign(static_cast<std::size_t>(deg) + 1, gauss{});
        p.c_.back() = std::move(c);
        return p;
    }

    int degree() const { return static_cast<int>(c_.size()) - 1; }
    bool is_zero() const { return c_.empty(); }
    const gauss& lead() const { return c_.back(); }
    gauss coeff(int k) const { return k >= 0 && k < static_cast<int>(c_.size()) ? c_[static_cast<std::size_t>(k)] : gauss{}; }
    const std::vector<gauss>& coeffs() const { return c_; }

    bool is_constant() const { return c_.size() <= 1; }
    gauss constant() const { return c_.empty() ? gauss{} : c_[0]; }

    int valuation() const
    {
        for (std::size_t k = 0; k < c_.size(); ++k)
            if (!c_[k].is_zero())
                return static_cast<int>(k);
        return 0;
    }
    bool is_monomial() const { return !c_.empty() && valuation() == degree(); }
    gpoly shifted_down(int v) const
    {
        gpoly r;
        r.c_.assign(c_.begin() + v, c_.end());
        return r;
    }

    gpoly& operator+=(const gpoly& o)
    {
        if (o.c_.size() > c_.size())
            c_.resize(o.c_.size());
        for (std::size_t k = 0; k < o.c_.size(); ++k)
            c_[k] += o.c_[k];
        trim();
        return *this;
    }
    gpoly& operator-=(const gpoly& o)
    {
        if (o.c_.size() > c_.size())
            c_.resize(o.c_.size());
        for (std::size_t k = 0; k < o.c_.size(); ++k)
            c_[k] -= o.c_[k];
        trim();
        return *this;
    }
    friend gpoly operator+(gpoly a, const gpoly& b) { return a += b; }
    friend gpoly operator-(gpoly a, const gpoly& b) { return a -= b; }
    friend gpoly operator-(gpoly a)
    {
        for (auto& c : a.c_)
            c = -c;
        return a;
    }
    friend gpoly operator*(const gpoly& a, const gpoly& b)
    {
        gpoly r;
        if (a.is_zero() || b.is_zero())
            return r;
        r.c_.assign(a.c_.size() + b.c_.size() - 1, gauss{});
        for (std::size_t i = 0; i < a.c_.size(); ++i) {
            if (a.c_[i].is_zero())
                continue;
            for (std::size_t j = 0; j < b.c_.size(); ++j)
                r.c_[i + j] += a.c_[i] * b.c_[j];
        }
        r.trim();
        return r;
    }
    gpoly scaled(const gauss& s) const
    {
        gpoly r;
        if (s.is_zero())
            return r;
        r.c_ = c_;
        for (auto& c : r.c_)
            c *= s;
        return r;
    }

    // Euclidean division: a = q b + r
    static void divmod(const gpoly& a, const gpoly& b, gpoly& q, gpoly& r)
    {
        if (b.is_zero())
            throw precondition_error("polynomial division by zero");
        q = gpoly{};
        r = a;
        if (a.degree() < b.degree())
            return;
        q.c_.assign(static_cast<std::size_t>(a.degree() - b.degree()) + 1, gauss{});
        const gauss inv_lead = gauss(1) / b.lead();
        while (!r.is_zero() && r.degree() >= b.degree()) {
            const int shift = r.degree() - b.degree();
            gauss f = r.lead() * inv_lead;
            for (int k = 0; k <= b.degree(); ++k)
                r.c_[static_cast<std::size_t>(k + shift)] -= f * b.c_[static_cast<std::size_t>(k)];
            q.c_[static_cast<std::size_t>(shift)] = std::move(f);
            r.c_.pop_back();
            r.trim();
        }
        q.trim();
    }

    gpoly monic() const
    {
        if (is_zero())
            return {};
        return scaled(gauss(1) / lead());
    }

    static gpoly gcd(gpoly a, gpoly b)
    {
        if (a.degree() < b.degree())
            std::swap(a, b);
        b = b.monic();
        while (!b.is_zero()) {
            if (b.is_constant())
                return gpoly(gauss(1));
            gpoly q, r;
            divmod(a, b, q, r);
            a = std::move(b);
            b = r.monic();
        }
        return a.monic();
    }

    friend bool operator==(const gpoly& a, const gpoly& b) { return a.c_ == b.c_; }

    cplx eval(cplx t) const
    {
        cplx acc = 0;
        for (auto it = c_.rbegin(); it != c_.rend(); ++it)
            acc = acc * t + it->to_cplx();
        return acc;
    }

    gpoly conj() const
    {
        gpoly r = *this;
        for (auto& c : r.c_)
            c = c.conj();
        return r;
    }

    std::string str(const char* var = "t") const
    {
        if (c_.empty())
            return "0";
        std::ostringstream os;
        bool first = true;
        for (int k = degree(); k >= 0; --k) {
            const gauss& c = c_[static_cast<std::size_t>(k)];
            if (c.is_zero())
                continue;
            if (!first)
                os << " + ";
            first = false;
            os << c.str();
            if (k > 0)
                os << "*" << var << (k > 1 ? "^" + std::to_string(k) : "");
        }
        return os.str();
    }

private:
    void trim()
    {
        while (!c_.empty() && c_.back().is_zero())
            c_.pop_back();
    }
    std::vector<gauss> c_;
};

// ---------------------------------------------------------------------------
// exact: reduced rational functions num/den in tau, den monic
// ---------------------------------------------------------------------------

class exact {
public:
    exact() = default;
    exact(int v) : num_(gauss(v)), den_(gauss(1)) {}
    exact(long v) : num_(gauss(v)), den_(gauss(1)) {}
    exact(rational r) : num_(gauss(std::move(r))), den_(gauss(1)) {}
    exact(gauss g) : num_(std::move(g)), den_(gauss(1)) {}
    exact(gpoly num, gpoly den) : num_(std::move(num)), den_(std::move(den)) { normalize(); }

    static exact tau() { return exact(gpoly::monomial(1), gpoly(gauss(1))); }
    static exact tau_pow(long k)
    {
        if (k >= 0)
            return exact(gpoly::monomial(static_cast<int>(k)), gpoly(gauss(1)));
        return exact(gpoly(gauss(1)), gpoly::monomial(static_cast<int>(-k)));
    }
    static exact i() { return exact(gauss::i()); }

    const gpoly& num() const { return num_; }
    const gpoly& den() const { return den_; }

    bool is_zero() const { return num_.is_zero(); }
    bool is_constant() const { return num_.is_constant() && den_.is_constant(); }
    gauss constant() const { return num_.constant(); } // valid when is_constant()
    bool is_real() const
    {
        for (const auto& c : num_.coeffs())
            if (!c.is_real())
                return false;
        for (const auto& c : den_.coeffs())
            if (!c.is_real())
                return false;
        return true;
    }

    exact conj() const
    {
        exact r;
        r.num_ = num_.conj();
        r.den_ = den_.conj();
        return r;
    }
    exact real_part() const
    {
        require_constant("real_part");
        return exact(gauss(num_.constant().re));
    }

    exact& operator+=(const exact& o)
    {
        if (fast(o)) {
            num_ = gpoly(num_.constant() + o.num_.constant());
            return *this;
        }
        if (den_ == o.den_) {
            num_ += o.num_;
            normalize();
        }
        else {
            add_fraction(o, 1);
        }
        return *this;
    }
    exact& operator-=(const exact& o)
    {
        if (fast(o)) {
            num_ = gpoly(num_.constant() - o.num_.constant());
            return *this;
        }
        if (den_ == o.den_) {
            num_ -= o.num_;
            normalize();
        }
        else {
            add_fraction(o, -1);
        }
        return *this;
    }
    exact& operator*=(const exact& o)
    {
        if (fast(o)) {
            num_ = gpoly(num_.constant() * o.num_.constant());
            return *this;
        }
        if (o.is_zero() || is_zero()) {
            *this = exact();
            return *this;
        }
        multiply_reduced(o.num_, o.den_);
        return *this;
    }
    exact& operator/=(const exact& o)
    {
        if (o.is_zero())
            throw precondition_error("division by zero (exact)");
        if (fast(o)) {
            num_ = gpoly(num_.constant() / o.num_.constant());
            return *this;
        }
        if (is_zero())
            return *this;
        multiply_reduced(o.den_, o.num_);
        return *this;
    }
    friend exact operator+(exact a, const exact& b) { return a += b; }
    friend exact operator-(exact a, const exact& b) { return a -= b; }
    friend exact operator*(exact a, const exact& b) { return a *= b; }
    friend exact operator/(exact a, const exact& b) { return a /= b; }
    friend exact operator-(exact a)
    {
        a.num_ = -a.num_;
        return a;
    }
    friend bool operator==(const exact& a, const exact& b) { return a.num_ == b.num_ && a.den_ == b.den_; }
    friend bool operator!=(const exact& a, const exact& b) { return !(a == b); }

    cplx eval(double tau_value) const { return num_.eval(tau_value) / den_.eval(tau_value); }

    std::string str() const
    {
        if (den_.is_constant())
            return num_.is_constant() ? num_.constant().str() : "(" + num_.str("tau") + ")";
        return "(" + num_.str("tau") + ")/(" + den_.str("tau") + ")";
    }
    friend std::ostream& operator<<(std::ostream& os, const exact& e) { return os << e.str(); }

private:
    static gpoly quotient(const gpoly& a, const gpoly& b)
    {
        gpoly q, r;
        gpoly::divmod(a, b, q, r);
        return q;
    }

    static gpoly gcd_or_one(const gpoly& a, const gpoly& b)
    {
        if (a.is_constant() || b.is_constant())
            return gpoly(gauss(1));
        return gpoly::gcd(a, b);
    }

    // both operands reduced: cancel across, the product is then reduced
    void multiply_reduced(const gpoly& on, const gpoly& od)
    {
        const gpoly g1 = gcd_or_one(num_, od), g2 = gcd_or_one(on, den_);
        gpoly a = num_, b = den_, c = on, d = od;
        if (g1.degree() > 0) {
            a = quotient(a, g1);
            d = quotient(d, g1);
        }
        if (g2.degree() > 0) {
            c = quotient(c, g2);
            b = quotient(b, g2);
        }
        num_ = a * c;
        den_ = b * d;
        normalize_lead();
    }

    // num/den +- o over lcm(den, o.den); a common factor can only divide gcd(den, o.den)
    void add_fraction(const exact& o, int sign)
    {
        const gpoly g = gcd_or_one(den_, o.den_);
        gpoly a = den_, b = o.den_;
        if (g.degree() > 0) {
            a = quotient(den_, g);
            b = quotient(o.den_, g);
        }
        num_ = num_ * b;
        if (sign > 0)
            num_ += o.num_ * a;
        else
            num_ -= o.num_ * a;
        den_ = den_ * b;
        if (num_.is_zero()) {
            den_ = gpoly(gauss(1));
            return;
        }
        if (g.degree() > 0) {
            const gpoly h = gpoly::gcd(num_, g);
            if (h.degree() > 0) {
                num_ = quotient(num_, h);
                den_ = quotient(den_, h);
            }
        }
        normalize_lead();
    }

    void normalize_lead()
    {
        const gauss l = den_.lead();
        if (!(l == gauss(1))) {
            const gauss inv = gauss(1) / l;
            num_ = num_.scaled(inv);
            den_ = den_.scaled(inv);
        }
    }

    bool fast(const exact& o) const { return num_.is_constant() && o.num_.is_constant() && den_.is_constant() && o.den_.is_constant(); }

    void require_constant(const char* what) const
    {
        if (!is_constant())
            throw precondition_error(std::string(what) + " needs a tau-free value");
    }

    void normalize()
    {
        if (num_.is_zero()) {
            den_ = gpoly(gauss(1));
            return;
        }
        if (!den_.is_constant() && den_.is_monomial()) {
            const int v = std::min(num_.valuation(), den_.degree());
            if (v > 0) {
                num_ = num_.shifted_down(v);
                den_ = den_.shifted_down(v);
            }
        }
        else if (!den_.is_constant()) {
            gpoly g = gpoly::gcd(num_, den_);
            if (g.degree() > 0) {
                gpoly q, r;
                gpoly::divmod(num_, g, q, r);
                num_ = std::move(q);
                gpoly::divmod(den_, g, q, r);
                den_ = std::move(q);
            }
        }
        const gauss l = den_.lead();
        if (!(l == gauss(1))) {
            const gauss inv = gauss(1) / l;
            num_ = num_.scaled(inv);
            den_ = den_.scaled(inv);
        }
    }

    gpoly num_;
    gpoly den_{gauss(1)};
};

// ---------------------------------------------------------------------------
// Uniform scalar interface
// ---------------------------------------------------------------------------

template <typename C>
struct scalar_traits;

template <>
struct scalar_traits<cplx> {
    static constexpr bool is_exact = false;
    static constexpr const char* name = "float";
    static bool is_zero(const cplx& c) { return c == cplx(0.0, 0.0); }
    static cplx conj(const cplx& c) { return std::conj(c); }
    static cplx i() { return {0.0, 1.0}; }
    static cplx from_rational(const rational& r) { return {r.get_d(), 0.0}; }
    static cplx to_cplx(const cplx& c, double = 0.0) { return c; }
    static double abs(const cplx& c) { return std::abs(c); }
    static bool is_real(const cplx& c, double tol) { return std::abs(c.imag()) <= tol; }
};

template <>
struct scalar_traits<gauss> {
    static constexpr bool is_exact = true;
    static constexpr const char* name = "gauss";
    static bool is_zero(const gauss& c) { return c.is_zero(); }
    static gauss conj(const gauss& c) { return c.conj(); }
    static gauss i() { return gauss::i(); }
    static gauss from_rational(const rational& r) { return gauss(r); }
    static cplx to_cplx(const gauss& c, double = 0.0) { return c.to_cplx(); }
    static double abs(const gauss& c) { return std::abs(c.to_cplx()); }
    static bool is_real(const gauss& c, double) { return c.is_real(); }
};

template <>
struct scalar_traits<exact> {
    static constexpr bool is_exact = true;
    static constexpr const char* name = "exact";
    static bool is_zero(const exact& c) { return c.is_zero(); }
    static exact conj(const exact& c) { return c.conj(); }
    static exact i() { return exact::i(); }
    static exact from_rational(const rational& r) { return exact(r); }
    static cplx to_cplx(const exact& c, double tau_value = 0.0) { return c.eval(tau_value); }
    static double abs(const exact& c, double tau_value = 0.0) { return std::abs(c.eval(tau_value)); }
    static bool is_real(const exact& c, double) { return c.is_real(); }
};

template <typename C>
inline bool is_zero(const C& c)
{
    return scalar_traits<C>::is_zero(c);
}

template <typename C>
inline C conj(const C& c)
{
    return scalar_traits<C>::conj(c);
}

template <typename C>
inline C scalar_from_long(long v)
{
    if constexpr (std::is_same_v<C, cplx>)
        return cplx(static_cast<double>(v), 0.0);
    else
        return C(v);
}

// Exact scalars compare exactly; floats within tol scaled by magnitude.
template <typename C>
inline bool scalar_near_zero(const C& c, double tol)
{
    if constexpr (scalar_traits<C>::is_exact)
        return is_zero(c);
    else
        return std::abs(c) <= tol;
}

template <typename C>
inline std::string scalar_str(const C& c)
{
    if constexpr (scalar_traits<C>::is_exact)
        return c.str();
    else {
        std::ostringstream os;
        os.precision(17);
        os << c.real() << (c.imag() < 0 ? "-" : "+") << std::abs(c.imag()) << "i";
        return os.str();
    }
}

} // namespace fionf
