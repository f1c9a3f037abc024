#pragma once

// Interpretation of the transcendental tau in the exact field.
//
//   none       tau unused; only e^0 = 1 is representable
//   exp_base   tau = e^delta (delta rational); e^(c delta) = tau^c, c integer
//   log_base   tau = log r (r rational > 0); e^(c tau) = r^c, c integer

#include <cmath>
#include <optional>
#include <string>

#include "fionf/errors.hpp"
#include "fionf/scalar.hpp"

namespace fionf {

class exp_model {
public:
    enum class kind { none, exp_base, log_base };

    exp_model() = default;
    static exp_model exp_base(rational delta)
    {
        if (sgn(delta) == 0)
            throw precondition_error("exp_base model needs delta != 0");
        exp_model m;
        m.k_ = kind::exp_base;
        m.param_ = std::move(delta);
        return m;
    }
    static exp_model log_base(rational r)
    {
        if (sgn(r) <= 0 || r == 1)
            throw precondition_error("log_base model needs r > 0, r != 1");
        exp_model m;
        m.k_ = kind::log_base;
        m.param_ = std::move(r);
        return m;
    }

    kind type() const { return k_; }
    const rational& param() const { return param_; }

    std::string name() const
    {
        switch (k_) {
        case kind::exp_base: return "exp_base";
        case kind::log_base: return "log_base";
        default: return "none";
        }
    }

    double tau_value() const
    {
        switch (k_) {
        case kind::exp_base: return std::exp(param_.get_d());
        case kind::log_base: return std::log(param_.get_d());
        default: return 0.0;
        }
    }

    // e^lambda inside the field, if representable.
    std::optional<exact> try_exp(const exact& lambda) const
    {
        if (lambda.is_zero())
            return exact(1);
        if (k_ == kind::exp_base) {
            if (!lambda.is_constant())
                return std::nullopt;
            const gauss g = lambda.constant();
            if (!g.is_real())
                return std::nullopt;
            rational c = g.re / param_;
            c.canonicalize();
            if (c.get_den() != 1)
                return std::nullopt;
            return exact::tau_pow(c.get_num().get_si());
        }
        if (k_ == kind::log_base) {
            if (!lambda.den().is_constant() || lambda.num().degree() != 1 || !lambda.num().coeff(0).is_zero())
                return std::nullopt;
            const gauss g = lambda.num().coeff(1) / lambda.den().constant();
            if (!g.is_real())
                return std::nullopt;
            rational c = g.re;
            if (c.get_den() != 1)
                return std::nullopt;
            long e = c.get_num().get_si();
            mpz_class num, den;
            mpz_pow_ui(num.get_mpz_t(), param_.get_num().get_mpz_t(), static_cast<unsigned long>(std::labs(e)));
            mpz_pow_ui(den.get_mpz_t(), param_.get_den().get_mpz_t(), static_cast<unsigned long>(std::labs(e)));
            rational v = e >= 0 ? rational(num, den) : rational(den, num);
            v.canonicalize();
            return exact(v);
        }
        return std::nullopt;
    }

    exact exp(const exact& lambda) const
    {
        auto v = try_exp(lambda);
        if (!v)
            throw not_representable_error("e^(" + lambda.str() + ") is not representable in the exact field (model " + name() +
                                          "); use the float field");
        return *v;
    }

    // log a inside the field, if a is a model exponential.
    std::optional<exact> try_log(const exact& a) const
    {
        if (a == exact(1))
            return exact(0);
        if (k_ == kind::exp_base) {
            if (!a.den().is_constant() && a.num().is_constant()) {
                // a = c / tau^k
                if (!a.den().is_monomial() || !(a.num().constant() == gauss(1)))
                    return std::nullopt;
                return exact(rational(-a.den().degree()) * param_);
            }
            if (a.den().is_constant() && a.num().is_monomial() && a.num().lead() == gauss(1))
                return exact(rational(a.num().degree()) * param_);
            return std::nullopt;
        }
        if (k_ == kind::log_base) {
            if (!a.is_constant() || !a.constant().is_real())
                return std::nullopt;
            rational v = a.constant().re;
            if (sgn(v) <= 0)
                return std::nullopt;
            // v = r^e for small |e|
            for (long e = 1; e <= 64; ++e) {
                for (long s : {e, -e}) {
                    auto p = try_exp(exact(rational(s)) * exact::tau());
                    if (p && *p == a)
                        return exact(rational(s)) * exact::tau();
                }
            }
            return std::nullopt;
        }
        return std::nullopt;
    }

private:
    kind k_ = kind::none;
    rational param_{0};
};

// Uniform exponential for the two field instantiations.
inline cplx field_exp(const cplx& z, const exp_model&) { return std::exp(z); }
inline exact field_exp(const exact& z, const exp_model& m) { return m.exp(z); }

} // namespace fionf
