#pragma once

#include <random>

#include "fionf/jet.hpp"
#include "fionf/symlin.hpp"
#include "fionf/scalar.hpp"

namespace fionf::test {

inline std::mt19937& rng()
{
    static std::mt19937 g(20240601u);
    return g;
}

inline long rand_int(long lo, long hi) { return std::uniform_int_distribution<long>(lo, hi)(rng()); }

inline double rand_real(double lo = -1.0, double hi = 1.0) { return std::uniform_real_distribution<double>(lo, hi)(rng()); }

template <typename K>
K rand_coeff();

template <>
inline exact rand_coeff<exact>()
{
    long d = rand_int(1, 4);
    return exact(make_rational(rand_int(-5, 5), d));
}

template <>
inline cplx rand_coeff<cplx>()
{
    return {rand_real(), rand_real()};
}

// all monomials of rho-degree lo..hi (and h power up to hmax for h-jets), random coefficients
template <typename K>
Jet<K> rand_jet(const Jet<K>& shape, int lo, int hi, double density = 0.6, int hmax = 0)
{
    Jet<K> r = shape.empty_like();
    const int nr = shape.nrho();
    expvec e{};
    std::function<void(int, int)> rec = [&](int v, int left) {
        if (v == nr) {
            const int deg = [&] {
                int s = 0;
                for (int i = 0; i < nr; ++i)
                    s += e[static_cast<std::size_t>(i)];
                return s;
            }();
            if (deg < lo)
                return;
            for (int j = 0; j <= (shape.has_h() ? hmax : 0); ++j) {
                if (shape.has_h())
                    e[static_cast<std::size_t>(nr)] = j;
                const mkey k = shape.key(e);
                if (shape.admissible(k) && rand_real(0.0, 1.0) < density)
                    r.add_term(k, rand_coeff<K>());
            }
            if (shape.has_h())
                e[static_cast<std::size_t>(nr)] = 0;
            return;
        }
        for (int a = 0; a <= left; ++a) {
            e[static_cast<std::size_t>(v)] = a;
            rec(v + 1, left - a);
        }
        e[static_cast<std::size_t>(v)] = 0;
    };
    rec(0, hi);
    return r;
}

template <typename K>
double max_abs(const Jet<K>& a)
{
    double m = 0.0;
    for (const auto& [k, c] : a.terms())
        m = std::max(m, scalar_traits<K>::abs(c));
    return m;
}

// Hamiltonian B = -J S, S symmetric, scaled so exp(B) has eigenvalue
// arguments inside (-pi + margin, pi - margin) and no near-collisions.
inline Eigen::MatrixXd rand_hamiltonian(int n, double scale = 1.0)
{
    const Eigen::MatrixXd j = symplectic_j_real(n);
    for (;;) {
        Eigen::MatrixXd s(2 * n, 2 * n);
        for (int i = 0; i < 2 * n; ++i)
            for (int k = 0; k <= i; ++k)
                s(i, k) = s(k, i) = rand_real(-scale, scale);
        const Eigen::MatrixXd b = -j * s;
        const Eigen::VectorXcd ev = b.eigenvalues();
        bool good = true;
        for (int a = 0; a < ev.size() && good; ++a) {
            if (std::abs(ev(a).imag()) > std::numbers::pi - 0.3)
                good = false;
            for (int c = a + 1; c < ev.size() && good; ++c)
                if (std::abs(std::exp(ev(a)) - std::exp(ev(c))) < 1e-2)
                    good = false;
        }
        if (good)
            return b;
    }
}

} // namespace fionf::test
