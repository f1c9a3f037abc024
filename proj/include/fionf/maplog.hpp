#pragma once

// Logarithm of a symplectic map germ: p with exp H_p = kappa up to truncation.

#include <cmath>
#include <string>
#include <vector>

#include "fionf/errors.hpp"
#include "fionf/frame.hpp"
#include "fionf/homology.hpp"
#include "fionf/jet.hpp"
#include "fionf/symlin.hpp"
#include "fionf/transport.hpp"

namespace fionf {

// exact: 0 when zero, 1 otherwise; float: max |c|
template <typename K>
double jet_norm(const Jet<K>& a)
{
    if constexpr (scalar_traits<K>::is_exact)
        return a.is_zero() ? 0.0 : 1.0;
    else {
        double m = 0.0;
        for (const auto& [k, c] : a.terms())
            m = std::max(m, std::abs(c));
        return m;
    }
}

template <typename K>
double map_norm(const MapJet<K>& m, int weight = -1)
{
    double r = 0.0;
    for (const auto& c : m.comp)
        r = std::max(r, jet_norm(weight < 0 ? c : c.part(weight)));
    return r;
}

template <typename K>
Jet<K> real_part(const Jet<K>& a)
{
    if constexpr (scalar_traits<K>::is_exact)
        return a.map_coeffs([](const K& c) { return K(gauss(c.is_constant() ? c.constant().re : rational(0))); });
    else
        return a.map_coeffs([](const K& c) { return K(c.real(), 0.0); });
}

template <typename K>
bool jet_is_real(const Jet<K>& a, double tol = 1e-12)
{
    for (const auto& [k, c] : a.terms())
        if (!scalar_traits<K>::is_real(c, tol))
            return false;
    return true;
}

// Hamiltonian q of the homogeneous degree-m vector field -w: H_q = -w.
template <typename K>
Jet<K> generator_of_field(const MapJet<K>& w, int m)
{
    const int n = w.n_dof();
    const Jet<K> shape = Jet<K>::phase(n, m);
    Jet<K> q = shape.empty_like();
    for (int j = 0; j < n; ++j) {
        q += Jet<K>::variable(shape, j) * w.comp[static_cast<std::size_t>(n + j)].with_trunc(m);
        q -= Jet<K>::variable(shape, n + j) * w.comp[static_cast<std::size_t>(j)].with_trunc(m);
    }
    return q.scaled(K(1) / K(m));
}

template <typename K>
struct MapLogResult {
    Jet<K> p;
    Jet<K> p0;
    std::vector<double> residual_by_degree;  // flow(p,1) - kappa, degree 1..N
    std::string branch = "principal";
    std::string linear_origin;  // float eigen log, exact blocks
};

namespace detail {

inline Matrix<cplx> linear_log(const Matrix<cplx>& a, std::string& origin)
{
    Eigen::MatrixXd ar(a.rows(), a.cols());
    for (int i = 0; i < a.rows(); ++i)
        for (int j = 0; j < a.cols(); ++j) {
            if (std::abs(a(i, j).imag()) > 1e-12)
                throw precondition_error("map_log: linear part is not real");
            ar(i, j) = a(i, j).real();
        }
    const LogResult lr = symplectic_log(ar);
    origin = "float eigen-decomposition, exp residual " + std::to_string(lr.exp_residual);
    return from_eigen(lr.B);
}

inline Matrix<exact> linear_log(const Matrix<exact>& a, std::string& origin, const exp_model& model)
{
    const ExactLogResult lr = symplectic_log_exact(a, model);
    if (!lr.turns.is_zero())
        throw not_representable_error("map_log: linear part has a rotation block; use the float field");
    origin = "exact blocks";
    return lr.field;
}

} // namespace detail

// kappa has truncation N; p has truncation N + 1.
template <typename K>
MapLogResult<K> map_log(const MapJet<K>& kappa, const exp_model& model = {}, double tol = 1e-10)
{
    if (kappa.nrho() == 0 || kappa.nrho() % 2)
        throw precondition_error("map_log: map needs 2n components");
    for (const auto& c : kappa.comp)
        for (const auto& [k, v] : c.terms())
            if (key_weight(k) == 0)
                throw precondition_error("map_log: map does not fix the origin");
    const int n = kappa.n_dof();
    const int big_n = kappa.trunc();
    const Matrix<K> a = kappa.linear_part();
    if (!check_symplectic(a, 1e-8).ok)
        throw precondition_error("map_log: linear part is not symplectic");
    MapLogResult<K> out;
    Matrix<K> b;
    if constexpr (scalar_traits<K>::is_exact)
        b = detail::linear_log(a, out.linear_origin, model);
    else
        b = detail::linear_log(a, out.linear_origin);
    Jet<K> p = quadratic_form(b, big_n + 1);
    out.p0 = p;
    const MapJet<K> kinv = inverse(kappa);
    const Frame<K> fr = make_frame(hamilton_matrix(quadratic_part(p)), model, tol);
    for (int m = 3; m <= big_n + 1; ++m) {
        const MapJet<K> phi = flow_jet(p, K(1), m - 1, model, tol);
        MapJet<K> w = compose(kinv.with_trunc(m - 1), phi) - MapJet<K>::identity(n, m - 1);
        for (auto& c : w.comp)
            c = c.part(m - 1);
        if (w.is_zero())
            continue;
        const Jet<K> q = generator_of_field(w, m);
        Jet<K> u = solve_averaged(q, fr);
        p += u.with_trunc(big_n + 1);
    }
    if constexpr (!scalar_traits<K>::is_exact) {
        bool real = true;
        for (const auto& c : kappa.comp)
            real = real && jet_is_real(c);
        if (real)
            p = real_part(p);
    }
    const MapJet<K> fin = flow_jet(p, K(1), big_n, model, tol) - kappa;
    for (int d = 1; d <= big_n; ++d)
        out.residual_by_degree.push_back(map_norm(fin, d));
    out.p = p;
    return out;
}

// True iff p1 - p2 vanishes through degree N.
template <typename K>
bool map_log_uniqueness_check(const Jet<K>& p1, const Jet<K>& p2, int big_n, double tol = 1e-10)
{
    return jet_norm((p1.with_trunc(big_n) - p2.with_trunc(big_n))) <= tol;
}

// Lowest degree at which the time-1 flows of p1 and p2 differ, or -1.
template <typename K>
int flow_difference_degree(const Jet<K>& p1, const Jet<K>& p2, int big_n, const exp_model& model = {}, double tol = 1e-10)
{
    const MapJet<K> d = flow_jet(p1, K(1), big_n, model) - flow_jet(p2, K(1), big_n, model);
    for (int w = 1; w <= big_n; ++w)
        if (map_norm(d, w) > tol)
            return w;
    return -1;
}

} // namespace fionf
