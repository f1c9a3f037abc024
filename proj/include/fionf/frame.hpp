#pragma once

// Quadratic forms, Hamilton matrices and diagonalizing frames.
//
// A frame is a linear change of coordinates y = T rho in which the Lie
// action L f = {p0, f} of a quadratic p0 reads
//   L y_k = lam_k y_k + sum_l nil_kl y_l,   nil nilpotent, commuting.
// Monomials y^g are then eigenvectors of the semisimple part with
// eigenvalue g . lam.

#include <Eigen/Dense>

#include <cmath>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

#include "fionf/errors.hpp"
#include "fionf/expmodel.hpp"
#include "fionf/jet.hpp"
#include "fionf/matrix.hpp"

namespace fionf {

// B with H_b(rho) = B rho, for b homogeneous quadratic
template <typename C>
Matrix<C> hamilton_matrix(const Jet<C>& b)
{
    const int nr = b.nrho();
    const int n = nr / 2;
    for (const auto& [k, c] : b.terms())
        if (key_weight(k) != 2 || b.hpow(k) != 0)
            throw precondition_error("hamilton_matrix: form is not homogeneous quadratic");
    Matrix<C> m(nr, nr);
    for (int i = 0; i < n; ++i) {
        const Jet<C> dxi = b.derivative(n + i);
        const Jet<C> dx = b.derivative(i);
        for (int j = 0; j < nr; ++j) {
            m(i, j) = dxi.coeff(b.unit(j));
            m(n + i, j) = -dx.coeff(b.unit(j));
        }
    }
    return m;
}

template <typename C>
bool is_hamiltonian_matrix(const Matrix<C>& bm, double tol = 1e-12)
{
    const int n = bm.rows() / 2;
    const Matrix<C> jb = Matrix<C>::symplectic_j(n).transpose() * bm;
    const Matrix<C> d = jb - jb.transpose();
    if constexpr (scalar_traits<C>::is_exact)
        return d.is_zero();
    else
        return d.max_abs() <= tol * std::max(1.0, bm.max_abs());
}

// b(rho) = 1/2 sigma(rho, B rho)
template <typename C>
Jet<C> quadratic_form(const Matrix<C>& bm, int trunc = 2, double tol = 1e-12)
{
    if (bm.rows() != bm.cols() || bm.rows() % 2 != 0)
        throw precondition_error("quadratic_form: matrix must be square of even size");
    if (!is_hamiltonian_matrix(bm, tol))
        throw precondition_error("quadratic_form: J B is not symmetric");
    const int n = bm.rows() / 2;
    const Matrix<C> jb = Matrix<C>::symplectic_j(n).transpose() * bm;
    Jet<C> b = Jet<C>::phase(n, std::max(2, trunc));
    const C half = C(1) / C(2);
    for (int i = 0; i < 2 * n; ++i)
        for (int j = 0; j < 2 * n; ++j)
            if (!is_zero(jb(i, j)))
                b.add_term(b.unit(i) + b.unit(j), jb(i, j) * half);
    return b;
}

template <typename C>
Jet<C> quadratic_part(const Jet<C>& p)
{
    return p.filtered([&](mkey k) { return key_weight(k) == 2 && p.hpow(k) == 0; });
}

// ---------------------------------------------------------------------------

template <typename C>
struct Frame {
    int n = 0;
    Matrix<C> T;
    Matrix<C> Tinv;
    std::vector<C> lam;
    Matrix<C> nil;
    bool has_nil = false;
    std::vector<int> partner;  // frame index with opposite eigenvalue, or -1
    std::vector<std::string> block_kind;  // per frame slot
    Pairing<C> pi;             // bivector in y
    exp_model model;
    double tol = 1e-10;
    std::string origin;  // "pattern", "identity", "eigen"

    C beta(mkey k) const
    {
        C b = scalar_from_long<C>(0);
        for (int v = 0; v < 2 * n; ++v) {
            const int e = key_exp(k, v);
            if (e)
                b += scalar_from_long<C>(e) * lam[static_cast<std::size_t>(v)];
        }
        return b;
    }

    bool beta_zero(const C& b) const
    {
        if constexpr (scalar_traits<C>::is_exact)
            return is_zero(b);
        else
            return std::abs(b) <= tol;
    }

    bool same_beta(const C& a, const C& b) const
    {
        if constexpr (scalar_traits<C>::is_exact)
            return a == b;
        else
            return std::abs(a - b) <= tol * std::max(1.0, std::abs(a));
    }

    // k-vector of a frame monomial: exponent differences over partner pairs
    std::vector<int> resonance_vector(mkey k) const
    {
        std::vector<int> out;
        for (int v = 0; v < 2 * n; ++v) {
            const int p = partner[static_cast<std::size_t>(v)];
            if (p < 0)
                out.push_back(key_exp(k, v));
            else if (v < p)
                out.push_back(key_exp(k, v) - key_exp(k, p));
        }
        return out;
    }

    template <typename K>
    static Jet<K> substitute(const Jet<K>& f, const Matrix<C>& m)
    {
        std::vector<Jet<K>> comps;
        for (int i = 0; i < m.rows(); ++i) {
            Jet<K> c = f.empty_like();
            for (int j = 0; j < m.cols(); ++j)
                if (!is_zero(m(i, j)))
                    c.add_term(f.unit(j), static_cast<K>(m(i, j)));
            comps.push_back(std::move(c));
        }
        return compose(f, comps);
    }

    // f(rho) -> g(y) = f(Tinv y)
    template <typename K>
    Jet<K> to_frame(const Jet<K>& f) const
    {
        return origin == "identity" ? f : substitute(f, Tinv);
    }
    // g(y) -> f(rho) = g(T rho)
    template <typename K>
    Jet<K> from_frame(const Jet<K>& g) const
    {
        return origin == "identity" ? g : substitute(g, T);
    }

    // Nilpotent part of the Lie action on frame jets.
    template <typename K>
    Jet<K> apply_nil(const Jet<K>& f) const
    {
        Jet<K> r = f.empty_like();
        if (!has_nil)
            return r;
        for (int k = 0; k < 2 * n; ++k) {
            Jet<K> dk;
            bool have = false;
            for (int l = 0; l < 2 * n; ++l) {
                if (is_zero(nil(k, l)))
                    continue;
                if (!have) {
                    dk = f.derivative(k);
                    have = true;
                }
                if (dk.is_zero())
                    break;
                r += (dk * Jet<K>::variable(f, l)).scaled(nil(k, l));
            }
        }
        return r;
    }

    // Full Lie action on frame jets (semisimple plus nilpotent).
    template <typename K>
    Jet<K> apply_lie(const Jet<K>& f) const
    {
        Jet<K> r = f.empty_like();
        for (const auto& [k, c] : f.terms()) {
            const C b = beta(k);
            if (!is_zero(b))
                r.add_term(k, c * static_cast<K>(b));
        }
        return r + apply_nil(f);
    }
};

namespace detail {

template <typename C>
bool near_zero(const C& c, double tol)
{
    if constexpr (scalar_traits<C>::is_exact)
        return is_zero(c);
    else
        return std::abs(c) <= tol;
}

template <typename C>
C imag_unit()
{
    return scalar_traits<C>::i();
}

// union-find over degrees of freedom coupled by B
inline std::vector<std::vector<int>> components(int n, const std::function<bool(int, int)>& coupled)
{
    std::vector<int> parent(static_cast<std::size_t>(n));
    std::iota(parent.begin(), parent.end(), 0);
    std::function<int(int)> find = [&](int a) {
        while (parent[static_cast<std::size_t>(a)] != a)
            a = parent[static_cast<std::size_t>(a)] = parent[static_cast<std::size_t>(parent[static_cast<std::size_t>(a)])];
        return a;
    };
    for (int a = 0; a < n; ++a)
        for (int b = a + 1; b < n; ++b)
            if (coupled(a, b))
                parent[static_cast<std::size_t>(find(a))] = find(b);
    std::vector<std::vector<int>> out;
    std::vector<int> slot(static_cast<std::size_t>(n), -1);
    for (int a = 0; a < n; ++a) {
        const int r = find(a);
        if (slot[static_cast<std::size_t>(r)] < 0) {
            slot[static_cast<std::size_t>(r)] = static_cast<int>(out.size());
            out.emplace_back();
        }
        out[static_cast<std::size_t>(slot[static_cast<std::size_t>(r)])].push_back(a);
    }
    return out;
}

// Block-pattern frames: hyperbolic/diagonal, elliptic, nilpotent 1-dof
// blocks and loxodromic 2-dof blocks in normal-form coordinates.
template <typename C>
std::optional<Frame<C>> pattern_frame(const Matrix<C>& bm, double tol)
{
    const int nr = bm.rows();
    const int n = nr / 2;
    auto coupled = [&](int a, int b) {
        const int ia[2] = {a, n + a};
        const int ib[2] = {b, n + b};
        for (int u : ia)
            for (int v : ib)
                if (!near_zero(bm(u, v), tol) || !near_zero(bm(v, u), tol))
                    return true;
        return false;
    };
    const auto comps = components(n, coupled);
    Frame<C> f;
    f.n = n;
    f.T = Matrix<C>(nr, nr);
    f.lam.assign(static_cast<std::size_t>(nr), scalar_from_long<C>(0));
    f.nil = Matrix<C>(nr, nr);
    f.partner.assign(static_cast<std::size_t>(nr), -1);
    f.block_kind.assign(static_cast<std::size_t>(nr), "");
    const C one = scalar_from_long<C>(1);
    const C I = imag_unit<C>();
    bool nontrivial_t = false;
    for (const auto& comp : comps) {
        if (comp.size() == 1) {
            const int j = comp[0];
            const C a = bm(j, j), b = bm(j, n + j), c = bm(n + j, j), d = bm(n + j, n + j);
            if (!near_zero(a + d, tol))
                return std::nullopt;
            f.partner[static_cast<std::size_t>(j)] = n + j;
            f.partner[static_cast<std::size_t>(n + j)] = j;
            if (near_zero(b, tol) && near_zero(c, tol)) {
                f.T(j, j) = one;
                f.T(n + j, n + j) = one;
                f.lam[static_cast<std::size_t>(j)] = a;
                f.lam[static_cast<std::size_t>(n + j)] = -a;
                f.block_kind[static_cast<std::size_t>(j)] = f.block_kind[static_cast<std::size_t>(n + j)] =
                    near_zero(a, tol) ? "unit" : "hyperbolic";
            }
            else if (near_zero(a, tol) && !near_zero(b, tol) && near_zero(b + c, tol)) {
                // nu (x^2 + xi^2)/2: wbar = x - i xi (i nu), w = x + i xi (-i nu)
                f.T(j, j) = one;
                f.T(j, n + j) = -I;
                f.T(n + j, j) = one;
                f.T(n + j, n + j) = I;
                f.lam[static_cast<std::size_t>(j)] = I * b;
                f.lam[static_cast<std::size_t>(n + j)] = -(I * b);
                f.block_kind[static_cast<std::size_t>(j)] = f.block_kind[static_cast<std::size_t>(n + j)] = "elliptic";
                nontrivial_t = true;
            }
            else if (near_zero(a, tol) && (near_zero(b, tol) || near_zero(c, tol))) {
                f.T(j, j) = one;
                f.T(n + j, n + j) = one;
                f.nil(j, n + j) = b;
                f.nil(n + j, j) = c;
                f.has_nil = true;
                f.block_kind[static_cast<std::size_t>(j)] = f.block_kind[static_cast<std::size_t>(n + j)] = "unit";
            }
            else
                return std::nullopt;
        }
        else if (comp.size() == 2) {
            const int j = comp[0], k = comp[1];
            const int idx[4] = {j, k, n + j, n + k};
            auto at = [&](int r, int s) { return bm(idx[r], idx[s]); };
            const C al = at(0, 0), be = at(0, 1);
            // [[al, be, 0, 0], [-be, al, 0, 0], [0, 0, -al, be], [0, 0, -be, -al]]
            const C expect[4][4] = {{al, be, C{}, C{}}, {-be, al, C{}, C{}}, {C{}, C{}, -al, be}, {C{}, C{}, -be, -al}};
            for (int r = 0; r < 4; ++r)
                for (int s = 0; s < 4; ++s)
                    if (!near_zero(at(r, s) - expect[r][s], tol))
                        return std::nullopt;
            if (near_zero(be, tol))
                return std::nullopt;
            const C mu = al + I * be;
            const C mubar = al - I * be;
            // z = x_j - i x_k, w = x_j + i x_k, zeta = xi_j + i xi_k, omega = xi_j - i xi_k
            f.T(j, j) = one;
            f.T(j, k) = -I;
            f.T(k, j) = one;
            f.T(k, k) = I;
            f.T(n + j, n + j) = one;
            f.T(n + j, n + k) = I;
            f.T(n + k, n + j) = one;
            f.T(n + k, n + k) = -I;
            f.lam[static_cast<std::size_t>(j)] = mu;
            f.lam[static_cast<std::size_t>(k)] = mubar;
            f.lam[static_cast<std::size_t>(n + j)] = -mu;
            f.lam[static_cast<std::size_t>(n + k)] = -mubar;
            f.partner[static_cast<std::size_t>(j)] = n + j;
            f.partner[static_cast<std::size_t>(n + j)] = j;
            f.partner[static_cast<std::size_t>(k)] = n + k;
            f.partner[static_cast<std::size_t>(n + k)] = k;
            for (int r : idx)
                f.block_kind[static_cast<std::size_t>(r)] = "loxodromic";
            nontrivial_t = true;
        }
        else
            return std::nullopt;
    }
    f.Tinv = f.T.inverse();
    f.origin = nontrivial_t ? "pattern" : "identity";
    return f;
}

inline std::optional<Frame<cplx>> eigen_frame(const cmatrix& bm, double tol)
{
    const int nr = bm.rows();
    Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(to_eigen(bm));
    if (es.info() != Eigen::Success)
        return std::nullopt;
    const Eigen::MatrixXcd v = es.eigenvectors();
    Eigen::FullPivLU<Eigen::MatrixXcd> lu(v);
    if (!lu.isInvertible())
        return std::nullopt;
    const Eigen::MatrixXcd vinv = lu.inverse();
    const double cond = v.norm() * vinv.norm();
    if (!std::isfinite(cond) || cond > 1e8)
        return std::nullopt;
    Frame<cplx> f;
    f.n = nr / 2;
    f.T = from_eigen(vinv);
    f.Tinv = from_eigen(v);
    f.nil = cmatrix(nr, nr);
    f.lam.resize(static_cast<std::size_t>(nr));
    for (int i = 0; i < nr; ++i)
        f.lam[static_cast<std::size_t>(i)] = es.eigenvalues()(i);
    f.partner.assign(static_cast<std::size_t>(nr), -1);
    f.block_kind.assign(static_cast<std::size_t>(nr), "eigen");
    for (int i = 0; i < nr; ++i) {
        if (f.partner[static_cast<std::size_t>(i)] >= 0)
            continue;
        int best = -1;
        double bd = 1e300;
        for (int j = 0; j < nr; ++j) {
            if (j == i || f.partner[static_cast<std::size_t>(j)] >= 0)
                continue;
            const double d = std::abs(f.lam[static_cast<std::size_t>(i)] + f.lam[static_cast<std::size_t>(j)]);
            if (d < bd) {
                bd = d;
                best = j;
            }
        }
        if (best >= 0 && bd <= 1e3 * tol * std::max(1.0, std::abs(f.lam[static_cast<std::size_t>(i)]))) {
            f.partner[static_cast<std::size_t>(i)] = best;
            f.partner[static_cast<std::size_t>(best)] = i;
        }
    }
    f.origin = "eigen";
    return f;
}

} // namespace detail

// Frame for the Lie action of the quadratic form with Hamilton matrix B.
template <typename C>
Frame<C> make_frame(const Matrix<C>& bm, const exp_model& model = {}, double tol = 1e-10)
{
    if (bm.rows() != bm.cols() || bm.rows() % 2 != 0)
        throw precondition_error("make_frame: Hamilton matrix must be square of even size");
    std::optional<Frame<C>> f = detail::pattern_frame(bm, tol);
    if (!f) {
        if constexpr (std::is_same_v<C, cplx>)
            f = detail::eigen_frame(bm, tol);
    }
    if (!f) {
        if constexpr (scalar_traits<C>::is_exact)
            throw not_representable_error(
                "quadratic part is not in a block form with an exact frame (hyperbolic, elliptic, loxodromic or nilpotent "
                "blocks); use the float field");
        else
            throw precondition_error("quadratic part is defective and not in block form; no frame available");
    }
    f->model = model;
    f->tol = tol;
    const int n = bm.rows() / 2;
    f->pi = Pairing<C>::transformed(f->T, n);
    // verification: T B T^-1 = diag(lam) + nil
    Matrix<C> lhs = f->T * bm * f->Tinv;
    Matrix<C> rhs = f->nil;
    for (int i = 0; i < bm.rows(); ++i)
        rhs(i, i) += f->lam[static_cast<std::size_t>(i)];
    const Matrix<C> d = lhs - rhs;
    bool ok;
    if constexpr (scalar_traits<C>::is_exact)
        ok = d.is_zero();
    else
        ok = d.max_abs() <= 1e-8 * std::max(1.0, bm.max_abs());
    if (!ok)
        throw precondition_error("frame verification failed for the quadratic part");
    return *f;
}

} // namespace fionf
