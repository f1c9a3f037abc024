#pragma once

// Classical Birkhoff normal form: real quadratic normalization, nonlinear
// reduction p o kappa = p0 + r, and action variables.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "fionf/errors.hpp"
#include "fionf/frame.hpp"
#include "fionf/homology.hpp"
#include "fionf/jet.hpp"
#include "fionf/maplog.hpp"
#include "fionf/symlin.hpp"
#include "fionf/transport.hpp"

namespace fionf {

// One block of the real normal form. Loxodromic blocks occupy two degrees
// of freedom and two actions.
template <typename K>
struct NormalBlock {
    std::string kind;  // loxodromic | hyperbolic | elliptic
    std::vector<int> dofs;
    std::vector<int> actions;
    K a;  // alpha, mu or nu
    K b;  // beta (loxodromic only)
};

template <typename K>
struct QuadraticNormalForm {
    int n = 0;
    int n_hc = 0, n_hr = 0, n_e = 0;
    std::vector<NormalBlock<K>> blocks;
    Matrix<K> kappa0;  // p0 o kappa0 = normal form
    Jet<K> normal;     // quadratic normal form jet
    double residual = 0.0;
};

// Normal form jet for a list of blocks.
template <typename K>
Jet<K> normal_form_jet(const std::vector<NormalBlock<K>>& blocks, int n, int trunc)
{
    Jet<K> b = Jet<K>::phase(n, std::max(2, trunc));
    auto x = [&](int j) { return Jet<K>::variable(b, j); };
    auto xi = [&](int j) { return Jet<K>::variable(b, n + j); };
    for (const auto& blk : blocks) {
        if (blk.kind == "loxodromic") {
            const int j = blk.dofs[0], k = blk.dofs[1];
            b += (x(j) * xi(j) + x(k) * xi(k)).scaled(blk.a);
            b -= (x(j) * xi(k) - x(k) * xi(j)).scaled(blk.b);
        }
        else if (blk.kind == "hyperbolic")
            b += (x(blk.dofs[0]) * xi(blk.dofs[0])).scaled(blk.a);
        else
            b += (x(blk.dofs[0]) * x(blk.dofs[0]) + xi(blk.dofs[0]) * xi(blk.dofs[0])).scaled(blk.a / K(2));
    }
    return b;
}

namespace detail {

inline cplx sigma_c(const Eigen::VectorXcd& u, const Eigen::VectorXcd& v)
{
    const int n = static_cast<int>(u.size() / 2);
    cplx s = 0.0;
    for (int j = 0; j < n; ++j)
        s += u(n + j) * v(j) - u(j) * v(n + j);
    return s;
}

inline Eigen::VectorXcd phase_normalized(Eigen::VectorXcd e)
{
    for (int i = 0; i < e.size(); ++i)
        if (std::abs(e(i)) > 1e-8 * e.norm()) {
            e *= std::abs(e(i)) / e(i);
            e(i) = std::abs(e(i));
            break;
        }
    return e;
}

inline void assign_block_slots(std::vector<NormalBlock<cplx>>& blocks, int& n_hc, int& n_hr, int& n_e)
{
    std::stable_sort(blocks.begin(), blocks.end(), [](const auto& l, const auto& r) {
        auto rank = [](const std::string& k) { return k == "loxodromic" ? 0 : k == "hyperbolic" ? 1 : 2; };
        return rank(l.kind) < rank(r.kind);
    });
    n_hc = n_hr = n_e = 0;
    for (const auto& b : blocks) {
        if (b.kind == "loxodromic")
            ++n_hc;
        else if (b.kind == "hyperbolic")
            ++n_hr;
        else
            ++n_e;
    }
    int dof = 0, lox = 0, act = 2 * n_hc;
    for (auto& b : blocks) {
        if (b.kind == "loxodromic") {
            b.dofs = {dof, dof + 1};
            b.actions = {lox, n_hc + lox};
            dof += 2;
            ++lox;
        }
        else {
            b.dofs = {dof++};
            b.actions = {act++};
        }
    }
}

} // namespace detail

// Float normalization from a real Hamilton matrix B.
inline QuadraticNormalForm<cplx> quadratic_normalize(const Eigen::MatrixXd& bm, double tol = 1e-8)
{
    const int d = static_cast<int>(bm.rows());
    if (d != bm.cols() || d % 2)
        throw precondition_error("quadratic_normalize: matrix must be square of even size");
    const int n = d / 2;
    const Eigen::MatrixXd jb = symplectic_j_real(n).transpose() * bm;
    if ((jb - jb.transpose()).norm() > 1e-10 * std::max(1.0, bm.norm()))
        throw precondition_error("quadratic_normalize: J B is not symmetric");
    Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(bm.cast<cplx>());
    const Eigen::VectorXcd ev = es.eigenvalues();
    const Eigen::MatrixXcd vecs = es.eigenvectors();
    const double scale = std::max(1.0, bm.norm());
    for (int i = 0; i < d; ++i) {
        if (std::abs(ev(i)) <= tol * scale)
            throw precondition_error("quadratic_normalize: zero eigenvalue");
        for (int j = i + 1; j < d; ++j)
            if (std::abs(ev(i) - ev(j)) <= tol * scale)
                throw precondition_error("quadratic_normalize: repeated eigenvalue " + scalar_str(ev(i)));
    }
    auto find = [&](cplx l) {
        int best = 0;
        for (int i = 1; i < d; ++i)
            if (std::abs(ev(i) - l) < std::abs(ev(best) - l))
                best = i;
        return best;
    };
    std::vector<NormalBlock<cplx>> blocks;
    std::vector<std::vector<Eigen::VectorXd>> cols;  // per block: x columns then xi columns
    for (int i = 0; i < d; ++i) {
        const cplx l = ev(i);
        const bool real = std::abs(l.imag()) <= tol * scale;
        const bool imag = std::abs(l.real()) <= tol * scale;
        if (real && l.real() > 0) {
            Eigen::VectorXcd e = detail::phase_normalized(vecs.col(i));
            Eigen::VectorXcd f = detail::phase_normalized(vecs.col(find(-l)));
            f /= detail::sigma_c(f, e);
            blocks.push_back({"hyperbolic", {}, {}, cplx(l.real(), 0.0), cplx(0.0)});
            cols.push_back({e.real(), f.real()});
        }
        else if (imag && l.imag() > 0) {
            Eigen::VectorXcd e = detail::phase_normalized(vecs.col(i));
            cplx mu = l;
            double s = (detail::sigma_c(e, e.conjugate()) / cplx(0.0, 1.0)).real();
            if (s < 0) {
                e = detail::phase_normalized(e.conjugate());
                mu = std::conj(l);
                s = -s;
            }
            e /= std::sqrt(s);
            const double nu = (mu / cplx(0.0, 1.0)).real();
            blocks.push_back({"elliptic", {}, {}, cplx(nu, 0.0), cplx(0.0)});
            cols.push_back({std::sqrt(2.0) * e.real(), std::sqrt(2.0) * e.imag()});
        }
        else if (!real && !imag && l.real() > 0 && l.imag() > 0) {
            Eigen::VectorXcd e = detail::phase_normalized(vecs.col(i));
            Eigen::VectorXcd f = vecs.col(find(-l));
            f /= detail::sigma_c(f, e);
            blocks.push_back({"loxodromic", {}, {}, cplx(l.real(), 0.0), cplx(l.imag(), 0.0)});
            const double r2 = std::sqrt(2.0);
            cols.push_back({r2 * e.real(), r2 * e.imag(), r2 * f.real(), -r2 * f.imag()});
        }
    }
    // distinct |nu| among elliptic blocks
    for (std::size_t i = 0; i < blocks.size(); ++i)
        for (std::size_t j = i + 1; j < blocks.size(); ++j)
            if (blocks[i].kind == "elliptic" && blocks[j].kind == "elliptic" &&
                std::abs(std::abs(blocks[i].a) - std::abs(blocks[j].a)) <= tol * scale)
                throw precondition_error("quadratic_normalize: elliptic frequencies with equal |nu|");
    std::vector<std::size_t> order(blocks.size());
    for (std::size_t i = 0; i < order.size(); ++i)
        order[i] = i;
    auto rank = [](const std::string& k) { return k == "loxodromic" ? 0 : k == "hyperbolic" ? 1 : 2; };
    std::stable_sort(order.begin(), order.end(), [&](std::size_t l, std::size_t r) {
        if (rank(blocks[l].kind) != rank(blocks[r].kind))
            return rank(blocks[l].kind) < rank(blocks[r].kind);
        if (blocks[l].a.real() != blocks[r].a.real())
            return blocks[l].a.real() < blocks[r].a.real();
        return blocks[l].b.real() < blocks[r].b.real();
    });
    std::vector<NormalBlock<cplx>> sorted;
    std::vector<std::vector<Eigen::VectorXd>> scols;
    for (std::size_t i : order) {
        sorted.push_back(blocks[i]);
        scols.push_back(cols[i]);
    }
    QuadraticNormalForm<cplx> q;
    q.n = n;
    detail::assign_block_slots(sorted, q.n_hc, q.n_hr, q.n_e);
    Eigen::MatrixXd k0(d, d);
    for (std::size_t i = 0; i < sorted.size(); ++i) {
        const auto& b = sorted[i];
        const auto& c = scols[i];
        if (b.kind == "loxodromic") {
            k0.col(b.dofs[0]) = c[0];
            k0.col(b.dofs[1]) = c[1];
            k0.col(n + b.dofs[0]) = c[2];
            k0.col(n + b.dofs[1]) = c[3];
        }
        else {
            k0.col(b.dofs[0]) = c[0];
            k0.col(n + b.dofs[0]) = c[1];
        }
    }
    if (2 * q.n_hc + q.n_hr + q.n_e != n)
        throw precondition_error("quadratic_normalize: spectrum does not split into normal blocks");
    q.blocks = sorted;
    q.kappa0 = from_eigen(Eigen::MatrixXd(k0));
    q.normal = normal_form_jet(q.blocks, n, 2);
    const Matrix<cplx> bn = hamilton_matrix(q.normal);
    const Eigen::MatrixXd lhs = k0.inverse() * bm * k0;
    double res = 0.0;
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j)
            res = std::max(res, std::abs(lhs(i, j) - bn(i, j).real()));
    res = std::max(res, check_symplectic(k0).residual);
    q.residual = res;
    if (res > 1e-6 * scale)
        throw precondition_error("quadratic_normalize: normalization check failed (residual " + std::to_string(res) + ")");
    return q;
}

namespace detail {

inline bool negative_constant(const exact& c)
{
    return c.is_constant() && c.constant().is_real() && sgn(c.constant().re) < 0;
}

} // namespace detail

// Exact normalization: B must already be a direct sum of normal blocks over
// the degrees of freedom; they are reordered (and hyperbolic signs fixed).
inline QuadraticNormalForm<exact> quadratic_normalize(const xmatrix& bm)
{
    const int d = bm.rows();
    if (d != bm.cols() || d % 2)
        throw precondition_error("quadratic_normalize: matrix must be square of even size");
    if (!is_hamiltonian_matrix(bm))
        throw precondition_error("quadratic_normalize: J B is not symmetric");
    const int n = d / 2;
    auto coupled = [&](int p, int q) {
        for (int u : {p, n + p})
            for (int v : {q, n + q})
                if (!is_zero(bm(u, v)) || !is_zero(bm(v, u)))
                    return true;
        return false;
    };
    struct found {
        NormalBlock<exact> blk;
        std::vector<int> src;
        bool flip = false;
    };
    std::vector<found> fs;
    for (const auto& comp : detail::components(n, coupled)) {
        if (comp.size() == 1) {
            const int j = comp[0];
            const exact a = bm(j, j), b = bm(j, n + j), c = bm(n + j, j), dd = bm(n + j, n + j);
            if (is_zero(b) && is_zero(c) && !is_zero(a) && dd == -a) {
                const bool flip = detail::negative_constant(a);
                fs.push_back({{"hyperbolic", {}, {}, flip ? -a : a, exact(0)}, {j}, flip});
                continue;
            }
            if (is_zero(a) && is_zero(dd) && !is_zero(b) && c == -b) {
                fs.push_back({{"elliptic", {}, {}, b, exact(0)}, {j}, false});
                continue;
            }
        }
        if (comp.size() == 2) {
            const int j = comp[0], k = comp[1];
            const exact al = bm(j, j), be = bm(j, k);
            xmatrix want(d, d);
            want(j, j) = al;
            want(k, k) = al;
            want(j, k) = be;
            want(k, j) = -be;
            want(n + j, n + j) = -al;
            want(n + k, n + k) = -al;
            want(n + j, n + k) = be;
            want(n + k, n + j) = -be;
            bool ok = !is_zero(al) && !is_zero(be);
            for (int u : {j, k, n + j, n + k})
                for (int v : {j, k, n + j, n + k})
                    ok = ok && bm(u, v) == want(u, v);
            if (ok) {
                fs.push_back({{"loxodromic", {}, {}, al, be}, {j, k}, false});
                continue;
            }
        }
        throw not_representable_error("quadratic part is not a sum of normal blocks over the exact field; use the float field");
    }
    for (std::size_t i = 0; i < fs.size(); ++i)
        for (std::size_t j = i + 1; j < fs.size(); ++j) {
            const auto& l = fs[i].blk;
            const auto& r = fs[j].blk;
            if (l.kind != r.kind)
                continue;
            const bool same = l.kind == "elliptic" ? (l.a == r.a || l.a == -r.a) : (l.a == r.a && l.b == r.b);
            if (same)
                throw precondition_error("quadratic_normalize: coincident block parameters (" + l.kind + ")");
        }
    auto rank = [](const std::string& k) { return k == "loxodromic" ? 0 : k == "hyperbolic" ? 1 : 2; };
    std::stable_sort(fs.begin(), fs.end(), [&](const found& l, const found& r) { return rank(l.blk.kind) < rank(r.blk.kind); });
    QuadraticNormalForm<exact> q;
    q.n = n;
    q.kappa0 = xmatrix(d, d);
    int dof = 0, lox = 0;
    for (const auto& f : fs)
        if (f.blk.kind == "loxodromic")
            ++q.n_hc;
        else if (f.blk.kind == "hyperbolic")
            ++q.n_hr;
        else
            ++q.n_e;
    int act = 2 * q.n_hc;
    for (auto f : fs) {
        auto& b = f.blk;
        if (b.kind == "loxodromic") {
            b.dofs = {dof, dof + 1};
            b.actions = {lox, q.n_hc + lox};
            ++lox;
        }
        else {
            b.dofs = {dof};
            b.actions = {act++};
        }
        for (std::size_t s = 0; s < f.src.size(); ++s) {
            const int to = dof + static_cast<int>(s);
            const int from = f.src[s];
            if (f.flip) {
                q.kappa0(n + from, to) = exact(1);
                q.kappa0(from, n + to) = exact(-1);
            }
            else {
                q.kappa0(from, to) = exact(1);
                q.kappa0(n + from, n + to) = exact(1);
            }
        }
        dof += static_cast<int>(f.src.size());
        q.blocks.push_back(b);
    }
    q.normal = normal_form_jet(q.blocks, n, 2);
    if (!(q.kappa0.inverse() * bm * q.kappa0 == hamilton_matrix(q.normal)))
        throw precondition_error("quadratic_normalize: normalization check failed");
    return q;
}

// ---------------------------------------------------------------------------
// Nonlinear reduction
// ---------------------------------------------------------------------------

template <typename K>
struct BirkhoffResult {
    MapJet<K> kappa;
    Jet<K> p0;
    Jet<K> r;                     // resonant, degrees 3..N
    std::vector<Jet<K>> generators;  // q_3, q_4, ...
    double check = 0.0;           // |p o kappa - p0 - r|
};

// f o exp(H_q) as the Lie series sum (ad_q)^k f / k!
template <typename K>
Jet<K> lie_transform(const Jet<K>& f, const Jet<K>& q)
{
    Jet<K> sum = f;
    Jet<K> term = f;
    for (int k = 1; k <= 2 * f.trunc() + 2; ++k) {
        term = poisson(q, term).scaled(K(1) / K(k));
        if (term.is_zero())
            break;
        sum += term;
    }
    return sum;
}

template <typename K>
BirkhoffResult<K> birkhoff_reduce(const Jet<K>& p, int trunc, double tol = 1e-10)
{
    for (const auto& [k, c] : p.terms())
        if (key_weight(k) < 2)
            throw precondition_error("birkhoff_reduce: p must vanish to second order");
    const int big_n = std::min(trunc, p.trunc());
    BirkhoffResult<K> out;
    out.p0 = quadratic_part(p).with_trunc(big_n);
    const Frame<K> fr = frame_of(out.p0, {}, tol);
    if (fr.has_nil)
        throw precondition_error("birkhoff_reduce: quadratic part is not diagonalizable");
    const bool real = jet_is_real(p);
    Jet<K> cur = p.with_trunc(big_n);
    out.kappa = MapJet<K>::identity(p.n_dof(), big_n);
    for (int m = 3; m <= big_n; ++m) {
        const Jet<K> v = cur.part(m);
        if (v.is_zero())
            continue;
        auto s = solve_h_p0(v, fr);
        Jet<K> q = s.u;
        if constexpr (!scalar_traits<K>::is_exact)
            if (real)
                q = real_part(q);
        if (q.is_zero())
            continue;
        cur = lie_transform(cur, q);
        if constexpr (!scalar_traits<K>::is_exact)
            if (real)
                cur = real_part(cur);
        out.generators.push_back(q);
        out.kappa = compose(out.kappa, flow_jet(q.with_trunc(big_n + 1), K(1), big_n));
    }
    out.r = cur - out.p0;
    out.check = jet_norm(compose(p.with_trunc(big_n), out.kappa) - out.p0 - out.r);
    return out;
}

// ---------------------------------------------------------------------------
// Action variables
// ---------------------------------------------------------------------------

// iota_a(rho) in normal coordinates
template <typename K>
std::vector<Jet<K>> action_jets(const QuadraticNormalForm<K>& q, int trunc)
{
    const int n = q.n;
    const Jet<K> shape = Jet<K>::phase(n, std::max(2, trunc));
    auto x = [&](int j) { return Jet<K>::variable(shape, j); };
    auto xi = [&](int j) { return Jet<K>::variable(shape, n + j); };
    std::vector<Jet<K>> io(static_cast<std::size_t>(n), shape.empty_like());
    for (const auto& b : q.blocks) {
        if (b.kind == "loxodromic") {
            const int j = b.dofs[0], k = b.dofs[1];
            io[static_cast<std::size_t>(b.actions[0])] = x(j) * xi(j) + x(k) * xi(k);
            io[static_cast<std::size_t>(b.actions[1])] = x(j) * xi(k) - x(k) * xi(j);
        }
        else if (b.kind == "hyperbolic")
            io[static_cast<std::size_t>(b.actions[0])] = x(b.dofs[0]) * xi(b.dofs[0]);
        else
            io[static_cast<std::size_t>(b.actions[0])] =
                (x(b.dofs[0]) * x(b.dofs[0]) + xi(b.dofs[0]) * xi(b.dofs[0])).scaled(K(1) / K(2));
    }
    return io;
}

inline std::vector<std::string> action_definitions(const std::vector<NormalBlock<cplx>>& blocks)
{
    std::vector<std::string> out;
    for (const auto& b : blocks) {
        const auto j = std::to_string(b.dofs[0] + 1);
        if (b.kind == "loxodromic") {
            const auto k = std::to_string(b.dofs[1] + 1);
            out.push_back("iota" + std::to_string(b.actions[0] + 1) + " = x" + j + "*xi" + j + " + x" + k + "*xi" + k);
            out.push_back("iota" + std::to_string(b.actions[1] + 1) + " = x" + j + "*xi" + k + " - x" + k + "*xi" + j);
        }
        else if (b.kind == "hyperbolic")
            out.push_back("iota" + std::to_string(b.actions[0] + 1) + " = x" + j + "*xi" + j);
        else
            out.push_back("iota" + std::to_string(b.actions[0] + 1) + " = (x" + j + "^2 + xi" + j + "^2)/2");
    }
    return out;
}

// F with F(iota(rho)) = f for a resonant jet f in normal coordinates.
// F is a jet in the n actions, truncated at trunc/2.
template <typename K>
Jet<K> to_actions(const Jet<K>& f, const QuadraticNormalForm<K>& q, double tol = 1e-9)
{
    const int n = q.n;
    const Frame<K> fr = make_frame(hamilton_matrix(q.normal), {}, 1e-10);
    const std::vector<Jet<K>> io = action_jets(q, 2);
    const Jet<K> fshape(n, std::max(1, f.trunc() / 2));
    // pair products y_s y_partner(s) as linear forms in the actions
    std::vector<Jet<K>> pair(static_cast<std::size_t>(2 * n));
    const Jet<K> qshape = Jet<K>::phase(n, 2);
    for (int s = 0; s < 2 * n; ++s) {
        const int pt = fr.partner[static_cast<std::size_t>(s)];
        if (pt < 0)
            throw precondition_error("to_actions: frame slot without partner");
        const Jet<K> pp = fr.from_frame(Jet<K>::variable(qshape, s) * Jet<K>::variable(qshape, pt));
        Jet<K> lin = fshape.empty_like();
        Jet<K> rest = pp;
        for (int a = 0; a < n; ++a) {
            const auto& ia = io[static_cast<std::size_t>(a)];
            const auto& [lead, lc] = *ia.terms().begin();
            const K c = pp.coeff(lead) / lc;
            if (!scalar_near_zero(c, tol)) {
                lin += Jet<K>::variable(fshape, a, c);
                rest -= ia.scaled(c);
            }
        }
        if (jet_norm(rest) > tol)
            throw precondition_error("to_actions: frame pair product is not a combination of actions");
        pair[static_cast<std::size_t>(s)] = lin;
    }
    const Jet<K> g = fr.to_frame(f);
    Jet<K> out = fshape.empty_like();
    for (const auto& [key, c] : g.terms()) {
        if (scalar_near_zero(c, tol * 1e-3))
            continue;
        Jet<K> term = Jet<K>::constant(fshape, c);
        for (int s = 0; s < 2 * n; ++s) {
            const int pt = fr.partner[static_cast<std::size_t>(s)];
            if (key_exp(key, s) != key_exp(key, pt))
                throw precondition_error("to_actions: non-resonant monomial in input");
            if (s < pt)
                for (int e = 0; e < key_exp(key, s); ++e)
                    term = term * pair[static_cast<std::size_t>(s)];
        }
        out += term;
    }
    return out;
}

// rho-jet F(iota(rho))
template <typename K>
Jet<K> actions_substitute(const Jet<K>& fa, const QuadraticNormalForm<K>& q, int trunc)
{
    const std::vector<Jet<K>> io = action_jets(q, trunc);
    const Jet<K>& shape = io.at(0);
    std::vector<std::vector<Jet<K>>> pw(io.size());
    auto power = [&](std::size_t v, int e) -> const Jet<K>& {
        auto& l = pw[v];
        if (l.empty())
            l.push_back(Jet<K>::constant(shape, K(1)));
        while (static_cast<int>(l.size()) <= e)
            l.push_back(l.back() * io[v]);
        return l[static_cast<std::size_t>(e)];
    };
    Jet<K> r = shape.empty_like();
    for (const auto& [k, c] : fa.terms()) {
        Jet<K> t = Jet<K>::constant(shape, c);
        for (std::size_t v = 0; v < io.size(); ++v)
            if (const int e = key_exp(k, static_cast<int>(v)))
                t = t * power(v, e);
        r += t;
    }
    return r;
}

} // namespace fionf
