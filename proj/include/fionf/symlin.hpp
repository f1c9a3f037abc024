#pragma once

// Symplectic linear algebra: symplecticity test, paired spectral
// decomposition and the real logarithm of a symplectic matrix.

#include <Eigen/Dense>
#include <unsupported/Eigen/MatrixFunctions>

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <string>
#include <vector>

#include "fionf/errors.hpp"
#include "fionf/expmodel.hpp"
#include "fionf/frame.hpp"
#include "fionf/matrix.hpp"

namespace fionf {

struct SymplecticCheck {
    bool ok = false;
    double residual = 0.0;
};

inline Eigen::MatrixXd symplectic_j_real(int n)
{
    Eigen::MatrixXd j = Eigen::MatrixXd::Zero(2 * n, 2 * n);
    for (int i = 0; i < n; ++i) {
        j(i, n + i) = 1.0;
        j(n + i, i) = -1.0;
    }
    return j;
}

inline SymplecticCheck check_symplectic(const Eigen::MatrixXd& m, double tol = 1e-10)
{
    if (m.rows() != m.cols() || m.rows() % 2 != 0)
        throw precondition_error("check_symplectic: matrix must be square of even size");
    const Eigen::MatrixXd j = symplectic_j_real(static_cast<int>(m.rows() / 2));
    const double r = (m.transpose() * j * m - j).norm();
    return {r <= tol * std::max(1.0, m.norm() * m.norm()), r};
}

template <typename C>
SymplecticCheck check_symplectic(const Matrix<C>& m, double tol = 1e-10)
{
    if (m.rows() != m.cols() || m.rows() % 2 != 0)
        throw precondition_error("check_symplectic: matrix must be square of even size");
    const Matrix<C> j = Matrix<C>::symplectic_j(m.rows() / 2);
    const Matrix<C> d = m.transpose() * j * m - j;
    if constexpr (scalar_traits<C>::is_exact)
        return {d.is_zero(), d.is_zero() ? 0.0 : d.max_abs()};
    else {
        const double r = d.max_abs();
        return {r <= tol * std::max(1.0, m.max_abs() * m.max_abs()), r};
    }
}

// ---------------------------------------------------------------------------
// Float spectral data
// ---------------------------------------------------------------------------

struct SpectralBlock {
    std::string type;  // hyperbolic-real | loxodromic | elliptic | unit
    cplx lambda;       // representative: |lambda| > 1, or |lambda| = 1 and 0 < arg < pi
    cplx mu;           // chosen logarithm of the representative
    std::vector<cplx> orbit;
    int multiplicity = 1;  // algebraic multiplicity of the representative
    int jordan_blocks = 1; // geometric multiplicity of the representative
};

struct SpectralData {
    std::vector<SpectralBlock> blocks;
    double prop_orthogonality = 0.0;  // max |sigma(v, w)|, v in E_l, w in E_m, l m != 1
    double cluster_tol = 1e-8;
    std::string cluster_rule = "relative gap < 1e-8 merged; eigenvalues within 1e-6 of 1 merged into the unit cluster";
    std::string jordan_basis = "kernel basis of (A - lambda)^m from full-pivot LU";
};

struct LogResult {
    Eigen::MatrixXd B;
    SpectralData spectral;
    double exp_residual = 0.0;   // ||exp(B) - A||_F
    double jb_residual = 0.0;    // ||J B - (J B)^t||_F after projection
    double jb_raw = 0.0;         // before projection onto Hamiltonian matrices
    double imag_residual = 0.0;  // discarded imaginary part
};

namespace detail {

struct cluster {
    cplx lambda;
    int mult = 0;
    Eigen::MatrixXcd basis;
    int geometric = 0;
};

inline std::vector<cluster> clusters_of(const Eigen::MatrixXd& a, double rel)
{
    const int d = static_cast<int>(a.rows());
    Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(a.cast<cplx>());
    if (es.info() != Eigen::Success)
        throw precondition_error("eigen-decomposition failed");
    std::vector<cplx> ev(es.eigenvalues().data(), es.eigenvalues().data() + d);
    std::vector<cluster> cl;
    for (const cplx& l : ev) {
        bool merged = false;
        for (auto& c : cl) {
            const bool unit_pair = std::abs(l - 1.0) <= 1e-6 && std::abs(c.lambda - 1.0) <= 1e-6;
            if (unit_pair || std::abs(l - c.lambda) <= rel * std::max(1.0, std::abs(l))) {
                c.lambda = (c.lambda * static_cast<double>(c.mult) + l) / static_cast<double>(c.mult + 1);
                ++c.mult;
                merged = true;
                break;
            }
        }
        if (!merged)
            cl.push_back({l, 1, {}, 0});
    }
    for (auto& c : cl) {
        if (std::abs(c.lambda - 1.0) <= 1e-6)
            c.lambda = 1.0;
        if (std::abs(c.lambda.imag()) <= rel * std::abs(c.lambda) && c.lambda.real() < 0)
            throw negative_eigenvalue_error(c.lambda.real());
        const Eigen::MatrixXcd s = a.cast<cplx>() - c.lambda * Eigen::MatrixXcd::Identity(d, d);
        Eigen::MatrixXcd p = Eigen::MatrixXcd::Identity(d, d);
        for (int k = 0; k < c.mult; ++k)
            p = p * s;
        Eigen::FullPivLU<Eigen::MatrixXcd> lu(p);
        lu.setThreshold(1e-7);
        c.basis = lu.kernel();
        if (c.basis.cols() != c.mult)
            throw precondition_error("unresolvable eigenvalue cluster near " + std::to_string(c.lambda.real()) + "+" +
                                     std::to_string(c.lambda.imag()) + "i");
        Eigen::FullPivLU<Eigen::MatrixXcd> lu1(s);
        lu1.setThreshold(1e-7);
        c.geometric = static_cast<int>(lu1.dimensionOfKernel());
        const bool semisimple = c.geometric == c.mult;
        if (c.mult > 1 && c.geometric != 1 && !semisimple && c.lambda != cplx(1.0))
            throw precondition_error("eigenvalue cluster is neither a single Jordan block nor semisimple");
    }
    return cl;
}

inline cplx principal_log(cplx l) { return std::log(l); }

inline std::string block_type(cplx l)
{
    const double r = std::abs(l);
    if (std::abs(l - 1.0) <= 1e-9)
        return "unit";
    if (std::abs(r - 1.0) <= 1e-9)
        return "elliptic";
    if (std::abs(l.imag()) <= 1e-9 * r)
        return "hyperbolic-real";
    return "loxodromic";
}

inline bool is_representative(cplx l)
{
    const double r = std::abs(l);
    if (std::abs(r - 1.0) > 1e-9)
        return r > 1.0;
    return l.imag() > 0 || std::abs(l - 1.0) <= 1e-9;
}

} // namespace detail

inline SpectralData spectral_pairing(const Eigen::MatrixXd& a, double cluster_tol = 1e-8)
{
    if (a.rows() != a.cols() || a.rows() % 2 != 0)
        throw precondition_error("spectral_pairing: matrix must be square of even size");
    const auto cl = detail::clusters_of(a, cluster_tol);
    SpectralData sd;
    sd.cluster_tol = cluster_tol;
    const Eigen::MatrixXcd j = symplectic_j_real(static_cast<int>(a.rows() / 2)).cast<cplx>();
    for (std::size_t p = 0; p < cl.size(); ++p)
        for (std::size_t q = 0; q < cl.size(); ++q) {
            if (std::abs(cl[p].lambda * cl[q].lambda - 1.0) <= 1e-8)
                continue;
            for (int u = 0; u < cl[p].basis.cols(); ++u)
                for (int v = 0; v < cl[q].basis.cols(); ++v) {
                    const Eigen::VectorXcd bu = cl[p].basis.col(u).normalized();
                    const Eigen::VectorXcd bv = cl[q].basis.col(v).normalized();
                    const cplx s = (j * bu).transpose() * bv;
                    sd.prop_orthogonality = std::max(sd.prop_orthogonality, std::abs(s));
                }
        }
    for (const auto& c : cl) {
        if (!detail::is_representative(c.lambda))
            continue;
        SpectralBlock b;
        b.lambda = c.lambda;
        b.mu = detail::principal_log(c.lambda);
        b.type = detail::block_type(c.lambda);
        b.multiplicity = c.mult;
        b.jordan_blocks = c.geometric;
        for (const auto& o : cl) {
            const cplx l = o.lambda;
            if (std::abs(l - c.lambda) < 1e-8 || std::abs(l - 1.0 / c.lambda) < 1e-8 || std::abs(l - std::conj(c.lambda)) < 1e-8 ||
                std::abs(l - 1.0 / std::conj(c.lambda)) < 1e-8)
                b.orbit.push_back(l);
        }
        // a conjugate representative of the same orbit is listed once
        bool dup = false;
        for (const auto& e : sd.blocks)
            if (std::abs(e.lambda - std::conj(b.lambda)) < 1e-8)
                dup = true;
        if (!dup)
            sd.blocks.push_back(b);
    }
    return sd;
}

// Real logarithm with exp(B) = A and J B symmetric (principal branch on the
// representatives; partners follow from mu(1/l) = -mu(l), mu(conj l) = conj mu(l)).
inline LogResult symplectic_log(const Eigen::MatrixXd& a, double cluster_tol = 1e-8)
{
    const auto sc = check_symplectic(a, 1e-8);
    if (!sc.ok)
        throw precondition_error("symplectic_log: matrix is not symplectic (residual " + std::to_string(sc.residual) + ")");
    const int d = static_cast<int>(a.rows());
    const auto cl = detail::clusters_of(a, cluster_tol);
    Eigen::MatrixXcd v(d, d);
    int col = 0;
    for (const auto& c : cl) {
        v.block(0, col, d, c.mult) = c.basis;
        col += c.mult;
    }
    Eigen::FullPivLU<Eigen::MatrixXcd> lu(v);
    if (!lu.isInvertible())
        throw precondition_error("generalized eigenvectors do not span");
    const Eigen::MatrixXcd vinv = lu.inverse();
    const Eigen::MatrixXcd ab = vinv * a.cast<cplx>() * v;
    Eigen::MatrixXcd lb = Eigen::MatrixXcd::Zero(d, d);
    col = 0;
    for (const auto& c : cl) {
        const int m = c.mult;
        const Eigen::MatrixXcd blk = ab.block(col, col, m, m);
        const Eigen::MatrixXcd nn = (blk - c.lambda * Eigen::MatrixXcd::Identity(m, m)) / c.lambda;
        Eigen::MatrixXcd acc = detail::principal_log(c.lambda) * Eigen::MatrixXcd::Identity(m, m);
        Eigen::MatrixXcd pw = Eigen::MatrixXcd::Identity(m, m);
        for (int k = 1; k <= m; ++k) {
            pw = pw * nn;
            acc += ((k % 2) ? 1.0 : -1.0) / static_cast<double>(k) * pw;
        }
        lb.block(col, col, m, m) = acc;
        col += m;
    }
    const Eigen::MatrixXcd bc = v * lb * vinv;
    LogResult r;
    r.imag_residual = bc.imag().norm();
    Eigen::MatrixXd b = bc.real();
    const Eigen::MatrixXd j = symplectic_j_real(d / 2);
    Eigen::MatrixXd jb = j * b;
    r.jb_raw = (jb - jb.transpose()).norm();
    jb = 0.5 * (jb + jb.transpose());
    b = -j * jb;  // J^-1 = -J
    r.B = b;
    jb = j * b;
    r.jb_residual = (jb - jb.transpose()).norm();
    r.exp_residual = (b.exp() - a).norm();
    r.spectral = spectral_pairing(a, cluster_tol);
    return r;
}

inline Eigen::MatrixXd matrix_exp(const Eigen::MatrixXd& b) { return b.exp(); }

// ---------------------------------------------------------------------------
// Exact logarithm
// ---------------------------------------------------------------------------

// B = field + 2 pi turns, the two parts commuting.
struct ExactLogResult {
    xmatrix field;
    xmatrix turns;
    std::vector<std::string> kinds;  // per degree-of-freedom component
    std::vector<std::vector<int>> components;

    Eigen::MatrixXd to_float(double tau_value) const
    {
        const int d = field.rows();
        Eigen::MatrixXd b(d, d);
        for (int i = 0; i < d; ++i)
            for (int j = 0; j < d; ++j)
                b(i, j) = field(i, j).eval(tau_value).real() + 2.0 * std::numbers::pi * turns(i, j).eval(tau_value).real();
        return b;
    }
};

namespace detail {

inline xmatrix submatrix(const xmatrix& a, const std::vector<int>& idx)
{
    xmatrix s(static_cast<int>(idx.size()), static_cast<int>(idx.size()));
    for (std::size_t i = 0; i < idx.size(); ++i)
        for (std::size_t j = 0; j < idx.size(); ++j)
            s(static_cast<int>(i), static_cast<int>(j)) = a(idx[i], idx[j]);
    return s;
}

inline bool nilpotent(const xmatrix& m)
{
    xmatrix p = m;
    for (int k = 1; k < m.rows(); ++k)
        p = p * m;
    return p.is_zero();
}

} // namespace detail

// Exact logarithm on unipotent, model-diagonal and quarter-turn blocks.
// An optional symplectic basis S (columns) is applied first: A' = S^-1 A S.
inline ExactLogResult symplectic_log_exact(const xmatrix& a0, const exp_model& model, const xmatrix* basis = nullptr)
{
    if (!check_symplectic(a0).ok)
        throw precondition_error("symplectic_log: matrix is not symplectic");
    const xmatrix a = basis ? basis->inverse() * a0 * *basis : a0;
    const int d = a.rows();
    const int n = d / 2;
    auto coupled = [&](int p, int q) {
        const int ip[2] = {p, n + p};
        const int iq[2] = {q, n + q};
        for (int u : ip)
            for (int v : iq)
                if (!is_zero(a(u, v)) || !is_zero(a(v, u)))
                    return true;
        return false;
    };
    ExactLogResult r;
    r.field = xmatrix(d, d);
    r.turns = xmatrix(d, d);
    for (const auto& comp : detail::components(n, coupled)) {
        std::vector<int> idx;
        for (int j : comp)
            idx.push_back(j);
        for (int j : comp)
            idx.push_back(n + j);
        const xmatrix s = detail::submatrix(a, idx);
        const int m = s.rows();
        const xmatrix id = xmatrix::identity(m);
        xmatrix f(m, m), t(m, m);
        std::string kind;
        if (detail::nilpotent(s - id)) {
            const xmatrix nn = s - id;
            xmatrix pw = id;
            for (int k = 1; k < m + 1; ++k) {
                pw = pw * nn;
                if (pw.is_zero())
                    break;
                f += exact(make_rational((k % 2) ? 1 : -1, k)) * pw;
            }
            kind = "unit";
        }
        else if (s.is_diagonal()) {
            for (int i = 0; i < m; ++i) {
                auto l = model.try_log(s(i, i));
                if (!l) {
                    if (s(i, i).is_constant() && s(i, i).constant().is_real() && sgn(s(i, i).constant().re) < 0)
                        throw negative_eigenvalue_error(s(i, i).constant().re.get_d());
                    throw not_representable_error("eigenvalue " + s(i, i).str() + " has no logarithm in the exact field (model " +
                                                  model.name() + "); use the float field");
                }
                f(i, i) = *l;
            }
            kind = "hyperbolic-real";
        }
        else if (s * s == exact(-1) * id) {
            t = exact(make_rational(1, 4)) * s;
            kind = "elliptic";
        }
        else {
            if (s * s * s * s == id || (s + id).is_zero())
                throw negative_eigenvalue_error(-1.0);
            throw not_representable_error("block is not unipotent, model-diagonal or a quarter turn; use the float field");
        }
        for (int i = 0; i < m; ++i)
            for (int j = 0; j < m; ++j) {
                r.field(idx[static_cast<std::size_t>(i)], idx[static_cast<std::size_t>(j)]) = f(i, j);
                r.turns(idx[static_cast<std::size_t>(i)], idx[static_cast<std::size_t>(j)]) = t(i, j);
            }
        r.kinds.push_back(kind);
        r.components.push_back(comp);
    }
    if (basis) {
        const xmatrix binv = basis->inverse();
        r.field = *basis * r.field * binv;
        r.turns = *basis * r.turns * binv;
    }
    return r;
}

// exp of an exact log result, block by block (independent of how it was built)
inline xmatrix exp_exact(const ExactLogResult& r, const exp_model& model, const xmatrix* basis = nullptr)
{
    const xmatrix binv = basis ? basis->inverse() : xmatrix::identity(r.field.rows());
    const xmatrix f = basis ? binv * r.field * *basis : r.field;
    const xmatrix t = basis ? binv * r.turns * *basis : r.turns;
    const int d = f.rows();
    xmatrix out(d, d);
    const int n = d / 2;
    for (const auto& comp : r.components) {
        std::vector<int> idx;
        for (int j : comp)
            idx.push_back(j);
        for (int j : comp)
            idx.push_back(n + j);
        const xmatrix fs = detail::submatrix(f, idx);
        const xmatrix ts = detail::submatrix(t, idx);
        const int m = fs.rows();
        const xmatrix id = xmatrix::identity(m);
        xmatrix e(m, m);
        if (!ts.is_zero()) {
            // (4 ts)^2 = -I gives exp(2 pi ts) = cos(pi/2) + sin(pi/2) 4 ts
            const xmatrix q = exact(4) * ts;
            if (!(q * q == exact(-1) * id) || !fs.is_zero())
                throw precondition_error("exp_exact: unsupported turn block");
            e = q;
        }
        else if (fs.is_diagonal() && !detail::nilpotent(fs)) {
            for (int i = 0; i < m; ++i)
                e(i, i) = model.exp(fs(i, i));
        }
        else {
            if (!detail::nilpotent(fs))
                throw precondition_error("exp_exact: unsupported field block");
            xmatrix pw = id;
            e = id;
            exact fact(1);
            for (int k = 1; k <= m; ++k) {
                pw = pw * fs;
                fact = fact * exact(k);
                e += (exact(1) / fact) * pw;
            }
        }
        for (int i = 0; i < m; ++i)
            for (int j = 0; j < m; ++j)
                out(idx[static_cast<std::size_t>(i)], idx[static_cast<std::size_t>(j)]) = e(i, j);
    }
    return basis ? *basis * out * binv : out;
}

} // namespace fionf
