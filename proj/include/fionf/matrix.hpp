#pragma once

// Small dense matrices over the coefficient fields.

#include <Eigen/Dense>

#include <cmath>
#include <cstddef>
#include <sstream>
#include <string>
#include <vector>

#include "fionf/errors.hpp"
#include "fionf/scalar.hpp"

namespace fionf {

template <typename C>
class Matrix {
public:
    Matrix() = default;
    Matrix(int rows, int cols) : r_(rows), c_(cols), d_(static_cast<std::size_t>(rows * cols), C(0)) {}

    static Matrix identity(int n)
    {
        Matrix m(n, n);
        for (int i = 0; i < n; ++i)
            m(i, i) = C(1);
        return m;
    }

    // J(x, xi) = (xi, -x), so that sigma(a, b) = <J a, b>
    static Matrix symplectic_j(int n)
    {
        Matrix m(2 * n, 2 * n);
        for (int i = 0; i < n; ++i) {
            m(i, n + i) = C(1);
            m(n + i, i) = C(-1);
        }
        return m;
    }

    int rows() const { return r_; }
    int cols() const { return c_; }

    C& operator()(int i, int j) { return d_[static_cast<std::size_t>(i * c_ + j)]; }
    const C& operator()(int i, int j) const { return d_[static_cast<std::size_t>(i * c_ + j)]; }

    Matrix transpose() const
    {
        Matrix t(c_, r_);
        for (int i = 0; i < r_; ++i)
            for (int j = 0; j < c_; ++j)
                t(j, i) = (*this)(i, j);
        return t;
    }

    Matrix conj() const
    {
        Matrix t(r_, c_);
        for (std::size_t k = 0; k < d_.size(); ++k)
            t.d_[k] = fionf::conj(d_[k]);
        return t;
    }

    bool is_zero() const
    {
        for (const auto& x : d_)
            if (!fionf::is_zero(x))
                return false;
        return true;
    }

    bool is_diagonal() const
    {
        for (int i = 0; i < r_; ++i)
            for (int j = 0; j < c_; ++j)
                if (i != j && !fionf::is_zero((*this)(i, j)))
                    return false;
        return true;
    }

    Matrix& operator+=(const Matrix& o)
    {
        same_shape(o);
        for (std::size_t k = 0; k < d_.size(); ++k)
            d_[k] += o.d_[k];
        return *this;
    }
    Matrix& operator-=(const Matrix& o)
    {
        same_shape(o);
        for (std::size_t k = 0; k < d_.size(); ++k)
            d_[k] -= o.d_[k];
        return *this;
    }
    friend Matrix operator+(Matrix a, const Matrix& b) { return a += b; }
    friend Matrix operator-(Matrix a, const Matrix& b) { return a -= b; }
    friend Matrix operator-(Matrix a)
    {
        for (auto& x : a.d_)
            x = -x;
        return a;
    }
    friend Matrix operator*(const C& s, Matrix a)
    {
        for (auto& x : a.d_)
            x = s * x;
        return a;
    }
    friend Matrix operator*(const Matrix& a, const Matrix& b)
    {
        if (a.c_ != b.r_)
            throw precondition_error("matrix shape mismatch in product");
        Matrix m(a.r_, b.c_);
        for (int i = 0; i < a.r_; ++i)
            for (int k = 0; k < a.c_; ++k) {
                const C& x = a(i, k);
                if (fionf::is_zero(x))
                    continue;
                for (int j = 0; j < b.c_; ++j)
                    m(i, j) += x * b(k, j);
            }
        return m;
    }
    friend bool operator==(const Matrix& a, const Matrix& b) { return a.r_ == b.r_ && a.c_ == b.c_ && a.d_ == b.d_; }

    std::vector<C> column(int j) const
    {
        std::vector<C> v(static_cast<std::size_t>(r_));
        for (int i = 0; i < r_; ++i)
            v[static_cast<std::size_t>(i)] = (*this)(i, j);
        return v;
    }
    void set_column(int j, const std::vector<C>& v)
    {
        for (int i = 0; i < r_; ++i)
            (*this)(i, j) = v[static_cast<std::size_t>(i)];
    }

    // Gauss-Jordan; exact fields pivot on the first nonzero entry,
    // floats on the largest.
    Matrix inverse() const
    {
        if (r_ != c_)
            throw precondition_error("inverse of a non-square matrix");
        const int n = r_;
        Matrix a = *this;
        Matrix inv = identity(n);
        for (int col = 0; col < n; ++col) {
            int piv = -1;
            if constexpr (scalar_traits<C>::is_exact) {
                for (int i = col; i < n; ++i)
                    if (!fionf::is_zero(a(i, col))) {
                        piv = i;
                        break;
                    }
            }
            else {
                double best = 0.0;
                for (int i = col; i < n; ++i)
                    if (std::abs(a(i, col)) > best) {
                        best = std::abs(a(i, col));
                        piv = i;
                    }
                if (best < 1e-300)
                    piv = -1;
            }
            if (piv < 0)
                throw precondition_error("singular matrix");
            if (piv != col)
                for (int j = 0; j < n; ++j) {
                    std::swap(a(piv, j), a(col, j));
                    std::swap(inv(piv, j), inv(col, j));
                }
            const C p = C(1) / a(col, col);
            for (int j = 0; j < n; ++j) {
                a(col, j) = a(col, j) * p;
                inv(col, j) = inv(col, j) * p;
            }
            for (int i = 0; i < n; ++i) {
                if (i == col || fionf::is_zero(a(i, col)))
                    continue;
                const C f = a(i, col);
                for (int j = 0; j < n; ++j) {
                    a(i, j) -= f * a(col, j);
                    inv(i, j) -= f * inv(col, j);
                }
            }
        }
        return inv;
    }

    double max_abs() const
    {
        double m = 0.0;
        for (const auto& x : d_)
            m = std::max(m, std::abs(scalar_traits<C>::to_cplx(x)));
        return m;
    }

    std::string str() const
    {
        std::ostringstream os;
        os << "[";
        for (int i = 0; i < r_; ++i) {
            os << (i ? "; " : "");
            for (int j = 0; j < c_; ++j)
                os << (j ? ", " : "") << (*this)(i, j);
        }
        os << "]";
        return os.str();
    }

private:
    void same_shape(const Matrix& o) const
    {
        if (r_ != o.r_ || c_ != o.c_)
            throw precondition_error("matrix shape mismatch");
    }

    int r_ = 0;
    int c_ = 0;
    std::vector<C> d_;
};

using cmatrix = Matrix<cplx>;
using xmatrix = Matrix<exact>;

inline Eigen::MatrixXcd to_eigen(const cmatrix& m)
{
    Eigen::MatrixXcd e(m.rows(), m.cols());
    for (int i = 0; i < m.rows(); ++i)
        for (int j = 0; j < m.cols(); ++j)
            e(i, j) = m(i, j);
    return e;
}

inline cmatrix from_eigen(const Eigen::MatrixXcd& e)
{
    cmatrix m(static_cast<int>(e.rows()), static_cast<int>(e.cols()));
    for (int i = 0; i < m.rows(); ++i)
        for (int j = 0; j < m.cols(); ++j)
            m(i, j) = e(i, j);
    return m;
}

inline cmatrix from_eigen(const Eigen::MatrixXd& e)
{
    cmatrix m(static_cast<int>(e.rows()), static_cast<int>(e.cols()));
    for (int i = 0; i < m.rows(); ++i)
        for (int j = 0; j < m.cols(); ++j)
            m(i, j) = e(i, j);
    return m;
}

inline cmatrix to_float(const xmatrix& m, double tau_value)
{
    cmatrix r(m.rows(), m.cols());
    for (int i = 0; i < m.rows(); ++i)
        for (int j = 0; j < m.cols(); ++j)
            r(i, j) = m(i, j).eval(tau_value);
    return r;
}

inline cmatrix to_float(const cmatrix& m, double = 0.0) { return m; }

} // namespace fionf
