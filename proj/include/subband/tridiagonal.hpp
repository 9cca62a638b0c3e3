#ifndef SUBBAND_TRIDIAGONAL_HPP
#define SUBBAND_TRIDIAGONAL_HPP

#include <Eigen/Core>

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "subband/errors.hpp"

namespace subband {

/// Lowest eigenpairs of a real symmetric tridiagonal matrix.
///
/// Eigenvalues come from Sturm-sequence bisection, eigenvectors from inverse
/// iteration with a partially pivoted LU of (T - lambda I), seeded with the
/// all-ones vector.  Vectors are Euclidean-normalized; no sign convention.
template <typename Scalar>
class SymmetricTridiagonal {
public:
    using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
    using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

    SymmetricTridiagonal(Vector diag, Vector off) : d_(std::move(diag)), e_(std::move(off))
    {
        if (d_.size() < 1 || e_.size() != d_.size() - 1)
            throw DimensionMismatch("SymmetricTridiagonal: off-diagonal must have n-1 entries");
        const Eigen::Index n = d_.size();
        lo_ = std::numeric_limits<Scalar>::max();
        hi_ = std::numeric_limits<Scalar>::lowest();
        for (Eigen::Index i = 0; i < n; ++i) {
            Scalar r(0);
            if (i > 0)
                r += std::abs(e_(i - 1));
            if (i + 1 < n)
                r += std::abs(e_(i));
            lo_ = std::min(lo_, d_(i) - r);
            hi_ = std::max(hi_, d_(i) + r);
        }
        norm_ = std::max(std::abs(lo_), std::abs(hi_));
        const Scalar tiny = std::numeric_limits<Scalar>::min();
        pivmin_ = tiny * std::max(Scalar(1), norm_ * norm_);
    }

    Eigen::Index size() const { return d_.size(); }
    Scalar norm_bound() const { return norm_; }

    /// Number of eigenvalues strictly below x.
    Eigen::Index count_below(Scalar x) const
    {
        Eigen::Index cnt = 0;
        Scalar q = d_(0) - x;
        if (std::abs(q) < pivmin_)
            q = -pivmin_;
        if (q < 0)
            ++cnt;
        for (Eigen::Index i = 1; i < d_.size(); ++i) {
            q = d_(i) - x - e_(i - 1) * e_(i - 1) / q;
            if (std::abs(q) < pivmin_)
                q = -pivmin_;
            if (q < 0)
                ++cnt;
        }
        return cnt;
    }

    /// k-th eigenvalue (0-based, ascending) by bisection on the Sturm count.
    Scalar eigenvalue(Eigen::Index k, Scalar lower_hint) const
    {
        const Scalar eps = std::numeric_limits<Scalar>::epsilon();
        Scalar lo = std::max(lo_ - norm_ * eps * 4, lower_hint);
        Scalar hi = hi_ + norm_ * eps * 4;
        if (count_below(lo) > k)
            lo = lo_ - norm_ * eps * 4;
        for (int it = 0; it < max_bisection; ++it) {
            const Scalar mid = lo + (hi - lo) / 2;
            if (mid <= lo || mid >= hi)
                break;
            if (count_below(mid) > k)
                hi = mid;
            else
                lo = mid;
            if (hi - lo <= 2 * eps * std::max(std::abs(lo), std::abs(hi)) + pivmin_)
                break;
        }
        return lo + (hi - lo) / 2;
    }

    /// Lowest `count` eigenpairs; columns of `vectors` are unit Euclidean vectors.
    void lowest(Eigen::Index count, Vector& values, Matrix& vectors, int max_inverse_iter = 12) const
    {
        const Eigen::Index n = d_.size();
        if (count < 0 || count > n)
            throw InvalidArgument("SymmetricTridiagonal::lowest: count out of range");
        values.resize(count);
        vectors.resize(n, count);
        Scalar hint = std::numeric_limits<Scalar>::lowest();
        for (Eigen::Index k = 0; k < count; ++k) {
            values(k) = eigenvalue(k, hint);
            hint = values(k);
        }
        const Scalar eps = std::numeric_limits<Scalar>::epsilon();
        const Scalar res_tol = Scalar(10) * Scalar(n) * eps * std::max(norm_, Scalar(1));
        for (Eigen::Index k = 0; k < count; ++k) {
            Vector x = Vector::Ones(n);
            bool converged = false;
            for (int it = 0; it < max_inverse_iter; ++it) {
                x = solve_shifted(values(k), x);
                for (Eigen::Index m = 0; m < k; ++m) {
                    if (std::abs(values(k) - values(m)) < Scalar(1e-3) * norm_)
                        x -= vectors.col(m).dot(x) * vectors.col(m);
                }
                x /= x.norm();
                if (it >= 1 && residual(values(k), x) <= res_tol) {
                    converged = true;
                    break;
                }
            }
            if (!converged)
                throw NonConvergence("SymmetricTridiagonal: inverse iteration did not converge");
            vectors.col(k) = x;
        }
    }

    Scalar residual(Scalar lambda, const Vector& x) const
    {
        const Eigen::Index n = d_.size();
        Scalar s(0);
        for (Eigen::Index i = 0; i < n; ++i) {
            Scalar r = (d_(i) - lambda) * x(i);
            if (i > 0)
                r += e_(i - 1) * x(i - 1);
            if (i + 1 < n)
                r += e_(i) * x(i + 1);
            s += r * r;
        }
        return std::sqrt(s);
    }

    static constexpr int max_bisection = 256;

private:
    // Solves (T - shift I) x = b by Gaussian elimination with partial pivoting.
    Vector solve_shifted(Scalar shift, const Vector& b) const
    {
        const Eigen::Index n = d_.size();
        const Scalar eps = std::numeric_limits<Scalar>::epsilon();
        const Scalar tiny = eps * std::max(norm_, Scalar(1));
        std::vector<Scalar> a(n), up(n, Scalar(0)), up2(n, Scalar(0)), sub(n, Scalar(0)), mult(n, Scalar(0));
        std::vector<char> swapped(n, 0);
        for (Eigen::Index i = 0; i < n; ++i)
            a[i] = d_(i) - shift;
        for (Eigen::Index i = 0; i + 1 < n; ++i) {
            up[i] = e_(i);
            sub[i] = e_(i);
        }
        for (Eigen::Index k = 0; k + 1 < n; ++k) {
            if (std::abs(a[k]) >= std::abs(sub[k])) {
                if (a[k] == Scalar(0))
                    a[k] = tiny;
                mult[k] = sub[k] / a[k];
                a[k + 1] -= mult[k] * up[k];
            } else {
                mult[k] = a[k] / sub[k];
                const Scalar old_ak1 = a[k + 1];
                const Scalar old_uk = up[k];
                const Scalar old_uk1 = (k + 2 < n) ? up[k + 1] : Scalar(0);
                a[k] = sub[k];
                up[k] = old_ak1;
                up2[k] = old_uk1;
                a[k + 1] = old_uk - mult[k] * old_ak1;
                if (k + 2 < n)
                    up[k + 1] = -mult[k] * old_uk1;
                swapped[k] = 1;
            }
        }
        if (a[n - 1] == Scalar(0))
            a[n - 1] = tiny;
        Vector y = b;
        for (Eigen::Index k = 0; k + 1 < n; ++k) {
            if (swapped[k])
                std::swap(y(k), y(k + 1));
            y(k + 1) -= mult[k] * y(k);
        }
        Vector x(n);
        for (Eigen::Index k = n - 1; k >= 0; --k) {
            Scalar s = y(k);
            if (k + 1 < n)
                s -= up[k] * x(k + 1);
            if (k + 2 < n)
                s -= up2[k] * x(k + 2);
            Scalar piv = a[k];
            if (std::abs(piv) < tiny)
                piv = (piv < 0) ? -tiny : tiny;
            x(k) = s / piv;
        }
        return x;
    }

    Vector d_, e_;
    Scalar lo_, hi_, norm_, pivmin_;
};

} // namespace subband

#endif
