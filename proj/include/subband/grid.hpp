#ifndef SUBBAND_GRID_HPP
#define SUBBAND_GRID_HPP

#include <Eigen/Core>

#include <string>

#include "subband/errors.hpp"

namespace subband {

// Lateral fields are stored flat, l = i1 + ny1 * i2.  3D fields are stored
// with one column per lateral node holding the z-profile on nodes k = 0..nz.
template <typename Scalar>
using Field2DT = Eigen::Array<Scalar, Eigen::Dynamic, 1>;
template <typename Scalar>
using Field3DT = Eigen::Array<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

using Field2D = Field2DT<double>;
using Field3D = Field3DT<double>;

/// Tensor grid on (0,L1)x(0,L2)x(0,1).
///
/// Laterally only interior nodes are stored (zero Dirichlet data lives on the
/// implied boundary ring).  In z the closed node set z_k = k/nz is stored;
/// the Schrödinger problem uses the interior subset k = 1..nz-1.
class Grid {
public:
    Grid(int ny1, int ny2, int nz, double L1 = 1.0, double L2 = 1.0);

    int ny1() const { return ny1_; }
    int ny2() const { return ny2_; }
    int nz() const { return nz_; }
    double L1() const { return L1_; }
    double L2() const { return L2_; }
    double hy1() const { return hy1_; }
    double hy2() const { return hy2_; }
    double hz() const { return hz_; }

    int lateral_size() const { return ny1_ * ny2_; }
    int z_size() const { return nz_ + 1; }
    int interior_z_size() const { return nz_ - 1; }

    int lateral_index(int i1, int i2) const { return i1 + ny1_ * i2; }
    int i1_of(int l) const { return l % ny1_; }
    int i2_of(int l) const { return l / ny1_; }
    double y1(int i1) const { return (i1 + 1) * hy1_; }
    double y2(int i2) const { return (i2 + 1) * hy2_; }
    double z(int k) const { return k * hz_; }

    /// Quadrature weight of one lateral node.
    double lateral_weight() const { return hy1_ * hy2_; }
    /// Trapezoid weights on the closed z node set.
    const Eigen::ArrayXd& z_weights() const { return zw_; }
    /// Quadrature measure of omega (the node rule applied to f = 1).
    double area() const { return lateral_size() * lateral_weight(); }

    Field2D zeros_2d() const { return Field2D::Zero(lateral_size()); }
    Field3D zeros_3d() const { return Field3D::Zero(z_size(), lateral_size()); }

    template <typename Derived>
    void require_2d(const Eigen::DenseBase<Derived>& f, const char* what) const
    {
        if (f.cols() != 1 || f.rows() != lateral_size())
            throw DimensionMismatch(std::string(what) + ": expected a lateral field of size "
                                    + std::to_string(lateral_size()));
    }

    template <typename Derived>
    void require_3d(const Eigen::DenseBase<Derived>& f, const char* what) const
    {
        if (f.rows() != z_size() || f.cols() != lateral_size())
            throw DimensionMismatch(std::string(what) + ": expected a (nz+1) x lateral field");
    }

    template <typename Derived>
    void require_z(const Eigen::DenseBase<Derived>& p, const char* what) const
    {
        if (p.size() != z_size())
            throw DimensionMismatch(std::string(what) + ": expected nz+1 z samples");
    }

    bool operator==(const Grid& o) const
    {
        return ny1_ == o.ny1_ && ny2_ == o.ny2_ && nz_ == o.nz_ && L1_ == o.L1_ && L2_ == o.L2_;
    }

private:
    int ny1_, ny2_, nz_;
    double L1_, L2_;
    double hy1_, hy2_, hz_;
    Eigen::ArrayXd zw_;
};

/// Node rule over omega: sum of f * hy1 * hy2 in index order.
template <typename Derived>
typename Derived::Scalar integrate_omega(const Eigen::DenseBase<Derived>& f, const Grid& g)
{
    g.require_2d(f, "integrate_omega");
    using Scalar = typename Derived::Scalar;
    Scalar s(0);
    for (Eigen::Index l = 0; l < f.rows(); ++l)
        s += f(l, 0);
    return s * Scalar(g.lateral_weight());
}

/// Trapezoid rule over (0,1) on the closed z node set.
template <typename Derived>
typename Derived::Scalar integrate_z(const Eigen::DenseBase<Derived>& p, const Grid& g)
{
    g.require_z(p, "integrate_z");
    using Scalar = typename Derived::Scalar;
    const auto& w = g.z_weights();
    Scalar s(0);
    for (Eigen::Index k = 0; k < p.size(); ++k)
        s += Scalar(w(k)) * p.derived().coeff(k);
    return s;
}

/// Integral over Omega of a 3D field (lateral node rule times z trapezoid).
double integrate_volume(const Field3D& f, const Grid& g);

/// Volume integral of f * h.
double inner_volume(const Field3D& f, const Field3D& h, const Grid& g);

/// Quadrature L2(Omega) norm.
double l2_norm(const Field3D& f, const Grid& g);

/// z-profiles along each lateral column, integrated: returns a lateral field.
Field2D integrate_columns_z(const Field3D& f, const Grid& g);

} // namespace subband

#endif
