#include "subband/grid.hpp"

#include <cmath>

namespace subband {

Grid::Grid(int ny1, int ny2, int nz, double L1, double L2)
    : ny1_(ny1), ny2_(ny2), nz_(nz), L1_(L1), L2_(L2)
{
    if (ny1 < 2 || ny2 < 2)
        throw InvalidArgument("Grid: need at least 2 lateral nodes per direction");
    if (nz < 4)
        throw InvalidArgument("Grid: need nz >= 4");
    if (!(L1 > 0.0) || !(L2 > 0.0) || !std::isfinite(L1) || !std::isfinite(L2))
        throw InvalidArgument("Grid: lateral extents must be positive and finite");
    hy1_ = L1 / (ny1 + 1);
    hy2_ = L2 / (ny2 + 1);
    hz_ = 1.0 / nz;
    zw_ = Eigen::ArrayXd::Constant(nz + 1, hz_);
    zw_(0) = 0.5 * hz_;
    zw_(nz) = 0.5 * hz_;
}

Field2D integrate_columns_z(const Field3D& f, const Grid& g)
{
    g.require_3d(f, "integrate_columns_z");
    const auto& w = g.z_weights();
    Field2D out(g.lateral_size());
    for (int l = 0; l < g.lateral_size(); ++l) {
        double s = 0.0;
        for (int k = 0; k < g.z_size(); ++k)
            s += w(k) * f(k, l);
        out(l) = s;
    }
    return out;
}

double integrate_volume(const Field3D& f, const Grid& g)
{
    return integrate_omega(integrate_columns_z(f, g), g);
}

double inner_volume(const Field3D& f, const Field3D& h, const Grid& g)
{
    g.require_3d(h, "inner_volume");
    return integrate_volume((f * h).eval(), g);
}

double l2_norm(const Field3D& f, const Grid& g)
{
    return std::sqrt(inner_volume(f, f, g));
}

} // namespace subband
