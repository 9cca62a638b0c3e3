#include "subband/schrodinger1d.hpp"

#include <cmath>
#include <string>

#include "subband/tridiagonal.hpp"

namespace subband {

void SubbandSpectrum::require(const Grid& g, const char* what) const
{
    if (J < 0 || lambda.rows() != g.lateral_size() || lambda.cols() != J
        || static_cast<int>(chi.size()) != J)
        throw DimensionMismatch(std::string(what) + ": spectrum does not match grid");
    for (const auto& c : chi)
        g.require_3d(c, what);
}

double z_kinetic_energy(const Eigen::Ref<const Eigen::ArrayXd>& chi, const Grid& g)
{
    g.require_z(chi, "z_kinetic_energy");
    const double h = g.hz();
    double s = 0.0;
    for (int k = 0; k < g.nz(); ++k) {
        const double d = (chi(k + 1) - chi(k)) / h;
        s += h * d * d;
    }
    return s;
}

double z_inner(const Eigen::Ref<const Eigen::ArrayXd>& a, const Eigen::Ref<const Eigen::ArrayXd>& b,
               const Grid& g)
{
    g.require_z(a, "z_inner");
    g.require_z(b, "z_inner");
    return integrate_z((a * b).eval(), g);
}

double rayleigh_energy(const Eigen::Ref<const Eigen::ArrayXd>& chi,
                       const Eigen::Ref<const Eigen::ArrayXd>& W, const Grid& g)
{
    g.require_z(W, "rayleigh_energy");
    return 0.5 * z_kinetic_energy(chi, g) + integrate_z((W * chi * chi).eval(), g);
}

double free_eigenvalue(int j, const Grid& g)
{
    const double pi = 3.14159265358979323846;
    const double h = g.hz();
    // 1 - cos(x) = 2 sin^2(x/2) avoids cancellation for small x.
    const double s = std::sin(0.5 * pi * j * h);
    return 2.0 * s * s / (h * h);
}

SliceEigenpairs solve_slice(const Eigen::ArrayXd& W_interior, int J, const Grid& g)
{
    const int n = g.interior_z_size();
    if (W_interior.size() != n)
        throw DimensionMismatch("solve_slice: potential must have nz-1 interior samples");
    if (J < 1 || J > n)
        throw InvalidArgument("solve_slice: band count must lie in [1, nz-1]");
    if (!W_interior.allFinite())
        throw InvalidArgument("solve_slice: potential is not finite");

    const double h = g.hz();
    const double inv_h2 = 1.0 / (h * h);
    Eigen::VectorXd diag = (inv_h2 + W_interior).matrix();
    Eigen::VectorXd off = Eigen::VectorXd::Constant(n - 1, -0.5 * inv_h2);
    SymmetricTridiagonal<double> T(diag, off);

    Eigen::VectorXd values;
    Eigen::MatrixXd vectors;
    T.lowest(J, values, vectors);

    SliceEigenpairs out;
    out.lambda.resize(J);
    out.chi = Eigen::MatrixXd::Zero(n + 2, J);
    Eigen::ArrayXd Wfull = Eigen::ArrayXd::Zero(n + 2);
    Wfull.segment(1, n) = W_interior;
    const double scale = 1.0 / std::sqrt(h);
    for (int j = 0; j < J; ++j) {
        Eigen::VectorXd v = vectors.col(j) * scale;
        int first = 0;
        while (first < n - 1 && v(first) == 0.0)
            ++first;
        if (v(first) < 0.0)
            v = -v;
        out.chi.col(j).segment(1, n) = v;
        // Rayleigh quotient in difference form: no cancellation against the 1/h^2 diagonal.
        out.lambda(j) = rayleigh_energy(out.chi.col(j).array(), Wfull, g);
    }
    return out;
}

SubbandSpectrum compute_spectrum(const Field3D& W, int J, const Grid& g)
{
    g.require_3d(W, "compute_spectrum");
    const int nl = g.lateral_size();
    const int n = g.interior_z_size();
    SubbandSpectrum spec;
    spec.J = J;
    spec.lambda.resize(nl, J);
    spec.chi.assign(J, g.zeros_3d());
    for (int l = 0; l < nl; ++l) {
        Eigen::ArrayXd w = W.col(l).segment(1, n);
        SliceEigenpairs s = solve_slice(w, J, g);
        spec.lambda.row(l) = s.lambda.transpose();
        for (int j = 0; j < J; ++j)
            spec.chi[j].col(l) = s.chi.col(j).array();
    }
    return spec;
}

Eigen::ArrayXd eigenvalue_stability_gap(const Eigen::ArrayXd& W1, const Eigen::ArrayXd& W2, int J,
                                        const Grid& g)
{
    const SliceEigenpairs a = solve_slice(W1, J, g);
    const SliceEigenpairs b = solve_slice(W2, J, g);
    return (a.lambda - b.lambda).abs();
}

} // namespace subband
