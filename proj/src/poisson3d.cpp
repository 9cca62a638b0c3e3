#include "subband/poisson3d.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <string>

namespace subband {

namespace {

constexpr double kPi = 3.14159265358979323846;

// K U with K = G^T W_e G (symmetric positive definite).
void apply_stiffness(const Field3D& U, Field3D& out, const Grid& g)
{
    const int n1 = g.ny1(), n2 = g.ny2(), nz = g.nz();
    const double wl = g.lateral_weight();
    const double c1 = 1.0 / (g.hy1() * g.hy1());
    const double c2 = 1.0 / (g.hy2() * g.hy2());
    const double cz = 1.0 / g.hz();
    const auto& wz = g.z_weights();
    out.resize(g.z_size(), g.lateral_size());
    for (int i2 = 0; i2 < n2; ++i2) {
        for (int i1 = 0; i1 < n1; ++i1) {
            const int l = g.lateral_index(i1, i2);
            const int lw = i1 > 0 ? l - 1 : -1;
            const int le = i1 + 1 < n1 ? l + 1 : -1;
            const int ls = i2 > 0 ? l - n1 : -1;
            const int ln = i2 + 1 < n2 ? l + n1 : -1;
            for (int k = 0; k <= nz; ++k) {
                const double u = U(k, l);
                double lat1 = 2.0 * u, lat2 = 2.0 * u;
                if (lw >= 0) lat1 -= U(k, lw);
                if (le >= 0) lat1 -= U(k, le);
                if (ls >= 0) lat2 -= U(k, ls);
                if (ln >= 0) lat2 -= U(k, ln);
                double zz = 0.0;
                if (k > 0) zz += u - U(k - 1, l);
                if (k < nz) zz += u - U(k + 1, l);
                out(k, l) = wl * (wz(k) * (c1 * lat1 + c2 * lat2) + cz * zz);
            }
        }
    }
}

Field3D node_weights(const Grid& g)
{
    Field3D w(g.z_size(), g.lateral_size());
    for (int l = 0; l < g.lateral_size(); ++l)
        w.col(l) = g.z_weights() * g.lateral_weight();
    return w;
}

Field3D solve_cg(const Field3D& rho, const Grid& g, const PoissonOptions& opt, const Field3D* guess)
{
    const Field3D W = node_weights(g);
    const Field3D b = W * rho;
    const double bnorm = std::sqrt((b * b).sum());
    if (bnorm == 0.0)
        return g.zeros_3d();

    // Jacobi preconditioner: diagonal of K.
    Field3D diag(g.z_size(), g.lateral_size());
    {
        const double wl = g.lateral_weight();
        const double lat = 2.0 / (g.hy1() * g.hy1()) + 2.0 / (g.hy2() * g.hy2());
        const double cz = 1.0 / g.hz();
        for (int l = 0; l < g.lateral_size(); ++l)
            for (int k = 0; k <= g.nz(); ++k)
                diag(k, l) = wl * (g.z_weights()(k) * lat + cz * ((k == 0 || k == g.nz()) ? 1.0 : 2.0));
    }

    Field3D x = guess ? *guess : g.zeros_3d();
    g.require_3d(x, "solve_poisson guess");
    Field3D r, Ap;
    if (guess) {
        apply_stiffness(x, Ap, g);
        r = b - Ap;
    } else {
        r = b;
    }
    Field3D z = r / diag;
    Field3D p = z;
    double rz = (r * z).sum();
    const int cap = opt.max_iter > 0 ? opt.max_iter : default_cg_iterations(g, opt.rel_tol);
    const double target = opt.rel_tol * bnorm;
    for (int it = 0; it < cap; ++it) {
        if (std::sqrt((r * r).sum()) <= target)
            return x;
        apply_stiffness(p, Ap, g);
        const double alpha = rz / (p * Ap).sum();
        x += alpha * p;
        r -= alpha * Ap;
        z = r / diag;
        const double rz_new = (r * z).sum();
        p = z + (rz_new / rz) * p;
        rz = rz_new;
    }
    if (std::sqrt((r * r).sum()) <= target)
        return x;
    throw NonConvergence("solve_poisson: CG did not reach relative residual "
                         + std::to_string(opt.rel_tol) + " within " + std::to_string(cap)
                         + " iterations");
}

// Exact diagonalization: sine modes laterally, cosine modes (DCT-I) in z.
Field3D solve_spectral(const Field3D& rho, const Grid& g)
{
    const int n1 = g.ny1(), n2 = g.ny2(), nz = g.nz();
    Eigen::MatrixXd S1(n1, n1), S2(n2, n2), C(nz + 1, nz + 1);
    Eigen::VectorXd e1(n1), e2(n2), ez(nz + 1);
    for (int i = 0; i < n1; ++i)
        for (int m = 0; m < n1; ++m)
            S1(i, m) = std::sin(kPi * (i + 1) * (m + 1) / (n1 + 1));
    for (int i = 0; i < n2; ++i)
        for (int m = 0; m < n2; ++m)
            S2(i, m) = std::sin(kPi * (i + 1) * (m + 1) / (n2 + 1));
    for (int k = 0; k <= nz; ++k)
        for (int m = 0; m <= nz; ++m)
            C(k, m) = std::cos(kPi * k * m / nz);
    for (int m = 0; m < n1; ++m) {
        const double s = std::sin(0.5 * kPi * (m + 1) / (n1 + 1));
        e1(m) = 4.0 * s * s / (g.hy1() * g.hy1());
    }
    for (int m = 0; m < n2; ++m) {
        const double s = std::sin(0.5 * kPi * (m + 1) / (n2 + 1));
        e2(m) = 4.0 * s * s / (g.hy2() * g.hy2());
    }
    for (int m = 0; m <= nz; ++m) {
        const double s = std::sin(0.5 * kPi * m / nz);
        ez(m) = 4.0 * s * s / (g.hz() * g.hz());
    }
    // Forward z transform: coefficient_m = sum_k w_k C(k,m) f_k / sum_k w_k C(k,m)^2.
    const Eigen::VectorXd wz = g.z_weights().matrix();
    Eigen::MatrixXd Pz = C.transpose() * wz.asDiagonal();
    for (int m = 0; m <= nz; ++m)
        Pz.row(m) /= Pz.row(m).dot(C.col(m));

    Eigen::MatrixXd F = Pz * rho.matrix();
    const double s1 = 2.0 / (n1 + 1), s2 = 2.0 / (n2 + 1);
    for (int m = 0; m <= nz; ++m) {
        Eigen::RowVectorXd row = F.row(m);
        const Eigen::Map<const Eigen::MatrixXd> X(row.data(), n1, n2);
        Eigen::MatrixXd Xh = s1 * s2 * (S1.transpose() * X * S2);
        for (int b = 0; b < n2; ++b)
            for (int a = 0; a < n1; ++a)
                Xh(a, b) /= e1(a) + e2(b) + ez(m);
        Eigen::MatrixXd Y = S1 * Xh * S2.transpose();
        F.row(m) = Eigen::Map<Eigen::RowVectorXd>(Y.data(), n1 * n2);
    }
    return (C * F).array();
}

} // namespace

int default_cg_iterations(const Grid& g, double rel_tol)
{
    const double digits = std::max(1.0, std::ceil(-std::log10(rel_tol)));
    return static_cast<int>(20.0 * (g.ny1() + g.ny2() + g.nz()) * digits);
}

Field3D solve_poisson(const Field3D& rho, const Grid& g, const PoissonOptions& opt, const Field3D* guess)
{
    g.require_3d(rho, "solve_poisson");
    if (!rho.allFinite())
        throw InvalidArgument("solve_poisson: density is not finite");
    Field3D U = opt.method == PoissonMethod::spectral ? solve_spectral(rho, g)
                                                      : solve_cg(rho, g, opt, guess);
    if (opt.observer)
        opt.observer(rho, U);
    return U;
}

Field3D apply_negative_laplacian(const Field3D& U, const Grid& g)
{
    g.require_3d(U, "apply_negative_laplacian");
    Field3D KU;
    apply_stiffness(U, KU, g);
    return KU / node_weights(g);
}

double dirichlet_energy(const Field3D& U, const Grid& g)
{
    g.require_3d(U, "dirichlet_energy");
    const int n1 = g.ny1(), n2 = g.ny2(), nz = g.nz();
    const double wl = g.lateral_weight();
    const auto& wz = g.z_weights();
    const double c1 = 1.0 / (g.hy1() * g.hy1());
    const double c2 = 1.0 / (g.hy2() * g.hy2());
    const double cz = 1.0 / g.hz();
    double e1 = 0.0, e2 = 0.0, ezz = 0.0;
    for (int i2 = 0; i2 < n2; ++i2) {
        for (int i1 = 0; i1 <= n1; ++i1) {
            for (int k = 0; k <= nz; ++k) {
                const double a = i1 > 0 ? U(k, g.lateral_index(i1 - 1, i2)) : 0.0;
                const double b = i1 < n1 ? U(k, g.lateral_index(i1, i2)) : 0.0;
                e1 += wz(k) * (b - a) * (b - a);
            }
        }
    }
    for (int i2 = 0; i2 <= n2; ++i2) {
        for (int i1 = 0; i1 < n1; ++i1) {
            for (int k = 0; k <= nz; ++k) {
                const double a = i2 > 0 ? U(k, g.lateral_index(i1, i2 - 1)) : 0.0;
                const double b = i2 < n2 ? U(k, g.lateral_index(i1, i2)) : 0.0;
                e2 += wz(k) * (b - a) * (b - a);
            }
        }
    }
    for (int l = 0; l < g.lateral_size(); ++l)
        for (int k = 0; k < nz; ++k) {
            const double d = U(k + 1, l) - U(k, l);
            ezz += d * d;
        }
    return wl * (c1 * e1 + c2 * e2 + cz * ezz);
}

double potential_pairing(const Field3D& U, const Field3D& rho, const Grid& g)
{
    g.require_3d(U, "potential_pairing");
    return inner_volume(U, rho, g);
}

} // namespace subband
