#ifndef SUBBAND_QUADRATURE_HPP
#define SUBBAND_QUADRATURE_HPP

#include <Eigen/Core>

#include <cmath>
#include <utility>

namespace subband {

namespace detail {

// Gauss-Kronrod 7/15 abscissae and weights on [-1,1] (positive half).
inline constexpr double kXgk[8] = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
inline constexpr double kWgk[8] = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
inline constexpr double kWg[4] = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

template <typename F>
std::pair<double, double> gk15(F& f, double a, double b)
{
    const double c = 0.5 * (a + b);
    const double h = 0.5 * (b - a);
    const double fc = f(c);
    double kron = fc * kWgk[7];
    double gauss = fc * kWg[3];
    for (int i = 0; i < 7; ++i) {
        const double dx = h * kXgk[i];
        const double s = f(c - dx) + f(c + dx);
        kron += kWgk[i] * s;
        if (i % 2 == 1)
            gauss += kWg[i / 2] * s;
    }
    return {kron * h, std::abs((kron - gauss) * h)};
}

template <typename F>
double adaptive_gk(F& f, double a, double b, double tol, int depth)
{
    auto [val, err] = gk15(f, a, b);
    if (err <= tol || depth <= 0 || b - a <= 1e-14 * (1.0 + std::abs(a)))
        return val;
    const double m = 0.5 * (a + b);
    return adaptive_gk(f, a, m, 0.5 * tol, depth - 1) + adaptive_gk(f, m, b, 0.5 * tol, depth - 1);
}

} // namespace detail

/// Recursive Gauss-Kronrod 7/15 quadrature to an absolute tolerance.
template <typename F>
double integrate_adaptive(F f, double a, double b, double abs_tol = 1e-12, int max_depth = 40)
{
    if (!(b > a))
        return 0.0;
    return detail::adaptive_gk(f, a, b, abs_tol, max_depth);
}

/// Gauss-Legendre nodes and weights on [-1,1].
inline std::pair<Eigen::ArrayXd, Eigen::ArrayXd> gauss_legendre(int n)
{
    Eigen::ArrayXd x(n), w(n);
    const double pi = 3.14159265358979323846;
    for (int i = 0; i < (n + 1) / 2; ++i) {
        double t = std::cos(pi * (i + 0.75) / (n + 0.5));
        double dp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = t;
            for (int k = 2; k <= n; ++k) {
                const double p2 = ((2.0 * k - 1.0) * t * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            dp = n * (t * p1 - p0) / (t * t - 1.0);
            const double dt = p1 / dp;
            t -= dt;
            if (std::abs(dt) < 1e-16)
                break;
        }
        x(i) = -t;
        x(n - 1 - i) = t;
        w(i) = w(n - 1 - i) = 2.0 / ((1.0 - t * t) * dp * dp);
    }
    return {x, w};
}

} // namespace subband

#endif
