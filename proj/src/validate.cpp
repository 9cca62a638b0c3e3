#include "subband/validate.hpp"

#include <cmath>
#include <cstdio>
#include <string>

namespace subband {

namespace {

constexpr double kPi = 3.14159265358979323846;

CheckResult check(std::string name, double lhs, double rhs, bool pass)
{
    CheckResult c;
    c.name = std::move(name);
    c.lhs = lhs;
    c.rhs = rhs;
    c.ratio = safe_ratio(lhs, rhs);
    c.pass = pass;
    return c;
}

} // namespace

bool ValidateReport::all_pass() const
{
    for (const auto& c : checks)
        if (!c.pass)
            return false;
    return true;
}

std::vector<CheckResult> validate_eigensolver(int nz, int bands)
{
    const Grid g(2, 2, nz);
    const SliceEigenpairs s = solve_slice(Eigen::ArrayXd::Zero(g.interior_z_size()), bands, g);
    double worst = 0.0;
    for (int j = 1; j <= bands; ++j) {
        const double exact = free_eigenvalue(j, g);
        worst = std::max(worst, std::abs(s.lambda(j - 1) - exact) / exact);
    }
    const double cont = std::abs(s.lambda(0) - 0.5 * kPi * kPi);
    return {check("eigen_discrete_exact", worst, 1e-12, worst <= 1e-12),
            check("eigen_continuum_ground", cont, 5e-4, cont <= 5e-4)};
}

PoissonStudy poisson_convergence(const std::vector<int>& ns)
{
    PoissonStudy st;
    for (int n : ns) {
        const Grid g(n - 1, n - 1, n);
        Field3D exact(g.z_size(), g.lateral_size());
        for (int l = 0; l < g.lateral_size(); ++l) {
            const double s = std::sin(kPi * g.y1(g.i1_of(l))) * std::sin(kPi * g.y2(g.i2_of(l)));
            for (int k = 0; k <= g.nz(); ++k)
                exact(k, l) = s * std::cos(kPi * g.z(k));
        }
        const Field3D rho = 3.0 * kPi * kPi * exact;
        const Field3D U = solve_poisson(rho, g);
        const double e = dirichlet_energy(U, g);
        st.max_weak_defect = std::max(st.max_weak_defect, std::abs(potential_pairing(U, rho, g) - e) / e);
        st.n.push_back(n);
        st.linf_error.push_back((U - exact).abs().maxCoeff());
        if (st.linf_error.size() > 1)
            st.ratio.push_back(st.linf_error[st.linf_error.size() - 2] / st.linf_error.back());
        PoissonOptions sp;
        sp.method = PoissonMethod::spectral;
        const Field3D Us = solve_poisson(rho, g, sp);
        st.cg_spectral_gap = std::max(st.cg_spectral_gap, (U - Us).abs().maxCoeff() / U.abs().maxCoeff());
    }
    return st;
}

std::vector<CheckResult> validate_poisson(const PoissonStudy& s)
{
    std::vector<CheckResult> out;
    for (std::size_t k = 0; k < s.ratio.size(); ++k) {
        const double r = s.ratio[k];
        out.push_back(check("poisson_order[" + std::to_string(s.n[k]) + "->" + std::to_string(s.n[k + 1]) + "]",
                            s.linf_error[k], s.linf_error[k + 1], r >= 3.5 && r <= 4.5));
    }
    out.push_back(check("poisson_weak_form", s.max_weak_defect, 1e-8, s.max_weak_defect <= 1e-8));
    out.push_back(check("poisson_cg_vs_spectral", s.cg_spectral_gap, 1e-9, s.cg_spectral_gap <= 1e-9));
    return out;
}

std::vector<CheckResult> validate_profiles()
{
    std::vector<CheckResult> out;
    for (double p : {1.5, 2.0, 3.0}) {
        for (double T : {0.0, 0.1, 1.0}) {
            const OccupancyModel m = OccupancyModel::power(T, p);
            double worst = 0.0;
            for (int i = 0; i <= 220; ++i) {
                const double a = -1.0 + 11.0 * i / 220.0;
                worst = std::max(worst, std::abs(profile_G(a, m) - profile_G_quadrature(a, m)));
                worst = std::max(worst, std::abs(profile_K(a, m) - profile_K_quadrature(a, m)));
                worst = std::max(worst, std::abs(profile_B(a, m) - profile_B_quadrature(a, m)));
            }
            char name[64];
            std::snprintf(name, sizeof name, "profiles[p=%g,T=%g]", p, T);
            out.push_back(check(name, worst, 1e-10, worst <= 1e-10));
        }
    }
    return out;
}

ValidateReport run_validation()
{
    ValidateReport r;
    for (auto& c : validate_eigensolver())
        r.checks.push_back(std::move(c));
    for (auto& c : validate_poisson(poisson_convergence()))
        r.checks.push_back(std::move(c));
    for (auto& c : validate_profiles())
        r.checks.push_back(std::move(c));
    return r;
}

} // namespace subband
