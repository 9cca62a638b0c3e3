#include "subband/rearrange.hpp"

#include <algorithm>
#include <numeric>
#include <vector>

namespace subband {

bool is_energy_sorted(const TestPair& p, const Grid& g)
{
    const Eigen::ArrayXXd kz = z_kinetic_table(p.chi, g);
    for (int l = 0; l < kz.rows(); ++l)
        for (int j = 0; j + 1 < p.J; ++j)
            if (kz(l, j + 1) < kz(l, j))
                return false;
    return true;
}

TestPair rearrange_energy_increasing(const TestPair& p, const Grid& g)
{
    if (p.has_labels())
        throw PreconditionViolation("rearrange_energy_increasing: pair has (y, v)-dependent mode labels");
    const Eigen::ArrayXXd kz = z_kinetic_table(p.chi, g);
    TestPair out = p;
    std::vector<int> perm(p.J);
    for (int l = 0; l < g.lateral_size(); ++l) {
        std::iota(perm.begin(), perm.end(), 0);
        std::stable_sort(perm.begin(), perm.end(), [&](int a, int b) { return kz(l, a) < kz(l, b); });
        for (int j = 0; j < p.J; ++j) {
            out.chi[j].col(l) = p.chi[perm[j]].col(l);
            out.f[l].col(j) = p.f[l].col(perm[j]);
            out.h(l, j) = p.h(l, perm[j]);
        }
    }
    return out;
}

TestPair rearrange_occupation_decreasing(const TestPair& p)
{
    TestPair out = p;
    const int nl = static_cast<int>(p.f.size());
    out.labels.resize(nl);
    std::vector<int> perm(p.J);
    for (int l = 0; l < nl; ++l) {
        const Eigen::ArrayXXd& f = p.f[l];
        Eigen::ArrayXXi lab(f.rows(), p.J);
        for (int i = 0; i < f.rows(); ++i) {
            std::iota(perm.begin(), perm.end(), 0);
            std::stable_sort(perm.begin(), perm.end(), [&](int a, int b) { return f(i, a) > f(i, b); });
            for (int j = 0; j < p.J; ++j) {
                out.f[l](i, j) = f(i, perm[j]);
                lab(i, j) = p.label(l, i, perm[j]);
            }
        }
        out.labels[l] = std::move(lab);
    }
    return out;
}

} // namespace subband
