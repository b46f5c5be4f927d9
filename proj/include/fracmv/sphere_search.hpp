#ifndef FRACMV_SPHERE_SEARCH_HPP
#define FRACMV_SPHERE_SEARCH_HPP

#include "fracmv/core.hpp"

#include <boost/math/tools/minima.hpp>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

namespace fracmv {

struct SphereOptimum {
    Vec direction;
    double value = 0.0;
    int evaluations = 0;
    bool converged = true;
};

enum class Sense { maximize, minimize };

namespace detail {

/// Fibonacci lattice on S^2 (or its upper half when `half`).
inline std::vector<Vec> fibonacci_directions(int count, bool half)
{
    std::vector<Vec> dirs;
    const double golden = pi * (3.0 - std::sqrt(5.0));
    const int total = half ? 2 * count : count;
    for (int i = 0; i < total; ++i) {
        const double z = 1.0 - (2.0 * i + 1.0) / total;
        if (half && z < 0.0)
            continue;
        const double rad = std::sqrt(std::max(0.0, 1.0 - z * z));
        const double phi = golden * i;
        Vec w(3);
        w << rad * std::cos(phi), rad * std::sin(phi), z;
        dirs.push_back(w);
    }
    return dirs;
}

} // namespace detail

/// Extremum of f over S^{n-1}: grid search, then local refinement of the two
/// best grid points (Brent on the angle for n = 2, a shrinking pattern
/// search in the tangent plane for n = 3). `even` declares f(-w) = f(w),
/// halving the grid.
template <class F>
SphereOptimum optimize_on_sphere(F&& f, int n, Sense sense, bool even, int grid)
{
    require_dimension(n);
    require(grid >= 4, "sphere search grid must have >= 4 points");
    const double sign = sense == Sense::maximize ? -1.0 : 1.0; // minimize sign * f
    SphereOptimum best;
    int evals = 0;
    auto g = [&](const Vec& w) {
        ++evals;
        return sign * f(w);
    };

    if (n == 1) {
        const Vec plus = Vec::Constant(1, 1.0);
        const Vec minus = Vec::Constant(1, -1.0);
        const double gp = g(plus);
        const double gm = even ? gp : g(minus);
        best.direction = gm < gp ? minus : plus;
        best.value = sign * std::min(gp, gm);
        best.evaluations = evals;
        return best;
    }

    if (n == 2) {
        const double span = even ? pi : 2.0 * pi;
        const double h = span / grid;
        std::vector<std::pair<double, double>> samples;
        for (int k = 0; k < grid; ++k) {
            const double th = k * h;
            Vec w(2);
            w << std::cos(th), std::sin(th);
            samples.emplace_back(g(w), th);
        }
        std::sort(samples.begin(), samples.end());
        double best_val = samples.front().first;
        double best_th = samples.front().second;
        const int starts = std::min<int>(2, static_cast<int>(samples.size()));
        for (int i = 0; i < starts; ++i) {
            const double th0 = samples[i].second;
            std::uintmax_t iters = 200;
            auto line = [&](double th) {
                Vec w(2);
                w << std::cos(th), std::sin(th);
                return g(w);
            };
            const auto [th, val] = boost::math::tools::brent_find_minima(line, th0 - h, th0 + h, 40, iters);
            if (iters >= 200)
                best.converged = false;
            if (val < best_val) {
                best_val = val;
                best_th = th;
            }
        }
        Vec w(2);
        w << std::cos(best_th), std::sin(best_th);
        best.direction = w;
        best.value = sign * best_val;
        best.evaluations = evals;
        return best;
    }

    const auto dirs = detail::fibonacci_directions(grid, even);
    std::vector<std::pair<double, int>> samples;
    for (int i = 0; i < static_cast<int>(dirs.size()); ++i)
        samples.emplace_back(g(dirs[i]), i);
    std::sort(samples.begin(), samples.end());
    double best_val = samples.front().first;
    Vec best_dir = dirs[samples.front().second];
    const double spacing = std::sqrt(4.0 * pi / (even ? 2.0 * grid : grid));
    const int starts = std::min<int>(2, static_cast<int>(samples.size()));
    constexpr int max_evals = 600;
    for (int i = 0; i < starts; ++i) {
        Vec xi = dirs[samples[i].second];
        double val = samples[i].first;
        double step = spacing;
        int used = 0;
        while (step > 1e-7 && used < max_evals) {
            // tangent frame at xi
            int least = 0;
            for (int k = 1; k < 3; ++k)
                if (std::abs(xi(k)) < std::abs(xi(least)))
                    least = k;
            Vec ek = Vec::Zero(3);
            ek(least) = 1.0;
            Vec e1 = (ek - ek.dot(xi) * xi).normalized();
            Vec e2(3);
            e2 << xi(1) * e1(2) - xi(2) * e1(1), xi(2) * e1(0) - xi(0) * e1(2), xi(0) * e1(1) - xi(1) * e1(0);
            bool improved = false;
            for (const Vec& e : {e1, Vec(-e1), e2, Vec(-e2)}) {
                const Vec cand = (xi + step * e).normalized();
                const double cv = g(cand);
                ++used;
                if (cv < val) {
                    val = cv;
                    xi = cand;
                    improved = true;
                    break;
                }
            }
            if (!improved)
                step *= 0.5;
        }
        if (used >= max_evals)
            best.converged = false;
        if (val < best_val) {
            best_val = val;
            best_dir = xi;
        }
    }
    best.direction = best_dir;
    best.value = sign * best_val;
    best.evaluations = evals;
    return best;
}

} // namespace fracmv

#endif // FRACMV_SPHERE_SEARCH_HPP
