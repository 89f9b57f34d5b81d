#ifndef PLCSEG_LINALG_HPP
#define PLCSEG_LINALG_HPP

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <optional>
#include <utility>

namespace plcseg {

using vec3 = std::array<double, 3>;
using mat3 = std::array<std::array<double, 3>, 3>;

inline double dot(const vec3& a, const vec3& b) noexcept { return a[0] * b[0] + a[1] * b[1] + a[2] * b[2]; }
inline double norm(const vec3& a) noexcept { return std::sqrt(dot(a, a)); }

struct sym_eigen3
{
    vec3                values;  // descending
    std::array<vec3, 3> vectors; // vectors[i] pairs with values[i], unit length
};

/**
 * Eigen-decomposition of a symmetric 3x3 matrix by cyclic Jacobi rotations.
 * Eigenvalues come back sorted in descending order. Values with magnitude below
 * 1e-12 * trace are clamped to zero; for a PSD input that only absorbs round-off.
 */
inline sym_eigen3 eigen_symmetric(const mat3& m)
{
    mat3 a = m;
    mat3 v{{{1.0, 0.0, 0.0}, {0.0, 1.0, 0.0}, {0.0, 0.0, 1.0}}};

    for (int sweep = 0; sweep < 64; ++sweep) {
        const double off = a[0][1] * a[0][1] + a[0][2] * a[0][2] + a[1][2] * a[1][2];
        const double diag = a[0][0] * a[0][0] + a[1][1] * a[1][1] + a[2][2] * a[2][2];
        if (off == 0.0 || off <= 1e-36 * diag)
            break;
        for (int p = 0; p < 2; ++p) {
            for (int q = p + 1; q < 3; ++q) {
                const double apq = a[p][q];
                if (apq == 0.0)
                    continue;
                const double theta = (a[q][q] - a[p][p]) / (2.0 * apq);
                const double t = (theta >= 0.0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;
                const double tau = s / (1.0 + c);

                a[p][p] -= t * apq;
                a[q][q] += t * apq;
                a[p][q] = a[q][p] = 0.0;
                const int r = 3 - p - q;
                const double arp = a[r][p];
                const double arq = a[r][q];
                a[r][p] = a[p][r] = arp - s * (arq + tau * arp);
                a[r][q] = a[q][r] = arq + s * (arp - tau * arq);
                for (int k = 0; k < 3; ++k) {
                    const double vkp = v[k][p];
                    const double vkq = v[k][q];
                    v[k][p] = vkp - s * (vkq + tau * vkp);
                    v[k][q] = vkq + s * (vkp - tau * vkq);
                }
            }
        }
    }

    std::array<int, 3> order{0, 1, 2};
    std::sort(order.begin(), order.end(), [&](int i, int j) { return a[i][i] > a[j][j]; });

    const double trace = std::abs(m[0][0]) + std::abs(m[1][1]) + std::abs(m[2][2]);
    sym_eigen3 out{};
    for (int i = 0; i < 3; ++i) {
        const int k = order[static_cast<std::size_t>(i)];
        double value = a[k][k];
        if (std::abs(value) < 1e-12 * trace)
            value = 0.0;
        out.values[static_cast<std::size_t>(i)] = value;
        vec3 vec{v[0][k], v[1][k], v[2][k]};
        const double n = norm(vec);
        for (auto& c : vec)
            c /= n;
        out.vectors[static_cast<std::size_t>(i)] = vec;
    }
    return out;
}

/// Solves a*x = b by Gaussian elimination with partial pivoting; nullopt when singular.
template <std::size_t N>
std::optional<std::array<double, N>> solve_linear(std::array<std::array<double, N>, N> a, std::array<double, N> b)
{
    for (std::size_t col = 0; col < N; ++col) {
        std::size_t pivot = col;
        for (std::size_t r = col + 1; r < N; ++r)
            if (std::abs(a[r][col]) > std::abs(a[pivot][col]))
                pivot = r;
        if (a[pivot][col] == 0.0 || !std::isfinite(a[pivot][col]))
            return std::nullopt;
        std::swap(a[pivot], a[col]);
        std::swap(b[pivot], b[col]);
        for (std::size_t r = col + 1; r < N; ++r) {
            const double f = a[r][col] / a[col][col];
            for (std::size_t c = col; c < N; ++c)
                a[r][c] -= f * a[col][c];
            b[r] -= f * b[col];
        }
    }
    std::array<double, N> x{};
    for (std::size_t i = N; i-- > 0;) {
        double s = b[i];
        for (std::size_t c = i + 1; c < N; ++c)
            s -= a[i][c] * x[c];
        x[i] = s / a[i][i];
    }
    for (double xi : x)
        if (!std::isfinite(xi))
            return std::nullopt;
    return x;
}

} // namespace plcseg

#endif // PLCSEG_LINALG_HPP
