#ifndef PLCSEG_CATENARY_HPP
#define PLCSEG_CATENARY_HPP

#include <plcseg/errors.hpp>
#include <plcseg/linalg.hpp>
#include <plcseg/random.hpp>

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

namespace plcseg {

/// A conductor sample in the vertical plane of a regularized line: y along the span, z up.
struct profile_point
{
    double y = 0.0;
    double z = 0.0;
};

struct quadratic_model
{
    double a2 = 0.0;
    double a1 = 0.0;
    double a0 = 0.0;
    std::vector<std::size_t> inlier_ids;
    double rmse = 0.0;

    [[nodiscard]] double operator()(double y) const noexcept { return (a2 * y + a1) * y + a0; }
};

/// z(y) = a + c * cosh((y - b) / c), with c = T0 / w.
struct catenary_model
{
    double a    = 0.0;
    double b    = 0.0;
    double c    = 1.0;
    double rmse = 0.0;
    std::optional<double> w;  // N/m, supplied by the caller
    std::optional<double> t0; // N, c * w
    int  iterations = 0;
    bool converged  = false;

    [[nodiscard]] double operator()(double y) const noexcept { return a + c * std::cosh((y - b) / c); }

    void set_weight(double weight)
    {
        if (!(weight > 0.0))
            throw std::invalid_argument("linear weight density must be positive");
        w  = weight;
        t0 = c * weight;
    }
};

using conductor_model = std::variant<catenary_model, quadratic_model>;

inline double evaluate(const conductor_model& m, double y)
{
    return std::visit([y](const auto& model) { return model(y); }, m);
}

/// Thrown when the catenary cannot be fitted; carries the least-squares quadratic.
class catenary_fit_error : public error
{
  public:
    catenary_fit_error(const std::string& what, quadratic_model fallback)
        : error(error_code::fit_failure, what), fallback_(std::move(fallback))
    {
    }
    [[nodiscard]] const quadratic_model& fallback() const noexcept { return fallback_; }

  private:
    quadratic_model fallback_;
};

namespace detail {

inline double rms_of(double sse, std::size_t n) { return n == 0 ? 0.0 : std::sqrt(sse / static_cast<double>(n)); }

/// Quadratic through three samples; nullopt when two share (almost) the same y.
inline std::optional<std::array<double, 3>> interpolate_quadratic(const profile_point& p0, const profile_point& p1,
                                                                  const profile_point& p2)
{
    const double scale = std::max({std::abs(p0.y), std::abs(p1.y), std::abs(p2.y), 1.0});
    const double d01 = p1.y - p0.y;
    const double d12 = p2.y - p1.y;
    const double d02 = p2.y - p0.y;
    const double tiny = 1e-12 * scale;
    if (std::abs(d01) <= tiny || std::abs(d12) <= tiny || std::abs(d02) <= tiny)
        return std::nullopt;
    const double f01 = (p1.z - p0.z) / d01;
    const double f12 = (p2.z - p1.z) / d12;
    const double a2 = (f12 - f01) / d02;
    const double a1 = f01 - a2 * (p0.y + p1.y);
    const double a0 = p0.z - (a2 * p0.y + a1) * p0.y;
    if (!std::isfinite(a2) || !std::isfinite(a1) || !std::isfinite(a0))
        return std::nullopt;
    return std::array<double, 3>{a2, a1, a0};
}

} // namespace detail

/**
 * Closed-form least-squares quadratic through the selected samples (all when `ids`
 * is empty). The abscissa is centred and scaled before solving the normal equations.
 * Throws std::invalid_argument when fewer than three distinct y values are present.
 */
inline quadratic_model fit_quadratic_lsq(std::span<const profile_point> points, std::span<const std::size_t> ids = {})
{
    std::vector<std::size_t> all;
    if (ids.empty()) {
        all.resize(points.size());
        for (std::size_t i = 0; i < all.size(); ++i)
            all[i] = i;
        ids = all;
    }
    if (ids.size() < 3)
        throw std::invalid_argument("quadratic fit needs at least 3 points");

    double mean = 0.0;
    for (auto i : ids)
        mean += points[i].y;
    mean /= static_cast<double>(ids.size());
    double scale = 0.0;
    for (auto i : ids)
        scale = std::max(scale, std::abs(points[i].y - mean));
    if (!(scale > 0.0))
        throw std::invalid_argument("quadratic fit needs distinct y values");

    std::array<std::array<double, 3>, 3> ata{};
    std::array<double, 3> atb{};
    for (auto i : ids) {
        const double t = (points[i].y - mean) / scale;
        const std::array<double, 3> row{t * t, t, 1.0};
        for (int r = 0; r < 3; ++r) {
            for (int c = 0; c < 3; ++c)
                ata[r][c] += row[r] * row[c];
            atb[r] += row[r] * points[i].z;
        }
    }
    const auto sol = solve_linear<3>(ata, atb);
    if (!sol)
        throw std::invalid_argument("quadratic fit is degenerate (fewer than 3 distinct y values)");
    const double b2 = (*sol)[0];
    const double b1 = (*sol)[1];
    const double b0 = (*sol)[2];

    quadratic_model m;
    m.a2 = b2 / (scale * scale);
    m.a1 = b1 / scale - 2.0 * b2 * mean / (scale * scale);
    m.a0 = b0 - b1 * mean / scale + b2 * mean * mean / (scale * scale);
    m.inlier_ids.assign(ids.begin(), ids.end());
    double sse = 0.0;
    for (auto i : ids) {
        const double t = (points[i].y - mean) / scale;
        const double r = points[i].z - ((b2 * t + b1) * t + b0);
        sse += r * r;
    }
    m.rmse = detail::rms_of(sse, ids.size());
    return m;
}

struct msac_params
{
    double        inlier_tol = 0.1;
    int           iterations = 200;
    std::uint64_t seed       = 42;
};

/**
 * MSAC quadratic. Each iteration draws three distinct samples, interpolates the
 * quadratic through them and scores it by sum(min(r^2, tol^2)). The lowest score
 * wins (first found on ties); its inliers (|r| <= tol) are then refitted by least
 * squares. Same seed, same result.
 */
inline quadratic_model fit_quadratic_msac(std::span<const profile_point> points, const msac_params& params)
{
    if (points.size() < 3)
        throw std::invalid_argument("MSAC quadratic needs at least 3 points");
    if (!(params.inlier_tol > 0.0))
        throw std::invalid_argument("inlier tolerance must be positive");
    if (params.iterations < 1)
        throw std::invalid_argument("MSAC needs at least one iteration");

    random_source rng(params.seed);
    const double tol2 = params.inlier_tol * params.inlier_tol;
    std::optional<std::array<double, 3>> best;
    double best_score = 0.0;

    for (int it = 0; it < params.iterations; ++it) {
        const std::size_t i = rng.index(points.size());
        std::size_t j = rng.index(points.size());
        while (j == i)
            j = rng.index(points.size());
        std::size_t k = rng.index(points.size());
        while (k == i || k == j)
            k = rng.index(points.size());

        const auto coeffs = detail::interpolate_quadratic(points[i], points[j], points[k]);
        if (!coeffs)
            continue;
        double score = 0.0;
        for (const auto& p : points) {
            const double r = p.z - (((*coeffs)[0] * p.y + (*coeffs)[1]) * p.y + (*coeffs)[2]);
            score += std::min(r * r, tol2);
        }
        if (!best || score < best_score) {
            best       = coeffs;
            best_score = score;
        }
    }
    if (!best)
        throw std::invalid_argument("MSAC: every sampled triple was degenerate");

    std::vector<std::size_t> inliers;
    for (std::size_t i = 0; i < points.size(); ++i) {
        const double r = points[i].z - (((*best)[0] * points[i].y + (*best)[1]) * points[i].y + (*best)[2]);
        if (std::abs(r) <= params.inlier_tol)
            inliers.push_back(i);
    }
    try {
        return fit_quadratic_lsq(points, inliers);
    } catch (const std::invalid_argument&) {
        // too few distinct inliers to refit: keep the minimal-sample model
        quadratic_model m;
        m.a2 = (*best)[0];
        m.a1 = (*best)[1];
        m.a0 = (*best)[2];
        m.inlier_ids = std::move(inliers);
        double sse = 0.0;
        for (auto i : m.inlier_ids) {
            const double r = points[i].z - m(points[i].y);
            sse += r * r;
        }
        m.rmse = detail::rms_of(sse, m.inlier_ids.size());
        return m;
    }
}

struct catenary_fit_options
{
    double step_tol       = 1e-10;
    int    max_iterations = 200;
    double min_c          = 1.0;
    double max_c          = 1e5;
};

namespace detail {

inline double catenary_sse(std::span<const profile_point> points, double a, double b, double c)
{
    double sse = 0.0;
    for (const auto& p : points) {
        const double r = p.z - (a + c * std::cosh((p.y - b) / c));
        sse += r * r;
    }
    return sse;
}

} // namespace detail

/// Starting point derived from the least-squares quadratic: c = 1/(2 a2) clamped,
/// b at the vertex, a so the curve passes through the vertex height.
inline catenary_model catenary_initial_guess(const quadratic_model& q, std::span<const profile_point> points,
                                             const catenary_fit_options& opts = {})
{
    catenary_model m;
    if (q.a2 > 0.0) {
        m.c = std::clamp(1.0 / (2.0 * q.a2), opts.min_c, opts.max_c);
        m.b = -q.a1 / (2.0 * q.a2);
        m.a = q(m.b) - m.c;
    } else {
        double ym = 0.0;
        double zm = 0.0;
        for (const auto& p : points) {
            ym += p.y;
            zm += p.z;
        }
        ym /= static_cast<double>(points.size());
        zm /= static_cast<double>(points.size());
        m.c = opts.max_c;
        m.b = ym;
        m.a = zm - m.c;
    }
    return m;
}

/**
 * Least-squares catenary by damped Gauss-Newton (Levenberg-Marquardt scaling),
 * residuals measured vertically. Seeded from the least-squares quadratic. Stops when
 * a proposed step is shorter than step_tol or after max_iterations; steps that do
 * not reduce the squared error are rejected, so the result never fits worse than
 * the seed.
 */
inline catenary_model fit_catenary(std::span<const profile_point> points, const catenary_fit_options& opts = {})
{
    if (points.size() < 4)
        throw std::invalid_argument("catenary fit needs at least 4 points");
    double y_lo = points.front().y;
    double y_hi = y_lo;
    for (const auto& p : points) {
        y_lo = std::min(y_lo, p.y);
        y_hi = std::max(y_hi, p.y);
    }
    if (!(y_hi - y_lo > 1.0))
        throw std::invalid_argument("catenary fit needs samples spanning more than 1 m");

    const quadratic_model seed = fit_quadratic_lsq(points);
    catenary_model m = catenary_initial_guess(seed, points, opts);
    std::array<double, 3> p{m.a, m.b, m.c};
    double sse = detail::catenary_sse(points, p[0], p[1], p[2]);
    double lambda = 1e-3;

    int it = 0;
    bool converged = false;
    for (; it < opts.max_iterations && !converged; ++it) {
        std::array<std::array<double, 3>, 3> jtj{};
        std::array<double, 3> jtr{};
        for (const auto& s : points) {
            const double u  = (s.y - p[1]) / p[2];
            const double ch = std::cosh(u);
            const double sh = std::sinh(u);
            const std::array<double, 3> g{1.0, -sh, ch - u * sh};
            const double r = s.z - (p[0] + p[2] * ch);
            for (int i = 0; i < 3; ++i) {
                for (int j = 0; j < 3; ++j)
                    jtj[i][j] += g[i] * g[j];
                jtr[i] += g[i] * r;
            }
        }
        if (sse == 0.0) {
            converged = true;
            break;
        }
        for (;;) {
            auto damped = jtj;
            for (int i = 0; i < 3; ++i)
                damped[i][i] += lambda * std::max(jtj[i][i], 1e-300);
            const auto step = solve_linear<3>(damped, jtr);
            if (!step) {
                lambda *= 10.0;
                if (lambda > 1e20) {
                    converged = true;
                    break;
                }
                continue;
            }
            const double step_norm = std::sqrt((*step)[0] * (*step)[0] + (*step)[1] * (*step)[1] +
                                               (*step)[2] * (*step)[2]);
            const std::array<double, 3> trial{p[0] + (*step)[0], p[1] + (*step)[1], p[2] + (*step)[2]};
            const double trial_sse =
                trial[2] > 0.0 ? detail::catenary_sse(points, trial[0], trial[1], trial[2]) : INFINITY;
            if (std::isfinite(trial_sse) && trial_sse < sse) {
                p = trial;
                sse = trial_sse;
                lambda = std::max(lambda * 0.1, 1e-12);
                if (step_norm < opts.step_tol)
                    converged = true;
                break;
            }
            if (step_norm < opts.step_tol) {
                converged = true;
                break;
            }
            lambda *= 10.0;
            if (lambda > 1e20) {
                converged = true;
                break;
            }
        }
    }

    if (!(p[2] > 0.0) || !std::isfinite(p[0]) || !std::isfinite(p[1]) || !std::isfinite(p[2]))
        throw catenary_fit_error("catenary fit did not reach a valid optimum (c <= 0 or non-finite)", seed);
    m.a = p[0];
    m.b = p[1];
    m.c = p[2];
    m.rmse = detail::rms_of(sse, points.size());
    m.iterations = it;
    m.converged = converged;
    return m;
}

struct sag_report
{
    double sag_depth    = 0.0;
    double vertex_y     = 0.0;
    double residual_p95 = 0.0;
    bool   hazard       = false;
    bool   hazard_determined = true; // false when the vertex lies outside the samples
};

namespace detail {

inline double percentile_95(std::vector<double> values)
{
    if (values.empty())
        return 0.0;
    std::sort(values.begin(), values.end());
    const auto rank = static_cast<std::size_t>(std::ceil(0.95 * static_cast<double>(values.size())));
    return values[std::max<std::size_t>(rank, 1) - 1];
}

} // namespace detail

/**
 * Sag and residual check for a fitted conductor. The sag is the drop of the curve
 * below the chord joining the curve at the lowest and highest sample y, measured at
 * the vertex. hazard = p95(|residual|) > hazard_tol or sag_depth > sag_limit.
 */
inline sag_report assess_sag(const conductor_model& model, std::span<const profile_point> points, double hazard_tol,
                             double sag_limit)
{
    if (points.empty())
        throw std::invalid_argument("sag assessment needs samples");
    double y_lo = points.front().y;
    double y_hi = y_lo;
    for (const auto& p : points) {
        y_lo = std::min(y_lo, p.y);
        y_hi = std::max(y_hi, p.y);
    }

    sag_report rep;
    std::vector<double> residuals;
    residuals.reserve(points.size());
    for (const auto& p : points)
        residuals.push_back(std::abs(p.z - evaluate(model, p.y)));
    rep.residual_p95 = detail::percentile_95(std::move(residuals));

    bool straight = false;
    if (const auto* cat = std::get_if<catenary_model>(&model)) {
        rep.vertex_y = cat->b;
    } else {
        const auto& q = std::get<quadratic_model>(model);
        const double half = 0.5 * (y_hi - y_lo);
        if (q.a2 == 0.0 || std::abs(q.a2) * half * half < 1e-9) {
            straight = true;
            rep.vertex_y = 0.5 * (y_lo + y_hi);
        } else {
            rep.vertex_y = -q.a1 / (2.0 * q.a2);
        }
    }

    if (!straight && (rep.vertex_y < y_lo || rep.vertex_y > y_hi)) {
        rep.hazard_determined = false;
        rep.sag_depth = 0.0;
        rep.hazard = false;
        return rep;
    }
    if (!straight && y_hi > y_lo) {
        const double z_lo = evaluate(model, y_lo);
        const double z_hi = evaluate(model, y_hi);
        const double chord = z_lo + (z_hi - z_lo) * (rep.vertex_y - y_lo) / (y_hi - y_lo);
        rep.sag_depth = std::max(0.0, chord - evaluate(model, rep.vertex_y));
    }
    rep.hazard = rep.residual_p95 > hazard_tol || rep.sag_depth > sag_limit;
    return rep;
}

} // namespace plcseg

#endif // PLCSEG_CATENARY_HPP
