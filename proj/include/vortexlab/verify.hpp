#pragma once
// Verification suites: numerical checks of the identities the library relies
// on, runnable from the command line and from the acceptance tests. Every suite
// returns a table plus a single worst-case figure compared with a tolerance.

#include <cmath>
#include <cstdint>
#include <iomanip>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "dynamics.hpp"
#include "specfun.hpp"
#include "stability.hpp"

namespace vortexlab {

struct SuiteResult {
    std::string name;
    std::vector<std::string> columns;
    std::vector<std::vector<std::string>> rows;
    double worst = 0.0;
    double tolerance = 0.0;
    bool passed = false;
    std::string summary;
};

namespace detail {

inline std::string fmt(double v) {
    std::ostringstream os;
    os << std::setprecision(17) << v;
    return os.str();
}

// K0 and K1 from their integral representations
//   K_nu(x) = int_0^inf exp(-x cosh t) cosh(nu t) dt,
// by the trapezoid rule, which converges geometrically for this integrand.
inline std::array<double, 2> bessel_k_integral(double x) {
    const double upper = std::acosh(1.0 + 60.0 / x);
    const double h = 0.01;
    const int steps = static_cast<int>(std::ceil(upper / h));
    const double scale = std::exp(-x);  // factor out the value at t = 0
    double k0 = 0.5, k1 = 0.5;
    for (int i = 1; i <= steps; ++i) {
        const double t = i * h;
        const double c = std::cosh(t);
        const double w = std::exp(-x * (c - 1.0));
        k0 += w;
        k1 += w * c;
    }
    return {k0 * h * scale, k1 * h * scale};
}

}  // namespace detail

inline SuiteResult verify_specfun(int points = 200, double lo = 1e-6, double hi = 30.0) {
    SuiteResult r;
    r.name = "specfun";
    r.columns = {"x", "k0", "k1", "seam_residual", "oracle_rel_err", "derivative_rel_err"};
    r.tolerance = 1e-9;
    const auto seam = bessel_seam_residual();
    const double seam_worst = std::max(seam[0], seam[1]);
    double oracle_worst = 0.0, deriv_worst = 0.0;
    for (int i = 0; i < points; ++i) {
        const double x = lo * std::pow(hi / lo, static_cast<double>(i) / (points - 1));
        const auto k = bessel_k(x);
        const auto ref = detail::bessel_k_integral(x);
        const double err = std::max(std::abs(k.k0 / ref[0] - 1.0), std::abs(k.k1 / ref[1] - 1.0));
        // d/dx K0 = -K1, by a five-point difference; the step follows x near zero and the
        // unit decay length further out.
        const double h = 2e-3 * std::min(x, 1.0);
        const double d = (-bessel_k0(x + 2 * h) + 8 * bessel_k0(x + h) - 8 * bessel_k0(x - h) + bessel_k0(x - 2 * h)) /
                         (12.0 * h);
        const double derr = std::abs(d + k.k1) / k.k1;
        oracle_worst = std::max(oracle_worst, err);
        deriv_worst = std::max(deriv_worst, derr);
        r.rows.push_back({detail::fmt(x), detail::fmt(k.k0), detail::fmt(k.k1), detail::fmt(seam_worst),
                          detail::fmt(err), detail::fmt(derr)});
    }
    r.worst = oracle_worst;
    r.passed = oracle_worst < 1e-9 && deriv_worst < 1e-9 && seam_worst < 1e-10;
    std::ostringstream os;
    os << "max relative error vs integral oracle " << oracle_worst << ", derivative identity " << deriv_worst
       << ", seam " << seam_worst;
    r.summary = os.str();
    return r;
}

inline SuiteResult verify_appendix_a(std::uint64_t seed, int samples = 100) {
    SuiteResult r;
    r.name = "appendix-a";
    r.columns = {"n", "theta_k", "epsilon", "theta", "phi", "B"};
    r.tolerance = 1e-12;
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<int> pick_n(2, 8);
    std::uniform_real_distribution<double> colat(0.05, pi - 0.05), lon(0.0, two_pi);
    int done = 0;
    while (done < samples) {
        const int n = pick_n(rng);
        const double tk = colat(rng), eps = lon(rng), th = colat(rng), ph = lon(rng);
        double b;
        try {
            b = appendix_a_sum(n, tk, eps, th, ph);
        } catch (const SingularityError&) {
            continue;  // evaluation point on the ring itself
        }
        r.worst = std::max(r.worst, std::abs(b));
        r.rows.push_back({std::to_string(n), detail::fmt(tk), detail::fmt(eps), detail::fmt(th), detail::fmt(ph),
                          detail::fmt(b)});
        ++done;
    }
    r.passed = r.worst < r.tolerance;
    r.summary = "max |B| over " + std::to_string(samples) + " samples: " + detail::fmt(r.worst);
    return r;
}

// One stable member of each family whose relative equilibria persist on the
// rotating sphere.
inline std::vector<RingConfig> persistence_instances() {
    auto make = [](RingFamily f, int n, double theta0, std::optional<double> lambda = std::nullopt) {
        RingConfig c;
        c.family = f;
        c.n = n;
        c.size = theta0;
        c.lambda = lambda;
        c.model = ModelParams::sphere();
        return c;
    };
    return {make(RingFamily::CNvR, 4, pi / 6), make(RingFamily::CNvRp, 3, pi / 4, 0.5),
            make(RingFamily::DNh2R, 4, 0.6), make(RingFamily::DNdRRp, 4, 0.3), make(RingFamily::D2NhRe, 2, 0.0)};
}

inline SuiteResult verify_persistence_suite(const std::vector<double>& omegas, double t_end = 50.0) {
    SuiteResult r;
    r.name = "persistence";
    r.columns = {"family", "n", "omega", "delta_xi_minus_omega", "shape_residual", "passed"};
    r.tolerance = 1e-6;
    r.passed = true;
    for (double omega : omegas) {
        for (const auto& c : persistence_instances()) {
            const auto rep = verify_persistence(c, omega, t_end);
            const double shift = std::abs(rep.delta_xi - omega);
            const double shape = std::max(rep.still.shape_residual, rep.rotating.shape_residual);
            r.worst = std::max(r.worst, shift);
            r.passed = r.passed && rep.passed;
            r.rows.push_back({family_name(c.family), std::to_string(c.n), detail::fmt(omega), detail::fmt(shift),
                              detail::fmt(shape), rep.passed ? "1" : "0"});
        }
    }
    r.summary = "max |delta xi - omega| = " + detail::fmt(r.worst);
    return r;
}

inline double trig_closed_form(int n, int l) { return (n * n - 1.0) / 3.0 - 2.0 * l * (n - l); }

inline SuiteResult verify_trig(int n_max = 50) {
    SuiteResult r;
    r.name = "trig";
    r.columns = {"n", "l", "direct", "closed_form", "abs_err"};
    r.tolerance = 1e-10;
    for (int n = 2; n <= n_max; ++n)
        for (int l = 1; l < n; ++l) {
            const double d = trig_sum(n, l), c = trig_closed_form(n, l);
            r.worst = std::max(r.worst, std::abs(d - c));
            r.rows.push_back({std::to_string(n), std::to_string(l), detail::fmt(d), detail::fmt(c),
                              detail::fmt(std::abs(d - c))});
        }
    r.passed = r.worst < r.tolerance;
    r.summary = "max |direct - closed form| = " + detail::fmt(r.worst);
    return r;
}

// Random systems of positive vortices, pairwise separated by at least
// min_separation, in the unit disc or on the unit sphere.
inline VortexSystem random_system(std::mt19937_64& rng, const ModelParams& model, int n = 4,
                                  double min_separation = 0.3) {
    std::uniform_real_distribution<double> u(-1.0, 1.0), strength(0.5, 1.5);
    for (;;) {
        std::vector<Vec3> pos;
        std::vector<double> str;
        for (int i = 0; i < n; ++i) {
            Vec3 p;
            if (model.on_sphere()) {
                do p = {u(rng), u(rng), u(rng)};
                while (norm(p) < 0.1 || norm(p) > 1.0);
                p = p * (1.0 / norm(p));
            } else {
                do p = {u(rng), u(rng), 0.0};
                while (norm(p) > 1.0);
            }
            pos.push_back(p);
            str.push_back(strength(rng));
        }
        VortexSystem s(model, pos, str);
        if (s.min_pair_distance() >= min_separation) return s;
    }
}

inline SuiteResult verify_conservation(std::uint64_t seed, int systems_per_model = 2, double t_end = 100.0) {
    SuiteResult r;
    r.name = "conservation";
    r.columns = {"model", "sample", "h_drift", "j_drift"};
    r.tolerance = 1e-8;  // for H; the momentum is held to 1e-10
    double j_worst = 0.0;
    std::mt19937_64 rng(seed);
    const ModelParams models[] = {ModelParams::planar(), ModelParams::rotating_plane(0.5), ModelParams::geostrophic(1.0),
                                  ModelParams::rotating_sphere(0.3)};
    for (const auto& m : models)
        for (int k = 0; k < systems_per_model; ++k) {
            const auto traj = integrate(random_system(rng, m), t_end, 1.0, Method::RK45);
            const auto& d0 = traj.diagnostics.front();
            double dh = 0.0, dj = 0.0;
            for (const auto& d : traj.diagnostics) {
                dh = std::max(dh, std::abs(d.h - d0.h));
                dj = std::max(dj, std::abs(d.j_so2 - d0.j_so2));
            }
            r.worst = std::max({r.worst, dh, dj});
            j_worst = std::max(j_worst, dj);
            r.rows.push_back({m.label(), std::to_string(k), detail::fmt(dh), detail::fmt(dj)});
        }
    r.passed = r.worst < r.tolerance && j_worst < 1e-10;
    r.summary = "max drift of H and J over t in [0, " + detail::fmt(t_end) + "]: " + detail::fmt(r.worst) +
                " (J alone " + detail::fmt(j_worst) + ", limit 1e-10)";
    return r;
}

}  // namespace vortexlab
