#pragma once
// Time integration, conservation diagnostics and rigid-rotation detection.

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "core.hpp"
#include "models.hpp"

namespace vortexlab {

enum class Method { RK4, RK45 };

inline Method parse_method(std::string_view s) {
    if (s == "rk4") return Method::RK4;
    if (s == "rk45" || s == "rk45-adaptive") return Method::RK45;
    throw std::invalid_argument("unknown integration method '" + std::string(s) + "'");
}

class CollisionError : public std::runtime_error {
public:
    CollisionError(std::size_t i, std::size_t j, double time, double distance)
        : std::runtime_error(message(i, j, time, distance)), i_(i), j_(j), time_(time), distance_(distance) {}
    std::size_t first() const { return i_; }
    std::size_t second() const { return j_; }
    double time() const { return time_; }
    double distance() const { return distance_; }

private:
    static std::string message(std::size_t i, std::size_t j, double t, double d) {
        std::ostringstream os;
        os << "collision between vortices " << i << " and " << j << " at t=" << t << " (distance " << d << ")";
        return os.str();
    }
    std::size_t i_, j_;
    double time_, distance_;
};

struct IntegrateOptions {
    double tolerance = 1e-12;          // local error allowed per unit time (rk45)
    double collision_distance = 1e-8;
    std::size_t max_steps = 100'000'000;
};

struct Trajectory {
    std::vector<double> times;
    std::vector<VortexSystem> states;
    std::vector<EnergyMomentum> diagnostics;

    std::size_t size() const { return times.size(); }
};

namespace detail {

using State = std::vector<Vec3>;

inline void axpy(State& out, const State& y, double h, const State& k) {
    for (std::size_t i = 0; i < y.size(); ++i) out[i] = y[i] + h * k[i];
}

inline void project(const ModelParams& m, State& y) {
    if (!m.on_sphere()) return;
    for (auto& p : y) p *= 1.0 / norm(p);
}

inline State rhs(const ModelParams& m, const State& y, const std::vector<double>& l) {
    return cartesian_velocity(m, y, l);
}

// Largest angular rate about the z axis among vortices away from the axis.
inline double max_axial_rate(const ModelParams& m, const State& y, const State& v) {
    double rate = 0.0;
    for (std::size_t i = 0; i < y.size(); ++i) {
        const double rho = std::hypot(y[i].x, y[i].y);
        if (rho < 1e-6) continue;
        rate = std::max(rate, std::abs(y[i].x * v[i].y - y[i].y * v[i].x) / (rho * rho));
    }
    (void)m;
    return rate;
}

inline std::tuple<std::size_t, std::size_t, double> closest(const State& y) {
    std::size_t bi = 0, bj = 0;
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < y.size(); ++i)
        for (std::size_t j = i + 1; j < y.size(); ++j) {
            const double d = norm(y[i] - y[j]);
            if (d < best) best = d, bi = i, bj = j;
        }
    return {bi, bj, best};
}

}  // namespace detail

// One classical Runge-Kutta step of size h (h may be negative).
inline std::vector<Vec3> step_rk4(const ModelParams& m, const std::vector<Vec3>& y, const std::vector<double>& l, double h) {
    using detail::axpy;
    detail::State tmp(y.size());
    const auto k1 = detail::rhs(m, y, l);
    axpy(tmp, y, 0.5 * h, k1);
    const auto k2 = detail::rhs(m, tmp, l);
    axpy(tmp, y, 0.5 * h, k2);
    const auto k3 = detail::rhs(m, tmp, l);
    axpy(tmp, y, h, k3);
    const auto k4 = detail::rhs(m, tmp, l);
    detail::State out(y.size());
    for (std::size_t i = 0; i < y.size(); ++i) out[i] = y[i] + (h / 6.0) * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    detail::project(m, out);
    return out;
}

namespace detail {

// Dormand-Prince 5(4) stepper with first-same-as-last reuse.
class Dopri5 {
public:
    Dopri5(const ModelParams& m, const std::vector<double>& l, double tol) : m_(m), l_(l), tol_(tol) {}

    // Attempts a step; returns the scaled error (accept when <= 1).
    double attempt(const State& y, const State& k1, double h, State& y_new, State& k7) const {
        static constexpr double a21 = 1.0 / 5;
        static constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
        static constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
        static constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561, a54 = -212.0 / 729;
        static constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                                a65 = -5103.0 / 18656;
        static constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784, b6 = 11.0 / 84;
        static constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                                e6 = 22.0 / 525, e7 = -1.0 / 40;
        const std::size_t n = y.size();
        State t(n);
        for (std::size_t i = 0; i < n; ++i) t[i] = y[i] + h * (a21 * k1[i]);
        const auto k2 = rhs(m_, t, l_);
        for (std::size_t i = 0; i < n; ++i) t[i] = y[i] + h * (a31 * k1[i] + a32 * k2[i]);
        const auto k3 = rhs(m_, t, l_);
        for (std::size_t i = 0; i < n; ++i) t[i] = y[i] + h * (a41 * k1[i] + a42 * k2[i] + a43 * k3[i]);
        const auto k4 = rhs(m_, t, l_);
        for (std::size_t i = 0; i < n; ++i) t[i] = y[i] + h * (a51 * k1[i] + a52 * k2[i] + a53 * k3[i] + a54 * k4[i]);
        const auto k5 = rhs(m_, t, l_);
        for (std::size_t i = 0; i < n; ++i)
            t[i] = y[i] + h * (a61 * k1[i] + a62 * k2[i] + a63 * k3[i] + a64 * k4[i] + a65 * k5[i]);
        const auto k6 = rhs(m_, t, l_);
        y_new.resize(n);
        for (std::size_t i = 0; i < n; ++i)
            y_new[i] = y[i] + h * (b1 * k1[i] + b3 * k3[i] + b4 * k4[i] + b5 * k5[i] + b6 * k6[i]);
        k7 = rhs(m_, y_new, l_);
        const double dmin = std::get<2>(closest(y));
        double err = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const Vec3 e = h * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] + e6 * k6[i] + e7 * k7[i]);
            // The estimate cannot resolve below rounding noise: positions carry eps*|y| absolute
            // error, which a pair at distance d turns into a relative velocity error of eps*|y|/d.
            // Without this floor h shrinks forever as two vortices close in.
            const double floor =
                64.0 * std::numeric_limits<double>::epsilon() * norm(k1[i]) * (1.0 + (1.0 + norm(y[i])) / dmin);
            const double sc = std::abs(h) * (tol_ * (1.0 + norm(y[i])) + floor);
            err = std::max({err, std::abs(e.x) / sc, std::abs(e.y) / sc, std::abs(e.z) / sc});
        }
        return err;
    }

private:
    ModelParams m_;
    const std::vector<double>& l_;
    double tol_;
};

}  // namespace detail

inline Trajectory integrate(const VortexSystem& system, double t_end, double dt, Method method = Method::RK45,
                            const IntegrateOptions& opt = {}) {
    if (!(dt > 0.0) || !std::isfinite(dt)) throw std::invalid_argument("integrate: dt must be positive");
    if (!(t_end > 0.0) || !std::isfinite(t_end)) throw std::invalid_argument("integrate: t_end must be positive");
    const ModelParams& m = system.model();
    const auto& l = system.strengths();
    const auto samples = static_cast<std::size_t>(std::floor(t_end / dt + 1e-9));

    Trajectory traj;
    traj.times.reserve(samples + 1);
    traj.states.reserve(samples + 1);
    traj.diagnostics.reserve(samples + 1);
    traj.times.push_back(0.0);
    traj.states.push_back(system);
    traj.diagnostics.push_back(energy_momentum(system));

    detail::State y = system.positions();
    double t = 0.0;
    std::size_t steps = 0;

    auto guard = [&](const detail::State& s, double time) {
        const auto [i, j, d] = detail::closest(s);
        if (s.size() > 1 && d < opt.collision_distance) throw CollisionError(i, j, time, d);
    };
    auto eval = [&](auto&& fn) {
        try {
            return fn();
        } catch (const SingularityError& e) {
            throw CollisionError(e.first(), e.second(), t, e.distance());
        }
    };

    detail::Dopri5 dp(m, l, opt.tolerance);
    detail::State k1 = eval([&] { return detail::rhs(m, y, l); });
    double h = std::min(dt, 1e-3);

    for (std::size_t k = 1; k <= samples; ++k) {
        const double target = k * dt;
        if (method == Method::RK4) {
            const double rate = detail::max_axial_rate(m, y, k1);
            const int sub = std::max(1, static_cast<int>(std::ceil(dt * rate / 0.5)));
            for (int s = 0; s < sub; ++s) {
                y = eval([&] { return step_rk4(m, y, l, dt / sub); });
                t += dt / sub;
                guard(y, t);
            }
            t = target;
            k1 = eval([&] { return detail::rhs(m, y, l); });
        } else {
            while (t < target) {
                if (++steps > opt.max_steps) throw std::runtime_error("integrate: step budget exhausted");
                const double rate = detail::max_axial_rate(m, y, k1);
                double hh = std::min(h, target - t);
                if (rate > 0.0) hh = std::min(hh, 0.5 / rate);
                detail::State y_new, k7;
                const double err = eval([&] { return dp.attempt(y, k1, hh, y_new, k7); });
                if (!std::isfinite(err)) {
                    h = 0.2 * hh;
                    continue;
                }
                const double grow = err == 0.0 ? 5.0 : std::clamp(0.9 * std::pow(err, -0.25), 0.2, 5.0);
                if (err <= 1.0) {
                    const bool clipped = hh < h;
                    t = (target - t - hh <= 1e-14 * std::max(1.0, target)) ? target : t + hh;
                    y = std::move(y_new);
                    if (m.on_sphere()) {
                        detail::project(m, y);
                        k1 = eval([&] { return detail::rhs(m, y, l); });
                    } else {
                        k1 = std::move(k7);
                    }
                    guard(y, t);
                    if (!clipped) h = hh * grow;
                } else {
                    h = hh * grow;
                }
                if (const double h_min = 1e-14 * std::max(1.0, t); h < h_min) {
                    // A pair whose mutual time scale d^2/|lambda| is down at the step floor is
                    // colliding as far as double precision can tell.
                    const auto [i, j, d] = detail::closest(y);
                    if (i != j && d * d / (std::abs(l[i]) + std::abs(l[j])) < 1e3 * h_min) throw CollisionError(i, j, t, d);
                    throw std::runtime_error("integrate: step size underflow");
                }
            }
        }
        traj.times.push_back(target);
        traj.states.push_back(system.with_positions(y));
        traj.diagnostics.push_back(energy_momentum(traj.states.back()));
    }
    return traj;
}

// ---------------------------------------------------------- rigid rotation

struct RigidRotationFit {
    double xi = 0.0;
    double shape_residual = 0.0;
    double xi_residual = 0.0;
    double diameter = 0.0;
    bool certified = false;
};

inline RigidRotationFit fit_rigid_rotation(const Trajectory& traj) {
    const std::size_t K = traj.size();
    if (K < 10) throw std::invalid_argument("fit_rigid_rotation needs at least 10 samples");
    const auto& first = traj.states.front();
    const std::size_t n = first.size();
    const bool sphere = first.model().on_sphere();

    RigidRotationFit fit;
    fit.diameter = first.diameter();

    std::vector<std::size_t> movers;
    for (std::size_t i = 0; i < n; ++i)
        if (std::hypot(first.position(i).x, first.position(i).y) > 1e-6) movers.push_back(i);
    if (movers.empty()) throw std::invalid_argument("fit_rigid_rotation: every vortex sits on the rotation axis");

    // Unwrapped longitude increments per mover.
    std::vector<std::vector<double>> lon(movers.size(), std::vector<double>(K, 0.0));
    for (std::size_t m = 0; m < movers.size(); ++m) {
        double prev = 0.0;
        for (std::size_t k = 0; k < K; ++k) {
            const Vec3& p = traj.states[k].position(movers[m]);
            const double a = std::atan2(p.y, p.x);
            if (k == 0) {
                prev = a;
                continue;
            }
            double d = a - prev;
            d -= two_pi * std::round(d / two_pi);
            lon[m][k] = lon[m][k - 1] + d;
            prev = a;
        }
    }
    std::vector<double> common(K, 0.0);
    for (std::size_t k = 0; k < K; ++k) {
        for (const auto& row : lon) common[k] += row[k];
        common[k] /= static_cast<double>(movers.size());
    }
    double tm = 0.0, cm = 0.0;
    for (std::size_t k = 0; k < K; ++k) tm += traj.times[k], cm += common[k];
    tm /= K;
    cm /= K;
    double sxy = 0.0, sxx = 0.0;
    for (std::size_t k = 0; k < K; ++k) {
        sxy += (traj.times[k] - tm) * (common[k] - cm);
        sxx += (traj.times[k] - tm) * (traj.times[k] - tm);
    }
    fit.xi = sxy / sxx;
    const double t0 = traj.times.front();
    for (const auto& row : lon)
        for (std::size_t k = 0; k < K; ++k)
            fit.xi_residual = std::max(fit.xi_residual, std::abs(row[k] - fit.xi * (traj.times[k] - t0)));

    auto axis = [&](const Vec3& p) { return sphere ? p.z : std::hypot(p.x, p.y); };
    for (std::size_t k = 1; k < K; ++k) {
        const auto& s = traj.states[k];
        for (std::size_t i = 0; i < n; ++i) {
            fit.shape_residual = std::max(fit.shape_residual, std::abs(axis(s.position(i)) - axis(first.position(i))));
            for (std::size_t j = i + 1; j < n; ++j) {
                const double d0 = norm(first.position(i) - first.position(j));
                const double d = norm(s.position(i) - s.position(j));
                fit.shape_residual = std::max(fit.shape_residual, std::abs(d - d0));
            }
        }
    }
    fit.certified = fit.shape_residual < 1e-7 * fit.diameter && fit.xi_residual < 1e-7;
    return fit;
}

// ----------------------------------------------------- persistence check

struct PersistenceReport {
    RingFamily family;
    double omega = 0.0;
    RigidRotationFit still;     // sphere at rest
    RigidRotationFit rotating;  // sphere rotating at omega, frozen background
    double delta_xi = 0.0;
    bool passed = false;
    std::string message;
};

inline PersistenceReport verify_persistence(const RingConfig& config, double omega, double t_end = 50.0,
                                            double dt = 0.05) {
    if (is_planar_family(config.family))
        throw std::invalid_argument("verify_persistence applies to the sphere ring families");
    RingConfig still = config;
    still.model = ModelParams::sphere();
    RingConfig spun = config;
    spun.model = sphere_model(omega);

    PersistenceReport r;
    r.family = config.family;
    r.omega = omega;
    r.still = fit_rigid_rotation(integrate(build(still), t_end, dt));
    r.rotating = fit_rigid_rotation(integrate(build(spun), t_end, dt));
    r.delta_xi = r.rotating.xi - r.still.xi;
    const bool shift_ok = std::abs(r.delta_xi - omega) <= 1e-6;
    r.passed = r.still.certified && r.rotating.certified && shift_ok;
    std::ostringstream os;
    os << family_name(config.family) << ": xi0=" << r.still.xi << " xi=" << r.rotating.xi << " dxi-omega="
       << (r.delta_xi - omega) << " shape=" << std::max(r.still.shape_residual, r.rotating.shape_residual)
       << " xi_res=" << std::max(r.still.xi_residual, r.rotating.xi_residual);
    r.message = os.str();
    return r;
}

// ------------------------------------------------------ ring longitude sum

// Direct evaluation of
//   B = sum_j sin(phi - phi_j) / (1 - r cos(phi - phi_j)),
//   r = sin(theta) sin(theta_k) / (1 - cos(theta) cos(theta_k)),
// over a ring of n vortices at colatitude theta_k and longitudes eps + 2 pi j / n.
inline double appendix_a_sum(int n, double theta_k, double epsilon, double theta, double phi) {
    if (n < 1) throw std::invalid_argument("appendix_a_sum: n must be positive");
    if (!(theta_k > 0.0 && theta_k < pi)) throw std::invalid_argument("appendix_a_sum: ring colatitude outside (0, pi)");
    if (!(theta >= 0.0 && theta <= pi)) throw std::invalid_argument("appendix_a_sum: colatitude outside [0, pi]");
    const double r = std::sin(theta) * std::sin(theta_k) / (1.0 - std::cos(theta) * std::cos(theta_k));
    double b = 0.0;
    for (int j = 1; j <= n; ++j) {
        const double d = phi - (epsilon + two_pi * j / n);
        const double den = 1.0 - r * std::cos(d);
        if (std::abs(den) < 1e-12) throw SingularityError(static_cast<std::size_t>(j), static_cast<std::size_t>(j), den);
        b += std::sin(d) / den;
    }
    return b;
}

inline double appendix_a_sum(const RingConfig& ring, double theta, double phi) {
    if (is_planar_family(ring.family)) throw std::invalid_argument("appendix_a_sum needs a sphere ring");
    return appendix_a_sum(ring.n, ring.size, ring.epsilon, theta, phi);
}

}  // namespace vortexlab
