#pragma once
// Hamiltonians, momenta and velocity fields for the four vortex models.
//
// Energies are kept in a normalized unit:
//   plane        H = -1/4 sum_{i<j} l_i l_j ln|x_i - x_j|^2  (- Omega/2 sum l rho^2 when rotating)
//   geostrophic  H =  1/2 sum_{i<j} l_i l_j K0(kappa |x_i - x_j|)
//   sphere       H =  sum_{i<j} l_i l_j ln(1 - x_i.x_j)  (+ Omega sum l z when rotating)
// The conventional ("raw") values differ by a constant factor, see raw_energy_factor().
// With these units a vortex moves with velocity (1/l_i) grad_i H x n_i, where n_i is
// the surface normal (e_z in the plane, x_i on the sphere).

#include <array>
#include <cmath>
#include <span>
#include <stdexcept>
#include <vector>

#include "core.hpp"
#include "specfun.hpp"

namespace vortexlab {

struct EnergyMomentum {
    double h = 0.0;
    double j_so2 = 0.0;
    Vec3 m_vec;  // zero for plane models
};

// Per-vortex rates. For plane models `rates` holds (dx/dt, dy/dt). For sphere
// models it holds (dtheta/dt, dphi/dt) except within 1e-6 rad of a pole, where
// the angular chart is singular and the pair is the tangent-plane velocity
// (dx/dt, dy/dt) instead; `angular` records which form each entry has.
struct VelocityField {
    std::vector<Vec3> cartesian;
    std::vector<std::array<double, 2>> rates;
    std::vector<bool> angular;
};

inline constexpr double pole_chart_cutoff = 1e-6;

inline double raw_energy_factor(const ModelParams& m) {
    if (m.on_sphere()) return 1.0 / (4.0 * pi);
    if (!m.log_kernel()) return 2.0;
    return 1.0 / pi;
}

namespace detail {

inline void check_pair(std::size_t i, std::size_t j, double d) {
    if (!(d > distinctness_tolerance)) throw SingularityError(i, j, d);
}

// Gradient of H with respect to each ambient position. For the sphere only
// the tangential part is meaningful.
inline std::vector<Vec3> energy_gradient(const ModelParams& model, std::span<const Vec3> x, std::span<const double> l) {
    const std::size_t n = x.size();
    std::vector<Vec3> g(n);
    if (model.on_sphere()) {
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = i + 1; j < n; ++j) {
                check_pair(i, j, norm(x[i] - x[j]));
                const double w = l[i] * l[j] / (1.0 - dot(x[i], x[j]));
                g[i] -= w * x[j];
                g[j] -= w * x[i];
            }
        if (model.kind() == ModelKind::RotatingSphere)
            for (std::size_t i = 0; i < n; ++i) g[i].z += model.omega() * l[i];
        return g;
    }
    const bool logk = model.log_kernel();
    const double kappa = model.kappa();
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) {
            const Vec3 d = x[i] - x[j];
            const double r = norm(d);
            check_pair(i, j, r);
            // dH/dr for the pair, divided by r
            const double f = logk ? -0.5 * l[i] * l[j] / (r * r) : -0.5 * kappa * l[i] * l[j] * bessel_k1(kappa * r) / r;
            g[i] += f * d;
            g[j] -= f * d;
        }
    if (model.kind() == ModelKind::RotatingPlane)
        for (std::size_t i = 0; i < n; ++i) g[i] -= model.omega() * l[i] * Vec3{x[i].x, x[i].y, 0.0};
    return g;
}

// Gradient of the function generating unit-rate rotation about the z axis.
inline std::vector<Vec3> rotation_generator_gradient(const ModelParams& model, std::span<const Vec3> x,
                                                     std::span<const double> l) {
    std::vector<Vec3> g(x.size());
    for (std::size_t i = 0; i < x.size(); ++i)
        g[i] = model.on_sphere() ? Vec3{0.0, 0.0, l[i]} : Vec3{-l[i] * x[i].x, -l[i] * x[i].y, 0.0};
    return g;
}

inline std::vector<Vec3> cartesian_velocity(const ModelParams& model, std::span<const Vec3> x, std::span<const double> l) {
    auto g = energy_gradient(model, x, l);
    const Vec3 ez{0.0, 0.0, 1.0};
    for (std::size_t i = 0; i < x.size(); ++i) g[i] = (1.0 / l[i]) * cross(g[i], model.on_sphere() ? x[i] : ez);
    return g;
}

inline double energy(const ModelParams& model, std::span<const Vec3> x, std::span<const double> l) {
    const std::size_t n = x.size();
    double h = 0.0;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) {
            const double r = norm(x[i] - x[j]);
            check_pair(i, j, r);
            const double ll = l[i] * l[j];
            if (model.on_sphere())
                h += ll * std::log(1.0 - dot(x[i], x[j]));
            else if (model.log_kernel())
                h -= 0.5 * ll * std::log(r);
            else
                h += 0.5 * ll * bessel_k0(model.kappa() * r);
        }
    for (std::size_t i = 0; i < n; ++i) {
        if (model.kind() == ModelKind::RotatingSphere) h += model.omega() * l[i] * x[i].z;
        if (model.kind() == ModelKind::RotatingPlane)
            h -= 0.5 * model.omega() * l[i] * (x[i].x * x[i].x + x[i].y * x[i].y);
    }
    return h;
}

inline double so2_momentum(const ModelParams& model, std::span<const Vec3> x, std::span<const double> l) {
    double j = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i)
        j += model.on_sphere() ? l[i] * x[i].z : 0.5 * l[i] * (x[i].x * x[i].x + x[i].y * x[i].y);
    return j;
}

}  // namespace detail

// Normalized Hamiltonian (see the header comment). The rotating-sphere value omits
// the self-energy of the frozen background, which is a constant.
inline double hamiltonian(const VortexSystem& s) {
    return detail::energy(s.model(), s.positions(), s.strengths());
}

inline double hamiltonian_raw(const VortexSystem& s) { return hamiltonian(s) * raw_energy_factor(s.model()); }

inline VelocityField velocity(const VortexSystem& s) {
    VelocityField v;
    v.cartesian = detail::cartesian_velocity(s.model(), s.positions(), s.strengths());
    v.rates.resize(s.size());
    v.angular.assign(s.size(), false);
    for (std::size_t i = 0; i < s.size(); ++i) {
        const Vec3& p = s.position(i);
        const Vec3& u = v.cartesian[i];
        if (!s.model().on_sphere()) {
            v.rates[i] = {u.x, u.y};
            continue;
        }
        const double sin_t = std::hypot(p.x, p.y);
        if (sin_t < std::sin(pole_chart_cutoff)) {
            v.rates[i] = {u.x, u.y};
            continue;
        }
        const double cphi = p.x / sin_t, sphi = p.y / sin_t;
        const Vec3 e_theta{p.z * cphi, p.z * sphi, -sin_t};
        const Vec3 e_phi{-sphi, cphi, 0.0};
        v.rates[i] = {dot(u, e_theta), dot(u, e_phi) / sin_t};
        v.angular[i] = true;
    }
    return v;
}

// Plane: sum l rho^2 / 2. Sphere: sum l cos(theta).
inline double momentum_so2(const VortexSystem& s) {
    return detail::so2_momentum(s.model(), s.positions(), s.strengths());
}

inline double background_momentum_z(double omega) { return 8.0 * pi * omega / 3.0; }

inline Vec3 momentum_sphere(const VortexSystem& s) {
    if (!s.model().on_sphere()) throw std::invalid_argument("momentum_sphere needs a sphere model");
    Vec3 m;
    for (std::size_t i = 0; i < s.size(); ++i) m += s.strength(i) * s.position(i);
    if (s.model().kind() == ModelKind::RotatingSphere) m.z += background_momentum_z(s.model().omega());
    return m;
}

struct BackgroundPotential {
    double value;
    double d_theta;
};

// Potential felt by a vortex at colatitude theta from the frozen background
// 2 Omega cos(theta); zero at the equator, independent of longitude.
inline BackgroundPotential background_potential(double theta, double omega) {
    return {omega * std::cos(theta), -omega * std::sin(theta)};
}

inline EnergyMomentum energy_momentum(const VortexSystem& s) {
    EnergyMomentum e;
    e.h = hamiltonian(s);
    e.j_so2 = momentum_so2(s);
    if (s.model().on_sphere()) e.m_vec = momentum_sphere(s);
    return e;
}

}  // namespace vortexlab
