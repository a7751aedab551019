#pragma once
// Domain types shared by every module: points, model parameters, vortex
// systems and the named ring arrangements.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <limits>
#include <tuple>
#include <utility>
#include <vector>

namespace vortexlab {

inline constexpr double pi = std::numbers::pi;
inline constexpr double two_pi = 2.0 * std::numbers::pi;

// ---------------------------------------------------------------- errors

class SingularityError : public std::runtime_error {
public:
    SingularityError(std::size_t i, std::size_t j, double distance)
        : std::runtime_error(message(i, j, distance)), i_(i), j_(j), distance_(distance) {}
    std::size_t first() const { return i_; }
    std::size_t second() const { return j_; }
    double distance() const { return distance_; }

private:
    static std::string message(std::size_t i, std::size_t j, double d) {
        std::ostringstream os;
        os << "vortices " << i << " and " << j << " coincide (distance " << d << ")";
        return os.str();
    }
    std::size_t i_, j_;
    double distance_;
};

// --------------------------------------------------------------- vectors

struct Vec3 {
    double x = 0.0, y = 0.0, z = 0.0;

    Vec3& operator+=(const Vec3& o) { x += o.x; y += o.y; z += o.z; return *this; }
    Vec3& operator-=(const Vec3& o) { x -= o.x; y -= o.y; z -= o.z; return *this; }
    Vec3& operator*=(double s) { x *= s; y *= s; z *= s; return *this; }
    friend Vec3 operator+(Vec3 a, const Vec3& b) { return a += b; }
    friend Vec3 operator-(Vec3 a, const Vec3& b) { return a -= b; }
    friend Vec3 operator*(Vec3 a, double s) { return a *= s; }
    friend Vec3 operator*(double s, Vec3 a) { return a *= s; }
    friend Vec3 operator-(Vec3 a) { return a *= -1.0; }
    friend bool operator==(const Vec3&, const Vec3&) = default;
};

inline double dot(const Vec3& a, const Vec3& b) { return a.x * b.x + a.y * b.y + a.z * b.z; }
inline Vec3 cross(const Vec3& a, const Vec3& b) {
    return {a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z, a.x * b.y - a.y * b.x};
}
inline double norm(const Vec3& a) { return std::sqrt(dot(a, a)); }

// Wraps an angle into [0, 2pi).
inline double wrap_angle(double a) {
    double w = std::fmod(a, two_pi);
    if (w < 0) w += two_pi;
    if (w >= two_pi) w = 0.0;
    return w;
}

// -------------------------------------------------------------- vorticity

class Vorticity {
public:
    explicit Vorticity(double value) : value_(value) {
        if (!std::isfinite(value)) throw std::invalid_argument("vorticity must be finite");
        if (value == 0.0) throw std::invalid_argument("zero-strength vortex rejected");
    }
    double value() const { return value_; }

private:
    double value_;
};

// ---------------------------------------------------------------- points

// Point on the unit sphere. At the poles the longitude carries no information;
// it is stored as 0 and the point is flagged as a gauge point.
class SpherePoint {
public:
    static SpherePoint from_angles(double theta, double phi) {
        if (!std::isfinite(theta) || !std::isfinite(phi)) throw std::invalid_argument("SpherePoint: non-finite angle");
        if (theta < 0.0 || theta > pi) throw std::invalid_argument("SpherePoint: colatitude outside [0, pi]");
        SpherePoint p;
        p.theta_ = theta;
        p.gauge_ = (theta == 0.0 || theta == pi);
        p.phi_ = p.gauge_ ? 0.0 : wrap_angle(phi);
        const double s = std::sin(theta);
        p.xyz_ = {s * std::cos(p.phi_), s * std::sin(p.phi_), std::cos(theta)};
        if (p.gauge_) p.xyz_ = {0.0, 0.0, theta == 0.0 ? 1.0 : -1.0};
        return p;
    }

    static SpherePoint from_cartesian(const Vec3& v) {
        const double r = norm(v);
        if (!(r > 0.0) || !std::isfinite(r)) throw std::invalid_argument("SpherePoint: zero or non-finite vector");
        const Vec3 u = v * (1.0 / r);
        SpherePoint p;
        p.xyz_ = u;
        const double rho = std::hypot(u.x, u.y);
        p.theta_ = std::atan2(rho, u.z);
        p.gauge_ = (rho == 0.0);
        p.phi_ = p.gauge_ ? 0.0 : wrap_angle(std::atan2(u.y, u.x));
        return p;
    }

    double theta() const { return theta_; }
    double phi() const { return phi_; }
    bool gauge() const { return gauge_; }
    const Vec3& cartesian() const { return xyz_; }

private:
    SpherePoint() = default;
    double theta_ = 0.0, phi_ = 0.0;
    bool gauge_ = false;
    Vec3 xyz_;
};

// Point in the plane. Polar angle is meaningless within 1e-13 of the origin.
class PlanePoint {
public:
    static constexpr double polar_cutoff = 1e-13;

    static PlanePoint from_cartesian(double x, double y) {
        if (!std::isfinite(x) || !std::isfinite(y)) throw std::invalid_argument("PlanePoint: non-finite coordinate");
        PlanePoint p;
        p.x_ = x;
        p.y_ = y;
        return p;
    }
    static PlanePoint from_polar(double rho, double phi) {
        if (!(rho >= 0.0) || !std::isfinite(rho) || !std::isfinite(phi))
            throw std::invalid_argument("PlanePoint: invalid polar coordinates");
        return from_cartesian(rho * std::cos(phi), rho * std::sin(phi));
    }

    double x() const { return x_; }
    double y() const { return y_; }
    double rho() const { return std::hypot(x_, y_); }
    bool polar_defined() const { return rho() >= polar_cutoff; }
    double phi() const {
        if (!polar_defined()) throw std::domain_error("PlanePoint: polar angle undefined at the origin");
        return wrap_angle(std::atan2(y_, x_));
    }

private:
    PlanePoint() = default;
    double x_ = 0.0, y_ = 0.0;
};

// ----------------------------------------------------------------- model

enum class ModelKind { Planar, RotatingPlane, Geostrophic, Sphere, RotatingSphere };

class ModelParams {
public:
    static ModelParams planar() { return ModelParams(ModelKind::Planar, 0.0, 0.0); }
    static ModelParams rotating_plane(double omega) { return ModelParams(ModelKind::RotatingPlane, omega, 0.0); }
    static ModelParams geostrophic(double kappa) { return ModelParams(ModelKind::Geostrophic, 0.0, kappa); }
    static ModelParams sphere() { return ModelParams(ModelKind::Sphere, 0.0, 0.0); }
    static ModelParams rotating_sphere(double omega) { return ModelParams(ModelKind::RotatingSphere, omega, 0.0); }

    static ModelParams make(ModelKind kind, double omega, double kappa) {
        const bool rotating = kind == ModelKind::RotatingPlane || kind == ModelKind::RotatingSphere;
        if (!rotating && omega != 0.0) throw std::invalid_argument("omega must be 0 for a non-rotating model");
        if (kind != ModelKind::Geostrophic && kappa != 0.0) throw std::invalid_argument("kappa only applies to the geostrophic model");
        return ModelParams(kind, omega, kappa);
    }

    ModelKind kind() const { return kind_; }
    double omega() const { return omega_; }
    double kappa() const { return kappa_; }
    bool on_sphere() const { return kind_ == ModelKind::Sphere || kind_ == ModelKind::RotatingSphere; }

    // Geostrophic with kappa = 0 uses the logarithmic kernel.
    bool log_kernel() const { return kind_ != ModelKind::Geostrophic || kappa_ == 0.0; }

    std::string label() const {
        switch (kind_) {
            case ModelKind::Planar: return "planar";
            case ModelKind::RotatingPlane: return "plane-rotating";
            case ModelKind::Geostrophic: return "geostrophic";
            case ModelKind::Sphere: return "sphere";
            case ModelKind::RotatingSphere: return "sphere-rotating-frozen";
        }
        return "?";
    }

    static ModelKind parse_kind(std::string_view name) {
        if (name == "planar" || name == "plane") return ModelKind::Planar;
        if (name == "plane-rotating" || name == "rotating-plane") return ModelKind::RotatingPlane;
        if (name == "geostrophic") return ModelKind::Geostrophic;
        if (name == "sphere") return ModelKind::Sphere;
        if (name == "sphere-rotating" || name == "sphere-rotating-frozen" || name == "rotating-sphere")
            return ModelKind::RotatingSphere;
        throw std::invalid_argument("unknown model '" + std::string(name) + "'");
    }

    friend bool operator==(const ModelParams&, const ModelParams&) = default;

private:
    ModelParams(ModelKind kind, double omega, double kappa) : kind_(kind), omega_(omega), kappa_(kappa) {
        if (!std::isfinite(omega) || !std::isfinite(kappa)) throw std::invalid_argument("model parameters must be finite");
        if (kappa < 0.0) throw std::invalid_argument("kappa must be non-negative");
    }
    ModelKind kind_;
    double omega_;
    double kappa_;
};

// ---------------------------------------------------------------- system

inline constexpr double distinctness_tolerance = 1e-10;

// Positions are stored as 3-vectors: unit vectors for sphere models, z = 0 for
// plane models.
class VortexSystem {
public:
    VortexSystem(ModelParams model, std::vector<Vec3> positions, std::vector<double> strengths)
        : model_(model), positions_(std::move(positions)), strengths_(std::move(strengths)) {
        if (positions_.size() != strengths_.size()) throw std::invalid_argument("positions and strengths differ in length");
        if (positions_.empty()) throw std::invalid_argument("a vortex system needs at least one vortex");
        for (double s : strengths_) (void)Vorticity(s);
        for (auto& p : positions_) {
            if (!std::isfinite(p.x) || !std::isfinite(p.y) || !std::isfinite(p.z))
                throw std::invalid_argument("non-finite vortex position");
            if (model_.on_sphere()) {
                const double r = norm(p);
                if (std::abs(r - 1.0) > 1e-9) throw std::invalid_argument("sphere position is not a unit vector");
                p *= 1.0 / r;
            } else if (p.z != 0.0) {
                throw std::invalid_argument("plane position has a nonzero z component");
            }
        }
        const auto [i, j, d] = closest_pair();
        if (size() > 1 && d <= distinctness_tolerance) throw SingularityError(i, j, d);
    }

    static VortexSystem from_sphere_points(ModelParams model, const std::vector<SpherePoint>& pts,
                                           const std::vector<double>& strengths) {
        if (!model.on_sphere()) throw std::invalid_argument("sphere points need a sphere model");
        std::vector<Vec3> xyz;
        xyz.reserve(pts.size());
        for (const auto& p : pts) xyz.push_back(p.cartesian());
        return VortexSystem(model, std::move(xyz), strengths);
    }

    static VortexSystem from_plane_points(ModelParams model, const std::vector<PlanePoint>& pts,
                                          const std::vector<double>& strengths) {
        if (model.on_sphere()) throw std::invalid_argument("plane points need a plane model");
        std::vector<Vec3> xyz;
        xyz.reserve(pts.size());
        for (const auto& p : pts) xyz.push_back({p.x(), p.y(), 0.0});
        return VortexSystem(model, std::move(xyz), strengths);
    }

    const ModelParams& model() const { return model_; }
    std::size_t size() const { return positions_.size(); }
    const std::vector<Vec3>& positions() const { return positions_; }
    const std::vector<double>& strengths() const { return strengths_; }
    const Vec3& position(std::size_t i) const { return positions_.at(i); }
    double strength(std::size_t i) const { return strengths_.at(i); }

    SpherePoint sphere_point(std::size_t i) const {
        if (!model_.on_sphere()) throw std::logic_error("sphere_point on a plane model");
        return SpherePoint::from_cartesian(positions_.at(i));
    }
    PlanePoint plane_point(std::size_t i) const {
        if (model_.on_sphere()) throw std::logic_error("plane_point on a sphere model");
        return PlanePoint::from_cartesian(positions_.at(i).x, positions_.at(i).y);
    }

    double total_vorticity() const {
        double s = 0.0;
        for (double l : strengths_) s += l;
        return s;
    }

    double min_pair_distance() const { return std::get<2>(closest_pair()); }

    double diameter() const {
        double d = 0.0;
        for (std::size_t i = 0; i < size(); ++i)
            for (std::size_t j = i + 1; j < size(); ++j) d = std::max(d, norm(positions_[i] - positions_[j]));
        return d;
    }

    VortexSystem with_positions(std::vector<Vec3> positions) const {
        return VortexSystem(model_, std::move(positions), strengths_);
    }
    VortexSystem with_model(ModelParams model) const {
        if (model.on_sphere() != model_.on_sphere()) throw std::invalid_argument("cannot move a system between plane and sphere");
        return VortexSystem(model, positions_, strengths_);
    }

private:
    std::tuple<std::size_t, std::size_t, double> closest_pair() const {
        std::size_t bi = 0, bj = 0;
        double best = std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < positions_.size(); ++i)
            for (std::size_t j = i + 1; j < positions_.size(); ++j) {
                const double d = norm(positions_[i] - positions_[j]);
                if (d < best) {
                    best = d;
                    bi = i;
                    bj = j;
                }
            }
        return {bi, bj, best};
    }

    ModelParams model_;
    std::vector<Vec3> positions_;
    std::vector<double> strengths_;
};

// ----------------------------------------------------------------- rings

enum class RingFamily { CNR, CNRp, CNvR, CNvRp, DNh2R, DNdRRp, D2NhRe };

inline std::string family_name(RingFamily f) {
    switch (f) {
        case RingFamily::CNR: return "CNR";
        case RingFamily::CNRp: return "CNRp";
        case RingFamily::CNvR: return "CNvR";
        case RingFamily::CNvRp: return "CNvRp";
        case RingFamily::DNh2R: return "DNh2R";
        case RingFamily::DNdRRp: return "DNdRRp";
        case RingFamily::D2NhRe: return "D2NhRe";
    }
    return "?";
}

inline RingFamily parse_family(std::string_view s) {
    for (auto f : {RingFamily::CNR, RingFamily::CNRp, RingFamily::CNvR, RingFamily::CNvRp, RingFamily::DNh2R,
                   RingFamily::DNdRRp, RingFamily::D2NhRe})
        if (s == family_name(f)) return f;
    throw std::invalid_argument("unknown ring family '" + std::string(s) + "'");
}

inline bool is_planar_family(RingFamily f) { return f == RingFamily::CNR || f == RingFamily::CNRp; }

// Symbolic ring arrangement. `size` is the radius R for planar families and the
// colatitude theta0 for sphere families. For the double-ring families,
// `pole_count` (0, 1 or 2) places vortices of strength `lambda` at the poles;
// for the single-ring families with a polar/central vortex, `lambda` is its
// strength.
struct RingConfig {
    RingFamily family = RingFamily::CNR;
    int n = 3;
    double size = 1.0;
    double epsilon = 0.0;
    std::optional<double> lambda;
    std::optional<double> theta1;
    int pole_count = 0;
    ModelParams model = ModelParams::planar();
};

inline VortexSystem build_planar_ring(int n, double radius, std::optional<double> lambda_center = std::nullopt,
                                      ModelParams model = ModelParams::planar(), double epsilon = 0.0) {
    if (n < 2) throw std::invalid_argument("a ring needs n >= 2");
    if (!(radius > 0.0) || !std::isfinite(radius)) throw std::invalid_argument("ring radius must be positive");
    if (model.on_sphere()) throw std::invalid_argument("planar ring needs a plane model");
    std::vector<Vec3> pos;
    std::vector<double> str;
    for (int j = 1; j <= n; ++j) {
        const double a = epsilon + two_pi * j / n;
        pos.push_back({radius * std::cos(a), radius * std::sin(a), 0.0});
        str.push_back(1.0);
    }
    if (lambda_center) {
        pos.push_back({0.0, 0.0, 0.0});
        str.push_back(*lambda_center);
    }
    return VortexSystem(model, std::move(pos), std::move(str));
}

inline Vec3 unit_from_angles(double theta, double phi) {
    return {std::sin(theta) * std::cos(phi), std::sin(theta) * std::sin(phi), std::cos(theta)};
}

inline ModelParams sphere_model(double omega) {
    return omega == 0.0 ? ModelParams::sphere() : ModelParams::rotating_sphere(omega);
}

inline VortexSystem build_sphere_ring(int n, double theta0, std::optional<double> lambda_pole = std::nullopt,
                                      double omega = 0.0, double epsilon = 0.0) {
    if (n < 2) throw std::invalid_argument("a ring needs n >= 2");
    if (!(theta0 > 0.0 && theta0 < pi)) throw std::invalid_argument("ring colatitude must lie strictly inside (0, pi)");
    std::vector<Vec3> pos;
    std::vector<double> str;
    for (int j = 1; j <= n; ++j) {
        pos.push_back(unit_from_angles(theta0, epsilon + two_pi * j / n));
        str.push_back(1.0);
    }
    if (lambda_pole) {
        pos.push_back({0.0, 0.0, 1.0});
        str.push_back(*lambda_pole);
    }
    return VortexSystem(sphere_model(omega), std::move(pos), std::move(str));
}

namespace detail {

// Checks that a map on (position, strength) pairs permutes the system.
template <class Map>
bool permuted_by(const VortexSystem& s, Map&& g, double tol = 1e-12) {
    const auto& pos = s.positions();
    const auto& str = s.strengths();
    std::vector<bool> hit(s.size(), false);
    for (std::size_t i = 0; i < s.size(); ++i) {
        const auto [p, l] = g(pos[i], str[i]);
        bool found = false;
        for (std::size_t j = 0; j < s.size(); ++j)
            if (!hit[j] && norm(p - pos[j]) < tol && std::abs(l - str[j]) < tol) {
                hit[j] = found = true;
                break;
            }
        if (!found) return false;
    }
    return true;
}

inline Vec3 rotate_z(const Vec3& v, double a) {
    const double c = std::cos(a), s = std::sin(a);
    return {c * v.x - s * v.y, s * v.x + c * v.y, v.z};
}

}  // namespace detail

// Double-ring and equatorial families on the sphere. These are arrangements of
// opposite vorticities: the ring at theta0 carries +1 and the second ring -1
// (the equatorial family alternates signs). With identical rings the equatorial
// reflection would reverse the sense of rotation of one ring, so no rigid
// rotation about the axis would exist. `pole_count` is 0 or 2; the polar pair
// is +lambda_p at the north pole and -lambda_p at the south pole.
inline VortexSystem build_double_ring(RingFamily family, int n, std::optional<double> theta0,
                                      std::optional<double> theta1, int pole_count, double lambda_p = 1.0,
                                      double omega = 0.0) {
    if (n < 2) throw std::invalid_argument("a ring needs n >= 2");
    if (pole_count != 0 && pole_count != 2)
        throw std::invalid_argument("double-ring families carry 0 or 2 polar vortices");
    std::vector<Vec3> pos;
    std::vector<double> str;
    auto ring = [&](double theta, double offset, double strength) {
        for (int j = 1; j <= n; ++j) {
            pos.push_back(unit_from_angles(theta, offset + two_pi * j / n));
            str.push_back(strength);
        }
    };
    double twist = 0.0;  // rotation combined with the equatorial reflection in the symmetry audit

    switch (family) {
        case RingFamily::DNh2R: {
            if (!theta0) throw std::invalid_argument("DNh2R needs theta0");
            if (theta1) throw std::invalid_argument("DNh2R mirrors its first ring; theta1 is not accepted");
            if (!(*theta0 > 0.0 && *theta0 < pi / 2)) throw std::invalid_argument("DNh2R needs 0 < theta0 < pi/2");
            ring(*theta0, 0.0, 1.0);
            ring(pi - *theta0, 0.0, -1.0);
            break;
        }
        case RingFamily::DNdRRp: {
            if (!theta0) throw std::invalid_argument("DNdRRp needs theta0");
            const double t1 = theta1.value_or(pi - *theta0);
            if (!(*theta0 > 0.0 && *theta0 < pi) || !(t1 > 0.0 && t1 < pi))
                throw std::invalid_argument("DNdRRp colatitudes must lie in (0, pi)");
            ring(*theta0, 0.0, 1.0);
            ring(t1, pi / n, -1.0);
            twist = pi / n;
            break;
        }
        case RingFamily::D2NhRe: {
            if (theta0 || theta1) throw std::invalid_argument("D2NhRe lives on the equator; colatitudes are not accepted");
            for (int j = 1; j <= 2 * n; ++j) {
                pos.push_back(unit_from_angles(pi / 2, two_pi * j / (2 * n)));
                str.push_back(j % 2 == 1 ? 1.0 : -1.0);
            }
            twist = pi / n;
            break;
        }
        default:
            throw std::invalid_argument("build_double_ring accepts DNh2R, DNdRRp or D2NhRe");
    }
    if (pole_count == 2) {
        (void)Vorticity(lambda_p);
        pos.push_back({0, 0, 1}), str.push_back(lambda_p);
        pos.push_back({0, 0, -1}), str.push_back(-lambda_p);
    }
    VortexSystem sys(sphere_model(omega), std::move(pos), std::move(str));

    // Symmetry audit: the rotation by 2pi/n, and the equatorial reflection
    // (after a twist for the staggered families) paired with a sign change.
    const bool ok =
        detail::permuted_by(sys, [&](const Vec3& p, double l) { return std::pair{detail::rotate_z(p, two_pi / n), l}; }) &&
        detail::permuted_by(sys, [&](const Vec3& p, double l) {
            const Vec3 r = detail::rotate_z(p, twist);
            return std::pair{Vec3{r.x, r.y, -r.z}, -l};
        });
    if (!ok && !(family == RingFamily::DNdRRp && theta1 && *theta1 != pi - *theta0))
        throw std::logic_error("double-ring builder produced an asymmetric configuration");
    return sys;
}

inline VortexSystem build(const RingConfig& c) {
    switch (c.family) {
        case RingFamily::CNR:
            if (c.lambda) throw std::invalid_argument("CNR has no central vortex");
            return build_planar_ring(c.n, c.size, std::nullopt, c.model, c.epsilon);
        case RingFamily::CNRp:
            if (!c.lambda) throw std::invalid_argument("CNRp needs a central strength");
            return build_planar_ring(c.n, c.size, c.lambda, c.model, c.epsilon);
        case RingFamily::CNvR:
        case RingFamily::CNvRp: {
            if (!c.model.on_sphere()) throw std::invalid_argument("sphere ring families need a sphere model");
            std::optional<double> pole;
            if (c.family == RingFamily::CNvRp) {
                if (!c.lambda) throw std::invalid_argument("CNvRp needs a polar strength");
                pole = c.lambda;
            } else if (c.pole_count == 1) {
                pole = c.lambda.value_or(1.0);
            } else if (c.lambda) {
                throw std::invalid_argument("CNvR has no polar vortex; use CNvRp");
            }
            return build_sphere_ring(c.n, c.size, pole, c.model.omega(), c.epsilon);
        }
        case RingFamily::DNh2R:
        case RingFamily::DNdRRp:
        case RingFamily::D2NhRe: {
            if (!c.model.on_sphere()) throw std::invalid_argument("double-ring families need a sphere model");
            std::optional<double> t0;
            if (c.family != RingFamily::D2NhRe) t0 = c.size;
            return build_double_ring(c.family, c.n, t0, c.theta1, c.pole_count, c.lambda.value_or(1.0), c.model.omega());
        }
    }
    throw std::invalid_argument("unknown family");
}

}  // namespace vortexlab
