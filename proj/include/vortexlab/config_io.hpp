#pragma once
// JSON configuration loading and CSV/JSON writers used by the command-line tool.
//
// Explicit form:
//   {"model": "sphere-rotating", "omega": 0.3, "kappa": 0.0,
//    "vortices": [{"lambda": 1.0, "theta": 0.5236, "phi": 0.0}, ...]}
// Plane models take "x"/"y" (or "rho"/"phi") per vortex.
// Builder shorthand:
//   {"family": "CNvRp", "n": 5, "theta0": 0.5236, "lambda_p": -0.5}
// Angles are radians unless the object carries "unit": "deg".

#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>

#include <json.hpp>

#include "dynamics.hpp"
#include "stability.hpp"
#include "sweep.hpp"

namespace vortexlab {

class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

namespace detail {

inline double angle_scale(const nlohmann::json& j) {
    if (!j.contains("unit")) return 1.0;
    const auto u = j.at("unit").get<std::string>();
    if (u == "rad") return 1.0;
    if (u == "deg") return pi / 180.0;
    throw ConfigError("unit must be \"rad\" or \"deg\", got \"" + u + "\"");
}

inline double number(const nlohmann::json& j, const char* key) {
    if (!j.contains(key)) throw ConfigError(std::string("missing field \"") + key + "\"");
    if (!j.at(key).is_number()) throw ConfigError(std::string("field \"") + key + "\" must be a number");
    return j.at(key).get<double>();
}

inline double number_or(const nlohmann::json& j, const char* key, double fallback) {
    return j.contains(key) ? number(j, key) : fallback;
}

inline ModelParams model_from_json(const nlohmann::json& j, bool sphere_default) {
    const std::string name = j.value("model", sphere_default ? std::string("sphere") : std::string("planar"));
    const ModelKind kind = ModelParams::parse_kind(name);
    double omega = number_or(j, "omega", 0.0);
    const double kappa = number_or(j, "kappa", 0.0);
    // Non-rotating sphere specified with a nonzero omega means the rotating model.
    if (kind == ModelKind::Sphere && omega != 0.0) return ModelParams::rotating_sphere(omega);
    if (kind == ModelKind::Planar && omega != 0.0) return ModelParams::rotating_plane(omega);
    if (kind != ModelKind::RotatingPlane && kind != ModelKind::RotatingSphere) omega = 0.0;
    return ModelParams::make(kind, omega, kind == ModelKind::Geostrophic ? kappa : 0.0);
}

}  // namespace detail

inline RingConfig ring_config_from_json(const nlohmann::json& j) {
    using detail::number;
    using detail::number_or;
    const double deg = detail::angle_scale(j);
    RingConfig c;
    c.family = parse_family(j.at("family").get<std::string>());
    if (!j.contains("n") || !j.at("n").is_number_integer()) throw ConfigError("builder needs an integer \"n\"");
    c.n = j.at("n").get<int>();
    c.epsilon = number_or(j, "epsilon", 0.0) * deg;
    const bool planar = is_planar_family(c.family);
    c.model = detail::model_from_json(j, !planar);
    if (planar) {
        c.size = number_or(j, "R", number_or(j, "radius", 1.0));
        if (j.contains("lambda_c")) c.lambda = number(j, "lambda_c");
        if (j.contains("lambda")) c.lambda = number(j, "lambda");
    } else {
        if (c.family != RingFamily::D2NhRe) c.size = number(j, "theta0") * deg;
        if (j.contains("theta1")) c.theta1 = number(j, "theta1") * deg;
        if (j.contains("lambda_p")) c.lambda = number(j, "lambda_p");
        c.pole_count = j.value("k_p", c.family == RingFamily::CNvRp ? 1 : 0);
    }
    return c;
}

inline VortexSystem system_from_json(const nlohmann::json& j) {
    try {
        if (j.contains("family") && j.contains("vortices"))
            throw ConfigError("config gives both \"family\" and \"vortices\"; use one");
        if (j.contains("family")) return build(ring_config_from_json(j));
        if (!j.contains("vortices") || !j.at("vortices").is_array())
            throw ConfigError("config needs a \"vortices\" array or a \"family\" builder");
        const ModelParams model = detail::model_from_json(j, false);
        const double deg = detail::angle_scale(j);
        std::vector<Vec3> pos;
        std::vector<double> str;
        for (const auto& v : j.at("vortices")) {
            const double vdeg = v.contains("unit") ? detail::angle_scale(v) : deg;
            str.push_back(detail::number(v, "lambda"));
            if (model.on_sphere()) {
                if (v.contains("x") && v.contains("z")) {
                    pos.push_back({detail::number(v, "x"), detail::number(v, "y"), detail::number(v, "z")});
                } else {
                    const auto p = SpherePoint::from_angles(detail::number(v, "theta") * vdeg,
                                                            detail::number_or(v, "phi", 0.0) * vdeg);
                    pos.push_back(p.cartesian());
                }
            } else if (v.contains("rho")) {
                const auto p = PlanePoint::from_polar(detail::number(v, "rho"), detail::number_or(v, "phi", 0.0) * vdeg);
                pos.push_back({p.x(), p.y(), 0.0});
            } else {
                pos.push_back({detail::number(v, "x"), detail::number(v, "y"), 0.0});
            }
        }
        return VortexSystem(model, std::move(pos), std::move(str));
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("malformed config: ") + e.what());
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    }
}

inline VortexSystem load_system(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot read config '" + path + "'");
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError("config '" + path + "' is not valid JSON: " + e.what());
    }
    return system_from_json(j);
}

// Writes a system in the explicit form, with cartesian coordinates at full
// precision so that a reload reproduces it bit for bit.
inline nlohmann::json system_to_json(const VortexSystem& s) {
    nlohmann::json j;
    j["model"] = s.model().label();
    j["omega"] = s.model().omega();
    j["kappa"] = s.model().kappa();
    auto& vs = j["vortices"] = nlohmann::json::array();
    for (std::size_t i = 0; i < s.size(); ++i) {
        const Vec3& p = s.position(i);
        nlohmann::json v{{"lambda", s.strength(i)}, {"x", p.x}, {"y", p.y}};
        if (s.model().on_sphere()) v["z"] = p.z;
        vs.push_back(v);
    }
    return j;
}

enum class Frame { Inertial, Rotating };

inline void write_trajectory_csv(std::ostream& os, const Trajectory& traj, Frame frame) {
    if (traj.size() == 0) return;
    const auto& first = traj.states.front();
    const bool sphere = first.model().on_sphere();
    const double omega = first.model().omega();
    os << "t";
    for (std::size_t i = 1; i <= first.size(); ++i) {
        if (sphere)
            os << ",theta_" << i << ",phi_" << i;
        else
            os << ",x_" << i << ",y_" << i;
    }
    os << ",H,J\n";
    os << std::setprecision(17);
    for (std::size_t k = 0; k < traj.size(); ++k) {
        const double t = traj.times[k];
        const double turn = frame == Frame::Rotating ? -omega * t : 0.0;
        os << t;
        for (std::size_t i = 0; i < first.size(); ++i) {
            const Vec3 p = detail::rotate_z(traj.states[k].position(i), turn);
            if (sphere) {
                const auto sp = SpherePoint::from_cartesian(p);
                os << ',' << sp.theta() << ',' << sp.phi();
            } else {
                os << ',' << p.x << ',' << p.y;
            }
        }
        os << ',' << traj.diagnostics[k].h << ',' << traj.diagnostics[k].j_so2 << '\n';
    }
}

inline nlohmann::json verdict_to_json(const StabilityVerdict& v) {
    nlohmann::json j;
    j["verdict"] = std::string(1, v.code());
    j["hessian_eigs"] = v.hessian_eigs;
    auto& le = j["linearization_eigs"] = nlohmann::json::array();
    for (auto e : v.linearization_eigs) le.push_back({e.real(), e.imag()});
    j["xi"] = std::isfinite(v.xi) ? nlohmann::json(v.xi) : nlohmann::json(nullptr);
    j["tolerance"] = v.tolerance_used;
    if (!v.notes.empty()) j["notes"] = v.notes;
    return j;
}

inline void write_diagram_csv(std::ostream& os, const std::vector<DiagramCell>& cells) {
    os << "kappa,lambda,verdict\n";
    os << std::setprecision(12);
    for (const auto& c : cells) {
        os << c.kappa << ',';
        if (std::isfinite(c.lambda)) os << c.lambda;
        os << ',' << c.verdict << '\n';
    }
}

}  // namespace vortexlab
