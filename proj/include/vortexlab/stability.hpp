#pragma once
// Energy-momentum stability analysis of ring relative equilibria.
//
// A ring configuration is described in a chart adapted to the rotation about
// the z axis: ring vortices use (rho, phi) in the plane or (z = cos theta, phi)
// on the sphere, a central/polar vortex uses tangent-plane coordinates (u, v).
// The relative equilibrium is a critical point of H_xi = H - xi G, where G
// generates unit-rate rotation (plane: -sum l rho^2 / 2, sphere: sum l z).
// The second variation is restricted to the slice orthogonal to the rotation
// orbit inside the level set of the momentum, written in Fourier modes of the
// ring, and split into the blocks that the dihedral symmetry forces.

#include <algorithm>
#include <cmath>
#include <complex>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "core.hpp"
#include "models.hpp"
#include "smalleig.hpp"

namespace vortexlab {

// ------------------------------------------------------------- verdicts

enum class Verdict { LyapunovStable, Elliptic, LinearlyUnstable, Degenerate };

inline char verdict_code(Verdict v) {
    switch (v) {
        case Verdict::LyapunovStable: return 'S';
        case Verdict::Elliptic: return 'E';
        case Verdict::LinearlyUnstable: return 'U';
        case Verdict::Degenerate: return 'D';
    }
    return '?';
}

inline std::string verdict_name(Verdict v) {
    switch (v) {
        case Verdict::LyapunovStable: return "LyapunovStable";
        case Verdict::Elliptic: return "Elliptic";
        case Verdict::LinearlyUnstable: return "LinearlyUnstable";
        case Verdict::Degenerate: return "Degenerate";
    }
    return "?";
}

struct StabilityVerdict {
    Verdict kind = Verdict::Degenerate;
    std::vector<double> hessian_eigs;
    std::vector<std::complex<double>> linearization_eigs;
    double tolerance_used = 0.0;
    double xi = std::numeric_limits<double>::quiet_NaN();
    std::vector<std::string> notes;

    char code() const { return verdict_code(kind); }
};

class NotRelativeEquilibrium : public std::runtime_error {
public:
    explicit NotRelativeEquilibrium(double residual)
        : std::runtime_error("configuration is not a relative equilibrium (gradient residual " +
                             std::to_string(residual) + ")"),
          residual_(residual) {}
    double residual() const { return residual_; }

private:
    double residual_;
};

class SymmetryBasisError : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

struct LabeledMatrix {
    std::string label;
    Matrix matrix;
};

struct SliceBasis {
    std::vector<std::vector<double>> vectors;  // chart coordinates
    std::vector<std::string> labels;
};

struct SliceHessian {
    std::vector<LabeledMatrix> blocks;
    std::vector<std::vector<std::size_t>> members;  // basis indices of each block
    Matrix projected;                               // full matrix in the slice basis
    double off_block = 0.0;                         // largest coupling between blocks, relative to |projected|
};

// ------------------------------------------------------------- the chart

class RingEquilibrium {
public:
    explicit RingEquilibrium(const RingConfig& config) : config_(config), system_(build(config)) {
        const auto f = config.family;
        if (f != RingFamily::CNR && f != RingFamily::CNRp && f != RingFamily::CNvR && f != RingFamily::CNvRp)
            throw std::invalid_argument("stability analysis supports single rings (CNR, CNRp, CNvR, CNvRp)");
        sphere_ = system_.model().on_sphere();
        if (!sphere_ && config.n < 3) throw std::invalid_argument("planar ring stability needs n >= 3");
        if (system_.model().kind() == ModelKind::RotatingPlane && std::abs(system_.total_vorticity()) < 1e-12)
            throw std::invalid_argument("rotating-plane lift needs nonzero total vorticity");

        n_ = static_cast<std::size_t>(config.n);
        centre_ = system_.size() > n_;
        for (std::size_t s = 0; s < n_; ++s) {
            const Vec3& p = system_.position(s);
            phases_.push_back(std::atan2(p.y, p.x));
            q_.push_back(sphere_ ? p.z : std::hypot(p.x, p.y));
            q_.push_back(phases_.back());
        }
        if (centre_) {
            q_.push_back(0.0);
            q_.push_back(0.0);
        }

        const auto [gh, gj] = gradients(q_);
        double hj = 0.0, jj = 0.0, hh = 0.0;
        for (std::size_t k = 0; k < gh.size(); ++k) hj += gh[k] * gj[k], jj += gj[k] * gj[k], hh += gh[k] * gh[k];
        xi_ = hj / jj;
        double res = 0.0;
        for (std::size_t k = 0; k < gh.size(); ++k) res += (gh[k] - xi_ * gj[k]) * (gh[k] - xi_ * gj[k]);
        residual_ = std::sqrt(res);
        if (residual_ > 1e-8 * std::max(1.0, std::sqrt(hh))) throw NotRelativeEquilibrium(residual_);
        hessian_ = augmented_hessian(xi_);
    }

    const RingConfig& config() const { return config_; }
    const VortexSystem& system() const { return system_; }
    double xi() const { return xi_; }
    double gradient_residual() const { return residual_; }
    std::size_t dimension() const { return q_.size(); }
    const std::vector<double>& coordinates() const { return q_; }
    bool has_centre() const { return centre_; }

    // Gradient of H - xi G in chart coordinates.
    std::vector<double> chart_gradient(const std::vector<double>& q, double xi) const {
        auto [gh, gj] = gradients(q);
        for (std::size_t k = 0; k < gh.size(); ++k) gh[k] -= xi * gj[k];
        return gh;
    }

    // Gradient of the rotation generator G (equivalently of the momentum, up to sign).
    std::vector<double> generator_gradient() const { return gradients(q_).second; }

    // Second derivative of H_xi at the configuration: central differences of the
    // analytic gradient with one Richardson extrapolation, then symmetrized.
    Matrix augmented_hessian(double xi) const {
        const auto g0 = chart_gradient(q_, xi);
        double g2 = 0.0, gh2 = 0.0;
        const auto gh = gradients(q_).first;
        for (std::size_t k = 0; k < g0.size(); ++k) g2 += g0[k] * g0[k], gh2 += gh[k] * gh[k];
        if (std::sqrt(g2) > 1e-8 * std::max(1.0, std::sqrt(gh2))) throw NotRelativeEquilibrium(std::sqrt(g2));

        const std::size_t d = q_.size();
        const double h = 1e-5;
        Matrix hess(d, d);
        auto column = [&](std::size_t j, double step) {
            auto qp = q_, qm = q_;
            qp[j] += step;
            qm[j] -= step;
            const auto gp = chart_gradient(qp, xi);
            const auto gm = chart_gradient(qm, xi);
            std::vector<double> c(d);
            for (std::size_t i = 0; i < d; ++i) c[i] = (gp[i] - gm[i]) / (2.0 * step);
            return c;
        };
        for (std::size_t j = 0; j < d; ++j) {
            // Ring heights z = cos(theta) live in [-1, 1] and the energy varies on the scale
            // 1 - |z| near a pole, so the step there shrinks with that distance.
            double hj = h;
            if (sphere_ && j < 2 * n_ && j % 2 == 0) hj = std::min(h, 1e-3 * (1.0 - std::abs(q_[j])));
            const auto c1 = column(j, hj);
            const auto c2 = column(j, 0.5 * hj);
            for (std::size_t i = 0; i < d; ++i) hess(i, j) = (4.0 * c2[i] - c1[i]) / 3.0;
        }
        for (std::size_t i = 0; i < d; ++i)
            for (std::size_t j = i + 1; j < d; ++j) hess(i, j) = hess(j, i) = 0.5 * (hess(i, j) + hess(j, i));
        return hess;
    }

    const Matrix& hessian() const { return hessian_; }

    // Matrix W of the symplectic form in chart coordinates (W qdot = grad H).
    Matrix symplectic_matrix() const {
        const std::size_t d = q_.size();
        Matrix w(d, d);
        auto put = [&](std::size_t k, double a) {
            w(k, k + 1) = -a;
            w(k + 1, k) = a;
        };
        for (std::size_t s = 0; s < n_; ++s) {
            const double l = system_.strength(s);
            put(2 * s, sphere_ ? -l : l * q_[2 * s]);
        }
        if (centre_) put(2 * n_, system_.strength(n_));  // north pole and plane centre share orientation
        return w;
    }

    SliceBasis slice_basis() const {
        SliceBasis b;
        const std::size_t d = q_.size();
        const int n = config_.n;
        for (int l = 1; 2 * l <= n; ++l) {
            const bool half = (2 * l == n);
            const double norm_full = std::sqrt(2.0 / n);
            const double norm_half = std::sqrt(1.0 / n);
            // Sine modes on the radial coordinate carry a minus sign so that both
            // l = 1 blocks come out identical rather than merely similar.
            auto mode = [&](bool cosine, bool angle_coord) {
                std::vector<double> v(d, 0.0);
                for (std::size_t s = 0; s < n_; ++s) {
                    const double a = l * two_pi * static_cast<double>(s + 1) / n;
                    const double c = cosine ? std::cos(a) : (angle_coord ? std::sin(a) : -std::sin(a));
                    v[2 * s + (angle_coord ? 1 : 0)] = (half ? norm_half : norm_full) * c;
                }
                return v;
            };
            auto tag = [&](const char* kind, const char* coord) {
                return "l" + std::to_string(l) + "." + kind + "." + coord;
            };
            b.vectors.push_back(mode(true, true)), b.labels.push_back(tag("alpha", "phi"));
            if (!half) b.vectors.push_back(mode(false, false)), b.labels.push_back(tag("beta", "theta"));
            if (l == 1 && centre_) b.vectors.push_back(centre_vector(false)), b.labels.push_back("dy~");
            if (!half) b.vectors.push_back(mode(false, true)), b.labels.push_back(tag("beta", "phi"));
            b.vectors.push_back(mode(true, false)), b.labels.push_back(tag("alpha", "theta"));
            if (l == 1 && centre_) b.vectors.push_back(centre_vector(true)), b.labels.push_back("dx~");
        }
        return b;
    }

    SliceHessian block_hessian() const {
        const SliceBasis basis = slice_basis();
        SliceHessian out;
        out.projected = project(basis, hessian_);
        out.members = block_members(basis);
        for (std::size_t b = 0; b < out.members.size(); ++b) {
            const auto& idx = out.members[b];
            Matrix m(idx.size(), idx.size());
            for (std::size_t i = 0; i < idx.size(); ++i)
                for (std::size_t j = 0; j < idx.size(); ++j) m(i, j) = out.projected(idx[i], idx[j]);
            out.blocks.push_back({block_label(basis, idx), m});
        }
        out.off_block = off_block_ratio(out.projected, out.members);
        if (out.off_block > 1e-7) {
            std::ostringstream os;
            os << "slice basis fails to block-diagonalize the Hessian (relative coupling " << out.off_block << ")";
            throw SymmetryBasisError(os.str());
        }
        return out;
    }

    std::vector<LabeledMatrix> block_linearization() const {
        const SliceBasis basis = slice_basis();
        const Matrix p = project(basis, hessian_);
        const Matrix w = project(basis, symplectic_matrix());
        std::vector<LabeledMatrix> out;
        const auto groups = mode_groups(basis);
        if (off_block_ratio(w, groups) > 1e-12) throw SymmetryBasisError("symplectic form couples distinct Fourier modes");
        for (const auto& idx : groups) {
            Matrix ws(idx.size(), idx.size()), ps(idx.size(), idx.size());
            for (std::size_t i = 0; i < idx.size(); ++i)
                for (std::size_t j = 0; j < idx.size(); ++j) {
                    ws(i, j) = w(idx[i], idx[j]);
                    ps(i, j) = p(idx[i], idx[j]);
                }
            out.push_back({basis.labels[idx.front()].substr(0, basis.labels[idx.front()].find('.')), inverse(ws) * ps});
        }
        return out;
    }

private:
    // Unit displacement of the central/polar vortex, with the sign convention
    // that makes its coupling to the ring modes positive.
    std::vector<double> centre_vector(bool x_dir) const {
        std::vector<double> v(q_.size(), 0.0);
        const double e = config_.epsilon;
        if (x_dir) {
            v[2 * n_] = -std::cos(e);
            v[2 * n_ + 1] = -std::sin(e);
        } else {
            v[2 * n_] = -std::sin(e);
            v[2 * n_ + 1] = std::cos(e);
        }
        return v;
    }

    static Matrix project(const SliceBasis& b, const Matrix& m) {
        const std::size_t k = b.vectors.size();
        Matrix out(k, k);
        std::vector<std::vector<double>> mv(k);
        for (std::size_t j = 0; j < k; ++j) mv[j] = m.apply(b.vectors[j]);
        for (std::size_t i = 0; i < k; ++i)
            for (std::size_t j = 0; j < k; ++j) {
                double s = 0.0;
                for (std::size_t r = 0; r < b.vectors[i].size(); ++r) s += b.vectors[i][r] * mv[j][r];
                out(i, j) = s;
            }
        return out;
    }

    static int mode_of(const std::string& label) {
        if (label == "dx~" || label == "dy~") return 1;
        return std::stoi(label.substr(1, label.find('.') - 1));
    }

    // "a" collects (alpha, phi), (beta, theta), dy~; "b" the complementary modes.
    static bool in_a(const std::string& label) {
        return label == "dy~" || label.find("alpha.phi") != std::string::npos ||
               label.find("beta.theta") != std::string::npos;
    }

    static std::vector<std::vector<std::size_t>> block_members(const SliceBasis& b) {
        std::vector<std::vector<std::size_t>> out;
        int last = 0;
        for (std::size_t i = 0; i < b.labels.size(); ++i) {
            const int l = mode_of(b.labels[i]);
            if (l != last) {
                out.emplace_back();
                out.emplace_back();
                last = l;
            }
            out[out.size() - (in_a(b.labels[i]) ? 2 : 1)].push_back(i);
        }
        out.erase(std::remove_if(out.begin(), out.end(), [](const auto& v) { return v.empty(); }), out.end());
        return out;
    }

    static std::vector<std::vector<std::size_t>> mode_groups(const SliceBasis& b) {
        std::vector<std::vector<std::size_t>> out;
        int last = 0;
        for (std::size_t i = 0; i < b.labels.size(); ++i) {
            const int l = mode_of(b.labels[i]);
            if (l != last) out.emplace_back(), last = l;
            out.back().push_back(i);
        }
        return out;
    }

    static std::string block_label(const SliceBasis& b, const std::vector<std::size_t>& idx) {
        const std::string& first = b.labels[idx.front()];
        return "l" + std::to_string(mode_of(first)) + (in_a(first) ? ":a" : ":b");
    }

    static double off_block_ratio(const Matrix& m, const std::vector<std::vector<std::size_t>>& groups) {
        std::vector<std::size_t> owner(m.rows(), 0);
        for (std::size_t g = 0; g < groups.size(); ++g)
            for (auto i : groups[g]) owner[i] = g;
        double worst = 0.0;
        for (std::size_t i = 0; i < m.rows(); ++i)
            for (std::size_t j = 0; j < m.cols(); ++j)
                if (owner[i] != owner[j]) worst = std::max(worst, std::abs(m(i, j)));
        const double scale = m.frobenius_norm();
        return scale > 0.0 ? worst / scale : worst;
    }

    std::vector<Vec3> positions(const std::vector<double>& q) const {
        std::vector<Vec3> x(system_.size());
        for (std::size_t s = 0; s < n_; ++s) {
            const double r = q[2 * s], a = q[2 * s + 1];
            if (sphere_) {
                const double sn = std::sqrt(std::max(0.0, 1.0 - r * r));
                x[s] = {sn * std::cos(a), sn * std::sin(a), r};
            } else {
                x[s] = {r * std::cos(a), r * std::sin(a), 0.0};
            }
        }
        if (centre_) {
            const double u = q[2 * n_], v = q[2 * n_ + 1];
            x[n_] = sphere_ ? Vec3{u, v, std::sqrt(std::max(0.0, 1.0 - u * u - v * v))} : Vec3{u, v, 0.0};
        }
        return x;
    }

    // Chart gradients of H and G.
    std::pair<std::vector<double>, std::vector<double>> gradients(const std::vector<double>& q) const {
        const auto x = positions(q);
        const auto gh = detail::energy_gradient(system_.model(), x, system_.strengths());
        const auto gj = detail::rotation_generator_gradient(system_.model(), x, system_.strengths());
        std::vector<double> oh(q.size()), oj(q.size());
        for (std::size_t s = 0; s < n_; ++s) {
            const double r = q[2 * s], a = q[2 * s + 1];
            Vec3 dr, da;
            if (sphere_) {
                const double sn = std::sqrt(std::max(0.0, 1.0 - r * r));
                dr = {-r / sn * std::cos(a), -r / sn * std::sin(a), 1.0};
                da = {-sn * std::sin(a), sn * std::cos(a), 0.0};
            } else {
                dr = {std::cos(a), std::sin(a), 0.0};
                da = {-r * std::sin(a), r * std::cos(a), 0.0};
            }
            oh[2 * s] = dot(dr, gh[s]), oh[2 * s + 1] = dot(da, gh[s]);
            oj[2 * s] = dot(dr, gj[s]), oj[2 * s + 1] = dot(da, gj[s]);
        }
        if (centre_) {
            const std::size_t c = n_;
            const Vec3& p = x[c];
            Vec3 du{1.0, 0.0, 0.0}, dv{0.0, 1.0, 0.0};
            if (sphere_) du.z = -p.x / p.z, dv.z = -p.y / p.z;
            oh[2 * c] = dot(du, gh[c]), oh[2 * c + 1] = dot(dv, gh[c]);
            oj[2 * c] = dot(du, gj[c]), oj[2 * c + 1] = dot(dv, gj[c]);
        }
        return {oh, oj};
    }

    RingConfig config_;
    VortexSystem system_;
    bool sphere_ = false;
    bool centre_ = false;
    std::size_t n_ = 0;
    std::vector<double> phases_;
    std::vector<double> q_;
    double xi_ = 0.0;
    double residual_ = 0.0;
    Matrix hessian_;
};

// ------------------------------------------------------------ classifier

inline StabilityVerdict classify(const SliceHessian& hessian, const std::vector<LabeledMatrix>& linearization,
                                 double tol_rel = 1e-8) {
    StabilityVerdict v;
    v.tolerance_used = tol_rel;

    bool degenerate = false;
    double mu_min = std::numeric_limits<double>::infinity();
    double mu_max = -std::numeric_limits<double>::infinity();
    for (const auto& b : hessian.blocks) {
        const auto sp = sym_eig(b.matrix);
        const std::size_t m = b.matrix.rows();
        for (std::size_t k = 0; k < m; ++k) {
            const double mu = sp.eigenvalues[k];
            // Entry errors are relative to each entry, so measure the noise an eigenvalue can
            // carry along its own eigenvector. Near a pole the height and angle directions
            // differ in scale by orders of magnitude and a block-wide norm would swamp the
            // angular eigenvalues.
            double along = 0.0;
            for (std::size_t i = 0; i < m; ++i)
                for (std::size_t j = 0; j < m; ++j)
                    along += std::abs(b.matrix(i, j) * sp.eigenvectors(i, k) * sp.eigenvectors(j, k));
            v.hessian_eigs.push_back(mu);
            if (std::abs(mu) < tol_rel * std::max(1.0, along)) degenerate = true;
            mu_min = std::min(mu_min, mu);
            mu_max = std::max(mu_max, mu);
        }
    }
    std::sort(v.hessian_eigs.begin(), v.hessian_eigs.end());
    const bool definite = !degenerate && (mu_min > 0.0 || mu_max < 0.0);

    // Two real-part thresholds: a tight one trusted when the Hessian is
    // non-degenerate, and one at the square-root level that survives the
    // splitting of a zero eigenvalue by finite-difference noise.
    bool unstable_tight = false, unstable_robust = false, semisimple = true, on_axis = true;
    for (const auto& b : linearization) {
        const auto sp = gen_eig(b.matrix);
        double scale = 1.0;
        for (auto ev : sp.eigenvalues) scale = std::max(scale, std::abs(ev));
        for (auto ev : sp.eigenvalues) {
            v.linearization_eigs.push_back(ev);
            if (ev.real() > 1e-7 * scale) unstable_tight = true;
            if (ev.real() > std::sqrt(tol_rel) * scale) unstable_robust = true;
            if (std::abs(ev.real()) > 1e-7 * scale) on_axis = false;
        }
        semisimple = semisimple && sp.semisimple;
    }

    if (definite) {
        v.kind = Verdict::LyapunovStable;
    } else if (unstable_robust || (unstable_tight && !degenerate)) {
        v.kind = Verdict::LinearlyUnstable;
    } else if (degenerate) {
        v.kind = Verdict::Degenerate;
        v.notes.push_back("Hessian has a zero eigenvalue on the slice; higher-order terms decide");
    } else if (on_axis && semisimple) {
        v.kind = Verdict::Elliptic;
    } else {
        v.kind = Verdict::Degenerate;
        v.notes.push_back("linearization has a non-semisimple imaginary eigenvalue");
    }
    return v;
}

inline StabilityVerdict analyze(const RingConfig& config, double tol_rel = 1e-8) {
    const RingEquilibrium re(config);
    auto v = classify(re.block_hessian(), re.block_linearization(), tol_rel);
    v.xi = re.xi();
    if (v.kind == Verdict::Degenerate && config.family == RingFamily::CNR && config.n == 7 &&
        !config.model.on_sphere() && config.model.log_kernel())
        v.notes.push_back("heptagon: the quadratic test is inconclusive and a fourth-order analysis is required");
    return v;
}

// Positive iff the slice Hessian is definite (of either sign).
inline double definiteness_margin(const StabilityVerdict& v) {
    if (v.hessian_eigs.empty()) return 0.0;
    return std::max(v.hessian_eigs.front(), -v.hessian_eigs.back());
}

inline double max_real_part(const StabilityVerdict& v) {
    double m = -std::numeric_limits<double>::infinity();
    for (auto e : v.linearization_eigs) m = std::max(m, e.real());
    return m;
}

// ---------------------------------------------------------- closed forms

namespace ring_formulas {

// Angular velocity of a planar ring of N unit vortices around a central vortex l.
inline double xi_planar(int n, double l, double radius = 1.0) { return (n - 1 + 2.0 * l) / (4.0 * radius * radius); }

// Slice Hessian entries in the conventional scale, which is 2N times the
// value in an orthonormal Fourier basis with the normalized Hamiltonian (R = 1).
inline double lambda_phi(int n, int l) { return n * l * (n - l) / 2.0; }
inline double lambda_theta(int n, int l, double lam) {
    return n / 2.0 * (-(l - 1.0) * (n - l - 1.0) + n - 1.0 + 4.0 * lam);
}
inline double coupling(int n, double lam) { return n * lam * std::sqrt(n / 2.0); }

inline Matrix block_a(int n, double lam) {
    const double a = coupling(n, lam);
    return Matrix::from_rows({{lambda_phi(n, 1), 0.0, a},
                              {0.0, lambda_theta(n, 1, lam), a},
                              {a, a, 2.0 * n * xi_planar(n, lam) * lam}});
}

inline double det_a(int n, double lam) {
    return -std::pow(n, 3) * lam * (lam + (n - 1) / 2.0) * (lam - (n - 1.0) * (n - 1.0) / 4.0);
}

// Eigenvalues of the linearization on the slice for C_N(R = 1, p), model time units.
inline std::vector<std::complex<double>> linearization_spectrum(int n, double lam) {
    using C = std::complex<double>;
    std::vector<C> out;
    const double xi = xi_planar(n, lam);
    out.push_back(C(0, xi));
    out.push_back(C(0, -xi));
    const C r = 0.5 * std::sqrt(C(lam - (n - 1.0) * (n - 1.0) / 4.0, 0.0));
    for (int k = 0; k < 2; ++k) out.push_back(r), out.push_back(-r);
    for (int l = 2; 2 * l <= n; ++l) {
        const C e = std::sqrt(C(-lambda_theta(n, l, lam) * lambda_phi(n, l), 0.0)) / (2.0 * n);
        const int mult = (2 * l == n) ? 1 : 2;
        for (int k = 0; k < mult; ++k) out.push_back(e), out.push_back(-e);
    }
    return out;
}

}  // namespace ring_formulas

inline double trig_sum(int n, int l) {
    if (n < 2 || l < 1 || l > n - 1) throw std::invalid_argument("trig_sum needs 1 <= l <= n - 1");
    double s = 0.0;
    for (int j = 1; j < n; ++j) {
        const double sj = std::sin(pi * j / n);
        s += std::cos(two_pi * l * j / n) / (sj * sj);
    }
    return s;
}

namespace detail {

inline StabilityVerdict verdict_only(Verdict k, std::string note = {}) {
    StabilityVerdict v;
    v.kind = k;
    if (!note.empty()) v.notes.push_back(std::move(note));
    return v;
}

// Classifies x against an open interval (lo, hi); equality is degenerate.
inline int side(double x, double lo, double hi) {
    if (x == lo || x == hi) return 0;
    return (x > lo && x < hi) ? 1 : -1;
}

}  // namespace detail

// Planar ring of N unit vortices, optionally around a central vortex of strength lambda.
inline StabilityVerdict closed_form_planar(int n, std::optional<double> lambda = std::nullopt) {
    using detail::verdict_only;
    if (n < 3) throw std::invalid_argument("closed_form_planar needs N >= 3");
    if (!lambda) {
        if (n < 7) return verdict_only(Verdict::LyapunovStable);
        if (n == 7)
            return verdict_only(Verdict::LyapunovStable,
                                "heptagon: stability needs a fourth-order argument; the numeric quadratic test is degenerate");
        return verdict_only(Verdict::LinearlyUnstable);
    }
    const double l = *lambda;
    // In the elliptic range two different branches of the spectrum can meet on the imaginary
    // axis (N = 3, lambda = -3 puts the rotation pair on top of the first-mode pair). There the
    // linearization may carry a Jordan block, which the interval bounds alone cannot rule out.
    auto elliptic = [&] {
        std::vector<double> freq{std::abs(ring_formulas::xi_planar(n, l)), 0.5 * std::sqrt((n - 1.0) * (n - 1.0) / 4.0 - l)};
        for (int m = 2; 2 * m <= n; ++m)
            freq.push_back(std::sqrt(ring_formulas::lambda_theta(n, m, l) * ring_formulas::lambda_phi(n, m)) / (2.0 * n));
        for (std::size_t i = 0; i < freq.size(); ++i)
            for (std::size_t j = i + 1; j < freq.size(); ++j)
                if (std::abs(freq[i] - freq[j]) <= 1e-12 * std::max(freq[i], freq[j]))
                    return verdict_only(Verdict::Degenerate,
                                        "eigenvalue collision: semisimplicity is not settled by the closed form");
        return verdict_only(Verdict::Elliptic);
    };
    if (n == 3) {
        if (l == 0.0 || l == 1.0 || l == -1.0) return verdict_only(Verdict::Degenerate, "boundary of the stability interval");
        if (l > 0.0 && l < 1.0) return verdict_only(Verdict::LyapunovStable);
        if (l < 0.0) return elliptic();
        return verdict_only(Verdict::LinearlyUnstable);
    }
    const double eps = (n % 2 == 0) ? 1.0 : 0.0;
    const double lower = (n * n - 8.0 * n + 7.0 + eps) / 16.0;
    const double upper = (n - 1.0) * (n - 1.0) / 4.0;
    if (l == lower || l == upper || l == 0.0) return verdict_only(Verdict::Degenerate, "boundary of the stability interval");
    if (l > std::max(0.0, lower) && l < upper) return verdict_only(Verdict::LyapunovStable);
    if (l > lower && l < 0.0) return elliptic();
    return verdict_only(Verdict::LinearlyUnstable);
}

// Ring of N unit vortices at colatitude theta0 on the non-rotating sphere.
inline StabilityVerdict closed_form_sphere_ring(int n, double theta0) {
    using detail::verdict_only;
    if (n < 2) throw std::invalid_argument("closed_form_sphere_ring needs N >= 2");
    if (!(theta0 > 0.0 && theta0 < pi)) throw std::invalid_argument("ring colatitude must lie in (0, pi)");
    if (n <= 3) return verdict_only(Verdict::LyapunovStable);
    if (n > 6) return verdict_only(Verdict::LinearlyUnstable);
    const double threshold = n == 4 ? 1.0 / 3.0 : n == 5 ? 0.5 : 0.8;
    const double c2 = std::cos(theta0) * std::cos(theta0);
    if (c2 == threshold) return verdict_only(Verdict::Degenerate, "on the stability threshold");
    return verdict_only(c2 > threshold ? Verdict::LyapunovStable : Verdict::LinearlyUnstable);
}

// Ring of N unit vortices at colatitude theta0 with a vortex of strength
// lambda at the north pole (non-rotating sphere).
inline StabilityVerdict closed_form_sphere_ring_polar(int n, double theta0, double lambda) {
    using detail::verdict_only;
    if (n < 2) throw std::invalid_argument("closed_form_sphere_ring_polar needs N >= 2");
    if (!(theta0 > 0.0 && theta0 < pi)) throw std::invalid_argument("ring colatitude must lie in (0, pi)");
    const double c = std::cos(theta0), s = std::sin(theta0);
    if (std::abs(n * c + lambda) < 1e-14) throw std::invalid_argument("relative equilibrium has zero momentum");
    const std::string gap = "theorem-gap: neither stability nor spectral instability is established";

    if (n == 2) {
        const double q = (1.0 + 2.0 * c) * ((1.0 + c) * (1.0 + c) * lambda + c * (2.0 + 3.0 * c));
        if (q < 0.0) return verdict_only(Verdict::LyapunovStable);
        if (q > 0.0) return verdict_only(Verdict::LinearlyUnstable);
        return verdict_only(Verdict::Degenerate, "on the stability threshold");
    }
    const double a = (n * c - n + 2.0) * (1.0 + c) * (1.0 + c);
    const double lambda1 = (n - 1.0) * c * (n * s * s + 2.0 * (n - 1.0) * c) / a;
    const double bound = n * s * s + 4.0 * (n - 1.0) * c;
    const double stab = a * lambda * (lambda + n * c) * (lambda - lambda1);
    const bool big = 8.0 * a * lambda > bound * bound;
    if (n == 3) {
        if (stab < 0.0) return verdict_only(Verdict::LyapunovStable);
        if (big) return verdict_only(Verdict::LinearlyUnstable);
        return verdict_only(Verdict::Degenerate, gap);
    }
    const double cn = (n % 2 == 0) ? n * n / 4.0 : (n * n - 1.0) / 4.0;
    const double lambda0 = (cn - (n - 1.0) * (1.0 + c * c)) / ((1.0 + c) * (1.0 + c));
    if (lambda < lambda0 || big) return verdict_only(Verdict::LinearlyUnstable);
    if (lambda > lambda0 && stab < 0.0) return verdict_only(Verdict::LyapunovStable);
    return verdict_only(Verdict::Degenerate, gap);
}

// --------------------------------------------------- parametrized families

enum class StabilityFamily { PlanarRing, PlanarRingCenter, GeostrophicRing, GeostrophicRingCenter, SphereRing, SphereRingPole };

inline std::string stability_family_name(StabilityFamily f) {
    switch (f) {
        case StabilityFamily::PlanarRing: return "planar-ring";
        case StabilityFamily::PlanarRingCenter: return "planar-ring-center";
        case StabilityFamily::GeostrophicRing: return "geostrophic-ring";
        case StabilityFamily::GeostrophicRingCenter: return "geostrophic-ring-center";
        case StabilityFamily::SphereRing: return "sphere-ring";
        case StabilityFamily::SphereRingPole: return "sphere-ring-pole";
    }
    return "?";
}

inline StabilityFamily parse_stability_family(std::string_view s) {
    for (auto f : {StabilityFamily::PlanarRing, StabilityFamily::PlanarRingCenter, StabilityFamily::GeostrophicRing,
                   StabilityFamily::GeostrophicRingCenter, StabilityFamily::SphereRing, StabilityFamily::SphereRingPole})
        if (s == stability_family_name(f)) return f;
    throw std::invalid_argument("unknown stability family '" + std::string(s) + "'");
}

inline bool family_has_lambda(StabilityFamily f) {
    return f == StabilityFamily::PlanarRingCenter || f == StabilityFamily::GeostrophicRingCenter ||
           f == StabilityFamily::SphereRingPole;
}

// Parameters of one member of a family. Unused fields are ignored.
struct FamilyPoint {
    int n = 3;
    double kappa = 0.0;
    double lambda = 1.0;
    double omega = 0.0;
    double radius = 1.0;
    double theta0 = pi / 4;
};

inline RingConfig make_ring_config(StabilityFamily f, const FamilyPoint& p) {
    RingConfig c;
    c.n = p.n;
    switch (f) {
        case StabilityFamily::PlanarRing:
        case StabilityFamily::PlanarRingCenter:
            c.family = f == StabilityFamily::PlanarRing ? RingFamily::CNR : RingFamily::CNRp;
            c.size = p.radius;
            c.model = p.omega == 0.0 ? ModelParams::planar() : ModelParams::rotating_plane(p.omega);
            break;
        case StabilityFamily::GeostrophicRing:
        case StabilityFamily::GeostrophicRingCenter:
            c.family = f == StabilityFamily::GeostrophicRing ? RingFamily::CNR : RingFamily::CNRp;
            c.size = p.radius;
            c.model = ModelParams::geostrophic(p.kappa);
            break;
        case StabilityFamily::SphereRing:
        case StabilityFamily::SphereRingPole:
            c.family = f == StabilityFamily::SphereRing ? RingFamily::CNvR : RingFamily::CNvRp;
            c.size = p.theta0;
            c.model = sphere_model(p.omega);
            break;
    }
    if (family_has_lambda(f)) c.lambda = p.lambda;
    return c;
}

inline StabilityVerdict evaluate(StabilityFamily f, const FamilyPoint& p, double tol_rel = 1e-8) {
    return analyze(make_ring_config(f, p), tol_rel);
}

}  // namespace vortexlab
