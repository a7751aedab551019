#include <gtest/gtest.h>

#include <cmath>

#include "vortexlab/dynamics.hpp"

using namespace vortexlab;

namespace {

// Two unit vortices at distance 1 turn rigidly about their midpoint at rate 1.
Vec3 pair_exact(double t) { return {0.5 * std::cos(t), 0.5 * std::sin(t), 0.0}; }

VortexSystem pair() { return VortexSystem(ModelParams::planar(), {{0.5, 0, 0}, {-0.5, 0, 0}}, {1.0, 1.0}); }

double pair_error(const Trajectory& tr) { return norm(tr.states.back().position(0) - pair_exact(tr.times.back())); }

}  // namespace

TEST(Dynamics, SamplesAtMultiplesOfDt) {
    const auto tr = integrate(pair(), 1.0, 0.1);
    ASSERT_EQ(tr.size(), 11u);
    for (std::size_t k = 0; k < tr.size(); ++k) EXPECT_NEAR(tr.times[k], 0.1 * k, 1e-15);
    EXPECT_EQ(tr.diagnostics.size(), tr.size());
}

TEST(Dynamics, Rk4IsFourthOrder) {
    IntegrateOptions o;
    const double e1 = pair_error(integrate(pair(), 2.0, 0.2, Method::RK4, o));
    const double e2 = pair_error(integrate(pair(), 2.0, 0.1, Method::RK4, o));
    const double e3 = pair_error(integrate(pair(), 2.0, 0.05, Method::RK4, o));
    EXPECT_NEAR(std::log2(e1 / e2), 4.0, 0.3);
    EXPECT_NEAR(std::log2(e2 / e3), 4.0, 0.3);
}

TEST(Dynamics, Rk45MeetsTolerance) {
    const auto tr = integrate(pair(), 20.0, 0.5);
    EXPECT_LT(pair_error(tr), 1e-9);
    IntegrateOptions loose;
    loose.tolerance = 1e-6;
    const auto tl = integrate(pair(), 20.0, 0.5, Method::RK45, loose);
    EXPECT_LT(pair_error(tl), 1e-3);
    EXPECT_GT(pair_error(tl), pair_error(tr));
}

TEST(Dynamics, SquareConservesEnergyOverLongRun) {
    const VortexSystem sq(ModelParams::planar(), {{1, 0, 0}, {0, 1, 0}, {-1, 0, 0}, {0, -1, 0}}, {1, 1, 1, 1});
    const auto tr = integrate(sq, 100.0, 1.0);
    for (const auto& d : tr.diagnostics) EXPECT_NEAR(d.h, tr.diagnostics[0].h, 1e-9);
}

TEST(Dynamics, Rk4StepIsReversible) {
    const std::vector<double> l{1.0, -0.7, 1.3, 0.4};
    const std::vector<std::pair<ModelParams, std::vector<Vec3>>> cases{
        {ModelParams::planar(), {{0.3, 0.1, 0}, {-0.4, 0.2, 0}, {0.1, -0.6, 0}, {0.9, 0.5, 0}}},
        {ModelParams::geostrophic(1.5), {{0.3, 0.1, 0}, {-0.4, 0.2, 0}, {0.1, -0.6, 0}, {0.9, 0.5, 0}}},
        {ModelParams::rotating_sphere(0.3),
         {unit_from_angles(0.5, 0.0), unit_from_angles(1.4, 2.0), unit_from_angles(2.3, 4.0), unit_from_angles(1.0, 5.0)}}};
    for (const auto& [m, y0] : cases) {
        auto y = y0;
        for (int k = 0; k < 20; ++k) {
            const auto back = step_rk4(m, step_rk4(m, y, l, 0.01), l, -0.01);
            double err = 0.0;
            for (std::size_t i = 0; i < y.size(); ++i) err = std::max(err, norm(back[i] - y[i]));
            EXPECT_LT(err, 1e-10) << m.label() << " step " << k;
            y = step_rk4(m, y, l, 0.01);
        }
    }
}

TEST(Dynamics, SphereStatesStayOnSphere) {
    const VortexSystem s(ModelParams::rotating_sphere(0.3),
                         {unit_from_angles(0.5, 0.0), unit_from_angles(1.4, 2.0), unit_from_angles(2.3, 4.0)},
                         {1.0, -0.7, 1.3});
    auto drift = [&](Method m, double dt) {
        const auto tr = integrate(s, 20.0, dt, m);
        for (const auto& st : tr.states)
            for (const auto& p : st.positions()) EXPECT_NEAR(norm(p), 1.0, 1e-15);
        return std::abs(tr.diagnostics.back().h - tr.diagnostics.front().h);
    };
    EXPECT_LT(drift(Method::RK45, 0.1), 1e-9);
    // Fixed-step RK4: the energy error is truncation error and falls at least as fast as dt^4.
    const double coarse = drift(Method::RK4, 0.1), fine = drift(Method::RK4, 0.05);
    EXPECT_LT(coarse, 1e-5);
    EXPECT_GT(coarse / fine, 12.0);
}

TEST(Dynamics, ConservationOnGeostrophicAndRotatingPlane) {
    for (const auto& m : {ModelParams::geostrophic(2.0), ModelParams::rotating_plane(1.5)}) {
        const VortexSystem s(m, {{0.3, 0.1, 0}, {-0.4, 0.2, 0}, {0.1, -0.6, 0}, {0.9, 0.5, 0}}, {1.0, 0.6, 1.2, 0.8});
        const auto tr = integrate(s, 50.0, 1.0);
        for (const auto& d : tr.diagnostics) {
            EXPECT_NEAR(d.h, tr.diagnostics[0].h, 1e-9) << m.label();
            EXPECT_NEAR(d.j_so2, tr.diagnostics[0].j_so2, 1e-9) << m.label();
        }
    }
}

TEST(Dynamics, SelfSimilarCollapseAborts) {
    // Strengths 2, 2, -1 have zero angular impulse when 2 d12^2 = d13^2 + d23^2.
    const double d13 = 1.2, d23 = std::sqrt(2.0 - 1.44);
    const double x3 = (1.0 + d13 * d13 - d23 * d23) / 2.0;
    auto triple = [&](double sign) {
        return VortexSystem(ModelParams::planar(),
                            {{0, 0, 0}, {1, 0, 0}, {x3, sign * std::sqrt(d13 * d13 - x3 * x3), 0}}, {2.0, 2.0, -1.0});
    };

    // While the triangle shrinks self-similarly every squared side falls linearly in time,
    // so a straight line through early samples predicts the collapse instant.
    const auto early = integrate(triple(1.0), 1.0, 0.1);
    std::vector<double> t, d2;
    for (std::size_t k = 0; k < early.size(); ++k) {
        const Vec3 a = early.states[k].position(0), b = early.states[k].position(1);
        t.push_back(early.times[k]);
        d2.push_back(dot(a - b, a - b));
    }
    const double slope = (d2.back() - d2.front()) / (t.back() - t.front());
    for (std::size_t k = 0; k < t.size(); ++k) EXPECT_NEAR(d2[k], d2.front() + slope * t[k], 1e-9);
    ASSERT_LT(slope, 0.0);
    const double t_collapse = -d2.front() / slope;

    try {
        integrate(triple(1.0), 5.0, 0.5);
        ADD_FAILURE() << "collapse was not detected";
    } catch (const CollisionError& e) {
        EXPECT_NEAR(e.time(), t_collapse, 1e-6);
        EXPECT_LT(e.distance(), 1e-6);
        EXPECT_NE(e.first(), e.second());
    }

    // The mirror orientation expands instead.
    const auto out = integrate(triple(-1.0), 50.0, 0.5);
    EXPECT_GT(out.states.back().diameter(), 2.0);
}

TEST(Dynamics, RejectsBadSampling) {
    EXPECT_THROW(integrate(pair(), 1.0, 0.0), std::invalid_argument);
    EXPECT_THROW(integrate(pair(), -1.0, 0.1), std::invalid_argument);
    EXPECT_EQ(parse_method("rk4"), Method::RK4);
    EXPECT_THROW(parse_method("euler"), std::invalid_argument);
}

TEST(Dynamics, RigidRotationOfPlanarRing) {
    const auto s = build_planar_ring(5, 1.0, 0.5);
    const auto fit = fit_rigid_rotation(integrate(s, 20.0, 0.1));
    EXPECT_TRUE(fit.certified);
    EXPECT_NEAR(fit.xi, (4 + 1.0) / 4.0, 1e-9);
    EXPECT_LT(fit.shape_residual, 1e-9);
    EXPECT_THROW(fit_rigid_rotation(integrate(s, 0.5, 0.1)), std::invalid_argument);
}

TEST(Dynamics, NonRigidMotionIsNotCertified) {
    const VortexSystem s(ModelParams::planar(), {{0.5, 0, 0}, {-0.3, 0.2, 0}, {0, -0.7, 0}}, {1.0, 1.0, 1.0});
    EXPECT_FALSE(fit_rigid_rotation(integrate(s, 10.0, 0.1)).certified);
}

TEST(Dynamics, PersistenceShiftsRateByOmega) {
    RingConfig c;
    c.family = RingFamily::CNvR;
    c.n = 4;
    c.size = pi / 6;
    c.model = ModelParams::sphere();
    const auto r = verify_persistence(c, 0.1, 20.0, 0.05);
    EXPECT_TRUE(r.passed) << r.message;
    EXPECT_NEAR(r.delta_xi, 0.1, 1e-6);
    c.family = RingFamily::CNR;
    c.model = ModelParams::planar();
    EXPECT_THROW(verify_persistence(c, 0.1), std::invalid_argument);
}

TEST(Dynamics, RingLongitudeSumDirectEvaluation) {
    // Oracle: the same sum written out term by term.
    const int n = 5;
    const double tk = pi / 3, th = 1.0, ph = 0.7, eps = 0.0;
    const double r = std::sin(th) * std::sin(tk) / (1 - std::cos(th) * std::cos(tk));
    double b = 0.0;
    for (int j = 1; j <= n; ++j) {
        const double d = ph - eps - 2 * pi * j / n;
        b += std::sin(d) / (1 - r * std::cos(d));
    }
    EXPECT_NEAR(appendix_a_sum(n, tk, eps, th, ph), b, 1e-14);
    EXPECT_NEAR(b, -0.889464, 1e-6);
    // On the ring's own colatitude at a vortex longitude the sum is singular.
    EXPECT_THROW(appendix_a_sum(4, 1.0, 0.0, 1.0, 0.0), SingularityError);
    EXPECT_THROW(appendix_a_sum(0, 1.0, 0.0, 1.0, 0.0), std::invalid_argument);
}
