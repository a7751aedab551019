// Acceptance checks, one per criterion. Prints a PASS/FAIL line for each and
// exits non-zero if any selected criterion fails.
//
//   acceptance                 run all ten
//   acceptance --criterion N   run only criterion N

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "vortexlab/vortexlab.hpp"

using namespace vortexlab;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

std::string str(double v, int digits = 6) {
    std::ostringstream os;
    os.precision(digits);
    os << v;
    return os.str();
}

// 1. Geostrophic ring frontiers and the kappa-grid verdicts.
Outcome geostrophic_frontiers() {
    Outcome o{true, ""};
    FamilyPoint p;
    p.n = 6;
    const auto f6 = find_frontier(StabilityFamily::GeostrophicRing, p, ScanParameter::Kappa, 1.0, 1.6, 1e-5);
    p.n = 5;
    const auto f5 = find_frontier(StabilityFamily::GeostrophicRing, p, ScanParameter::Kappa, 3.5, 4.0, 1e-5);
    const bool ok6 = std::abs(f6.threshold - 1.28) <= 0.02 && f6.verdict_lo == 'S' && f6.verdict_hi == 'U';
    const bool ok5 = std::abs(f5.threshold - 3.75) <= 0.02 && f5.verdict_lo == 'S' && f5.verdict_hi == 'E';
    o.pass = ok6 && ok5;
    o.detail = "N=6 kappa*=" + str(f6.threshold) + " (" + f6.verdict_lo + "->" + f6.verdict_hi + "), N=5 kappa*=" +
               str(f5.threshold) + " (" + f5.verdict_lo + "->" + f5.verdict_hi + ")";

    const auto grid = Range::parse("0:5:0.05");
    std::string bad;
    for (int n : {3, 4, 7, 8, 9, 10}) {
        const auto cells = sweep_plane(StabilityFamily::GeostrophicRing, n, grid, Range::single(1.0));
        for (const auto& c : cells) {
            char want = n <= 4 ? 'S' : 'U';
            // The planar heptagon itself is the fourth-order case: D at kappa = 0.
            if (n == 7 && c.kappa == 0.0) want = 'D';
            if (c.verdict != want) bad += " N=" + std::to_string(n) + "@" + str(c.kappa, 3) + ":" + c.verdict;
        }
    }
    if (!bad.empty()) {
        o.pass = false;
        o.detail += "; grid mismatches:" + bad.substr(0, 200);
    } else {
        o.detail += "; grid N=3,4 all S, N=7..10 all U (N=7 D at kappa=0)";
    }
    return o;
}

// 2. Numeric classifier against the closed-form planar verdicts.
Outcome closed_form_equivalence() {
    int total = 0, disagreements = 0;
    std::string first;
    for (int n = 3; n <= 12; ++n) {
        std::vector<double> bounds{0.0, (n - 1.0) * (n - 1.0) / 4.0};
        if (n == 3)
            bounds.push_back(-1.0);
        else
            bounds.push_back((n * n - 8.0 * n + 7.0 + (n % 2 == 0 ? 1.0 : 0.0)) / 16.0);
        const double lo = std::min(-3.0, bounds[2] - 2.0), hi = bounds[1] + 3.0;
        int taken = 0;
        for (int k = 0; taken < 50; ++k) {
            // Irrational spacing avoids landing exactly on a boundary.
            const double lam = lo + (hi - lo) * std::fmod(0.5 + k * 0.6180339887498949, 1.0);
            bool near_boundary = false;
            for (double b : bounds) near_boundary = near_boundary || std::abs(lam - b) < 1e-4;
            if (near_boundary) continue;
            ++taken;
            ++total;
            const char want = closed_form_planar(n, lam).code();
            FamilyPoint p;
            p.n = n;
            p.lambda = lam;
            const char got = evaluate(StabilityFamily::PlanarRingCenter, p).code();
            if (got != want) {
                ++disagreements;
                if (first.empty()) first = " first: N=" + std::to_string(n) + " lambda=" + str(lam) + " closed=" + want + " numeric=" + got;
            }
        }
    }
    return {disagreements == 0, std::to_string(total) + " samples, " + std::to_string(disagreements) + " disagreements" + first};
}

// 3. Analytic slice-Hessian entries, det A and the linearization spectrum.
Outcome ring_spectra() {
    double worst = 0.0;
    std::string where;
    auto track = [&](double got, double want, double scale, const std::string& what) {
        const double e = std::abs(got - want) / std::max(scale, 1e-300);
        if (e > worst) worst = e, where = what;
    };
    // Quarter-integer strengths make some lambda_theta vanish, and the resulting zero mode is a
    // Jordan block whose eigenvalues no double-precision solver resolves beyond sqrt(eps).
    // The samples stay off that lattice.
    for (int n = 3; n <= 12; ++n)
        for (double lam : {-0.6, 0.45, 1.7}) {
            const RingEquilibrium re(make_ring_config(StabilityFamily::PlanarRingCenter, {n, 0.0, lam}));
            const auto h = re.block_hessian();
            const double s = 2.0 * n;
            const std::string tag = "N=" + std::to_string(n) + " lambda=" + str(lam);
            for (const auto& b : h.blocks) {
                const int l = std::stoi(b.label.substr(1, b.label.find(':') - 1));
                const bool a_block = b.label.back() == 'a';
                if (l == 1) {
                    const Matrix want = ring_formulas::block_a(n, lam);
                    for (std::size_t i = 0; i < 3; ++i)
                        for (std::size_t j = 0; j < 3; ++j)
                            track(s * b.matrix(i, j), want(i, j), want.max_abs(), tag + " A");
                    const Matrix& m = b.matrix;
                    const double det = s * s * s *
                                       (m(0, 0) * (m(1, 1) * m(2, 2) - m(1, 2) * m(2, 1)) -
                                        m(0, 1) * (m(1, 0) * m(2, 2) - m(1, 2) * m(2, 0)) +
                                        m(0, 2) * (m(1, 0) * m(2, 1) - m(1, 1) * m(2, 0)));
                    track(det, ring_formulas::det_a(n, lam), std::abs(ring_formulas::det_a(n, lam)), tag + " detA");
                } else {
                    const double phi = ring_formulas::lambda_phi(n, l), theta = ring_formulas::lambda_theta(n, l, lam);
                    const double sc = std::max(std::abs(phi), std::abs(theta));
                    if (2 * l == n) {
                        track(s * b.matrix(0, 0), a_block ? phi : theta, sc, tag + " l=N/2");
                    } else {
                        track(s * b.matrix(0, 0), phi, sc, tag + " lphi" + std::to_string(l));
                        track(s * b.matrix(1, 1), theta, sc, tag + " ltheta" + std::to_string(l));
                        track(s * b.matrix(0, 1), 0.0, sc, tag + " offdiag");
                    }
                }
            }
            // Linearization eigenvalues, matched one to one.
            auto got = classify(h, re.block_linearization()).linearization_eigs;
            const auto want = ring_formulas::linearization_spectrum(n, lam);
            if (got.size() != want.size()) return {false, tag + ": spectrum size mismatch"};
            double scale = 0.0;
            for (auto w : want) scale = std::max(scale, std::abs(w));
            for (auto w : want) {
                auto best = got.begin();
                for (auto it = got.begin(); it != got.end(); ++it)
                    if (std::abs(*it - w) < std::abs(*best - w)) best = it;
                track(std::abs(*best - w), 0.0, scale, tag + " eig");
                got.erase(best);
            }
        }
    return {worst < 1e-7, "max relative error " + str(worst, 3) + (worst >= 1e-7 ? " at " + where : "")};
}

// 4. Sphere ring thresholds in theta0.
Outcome sphere_thresholds() {
    Outcome o{true, ""};
    const double targets[] = {1.0 / 3.0, 0.5, 0.8};
    for (int n = 4; n <= 6; ++n) {
        FamilyPoint p;
        p.n = n;
        const double guess = std::acos(std::sqrt(targets[n - 4]));
        const auto f = find_frontier(StabilityFamily::SphereRing, p, ScanParameter::Theta0, guess - 0.2, guess + 0.2, 1e-10);
        const double c2 = std::cos(f.threshold) * std::cos(f.threshold);
        const bool ok = std::abs(c2 - targets[n - 4]) < 1e-6;
        o.pass = o.pass && ok;
        o.detail += "N=" + std::to_string(n) + " cos^2=" + str(c2, 10) + " ";
    }
    std::string bad;
    for (int n = 7; n <= 10; ++n)
        for (int k = 1; k <= 30; ++k) {
            const double theta0 = 0.1 * k;
            if (std::abs(theta0 - pi / 2) < 1e-3) continue;
            FamilyPoint p;
            p.n = n;
            p.theta0 = theta0;
            const char v = evaluate(StabilityFamily::SphereRing, p).code();
            if (v != 'U') bad += " N=" + std::to_string(n) + "@" + str(theta0, 2) + ":" + v;
        }
    if (!bad.empty()) o.pass = false;
    o.detail += bad.empty() ? "; N=7..10 U at all 30 sampled theta0" : "; not U:" + bad.substr(0, 200);
    return o;
}

// 5. Persistence of the ring families on the rotating sphere.
Outcome persistence() {
    Outcome o{true, ""};
    double worst_shift = 0.0, worst_shape = 0.0;
    for (double omega : {0.1, 0.3})
        for (const auto& c : persistence_instances()) {
            const auto r = verify_persistence(c, omega, 50.0, 0.05);
            const double shape = std::max(r.still.shape_residual, r.rotating.shape_residual);
            const double shift = std::abs(r.delta_xi - omega);
            worst_shift = std::max(worst_shift, shift);
            worst_shape = std::max(worst_shape, shape);
            if (!(shape < 1e-7 && shift < 1e-6 && r.passed)) {
                o.pass = false;
                o.detail += "[" + r.message + "] ";
            }
        }
    o.detail += "5 families x 2 omegas, max |dxi - omega| " + str(worst_shift, 3) + ", max shape residual " +
                str(worst_shape, 3);
    return o;
}

// 6. Longitude sum of a ring vanishing identically.
Outcome appendix_a() {
    const auto r = verify_appendix_a(20261016, 100);
    return {r.passed, r.summary + " (tolerance 1e-12)"};
}

// 7. Trigonometric sum identity, evaluated independently here.
Outcome trig_identity() {
    double worst = 0.0;
    for (int n = 2; n <= 50; ++n)
        for (int l = 1; l < n; ++l) {
            long double s = 0.0L;
            for (int j = 1; j < n; ++j) {
                const long double sj = std::sin(static_cast<long double>(pi) * j / n);
                s += std::cos(2.0L * static_cast<long double>(pi) * l * j / n) / (sj * sj);
            }
            const double closed = (n * n - 1.0) / 3.0 - 2.0 * l * (n - l);
            worst = std::max({worst, std::abs(static_cast<double>(s) - closed), std::abs(trig_sum(n, l) - closed)});
        }
    return {worst < 1e-10, "max |sum - closed form| " + str(worst, 3) + " over N <= 50"};
}

// 8. Energy and momentum conservation.
Outcome conservation() {
    const auto r = verify_conservation(42, 3, 100.0);
    return {r.passed, r.summary + " (3 systems per model, 4 models)"};
}

// 9. Rotating plane: verdicts and augmented Hessians independent of Omega.
Outcome rotating_plane() {
    double worst = 0.0;
    int mismatches = 0;
    for (int n = 3; n <= 8; ++n)
        for (double lam : {-0.5, 0.5, 2.0}) {
            FamilyPoint p;
            p.n = n;
            p.lambda = lam;
            p.omega = 0.0;
            const RingEquilibrium base(make_ring_config(StabilityFamily::PlanarRingCenter, p));
            const char v0 = analyze(base.config()).code();
            for (double omega : {-1.0, 0.5, 2.0}) {
                p.omega = omega;
                const auto cfg = make_ring_config(StabilityFamily::PlanarRingCenter, p);
                const RingEquilibrium re(cfg);
                worst = std::max(worst, (re.hessian() - base.hessian()).max_abs());
                if (analyze(cfg).code() != v0) ++mismatches;
            }
        }
    return {worst < 1e-9 && mismatches == 0,
            "max |d2H_xi difference| " + str(worst, 3) + ", verdict mismatches " + std::to_string(mismatches)};
}

// 10. K0, K1 against the integral representation, and K0' = -K1.
Outcome special_functions() {
    auto integral = [](double x, int nu) {
        const double h = 0.004, upper = std::acosh(1.0 + 60.0 / x);
        double s = 0.5;
        for (int i = 1; i * h <= upper; ++i) s += std::exp(-x * (std::cosh(i * h) - 1.0)) * std::cosh(nu * i * h);
        return s * h * std::exp(-x);
    };
    double worst = 0.0, worst_d = 0.0;
    for (int i = 0; i < 200; ++i) {
        const double x = 1e-6 * std::pow(30.0 / 1e-6, i / 199.0);
        worst = std::max({worst, std::abs(bessel_k0(x) / integral(x, 0) - 1.0), std::abs(bessel_k1(x) / integral(x, 1) - 1.0)});
        const double h = 2e-3 * std::min(x, 1.0);
        const double d = (-bessel_k0(x + 2 * h) + 8 * bessel_k0(x + h) - 8 * bessel_k0(x - h) + bessel_k0(x - 2 * h)) / (12 * h);
        worst_d = std::max(worst_d, std::abs(d + bessel_k1(x)) / bessel_k1(x));
    }
    return {worst < 1e-9 && worst_d < 1e-6,
            "max relative error " + str(worst, 3) + ", derivative identity residual " + str(worst_d, 3)};
}

struct Criterion {
    const char* title;
    double budget_seconds;
    std::function<Outcome()> run;
};

}  // namespace

int main(int argc, char** argv) {
    const std::vector<Criterion> all = {
        {"geostrophic ring frontiers", 120, geostrophic_frontiers},
        {"closed-form planar equivalence", 60, closed_form_equivalence},
        {"slice Hessian and spectrum formulas", 30, ring_spectra},
        {"sphere ring thresholds", 60, sphere_thresholds},
        {"persistence on the rotating sphere", 120, persistence},
        {"ring longitude sum identity", 0, appendix_a},
        {"trigonometric sum identity", 0, trig_identity},
        {"conservation of H and J", 0, conservation},
        {"rotating-plane equivalence", 0, rotating_plane},
        {"special functions", 0, special_functions},
    };
    std::vector<int> selected;
    for (int i = 1; i < argc; ++i) {
        if (std::strcmp(argv[i], "--criterion") == 0 && i + 1 < argc) {
            const int c = std::atoi(argv[++i]);
            if (c < 1 || c > static_cast<int>(all.size())) {
                std::fprintf(stderr, "criterion must be 1..%zu\n", all.size());
                return 64;
            }
            selected.push_back(c);
        } else {
            std::fprintf(stderr, "usage: acceptance [--criterion N]\n");
            return 64;
        }
    }
    if (selected.empty())
        for (int c = 1; c <= static_cast<int>(all.size()); ++c) selected.push_back(c);

    bool all_pass = true;
    for (int c : selected) {
        const auto& crit = all[c - 1];
        const auto t0 = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = crit.run();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        if (crit.budget_seconds > 0 && secs > crit.budget_seconds) {
            o.pass = false;
            o.detail += "; over time budget";
        }
        all_pass = all_pass && o.pass;
        std::printf("criterion %d [%s] %s: %s (%.2f s)\n", c, o.pass ? "PASS" : "FAIL", crit.title, o.detail.c_str(), secs);
    }
    return all_pass ? 0 : 1;
}
