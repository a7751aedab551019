#pragma once
// Parameter-plane scans and frontier location for the ring families.

#include <atomic>
#include <exception>
#include <mutex>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "stability.hpp"

namespace vortexlab {

// Inclusive arithmetic range lo:hi:step.
struct Range {
    double lo = 0.0, hi = 0.0, step = 1.0;

    static Range single(double v) { return {v, v, 1.0}; }

    static Range parse(const std::string& text) {
        Range r;
        char c1 = 0, c2 = 0;
        std::istringstream is(text);
        if (!(is >> r.lo)) throw std::invalid_argument("bad range '" + text + "'");
        if (!(is >> c1)) return single(r.lo);
        if (c1 != ':' || !(is >> r.hi >> c2 >> r.step) || c2 != ':' || !(is >> std::ws).eof())
            throw std::invalid_argument("range must look like lo:hi:step, got '" + text + "'");
        if (!(r.step > 0.0) || r.hi < r.lo) throw std::invalid_argument("range needs step > 0 and hi >= lo");
        return r;
    }

    std::vector<double> values() const {
        std::vector<double> v;
        const auto count = static_cast<long>(std::floor((hi - lo) / step + 1e-9));
        for (long k = 0; k <= count; ++k) v.push_back(lo + k * step);  // no accumulated drift
        return v;
    }
};

struct DiagramCell {
    double kappa;
    double lambda;  // NaN for families without a central vortex
    char verdict;
    std::string diagnostic;  // why a cell fell back to D, if it did
};

inline unsigned default_threads() {
    unsigned hw = std::max(1u, std::thread::hardware_concurrency());
    if (const char* env = std::getenv("VORTEXLAB_THREADS")) {
        char* end = nullptr;
        const long cap = std::strtol(env, &end, 10);
        if (end != env && cap > 0) hw = std::min<unsigned>(hw, static_cast<unsigned>(cap));
    }
    return hw;
}

// Runs fn(i) for i in [0, count) on up to `threads` workers. Results must be
// written to per-index slots so the outcome does not depend on scheduling.
template <class Fn>
void parallel_for(std::size_t count, unsigned threads, Fn&& fn) {
    threads = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(std::max<std::size_t>(count, 1))));
    if (threads == 1) {
        for (std::size_t i = 0; i < count; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    std::exception_ptr failure;
    std::mutex failure_lock;
    for (unsigned t = 0; t < threads; ++t)
        pool.emplace_back([&] {
            for (std::size_t i; (i = next.fetch_add(1)) < count;) {
                try {
                    fn(i);
                } catch (...) {
                    std::lock_guard<std::mutex> g(failure_lock);
                    if (!failure) failure = std::current_exception();
                }
            }
        });
    for (auto& th : pool) th.join();
    if (failure) std::rethrow_exception(failure);
}

inline std::vector<DiagramCell> sweep_plane(StabilityFamily family, int n, const Range& kappa, const Range& lambda,
                                            unsigned threads = default_threads()) {
    if (family != StabilityFamily::GeostrophicRing && family != StabilityFamily::GeostrophicRingCenter &&
        family != StabilityFamily::PlanarRingCenter)
        throw std::invalid_argument("sweep_plane supports geostrophic-ring, geostrophic-ring-center and planar-ring-center");
    if (n < 3) throw std::invalid_argument("sweep_plane needs n >= 3");
    const auto ks = kappa.values();
    const bool has_lambda = family_has_lambda(family);
    const auto ls = has_lambda ? lambda.values() : std::vector<double>{std::numeric_limits<double>::quiet_NaN()};
    for (double k : ks)
        if (k < 0.0) throw std::invalid_argument("kappa must be non-negative");

    std::vector<DiagramCell> cells(ks.size() * ls.size());
    parallel_for(cells.size(), threads, [&](std::size_t idx) {
        const double k = ks[idx / ls.size()];
        const double l = ls[idx % ls.size()];
        DiagramCell cell{k, l, 'D', {}};
        try {
            if (has_lambda && l == 0.0) throw std::invalid_argument("zero-strength central vortex");
            FamilyPoint p;
            p.n = n;
            p.kappa = family == StabilityFamily::PlanarRingCenter ? 0.0 : k;
            p.lambda = has_lambda ? l : 1.0;
            cell.verdict = evaluate(family, p).code();
        } catch (const std::exception& e) {
            cell.verdict = 'D';
            cell.diagnostic = e.what();
        }
        cells[idx] = std::move(cell);
    });
    return cells;
}

// ------------------------------------------------------------- frontiers

enum class ScanParameter { Kappa, Lambda, Theta0 };

inline std::string scan_parameter_name(ScanParameter p) {
    switch (p) {
        case ScanParameter::Kappa: return "kappa";
        case ScanParameter::Lambda: return "lambda";
        case ScanParameter::Theta0: return "theta0";
    }
    return "?";
}

struct Frontier {
    std::string parameter;
    double lo = 0.0, hi = 0.0;  // final bracket
    double threshold = 0.0;     // midpoint of the bracket
    char verdict_lo = '?', verdict_hi = '?';
    double tolerance = 0.0;
    int iterations = 0;
};

class NoFrontierError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

namespace detail {

inline FamilyPoint with_parameter(FamilyPoint p, ScanParameter which, double v) {
    switch (which) {
        case ScanParameter::Kappa: p.kappa = v; break;
        case ScanParameter::Lambda: p.lambda = v; break;
        case ScanParameter::Theta0: p.theta0 = v; break;
    }
    return p;
}

}  // namespace detail

// Bisection on the quantity that separates the two end verdicts: the maximum
// real part of the linearization when one side is unstable, otherwise the
// definiteness margin of the slice Hessian.
inline Frontier find_frontier(StabilityFamily family, const FamilyPoint& fixed, ScanParameter param, double lo,
                              double hi, double tol) {
    if (!(hi > lo) || !(tol > 0.0)) throw std::invalid_argument("find_frontier needs lo < hi and tol > 0");
    auto at = [&](double v) { return evaluate(family, detail::with_parameter(fixed, param, v)); };
    const auto a = at(lo);
    const auto b = at(hi);
    if (a.code() == b.code())
        throw NoFrontierError("no frontier: verdict " + std::string(1, a.code()) + " at both ends of the bracket");

    const bool u_front = a.kind == Verdict::LinearlyUnstable || b.kind == Verdict::LinearlyUnstable;
    const bool s_front = a.kind == Verdict::LyapunovStable || b.kind == Verdict::LyapunovStable;
    auto side = [&](const StabilityVerdict& v) -> bool {
        if (u_front) return max_real_part(v) > 0.0 && v.kind == Verdict::LinearlyUnstable;
        if (s_front) return definiteness_margin(v) > 0.0;
        return v.code() == b.code();
    };
    const bool lo_side = side(a);

    Frontier f;
    f.parameter = scan_parameter_name(param);
    f.tolerance = tol;
    f.verdict_lo = a.code();
    f.verdict_hi = b.code();
    double x0 = lo, x1 = hi;
    while (x1 - x0 > tol) {
        const double mid = 0.5 * (x0 + x1);
        (side(at(mid)) == lo_side ? x0 : x1) = mid;
        ++f.iterations;
    }
    f.lo = x0;
    f.hi = x1;
    f.threshold = 0.5 * (x0 + x1);
    return f;
}

}  // namespace vortexlab
