#include "uhlq/gdqpt.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

namespace uhlq {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kCoarseThreshold = 1e-2; // |G| below this seeds a candidate
constexpr double kWidthTarget = 1e-8;     // refinement bracket width in t

double abs_g(const TrajectoryFn& evaluate, double t) { return std::abs(evaluate(t).g); }

// bisect a sign change of Re G on [lo, hi]
GdqptEvent bisect_zero(const TrajectoryFn& evaluate, double lo, double hi)
{
    double flo = evaluate(lo).g.real();
    while (hi - lo > kWidthTarget) {
        const double mid = 0.5 * (lo + hi);
        const double fmid = evaluate(mid).g.real();
        if ((flo <= 0.0) == (fmid <= 0.0)) {
            lo = mid;
            flo = fmid;
        } else {
            hi = mid;
        }
    }
    GdqptEvent ev;
    ev.t_star = 0.5 * (lo + hi);
    ev.refined_abs_g = abs_g(evaluate, ev.t_star);
    ev.refinement_width = hi - lo;
    return ev;
}

// golden-section minimization of |G|^2 on [lo, hi]
GdqptEvent golden_minimize(const TrajectoryFn& evaluate, double lo, double hi)
{
    static const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
    double a = lo, b = hi;
    double x1 = b - inv_phi * (b - a);
    double x2 = a + inv_phi * (b - a);
    double f1 = abs_g(evaluate, x1);
    double f2 = abs_g(evaluate, x2);
    while (b - a > kWidthTarget) {
        if (f1 < f2) {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - inv_phi * (b - a);
            f1 = abs_g(evaluate, x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + inv_phi * (b - a);
            f2 = abs_g(evaluate, x2);
        }
    }
    GdqptEvent ev;
    ev.t_star = 0.5 * (a + b);
    ev.refined_abs_g = abs_g(evaluate, ev.t_star);
    ev.refinement_width = b - a;
    return ev;
}

} // namespace

std::vector<TrajectorySample> scan_trajectory(const TrajectoryFn& evaluate, double t_max,
                                              double dt)
{
    if (!(dt > 0.0) || !std::isfinite(dt)) throw Error("scan_trajectory: dt must be positive");
    if (!(t_max >= 0.0) || !std::isfinite(t_max))
        throw Error("scan_trajectory: t_max must be non-negative");
    const std::size_t n = static_cast<std::size_t>(std::floor(t_max / dt + 1e-9)) + 1;
    std::vector<TrajectorySample> samples;
    samples.reserve(n);
    for (std::size_t k = 0; k < n; ++k) samples.push_back(evaluate(static_cast<double>(k) * dt));
    return samples;
}

std::vector<GdqptEvent> find_critical_times(const std::vector<TrajectorySample>& samples,
                                            const TrajectoryFn& evaluate,
                                            DetectorDiagnostics* diagnostics)
{
    std::vector<GdqptEvent> events;
    if (samples.size() < 2) return events;

    double max_imag = 0.0;
    for (const TrajectorySample& s : samples) max_imag = std::max(max_imag, std::abs(s.g.imag()));
    const bool real_branch = max_imag < 1e-10;

    if (real_branch) {
        for (std::size_t i = 0; i + 1 < samples.size(); ++i) {
            const double a = samples[i].g.real();
            const double b = samples[i + 1].g.real();
            if ((a <= 0.0) != (b <= 0.0))
                events.push_back(bisect_zero(evaluate, samples[i].t, samples[i + 1].t));
        }
    } else {
        // local minima of |G| under the coarse threshold
        for (std::size_t i = 1; i + 1 < samples.size(); ++i) {
            const double g = std::abs(samples[i].g);
            if (g >= kCoarseThreshold) continue;
            if (g > std::abs(samples[i - 1].g) || g > std::abs(samples[i + 1].g)) continue;
            events.push_back(golden_minimize(evaluate, samples[i - 1].t, samples[i + 1].t));
        }
    }

    std::vector<GdqptEvent> accepted;
    for (GdqptEvent& ev : events) {
        if (ev.refined_abs_g < kZeroTol) {
            // tied samples in one dip can seed two refinements of one zero
            if (!accepted.empty() && std::abs(ev.t_star - accepted.back().t_star) < 1e-6)
                continue;
            ev.index = static_cast<int>(accepted.size());
            accepted.push_back(ev);
        } else if (diagnostics) {
            std::ostringstream os;
            os << "candidate near t = " << ev.t_star << " dropped: refined |G| = "
               << ev.refined_abs_g << " stayed above " << kZeroTol;
            diagnostics->dropped.push_back(os.str());
        }
    }
    return accepted;
}

void detect_phase_jumps(std::vector<GdqptEvent>& events,
                        const std::vector<TrajectorySample>& samples, const TrajectoryFn& evaluate)
{
    if (samples.size() < 2) return;
    const double dt = samples[1].t - samples[0].t;
    const double delta = 5.0 * dt;

    for (GdqptEvent& ev : events) {
        // step outward across phase-undefined samples
        double theta_before = 0.0, theta_after = 0.0;
        bool have_before = false, have_after = false;
        for (int j = 0; j <= 10 && !have_before; ++j) {
            const double tb = ev.t_star - delta - j * dt;
            if (tb <= 0.0) break;
            const TrajectorySample s = evaluate(tb);
            if (s.phase_defined) {
                theta_before = s.theta_g;
                have_before = true;
            }
        }
        for (int j = 0; j <= 10 && !have_after; ++j) {
            const TrajectorySample s = evaluate(ev.t_star + delta + j * dt);
            if (s.phase_defined) {
                theta_after = s.theta_g;
                have_after = true;
            }
        }
        if (!have_before || !have_after) {
            ev.jump_known = false;
            ev.jump_anomalous = true;
            continue;
        }
        ev.jump = principal_angle(theta_after - theta_before);
        ev.jump_known = true;
        ev.jump_anomalous = std::abs(std::abs(ev.jump) - kPi) > 0.2;
    }
}

std::vector<CyclicSample> cyclic_samples(const TrajectoryEvaluator& evaluator, int n_max,
                                         const std::vector<GdqptEvent>& events)
{
    const QuenchScenario& s = evaluator.scenario();
    if (!s.period())
        throw CyclicityError("cyclic_samples: scenario does not declare a period");
    const double tau = *s.period();
    if (n_max < 1) throw Error("cyclic_samples: n_max must be at least 1");

    const Matrix& rho0 = s.rho0().matrix();
    std::vector<CyclicSample> out;
    for (int n = 1; n <= n_max; ++n) {
        const double t = tau * n;
        const double drift = (evolve_density(s, t).matrix() - rho0).norm();
        if (drift >= 1e-9) {
            std::ostringstream os;
            os << "cyclic_samples: ||rho(" << n << " tau) - rho(0)|| = " << drift
               << "; the declared period does not close the trajectory";
            throw CyclicityError(os.str());
        }
        CyclicSample cs;
        cs.n = n;
        cs.t = t;
        const Complex g = evaluator.amplitude(t);
        cs.phase_defined = std::abs(g) > kZeroTol;
        cs.theta_u = cs.phase_defined ? principal_angle(std::arg(g)) : 0.0;
        cs.crossings_before = static_cast<int>(
            std::count_if(events.begin(), events.end(),
                          [&](const GdqptEvent& ev) { return ev.t_star < t; }));
        cs.cls = cs.phase_defined ? classify_topology(cs.theta_u) : TopologyClass::unclassifiable;
        out.push_back(cs);
    }
    return out;
}

TopologyClass classify_topology(double theta_u)
{
    const double dist0 = std::abs(principal_angle(theta_u));
    const double dist_pi = std::abs(principal_angle(theta_u - kPi));
    if (dist_pi <= 1e-3) return TopologyClass::nontrivial;
    if (dist0 <= 1e-3) return TopologyClass::trivial;
    if (dist0 > 0.1 && dist_pi > 0.1) return TopologyClass::unclassifiable;
    return dist_pi < dist0 ? TopologyClass::nontrivial : TopologyClass::trivial;
}

const char* to_string(TopologyClass cls)
{
    switch (cls) {
    case TopologyClass::trivial: return "trivial";
    case TopologyClass::nontrivial: return "nontrivial";
    default: return "unclassifiable";
    }
}

} // namespace uhlq
