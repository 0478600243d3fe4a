#pragma once

#include "uhlq/quench.hpp"

#include <functional>
#include <string>
#include <vector>

namespace uhlq {

using TrajectoryFn = std::function<TrajectorySample(double)>;

/// Critical time t*_n where |G| vanishes; jump is the geometric-phase
/// change across it, expected +-pi.
struct GdqptEvent {
    int index = 0;
    double t_star = 0.0;
    double jump = 0.0;
    bool jump_known = false;
    bool jump_anomalous = false;
    double refined_abs_g = 0.0;
    double refinement_width = 0.0;
};

struct DetectorDiagnostics {
    std::vector<std::string> dropped;
};

enum class TopologyClass { trivial, nontrivial, unclassifiable };

/// Uhlmann-phase reading at the cyclic time n*tau.
struct CyclicSample {
    int n = 0;
    double t = 0.0;
    bool phase_defined = false;
    double theta_u = 0.0;
    int crossings_before = 0;
    TopologyClass cls = TopologyClass::unclassifiable;
};

/// Uniform samples on [0, t_max]; floor(t_max/dt)+1 of them.
std::vector<TrajectorySample> scan_trajectory(const TrajectoryFn& evaluate, double t_max,
                                              double dt);

/// Locates zeros of |G|. Samples below the coarse threshold 1e-2 seed a
/// refinement: sign-change bisection when G is real along the whole scan
/// (equator branch), golden-section minimization of |G|^2 otherwise, both
/// to width 1e-8. Candidates whose refined |G| stays above 1e-6 are
/// dropped (recorded in diagnostics when given).
std::vector<GdqptEvent> find_critical_times(const std::vector<TrajectorySample>& samples,
                                            const TrajectoryFn& evaluate,
                                            DetectorDiagnostics* diagnostics = nullptr);

/// Attributes the geometric-phase jump at each event from samples at
/// t* +- 5 dt (stepping outward past phase-undefined points). Jumps are
/// reported in (-pi, pi]; magnitudes outside pi +- 0.2 set the anomaly
/// flag rather than failing.
void detect_phase_jumps(std::vector<GdqptEvent>& events,
                        const std::vector<TrajectorySample>& samples,
                        const TrajectoryFn& evaluate);

/// theta_U = arg G(n tau) for n = 1..n_max; requires a scenario period and
/// verifies ||rho(n tau) - rho(0)|| < 1e-9 at every cyclic time.
std::vector<CyclicSample> cyclic_samples(const TrajectoryEvaluator& evaluator, int n_max,
                                         const std::vector<GdqptEvent>& events);

/// nontrivial iff theta_U = pi within 1e-3; unclassifiable when theta_U is
/// more than 0.1 from both 0 and pi.
TopologyClass classify_topology(double theta_u);

const char* to_string(TopologyClass cls);

} // namespace uhlq
