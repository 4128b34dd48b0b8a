#ifndef HILFER_SOLVER_HPP
#define HILFER_SOLVER_HPP

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "hilfer/expr.hpp"
#include "hilfer/fraccalc.hpp"

namespace hilfer::solver {

struct ScheduleError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

/// Picard iteration on an active interval failed to converge.
struct PicardError : std::runtime_error {
    PicardError(std::size_t interval, int iterations);
    std::size_t interval;
    int iterations;
};

/// The algebraic impulse equation x = phi(t, x, y) could not be solved.
struct ImpulseSolveError : std::runtime_error {
    ImpulseSolveError(std::size_t interval, double t, int iterations);
    std::size_t interval;
    double t;
    int iterations;
};

/// Expression evaluation failed while integrating; carries the location.
struct RhsError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

enum class Mode { NonInstantaneous, Instantaneous };

/// Impulse/lower-bound points t_i, window ends p_i (non-instantaneous only),
/// and the simulation horizon.
struct ImpulsiveSchedule {
    std::vector<double> t_points;
    std::vector<double> p_points;
    double horizon = 0.0;

    /// Checks the interleaving invariants for the given mode; throws
    /// ScheduleError describing the first violated ordering.
    void validate(Mode mode) const;
};

struct ImpulsiveSystem {
    Mode mode = Mode::NonInstantaneous;
    fraccalc::HilferOrder order{0.5, 1.0};
    ImpulsiveSchedule schedule;
    expr::Expr g;                          // right-hand side g(t, x)
    std::vector<expr::Expr> impulse_maps;  // phi_i(t,x,y) or psi_i(t,y)
    double x0 = 0.0;                       // weighted initial value
};

enum class SegmentKind { Active, ImpulseWindow, PointImpulse };

/// One piece of the piecewise trajectory. Active segments store the weighted
/// values y(s) = (s-lower)^{1-weight} x(s) with weight = lam; windows and
/// point impulses store plain values (weight 1).
struct Segment {
    SegmentKind kind;
    double lower;
    double weight;
    std::vector<double> grid;
    std::vector<double> weighted_values;
    double restart_value;  // weighted limit (active) or pre-impulse value used

    double unweighted(std::size_t j) const;
};

struct PiecewiseTrajectory {
    std::vector<Segment> segments;

    /// plain x(t); t must lie in some segment's span (t > lower for weighted
    /// active segments, where x carries the (t-lower)^{lam-1} factor)
    double value_at(double t) const;
};

struct MeshSpec {
    int points_per_interval = 64;
    double grading = 0.0;  // 0 = automatic: max(1, 1/lam)
};

/// Initial condition either as the integral value B = I^{1-lam}x(t0+) or the
/// weighted limit C = lim (t-t0)^{1-lam} x(t); B = C * Gamma(lam).
struct WeightedInitialCondition {
    enum class Form { Integral, Weighted };
    Form form;
    double value;
};

/// Converts between the two initial-condition forms (involutive).
WeightedInitialCondition convert_initial(const WeightedInitialCondition& ic, double lam);

/// Mild solution of the impulsive system, interval by interval: weighted
/// Volterra product-integration with per-node Picard iteration on active
/// intervals, damped fixed-point (secant fallback) on impulse windows,
/// weighted restarts at each changed lower bound.
PiecewiseTrajectory solve(const ImpulsiveSystem& system, const MeshSpec& mesh = {});

/// The worked non-instantaneous example (mu = 0.4, g = t, t_i = i,
/// p_i = i + 0.5, phi_i = t - i x + y) in closed form on (0, 2.5], for any
/// type nu; reference oracle for solve.
double closed_form_example(double t, const fraccalc::HilferOrder& order, double x0);

/// G(t,a) = int_a^t s (t-s)^{mu-1} ds at mu = 0.4, the kernel integral of the
/// worked example: t (t-a)^{0.4}/0.4 - (t-a)^{1.4}/1.4.
double example_kernel_integral(double t, double a);

struct ContractionReport {
    double K;
    double p_used;
    double terms[3];   // sup-of-impulse, first-interval, general-interval bounds
    bool contraction;  // K < 1
};

/// The uniqueness bound K of the contraction theorem for Lipschitz constants
/// L (right-hand side) and I_i (impulse maps), using the worst interval
/// lengths of the schedule. When p is absent, K is minimized over the Holder
/// exponent p in (1-mu, lam) by golden-section search (the range is empty
/// when lam + mu <= 1; that raises ParameterError).
ContractionReport contraction_constant(double L, const std::vector<double>& I_list,
                                       const fraccalc::HilferOrder& order,
                                       const ImpulsiveSchedule& schedule,
                                       std::optional<double> p = std::nullopt);

}  // namespace hilfer::solver

#endif
