#ifndef HILFER_FRACCALC_HPP
#define HILFER_FRACCALC_HPP

#include <functional>
#include <stdexcept>
#include <utility>
#include <vector>

namespace hilfer::fraccalc {

struct GridError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct InsufficientGridError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

/// Hilfer order (mu, nu) with the composite parameter lam = mu + nu - mu*nu.
/// nu = 0 gives Riemann-Liouville, nu = 1 gives Caputo.
struct HilferOrder {
    double mu;
    double nu;
    double lam;

    HilferOrder(double mu_, double nu_);

    double inner_integral_order() const { return (1.0 - nu) * (1.0 - mu); }  // beta
    double outer_integral_order() const { return nu * (1.0 - mu); }
};

/// A function sampled on an increasing grid starting at its lower bound,
/// stored in weighted form: values[j] = (grid[j]-lower)^{1-weight} * f(grid[j]).
/// weight = 1 means the samples are the plain function values. The weighted
/// representation keeps the stored samples bounded for functions behaving
/// like (s-lower)^{weight-1} near the lower bound.
struct SampledFn {
    double lower = 0.0;
    double weight = 1.0;
    std::vector<double> grid;
    std::vector<double> values;

    SampledFn() = default;
    SampledFn(double lower_, double weight_, std::vector<double> grid_,
              std::vector<double> values_);

    std::size_t size() const { return grid.size(); }
    /// plain f(grid[j]); j = 0 with weight < 1 and values[0] != 0 is singular
    double unweighted(std::size_t j) const;
};

/// Graded nodes a + (b-a)*(j/n)^r for j = 0..n; r >= 1 clusters near a.
std::vector<double> graded_grid(double a, double b, int n, double r);

/// I^mu (t-t0)^{delta-1} = Gamma(delta)/Gamma(delta+mu) (t-t0)^{delta+mu-1}
double frac_integral_power(double order_mu, double delta, double t, double t0);

/// D^{mu,nu} (t-t0)^{delta-1} = Gamma(delta)/Gamma(delta-mu) (t-t0)^{delta-mu-1},
/// with the conventions 1/Gamma(non-positive integer) = 0 and an exact 0 at
/// delta = lam (the (t-t0)^{lam-1} kernel is annihilated for every nu).
double hilfer_deriv_power(const HilferOrder& order, double delta, double t, double t0);

namespace detail {
/// int_{s0}^{s1} (t-s)^{mu-1} (s-a)^{lamw-1} f(s) ds by Gauss-Jacobi rules
/// adapted to whichever endpoint singularity the cell touches. `first` marks
/// s0 == a, `last` marks s1 == t; a cell touching both is split at its
/// midpoint. f must be smooth inside the cell.
double cell_integral(double t, double a, double mu, double lamw, double s0, double s1,
                     const std::function<double(double)>& f, bool first, bool last);

/// int_a^t (t-s)^{mu-1} (s-a)^{lamw-1} w(s) ds where w is evaluated directly
/// at the quadrature nodes (collocation form; used by the solver).
double kernel_integral(double t, double a, double mu, double lamw,
                       const std::vector<double>& grid, std::size_t cells,
                       const std::function<double(double)>& w);
}  // namespace detail

/// (1/Gamma(mu)) int_{lower}^{t} (t-s)^{mu-1} f(s) ds with f interpolated
/// piecewise-linearly in its weighted representation and each cell integrated
/// exactly against the singular kernel factors.
double frac_integral_quad(double order_mu, const SampledFn& f, double t);

/// D^{mu,nu} f(t) via the composition I^{nu(1-mu)} D I^{(1-nu)(1-mu)}:
/// the leading power of f (from its weighted representation) is differentiated
/// in closed form, the remainder goes through quadrature for the inner
/// integral, 3-point finite differences skipping the two nodes nearest the
/// lower bound, and product integration of the derivative samples with a
/// power-law extension over the skipped head.
double hilfer_deriv_quad(const HilferOrder& order, const SampledFn& f, double t);

/// Residuals of the Lemma composition identities at t:
///   first  = |D^{mu,nu}(I^mu f)(t) - f(t)|
///   second = |I^mu(D^{mu,nu} f)(t) - f(t) + (t-t0)^{lam-1}/Gamma(lam) * I0|
/// where I0 = [I^{(1-nu)(1-mu)} f](t0+). Self-test oracle.
std::pair<double, double> composition_residuals(const HilferOrder& order, const SampledFn& f,
                                                double t);

}  // namespace hilfer::fraccalc

#endif
