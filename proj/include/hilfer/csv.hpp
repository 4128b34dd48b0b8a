#ifndef HILFER_CSV_HPP
#define HILFER_CSV_HPP

#include <ostream>
#include <string>

#include "hilfer/solver.hpp"

namespace hilfer::csv {

/// %.17g rendering used for every numeric CSV field; deterministic
/// byte-for-byte for a given double.
std::string format_double(double v);

/// Header `t,x,weighted_x,segment_kind,segment_index`, one row per grid
/// point, LF line endings.
void write_trajectory(std::ostream& os, const solver::PiecewiseTrajectory& traj);

/// Two-column `t,x` series (closed-form traces).
void write_series(std::ostream& os, const std::vector<double>& t, const std::vector<double>& x);

}  // namespace hilfer::csv

#endif
