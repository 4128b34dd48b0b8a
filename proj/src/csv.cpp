#include "hilfer/csv.hpp"

#include <cstdio>

namespace hilfer::csv {

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

namespace {

const char* kind_name(solver::SegmentKind k) {
    switch (k) {
        case solver::SegmentKind::Active: return "active";
        case solver::SegmentKind::ImpulseWindow: return "impulse_window";
        case solver::SegmentKind::PointImpulse: return "point_impulse";
    }
    return "?";
}

}  // namespace

void write_trajectory(std::ostream& os, const solver::PiecewiseTrajectory& traj) {
    os << "t,x,weighted_x,segment_kind,segment_index\n";
    for (std::size_t i = 0; i < traj.segments.size(); ++i) {
        const auto& seg = traj.segments[i];
        for (std::size_t j = 0; j < seg.grid.size(); ++j) {
            os << format_double(seg.grid[j]) << ',' << format_double(seg.unweighted(j)) << ','
               << format_double(seg.weighted_values[j]) << ',' << kind_name(seg.kind) << ',' << i
               << '\n';
        }
    }
}

void write_series(std::ostream& os, const std::vector<double>& t, const std::vector<double>& x) {
    os << "t,x\n";
    for (std::size_t j = 0; j < t.size(); ++j)
        os << format_double(t[j]) << ',' << format_double(x[j]) << '\n';
}

}  // namespace hilfer::csv
