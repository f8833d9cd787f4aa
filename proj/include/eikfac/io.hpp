#pragma once

#include <functional>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "eikfac/analysis.hpp"
#include "eikfac/domain.hpp"
#include "eikfac/path.hpp"
#include "eikfac/solver.hpp"

namespace eikfac {

/// 17 significant digits; infinities print as "inf" / "-inf".
std::string format_double(double v);

/// Header "i,j,x,y,u", one row per node in linear order.
void emit_field_csv(std::ostream& out, const Grid2D& grid, std::span<const double> u);

/// Binary 8-bit PGM, top row = largest y. Finite values map linearly to
/// 0..254 over their range; infinite values are written as 255.
void emit_heatmap_pgm(std::ostream& out, const Grid2D& grid, std::span<const double> u);

/// Header "method,h,linf,l1,order_tail"; order_tail is the fitted L-inf order.
void emit_convergence_csv(std::ostream& out, const std::vector<ConvergenceReport>& reports);

/// Header "x,y".
void emit_trajectory_csv(std::ostream& out, const Trajectory& t);

/// Header "x,y,radius,origin,ax,ay,alpha,beta,delta".
void emit_fans_csv(std::ostream& out, const std::vector<FanEntry>& fans);

/// Opens `path` for binary writing, runs `fn`, and throws std::runtime_error
/// naming the path on any I/O failure.
void write_file(const std::string& path, const std::function<void(std::ostream&)>& fn);

}  // namespace eikfac
