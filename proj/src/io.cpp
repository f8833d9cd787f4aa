#include "eikfac/io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <ostream>
#include <stdexcept>

namespace eikfac {

std::string format_double(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  if (std::isnan(v)) return "nan";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void emit_field_csv(std::ostream& out, const Grid2D& grid, std::span<const double> u) {
  out << "i,j,x,y,u\n";
  for (int j = 0; j < grid.ny(); ++j) {
    for (int i = 0; i < grid.nx(); ++i) {
      const Vec2 p = grid.coord(i, j);
      out << i << ',' << j << ',' << format_double(p.x) << ',' << format_double(p.y) << ','
          << format_double(u[grid.linear(i, j)]) << '\n';
    }
  }
}

void emit_heatmap_pgm(std::ostream& out, const Grid2D& grid, std::span<const double> u) {
  double lo = kInf;
  double hi = -kInf;
  for (double v : u) {
    if (!std::isfinite(v)) continue;
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  const double span = hi > lo ? hi - lo : 1.0;
  out << "P5\n" << grid.nx() << ' ' << grid.ny() << "\n255\n";
  std::string row(static_cast<std::size_t>(grid.nx()), '\0');
  for (int j = grid.ny() - 1; j >= 0; --j) {
    for (int i = 0; i < grid.nx(); ++i) {
      const double v = u[grid.linear(i, j)];
      int g = 255;
      if (std::isfinite(v)) g = static_cast<int>(std::lround(254.0 * (v - lo) / span));
      row[static_cast<std::size_t>(i)] = static_cast<char>(static_cast<unsigned char>(g));
    }
    out.write(row.data(), static_cast<std::streamsize>(row.size()));
  }
}

void emit_convergence_csv(std::ostream& out, const std::vector<ConvergenceReport>& reports) {
  out << "method,h,linf,l1,order_tail\n";
  for (const auto& r : reports) {
    for (const auto& row : r.rows) {
      out << r.label << ',' << format_double(row.h) << ',' << format_double(row.linf) << ','
          << format_double(row.l1) << ',' << format_double(r.order.linf) << '\n';
    }
  }
}

void emit_trajectory_csv(std::ostream& out, const Trajectory& t) {
  out << "x,y\n";
  for (Vec2 p : t.points) out << format_double(p.x) << ',' << format_double(p.y) << '\n';
}

void emit_fans_csv(std::ostream& out, const std::vector<FanEntry>& fans) {
  out << "x,y,radius,origin,ax,ay,alpha,beta,delta\n";
  for (const auto& f : fans) {
    const char* origin = f.origin == FanOrigin::Source   ? "source"
                         : f.origin == FanOrigin::Corner ? "corner"
                                                         : "static";
    out << format_double(f.center.x) << ',' << format_double(f.center.y) << ','
        << format_double(f.radius) << ',' << origin << ',' << format_double(f.a.x) << ','
        << format_double(f.a.y) << ',';
    if (f.snell) {
      out << format_double(f.snell->alpha) << ',' << format_double(f.snell->beta) << ','
          << format_double(f.snell->delta);
    } else {
      out << ",,";
    }
    out << '\n';
  }
}

void write_file(const std::string& path, const std::function<void(std::ostream&)>& fn) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error(path + ": cannot open for writing");
  fn(out);
  out.flush();
  if (!out) throw std::runtime_error(path + ": write failed");
}

}  // namespace eikfac
