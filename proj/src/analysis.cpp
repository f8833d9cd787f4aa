#include "eikfac/analysis.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <future>
#include <stdexcept>
#include <thread>

#include "eikfac/kernels.hpp"

namespace eikfac {

ErrorNorms error_norms(std::span<const double> u, std::span<const double> ref,
                       std::span<const std::uint8_t> mask, double h) {
  if (u.size() != ref.size() || u.size() != mask.size()) {
    throw std::invalid_argument("error_norms: fields differ in size");
  }
  const kernels::AbsDiff d = kernels::masked_abs_diff(u, ref, mask);
  if (d.count == 0) throw std::invalid_argument("error_norms: empty mask");
  return {d.linf, h * h * d.sum_abs, d.count};
}

std::vector<double> restrict_fine_to_coarse(std::span<const double> fine, const Grid2D& fine_grid,
                                            const Grid2D& coarse_grid) {
  if (fine.size() != fine_grid.size()) {
    throw std::invalid_argument("restrict: field does not match the fine grid");
  }
  const double tol = 1e-9 * fine_grid.h();
  if (std::abs(fine_grid.origin().x - coarse_grid.origin().x) > tol ||
      std::abs(fine_grid.origin().y - coarse_grid.origin().y) > tol) {
    throw std::invalid_argument("restrict: grids do not share an origin");
  }
  const double ratio = coarse_grid.h() / fine_grid.h();
  const long r = std::lround(ratio);
  if (r < 1 || std::abs(ratio - static_cast<double>(r)) > 1e-9 * ratio) {
    throw std::invalid_argument("restrict: coarse h is not a multiple of fine h");
  }
  if (static_cast<long>(coarse_grid.nx() - 1) * r > fine_grid.nx() - 1 ||
      static_cast<long>(coarse_grid.ny() - 1) * r > fine_grid.ny() - 1) {
    throw std::invalid_argument("restrict: coarse grid extends beyond the fine grid");
  }
  std::vector<double> out(coarse_grid.size());
  const int ri = static_cast<int>(r);
  for (int j = 0; j < coarse_grid.ny(); ++j) {
    for (int i = 0; i < coarse_grid.nx(); ++i) {
      out[coarse_grid.linear(i, j)] = fine[fine_grid.linear(i * ri, j * ri)];
    }
  }
  return out;
}

namespace {

double ls_slope(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  double mx = 0.0;
  double my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxy = 0.0;
  double sxx = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
  }
  return sxy / sxx;
}

double fit_one(std::span<const ConvergenceRow> rows, double ConvergenceRow::*field,
               const char* name, std::vector<std::string>& warnings) {
  std::vector<double> x;
  std::vector<double> y;
  for (const auto& r : rows) {
    const double e = r.*field;
    if (!(e > 0.0)) {
      warnings.push_back(std::string("zero ") + name + " error at h = " + std::to_string(r.h) +
                         " excluded from the fit");
      continue;
    }
    x.push_back(std::log(r.h));
    y.push_back(std::log(e));
  }
  if (x.size() < 2) {
    throw std::invalid_argument(std::string("not enough nonzero ") + name +
                                " errors to fit an order");
  }
  return ls_slope(x, y);
}

}  // namespace

ObservedOrder fit_observed_order(std::span<const ConvergenceRow> rows, std::size_t tail) {
  if (tail < 2) throw std::invalid_argument("order fit needs a tail of at least 2 rows");
  if (rows.size() < tail) throw std::invalid_argument("order fit: tail longer than the report");
  const auto last = rows.subspan(rows.size() - tail);
  ObservedOrder o;
  o.linf = fit_one(last, &ConvergenceRow::linf, "L-inf", o.warnings);
  o.l1 = fit_one(last, &ConvergenceRow::l1, "L1", o.warnings);
  return o;
}

Problem make_problem(const ProblemSpec& spec, double h) {
  const Grid2D grid = Grid2D::from_bounds(spec.lo, spec.hi, h);
  ObstacleWorld world(grid, spec.obstacles);
  SpeedField speed = SpeedField::with_obstacles(spec.speed, spec.obstacles);
  SourceSet sources(world, spec.sources);
  return {std::move(world), std::move(speed), std::move(sources)};
}

std::vector<std::uint8_t> comparison_mask(const ObstacleWorld& world, std::span<const double> u,
                                          std::span<const double> ref) {
  std::vector<std::uint8_t> mask(u.size(), 0);
  for (std::size_t k = 0; k < u.size(); ++k) {
    mask[k] = (!world.excluded(k) && std::isfinite(u[k]) && std::isfinite(ref[k])) ? 1 : 0;
  }
  return mask;
}

std::vector<ConvergenceReport> run_refinement_study(const ProblemSpec& problem,
                                                    const std::vector<MethodSpec>& methods,
                                                    const GroundTruth& truth,
                                                    const StudyOptions& options) {
  if (options.levels == 0) throw std::invalid_argument("refinement study needs at least one level");
  if (methods.empty()) throw std::invalid_argument("refinement study needs at least one method");
  if (!(options.h0 > 0.0)) throw std::invalid_argument("h0 must be positive");

  std::vector<double> hs(options.levels);
  for (std::size_t k = 0; k < options.levels; ++k) hs[k] = options.h0 / std::ldexp(1.0, static_cast<int>(k));

  // Reference values per level.
  std::vector<std::vector<double>> refs(options.levels);
  if (const auto* fg = std::get_if<FineGridTruth>(&truth)) {
    const Problem fine = make_problem(problem, fg->h);
    const SolveResult fr = fmm_solve(fine.world, fine.speed, fine.sources, fg->config);
    for (std::size_t k = 0; k < options.levels; ++k) {
      const Grid2D coarse = Grid2D::from_bounds(problem.lo, problem.hi, hs[k]);
      refs[k] = restrict_fine_to_coarse(fr.u, fine.world.grid(), coarse);
    }
  } else {
    const auto& eval = std::get<AnalyticTruth>(truth).eval;
    for (std::size_t k = 0; k < options.levels; ++k) {
      const Grid2D g = Grid2D::from_bounds(problem.lo, problem.hi, hs[k]);
      refs[k].resize(g.size());
      for (std::size_t n = 0; n < g.size(); ++n) refs[k][n] = eval(g.coord(n));
    }
  }

  auto task = [&](std::size_t m, std::size_t k) {
    const Problem p = make_problem(problem, hs[k]);
    const auto t0 = std::chrono::steady_clock::now();
    const SolveResult r = fmm_solve(p.world, p.speed, p.sources, methods[m].config);
    const auto t1 = std::chrono::steady_clock::now();
    const auto mask = comparison_mask(p.world, r.u, refs[k]);
    const ErrorNorms e = error_norms(r.u, refs[k], mask, hs[k]);
    return ConvergenceRow{hs[k], e.linf, e.l1, std::chrono::duration<double>(t1 - t0).count()};
  };

  const std::size_t jobs = methods.size() * options.levels;
  std::vector<ConvergenceRow> rows(jobs);
  auto run_job = [&](std::size_t j) {
    rows[j] = task(j / options.levels, j % options.levels);
  };
  const std::size_t workers =
      options.parallel ? std::min<std::size_t>(jobs, std::max(1u, std::thread::hardware_concurrency()))
                       : 1;
  if (workers > 1) {
    std::atomic<std::size_t> next{0};
    std::vector<std::future<void>> futures;
    for (std::size_t w = 0; w < workers; ++w) {
      futures.push_back(std::async(std::launch::async, [&] {
        for (std::size_t j = next++; j < jobs; j = next++) run_job(j);
      }));
    }
    for (auto& f : futures) f.get();
  } else {
    for (std::size_t j = 0; j < jobs; ++j) run_job(j);
  }

  std::vector<ConvergenceReport> out;
  for (std::size_t m = 0; m < methods.size(); ++m) {
    ConvergenceReport rep;
    rep.label = methods[m].label;
    rep.tail = std::min(options.tail, options.levels);
    rep.rows.assign(rows.begin() + static_cast<long>(m * options.levels),
                    rows.begin() + static_cast<long>((m + 1) * options.levels));
    if (rep.tail >= 2) rep.order = fit_observed_order(rep.rows, rep.tail);
    out.push_back(std::move(rep));
  }
  return out;
}

}  // namespace eikfac
