#pragma once

#include <ostream>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "kcoll/reference.hpp"
#include "kcoll/spde.hpp"

namespace kcoll {

/// Output file could not be opened or written.
class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// One row of a refinement sweep.
struct ConvergenceLevel {
    double h = 0.0;          // fill distance
    double dt = 0.0;         // time step
    double rmse_mean = 0.0;  // relative RMSE of sample mean vs exact mean
    double rmse_var = 0.0;   // relative RMSE of sample variance vs exact variance
    double max_sigma = 0.0;  // max of the power function over the evaluation grid
};

/// Shortest round-trip decimal text for a double.
std::string format_number(double v);

/// `t,x,sample_mean,sample_var,exact_mean,exact_var`, one row per (t_j, x_k).
void write_stats_csv(std::ostream& out, const EnsembleStats& stats,
                     const SpectralHeatSolution& oracle);

/// `h,dt,rmse_mean,rmse_var,max_sigma`; needs at least two levels.
void write_convergence_csv(std::ostream& out, std::span<const ConvergenceLevel> levels);

/// File variants; "-" writes to standard output. Throw IoError on failure.
void emit_stats_csv(const EnsembleStats& stats, const SpectralHeatSolution& oracle,
                    const std::string& path);
void emit_convergence_csv(std::span<const ConvergenceLevel> levels, const std::string& path);

/// Generic table: header names and row-major values.
void emit_table_csv(const std::vector<std::string>& header,
                    const std::vector<std::vector<double>>& rows, const std::string& path);

}  // namespace kcoll
