#include "kcoll/report.hpp"

#include <fmt/format.h>
#include <fmt/ranges.h>

#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>

#include "kcoll/error.hpp"

namespace kcoll {

std::string format_number(double v) { return fmt::format("{}", v); }

void write_stats_csv(std::ostream& out, const EnsembleStats& stats,
                     const SpectralHeatSolution& oracle) {
    out << "t,x,sample_mean,sample_var,exact_mean,exact_var\n";
    for (std::size_t j = 0; j < stats.times.size(); ++j) {
        const double t = stats.times[j];
        for (std::size_t k = 0; k < stats.points.size(); ++k) {
            const double x = stats.points[k];
            out << fmt::format("{},{},{},{},{},{}\n", t, x, stats.mean(j, k),
                               stats.variance(j, k), oracle.exact_mean(t, x),
                               oracle.exact_var(t, x));
        }
    }
}

void write_convergence_csv(std::ostream& out, std::span<const ConvergenceLevel> levels) {
    if (levels.size() < 2)
        throw InvalidArgument("a convergence table needs at least two refinement levels");
    out << "h,dt,rmse_mean,rmse_var,max_sigma\n";
    for (const auto& l : levels)
        out << fmt::format("{},{},{},{},{}\n", l.h, l.dt, l.rmse_mean, l.rmse_var,
                           l.max_sigma);
}

namespace {

void with_output(const std::string& path, const std::function<void(std::ostream&)>& body) {
    if (path == "-") {
        body(std::cout);
        std::cout.flush();
        if (!std::cout) throw IoError("failed writing to standard output");
        return;
    }
    // Render first so a failed computation never leaves a truncated file.
    std::ostringstream buffer;
    body(buffer);
    std::ofstream file(path, std::ios::binary | std::ios::trunc);
    if (!file) throw IoError("cannot open output file '" + path + "'");
    file << buffer.str();
    file.flush();
    if (!file) throw IoError("failed writing output file '" + path + "'");
}

}  // namespace

void emit_stats_csv(const EnsembleStats& stats, const SpectralHeatSolution& oracle,
                    const std::string& path) {
    with_output(path, [&](std::ostream& out) { write_stats_csv(out, stats, oracle); });
}

void emit_convergence_csv(std::span<const ConvergenceLevel> levels, const std::string& path) {
    if (levels.size() < 2)
        throw InvalidArgument("a convergence table needs at least two refinement levels");
    with_output(path, [&](std::ostream& out) { write_convergence_csv(out, levels); });
}

void emit_table_csv(const std::vector<std::string>& header,
                    const std::vector<std::vector<double>>& rows, const std::string& path) {
    with_output(path, [&](std::ostream& out) {
        out << fmt::format("{}\n", fmt::join(header, ","));
        for (const auto& row : rows) out << fmt::format("{}\n", fmt::join(row, ","));
    });
}

}  // namespace kcoll
