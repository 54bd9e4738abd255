#pragma once

#include <limits>
#include <string>
#include <utility>
#include <vector>

namespace ccra {

// Minimization LP with box-constrained variables. Relaxed-binary columns are
// the continuous stand-ins for integer decisions; their boxes start at [0,1]
// and are tightened during branching.

enum class VarKind { RelaxedBinary, Continuous };
enum class RowSense { LE, GE, EQ };

struct Column {
    std::string name;
    VarKind kind = VarKind::Continuous;
    double lower = 0;
    double upper = std::numeric_limits<double>::infinity();
    double obj = 0;
};

struct Row {
    std::vector<std::pair<int, double>> coeffs;  // (column, value), sorted by column
    RowSense sense = RowSense::LE;
    double rhs = 0;
};

struct LinearProgram {
    std::vector<Column> cols;
    std::vector<Row> rows;

    int add_column(std::string name, VarKind kind, double lower, double upper, double obj);
    int add_row(std::vector<std::pair<int, double>> coeffs, RowSense sense, double rhs);
};

enum class LpStatus { Optimal, Infeasible, Unbounded };

struct LpResult {
    LpStatus status = LpStatus::Infeasible;
    double objective = 0;
    std::vector<double> x;  // one value per column
    int iterations = 0;
};

// Solves the program as stated.
LpResult solve_lp(const LinearProgram& lp);

// Solves with per-column bound overrides (branching boxes); vectors must have
// one entry per column.
LpResult solve_lp_bounded(const LinearProgram& lp, const std::vector<double>& lower,
                          const std::vector<double>& upper);

}  // namespace ccra
