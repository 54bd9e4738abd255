#include "ccra/lp.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <stdexcept>

namespace ccra {

namespace {

constexpr double kFeasTol = 1e-7;
constexpr double kPivotTol = 1e-9;
constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr int kRefactorPeriod = 600;

enum class Status { Basic, AtLower, AtUpper };

// Bounded-variable revised primal simplex over the standard form
// A x = b, l <= x <= u (slacks appended), with a phase-1 artificial start.
struct Simplex {
    int m = 0;                // rows
    int n = 0;                // structural + slack columns (artificials appended)
    std::vector<std::vector<std::pair<int, double>>> acols;  // sparse columns
    std::vector<double> lo, up, cost, x;
    Eigen::VectorXd b;

    std::vector<int> basis;       // size m
    std::vector<Status> status;   // size n (+ artificials)
    // row-major keeps the eta update's row arithmetic on contiguous memory
    using InvMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
    InvMatrix binv;
    int iterations = 0;

    double col_dot(int j, const Eigen::VectorXd& y) const {
        double v = 0;
        for (const auto& [i, a] : acols[static_cast<std::size_t>(j)])
            v += y(i) * a;
        return v;
    }

    Eigen::VectorXd col_dense(int j) const {
        Eigen::VectorXd v = Eigen::VectorXd::Zero(m);
        for (const auto& [i, a] : acols[static_cast<std::size_t>(j)]) v(i) = a;
        return v;
    }

    void refactor() {
        Eigen::MatrixXd B(m, m);
        for (int k = 0; k < m; ++k) B.col(k) = col_dense(basis[static_cast<std::size_t>(k)]);
        binv = B.partialPivLu().solve(Eigen::MatrixXd::Identity(m, m)).eval();
        if (!binv.allFinite()) throw std::runtime_error("singular basis during refactor");
        recompute_basic_values();
    }

    void recompute_basic_values() {
        Eigen::VectorXd rhs = b;
        for (int j = 0; j < static_cast<int>(acols.size()); ++j) {
            if (status[static_cast<std::size_t>(j)] == Status::Basic) continue;
            const double v = x[static_cast<std::size_t>(j)];
            if (v != 0)
                for (const auto& [i, a] : acols[static_cast<std::size_t>(j)]) rhs(i) -= a * v;
        }
        Eigen::VectorXd xb = binv * rhs;
        for (int k = 0; k < m; ++k) x[static_cast<std::size_t>(basis[static_cast<std::size_t>(k)])] = xb(k);
    }

    double objective() const {
        double v = 0;
        for (std::size_t j = 0; j < cost.size(); ++j) v += cost[j] * x[j];
        return v;
    }

    // Runs simplex iterations on the current cost vector until optimal.
    // Returns false on unboundedness.
    bool optimize(int max_iter) {
        int degenerate_run = 0;
        for (int it = 0; it < max_iter; ++it) {
            ++iterations;
            if (iterations % kRefactorPeriod == 0) refactor();

            Eigen::VectorXd y(m);
            {
                Eigen::VectorXd cb(m);
                for (int k = 0; k < m; ++k)
                    cb(k) = cost[static_cast<std::size_t>(basis[static_cast<std::size_t>(k)])];
                y = binv.transpose() * cb;
            }

            const bool bland = degenerate_run > 60;
            int enter = -1;
            double best = kFeasTol;
            for (int j = 0; j < static_cast<int>(acols.size()); ++j) {
                const auto js = static_cast<std::size_t>(j);
                if (status[js] == Status::Basic) continue;
                if (lo[js] == up[js]) continue;  // fixed column, never prices in
                const double d = cost[js] - col_dot(j, y);
                double viol = 0;
                if (status[js] == Status::AtLower && d < -kFeasTol) viol = -d;
                if (status[js] == Status::AtUpper && d > kFeasTol) viol = d;
                if (viol > 0) {
                    if (bland) {
                        enter = j;
                        break;
                    }
                    if (viol > best) {
                        best = viol;
                        enter = j;
                    }
                }
            }
            if (enter < 0) return true;  // optimal

            const auto es = static_cast<std::size_t>(enter);
            const bool from_lower = status[es] == Status::AtLower;
            Eigen::VectorXd w = binv * col_dense(enter);
            // entering variable moves by t (>=0); basic value change is -dir*t*w
            const double dir = from_lower ? 1.0 : -1.0;

            double t = up[es] - lo[es];  // bound-flip limit
            int leave = -1;              // basis slot
            double leave_to = 0;         // bound the leaving variable lands on
            for (int k = 0; k < m; ++k) {
                const auto bs = static_cast<std::size_t>(basis[static_cast<std::size_t>(k)]);
                const double wk = dir * w(k);
                double cand = kInf;
                double target = 0;
                if (wk > kPivotTol) {
                    cand = (x[bs] - lo[bs]) / wk;
                    target = lo[bs];
                } else if (wk < -kPivotTol) {
                    cand = (up[bs] - x[bs]) / (-wk);
                    target = up[bs];
                }
                if (cand < t - kPivotTol ||
                    (cand < t + kPivotTol && leave >= 0 &&
                     basis[static_cast<std::size_t>(k)] < basis[static_cast<std::size_t>(leave)])) {
                    t = std::max(cand, 0.0);
                    leave = k;
                    leave_to = target;
                }
            }
            if (t == kInf || !std::isfinite(t)) return false;  // unbounded

            degenerate_run = t < kFeasTol ? degenerate_run + 1 : 0;

            // apply the step
            for (int k = 0; k < m; ++k)
                x[static_cast<std::size_t>(basis[static_cast<std::size_t>(k)])] -= dir * t * w(k);
            x[es] += dir * t;

            if (leave < 0) {
                // bound flip, basis unchanged
                status[es] = from_lower ? Status::AtUpper : Status::AtLower;
                continue;
            }
            const auto ls = static_cast<std::size_t>(leave);
            const auto out = static_cast<std::size_t>(basis[ls]);
            x[out] = leave_to;
            status[out] = leave_to == lo[out] ? Status::AtLower : Status::AtUpper;
            status[es] = Status::Basic;
            basis[ls] = enter;

            // eta update of the inverse as a rank-1 correction
            const double piv = w(leave);
            binv.row(leave) /= piv;
            Eigen::VectorXd scale = w;
            scale(leave) = 0;
            binv.noalias() -= scale * binv.row(leave);
        }
        throw std::runtime_error("simplex iteration limit exceeded");
    }
};

}  // namespace

int LinearProgram::add_column(std::string name, VarKind kind, double lower, double upper,
                              double obj) {
    if (!(lower <= upper)) throw std::invalid_argument("empty box for column " + name);
    if (kind == VarKind::RelaxedBinary && (lower < 0 || upper > 1))
        throw std::invalid_argument("relaxed-binary box outside [0,1] for " + name);
    cols.push_back({std::move(name), kind, lower, upper, obj});
    return static_cast<int>(cols.size()) - 1;
}

int LinearProgram::add_row(std::vector<std::pair<int, double>> coeffs, RowSense sense,
                           double rhs) {
    std::sort(coeffs.begin(), coeffs.end());
    for (const auto& [j, v] : coeffs) {
        (void)v;
        if (j < 0 || j >= static_cast<int>(cols.size()))
            throw std::out_of_range("row references unknown column");
    }
    rows.push_back({std::move(coeffs), sense, rhs});
    return static_cast<int>(rows.size()) - 1;
}

LpResult solve_lp_bounded(const LinearProgram& lp, const std::vector<double>& lower,
                          const std::vector<double>& upper) {
    const int ncols = static_cast<int>(lp.cols.size());
    const int m = static_cast<int>(lp.rows.size());
    if (static_cast<int>(lower.size()) != ncols || static_cast<int>(upper.size()) != ncols)
        throw std::invalid_argument("bound override size mismatch");

    LpResult res;
    for (int j = 0; j < ncols; ++j)
        if (lower[static_cast<std::size_t>(j)] >
            upper[static_cast<std::size_t>(j)] + kFeasTol)
            return res;  // empty box: trivially infeasible

    if (m == 0) {
        // pure box problem: each variable sits at its cheaper bound
        res.status = LpStatus::Optimal;
        res.x.resize(static_cast<std::size_t>(ncols));
        for (int j = 0; j < ncols; ++j) {
            const auto js = static_cast<std::size_t>(j);
            const double c = lp.cols[js].obj;
            double v = c >= 0 ? lower[js] : upper[js];
            if (!std::isfinite(v)) {
                res.status = LpStatus::Unbounded;
                return res;
            }
            res.x[js] = v;
            res.objective += c * v;
        }
        return res;
    }

    Simplex sx;
    sx.m = m;
    sx.b = Eigen::VectorXd(m);

    // structural columns
    for (int j = 0; j < ncols; ++j) {
        const auto js = static_cast<std::size_t>(j);
        sx.acols.emplace_back();
        sx.lo.push_back(std::min(lower[js], upper[js]));
        sx.up.push_back(std::max(lower[js], upper[js]));
        sx.cost.push_back(0);  // phase-1 objective; real cost installed later
    }
    for (int i = 0; i < m; ++i) {
        for (const auto& [j, v] : lp.rows[static_cast<std::size_t>(i)].coeffs)
            sx.acols[static_cast<std::size_t>(j)].emplace_back(i, v);
    }
    // slack columns
    std::vector<int> slack_of(static_cast<std::size_t>(m), -1);
    for (int i = 0; i < m; ++i) {
        const auto& row = lp.rows[static_cast<std::size_t>(i)];
        sx.b(i) = row.rhs;
        if (row.sense == RowSense::EQ) continue;
        const double coef = row.sense == RowSense::LE ? 1.0 : -1.0;
        slack_of[static_cast<std::size_t>(i)] = static_cast<int>(sx.acols.size());
        sx.acols.push_back({{i, coef}});
        sx.lo.push_back(0);
        sx.up.push_back(kInf);
        sx.cost.push_back(0);
    }
    sx.n = static_cast<int>(sx.acols.size());

    // start: every real column at a finite bound
    sx.x.assign(static_cast<std::size_t>(sx.n), 0);
    sx.status.assign(static_cast<std::size_t>(sx.n), Status::AtLower);
    for (int j = 0; j < sx.n; ++j) {
        const auto js = static_cast<std::size_t>(j);
        if (std::isfinite(sx.lo[js])) {
            sx.x[js] = sx.lo[js];
        } else if (std::isfinite(sx.up[js])) {
            sx.x[js] = sx.up[js];
            sx.status[js] = Status::AtUpper;
        } else {
            sx.x[js] = 0;  // free variable parked at zero
        }
    }

    // crash basis: slacks and row-singleton columns cover what they can
    // feasibly; artificials only fill the remaining rows
    Eigen::VectorXd resid = sx.b;
    for (int j = 0; j < sx.n; ++j) {
        const double v = sx.x[static_cast<std::size_t>(j)];
        if (v != 0)
            for (const auto& [i, a] : sx.acols[static_cast<std::size_t>(j)]) resid(i) -= a * v;
    }
    std::vector<int> row_count(static_cast<std::size_t>(sx.n), 0);
    for (int j = 0; j < sx.n; ++j)
        row_count[static_cast<std::size_t>(j)] =
            static_cast<int>(sx.acols[static_cast<std::size_t>(j)].size());
    std::vector<std::vector<int>> row_cols(static_cast<std::size_t>(m));
    for (int j = 0; j < sx.n; ++j)
        for (const auto& [i, a] : sx.acols[static_cast<std::size_t>(j)]) {
            (void)a;
            row_cols[static_cast<std::size_t>(i)].push_back(j);
        }

    sx.basis.assign(static_cast<std::size_t>(m), -1);
    std::vector<double> diag(static_cast<std::size_t>(m), 1.0);
    for (int i = 0; i < m; ++i) {
        int pick = -1;
        double coef = 1.0;
        for (int j : row_cols[static_cast<std::size_t>(i)]) {
            const auto js = static_cast<std::size_t>(j);
            if (row_count[js] != 1 || sx.status[js] != Status::AtLower) continue;
            const double a = sx.acols[js][0].second;
            // value the column would take as the only basic one in this row
            const double v = sx.x[js] + resid(i) / a;
            if (v >= sx.lo[js] - kFeasTol && v <= sx.up[js] + kFeasTol) {
                pick = j;
                coef = a;
                break;
            }
        }
        if (pick >= 0) {
            const auto ps = static_cast<std::size_t>(pick);
            sx.x[ps] += resid(i) / coef;
            sx.x[ps] = std::clamp(sx.x[ps], sx.lo[ps], sx.up[ps]);
            sx.status[ps] = Status::Basic;
            sx.basis[static_cast<std::size_t>(i)] = pick;
            diag[static_cast<std::size_t>(i)] = 1.0 / coef;
            resid(i) = 0;
            continue;
        }
        // artificial; slightly graded costs break the massive phase-1 ties
        const double sign = resid(i) >= 0 ? 1.0 : -1.0;
        sx.basis[static_cast<std::size_t>(i)] = static_cast<int>(sx.acols.size());
        sx.acols.push_back({{i, sign}});
        sx.lo.push_back(0);
        sx.up.push_back(kInf);
        sx.cost.push_back(1.0 + 1e-7 * i);
        sx.x.push_back(std::abs(resid(i)));
        sx.status.push_back(Status::Basic);
        diag[static_cast<std::size_t>(i)] = sign;
    }
    sx.binv = Eigen::MatrixXd::Zero(m, m);
    for (int i = 0; i < m; ++i) sx.binv(i, i) = diag[static_cast<std::size_t>(i)];

    const int max_iter = 40 * (sx.n + m) + 2000;
    if (!sx.optimize(max_iter)) throw std::runtime_error("phase 1 reported unbounded");
    if (const char* dbg = std::getenv("CCRA_LP_DEBUG"))
        if (*dbg) std::fprintf(stderr, "[lp] phase1 iters=%d\n", sx.iterations);
    if (sx.objective() > 1e-6) return res;  // infeasible

    // phase 2: real costs; artificials pinned to zero
    for (int j = 0; j < sx.n; ++j)
        sx.cost[static_cast<std::size_t>(j)] = 0;
    for (int j = 0; j < ncols; ++j)
        sx.cost[static_cast<std::size_t>(j)] = lp.cols[static_cast<std::size_t>(j)].obj;
    for (std::size_t j = static_cast<std::size_t>(sx.n); j < sx.acols.size(); ++j) {
        sx.cost[j] = 0;
        sx.up[j] = 0;  // never leaves zero again
    }
    if (!sx.optimize(max_iter)) {
        res.status = LpStatus::Unbounded;
        return res;
    }

    res.status = LpStatus::Optimal;
    res.iterations = sx.iterations;
    res.x.assign(sx.x.begin(), sx.x.begin() + ncols);
    for (int j = 0; j < ncols; ++j) {
        const auto js = static_cast<std::size_t>(j);
        // snap tiny box violations from the eta updates
        res.x[js] = std::clamp(res.x[js], lower[js], upper[js]);
        res.objective += lp.cols[js].obj * res.x[js];
    }
    return res;
}

LpResult solve_lp(const LinearProgram& lp) {
    std::vector<double> lo, hi;
    lo.reserve(lp.cols.size());
    hi.reserve(lp.cols.size());
    for (const auto& c : lp.cols) {
        lo.push_back(c.lower);
        hi.push_back(c.upper);
    }
    return solve_lp_bounded(lp, lo, hi);
}

}  // namespace ccra
