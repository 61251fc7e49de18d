#include "weylstrip/pde_lab.hpp"

#include <cmath>

#include "weylstrip/ode.hpp"

namespace weylstrip {

StripGrid StripGrid::make(double length, int nx, double horizon, int nt) {
    if (!(length > 0.0) || !(horizon > 0.0) || nx < 4 || nt < 1)
        throw BadConfig("StripGrid: need positive extents, nx >= 4, nt >= 1");
    return StripGrid{length, nx, horizon, nt};
}

namespace {

// Catmull-Rom on a uniform grid, stencil clamped at the ends. Node-exact,
// local, and therefore safely shareable across threads.
CMatrix cubic_kernel(const std::vector<CMatrix>& p, int i1, double s) {
    const int n = int(p.size());
    const int i0 = std::max(i1 - 1, 0);
    const int i2 = std::min(i1 + 1, n - 1);
    const int i3 = std::min(i1 + 2, n - 1);
    const CMatrix& p0 = p[size_t(i0)];
    const CMatrix& p1 = p[size_t(i1)];
    const CMatrix& p2 = p[size_t(i2)];
    const CMatrix& p3 = p[size_t(i3)];
    return CMatrix(0.5 * (2.0 * p1 + s * ((p2 - p0) +
                   s * ((2.0 * p0 - 5.0 * p1 + 4.0 * p2 - p3) +
                        s * (3.0 * (p1 - p2) + p3 - p0)))));
}

std::pair<int, double> locate(double pos, double step, int cells,
                              const char* who) {
    const double u = pos / step;
    if (u < -1e-9 || u > cells + 1e-9)
        throw EvalOutOfRange(std::string(who) + ": point outside the strip");
    int cell = std::min(std::max(int(std::floor(u)), 0), cells - 1);
    return {cell, u - cell};
}

}  // namespace

CMatrix FieldHistory::eval(double x, double t) const {
    const auto [jx, sx] = locate(x, grid.dx(), grid.nx, "FieldHistory");
    const auto [jt, st] = locate(t, grid.dt(), grid.nt, "FieldHistory");
    const int t0 = std::max(jt - 1, 0);
    const int t3 = std::min(jt + 2, grid.nt);
    std::vector<CMatrix> in_t;
    in_t.reserve(size_t(t3 - t0) + 1);
    for (int f = t0; f <= t3; ++f)
        in_t.push_back(cubic_kernel(frames[size_t(f)], jx, sx));
    return cubic_kernel(in_t, jt - t0, st);
}

std::function<CMatrix(double)> FieldHistory::trace_x0() const {
    return [this](double t) { return eval(0.0, t); };
}

std::function<CMatrix(double, double)> FieldHistory::field() const {
    return [this](double x, double t) { return eval(x, t); };
}

double FieldHistory::max_norm() const {
    double worst = 0.0;
    for (const auto& frame : frames)
        for (const auto& m : frame)
            worst = std::max(worst, spectral_norm(m));
    return worst;
}

double FieldHistory::hermiticity_defect() const {
    double worst = 0.0;
    for (const auto& frame : frames)
        for (const auto& m : frame)
            worst = std::max(worst,
                             frobenius_norm(CMatrix(m - m.adjoint())));
    return worst;
}

FieldHistory integrate_dnls(const std::function<CMatrix(double)>& init,
                            const std::function<CMatrix(double)>& left_bc,
                            const std::function<CMatrix(double)>& right_bc,
                            const StripGrid& grid, double ode_tol) {
    const CMatrix probe = init(0.0);
    const int rows = int(probe.rows()), cols = int(probe.cols());
    const int entries = rows * cols;
    const int interior = grid.nx - 1;
    const double dx = grid.dx();

    CVector state(interior * entries);
    for (int i = 0; i < interior; ++i) {
        const CMatrix v = init((i + 1) * dx);
        for (int e = 0; e < entries; ++e)
            state(i * entries + e) = v(e / cols, e % cols);
    }
    const double init_scale =
        std::max(state.size() ? state.cwiseAbs().maxCoeff() : 0.0,
                 std::max(spectral_norm(left_bc(0.0)), 1e-3));

    auto unpack = [&](const CVector& s, int i) {
        CMatrix v(rows, cols);
        for (int e = 0; e < entries; ++e) v(e / cols, e % cols) = s(i * entries + e);
        return v;
    };

    auto rhs = [&](double t, const CVector& s) {
        CVector out(s.size());
        const CMatrix left = left_bc(t);
        const CMatrix right = right_bc(t);
        for (int i = 0; i < interior; ++i) {
            const CMatrix here = unpack(s, i);
            const CMatrix prev = i == 0 ? left : unpack(s, i - 1);
            const CMatrix next = i == interior - 1 ? right : unpack(s, i + 1);
            const CMatrix lap = (prev - 2.0 * here + next) / (dx * dx);
            const CMatrix dvdt =
                (iu / 2.0) * (lap - 2.0 * here * here.adjoint() * here);
            for (int e = 0; e < entries; ++e)
                out(i * entries + e) = dvdt(e / cols, e % cols);
        }
        return out;
    };

    FieldHistory history;
    history.grid = grid;
    history.frames.resize(size_t(grid.nt) + 1);
    for (int f = 0; f <= grid.nt; ++f) {
        const double t = f * grid.dt();
        if (f > 0)
            state = integrate_ode(rhs, state, (f - 1) * grid.dt(), t,
                                  OdeOptions{.tol = ode_tol});
        if (state.size() && state.cwiseAbs().maxCoeff() > 10.0 * init_scale)
            throw Instability("integrate_dnls: solution norm blew up");
        auto& frame = history.frames[size_t(f)];
        frame.reserve(size_t(grid.nx) + 1);
        frame.push_back(left_bc(t));
        for (int i = 0; i < interior; ++i) frame.push_back(unpack(state, i));
        frame.push_back(right_bc(t));
    }
    return history;
}

FieldHistory integrate_nwave(const std::function<CMatrix(double)>& init,
                             const std::function<CMatrix(double)>& inflow,
                             const NWaveConfig& cfg, const StripGrid& grid) {
    const int m = cfg.size();
    const double dx = grid.dx(), dt = grid.dt();

    Eigen::MatrixXd speed = Eigen::MatrixXd::Zero(m, m);
    double max_speed = 0.0;
    for (int i = 0; i < m; ++i) {
        for (int j = 0; j < m; ++j) {
            if (i == j) continue;
            speed(i, j) = (cfg.dhat(i) - cfg.dhat(j)) / (cfg.d(i) - cfg.d(j));
            max_speed = std::max(max_speed, speed(i, j));
        }
    }
    if (dt * max_speed > dx * (1.0 + 1e-12))
        throw BadConfig("integrate_nwave: upwind CFL violated, need dt <= dx/c");

    std::vector<CMatrix> cur(size_t(grid.nx) + 1);
    for (int i = 0; i <= grid.nx; ++i) {
        cur[size_t(i)] = init(i * dx);
        if (!is_hermitian(cur[size_t(i)], 1e-10))
            throw NotHermitian("integrate_nwave: initial profile not Hermitian");
    }
    const double init_scale = [&] {
        double s = 0.0;
        for (const auto& v : cur) s = std::max(s, spectral_norm(v));
        return std::max(s, 1e-3);
    }();

    FieldHistory history;
    history.grid = grid;
    history.frames.reserve(size_t(grid.nt) + 1);
    history.frames.push_back(cur);

    for (int n = 1; n <= grid.nt; ++n) {
        std::vector<CMatrix> next(cur.size());
        for (int i = 0; i < grid.nx; ++i) {
            const CMatrix& here = cur[size_t(i)];
            const CMatrix& right = cur[size_t(i) + 1];
            const CMatrix zeta = build_zeta(cfg.d, here);
            const CMatrix zeta_hat = build_zeta(cfg.dhat, here);
            const CMatrix coupling = zeta * zeta_hat - zeta_hat * zeta;
            CMatrix upd = here;
            for (int r = 0; r < m; ++r) {
                for (int c = r + 1; c < m; ++c) {
                    const Complex transport =
                        speed(r, c) * (right(r, c) - here(r, c)) / dx;
                    const Complex source = coupling(r, c) / (cfg.d(r) - cfg.d(c));
                    upd(r, c) += dt * (transport + source);
                    upd(c, r) = std::conj(upd(r, c));
                }
            }
            next[size_t(i)] = std::move(upd);
        }
        next[size_t(grid.nx)] = inflow(n * dt);
        cur = std::move(next);
        for (const auto& v : cur)
            if (spectral_norm(v) > 10.0 * init_scale)
                throw Instability("integrate_nwave: solution norm blew up");
        history.frames.push_back(cur);
    }
    return history;
}

double zero_curvature_residual(const std::vector<std::vector<CMatrix>>& g,
                               const std::vector<std::vector<CMatrix>>& f,
                               double dx, double dt) {
    const int nt = int(g.size()) - 1;
    const int nx = int(g.front().size()) - 1;
    double worst = 0.0;
    for (int j = 1; j < nt; ++j) {
        for (int i = 1; i < nx; ++i) {
            const CMatrix gt =
                (g[size_t(j) + 1][size_t(i)] - g[size_t(j) - 1][size_t(i)]) /
                (2.0 * dt);
            const CMatrix fx =
                (f[size_t(j)][size_t(i) + 1] - f[size_t(j)][size_t(i) - 1]) /
                (2.0 * dx);
            const CMatrix& gg = g[size_t(j)][size_t(i)];
            const CMatrix& ff = f[size_t(j)][size_t(i)];
            const CMatrix defect = gt - fx + gg * ff - ff * gg;
            worst = std::max(worst, spectral_norm(defect));
        }
    }
    return worst;
}

double zero_curvature_residual_exact(
    const LaxPairDerivs& pair, Complex z,
    const std::vector<std::pair<double, double>>& points) {
    double worst = 0.0;
    for (const auto& [x, t] : points) {
        const CMatrix g = pair.G(x, t, z);
        const CMatrix f = pair.F(x, t, z);
        const CMatrix defect = pair.Gt(x, t, z) - pair.Fx(x, t, z) +
                               g * f - f * g;
        worst = std::max(worst, spectral_norm(defect));
    }
    return worst;
}

std::vector<std::vector<CMatrix>> sample_field(
    const std::function<CMatrix(double, double)>& fn, const StripGrid& grid) {
    std::vector<std::vector<CMatrix>> out(size_t(grid.nt) + 1);
    for (int j = 0; j <= grid.nt; ++j) {
        out[size_t(j)].reserve(size_t(grid.nx) + 1);
        for (int i = 0; i <= grid.nx; ++i)
            out[size_t(j)].push_back(fn(i * grid.dx(), j * grid.dt()));
    }
    return out;
}

double l2_mass(const FieldHistory& history, int frame) {
    const auto& row = history.frames[size_t(frame)];
    const double dx = history.grid.dx();
    double acc = 0.0;
    for (size_t i = 0; i < row.size(); ++i) {
        const double w = (i == 0 || i + 1 == row.size()) ? 0.5 : 1.0;
        const double f = frobenius_norm(row[i]);
        acc += w * f * f * dx;
    }
    return acc;
}

}  // namespace weylstrip
