#include "weylstrip/experiment.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <vector>

#include "CLI11.hpp"

#include "weylstrip/dnls.hpp"
#include "weylstrip/jets.hpp"
#include "weylstrip/nwave.hpp"
#include "weylstrip/parallel.hpp"
#include "weylstrip/pde_lab.hpp"
#include "weylstrip/rng.hpp"
#include "weylstrip/weyl_disks.hpp"

namespace weylstrip {

namespace {

// ---------------------------------------------------------------- helpers

std::string fmt_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

Complex parse_complex(const Json& j, const std::string& where) {
    if (!j.is_array() || j.size() != 2 || !j[0].is_number() ||
        !j[1].is_number())
        throw ConfigError(where + ": complex values are [re, im] pairs");
    return Complex(j[0].get<double>(), j[1].get<double>());
}

std::vector<Complex> parse_zgrid(const Json& j, const std::string& where) {
    if (!j.is_array() || j.empty())
        throw ConfigError(where + ": non-empty array required");
    std::vector<Complex> out;
    for (size_t i = 0; i < j.size(); ++i)
        out.push_back(parse_complex(j[i], where + "[" + std::to_string(i) + "]"));
    return out;
}

Json complex_to_json(Complex z) { return Json::array({z.real(), z.imag()}); }

Json matrix_to_json(const CMatrix& m) {
    Json rows = Json::array();
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        Json row = Json::array();
        for (Eigen::Index c = 0; c < m.cols(); ++c)
            row.push_back(complex_to_json(m(r, c)));
        rows.push_back(row);
    }
    return rows;
}

void reject_unknown(const Json& obj, const std::set<std::string>& allowed,
                    const std::string& where) {
    for (auto it = obj.begin(); it != obj.end(); ++it)
        if (!allowed.count(it.key()))
            throw ConfigError(where + ": unknown field '" + it.key() + "'");
}

double get_number(const Json& obj, const std::string& key, double fallback) {
    if (!obj.contains(key)) return fallback;
    if (!obj[key].is_number())
        throw ConfigError("'" + key + "' must be a number");
    return obj[key].get<double>();
}

int get_int(const Json& obj, const std::string& key, int fallback) {
    if (!obj.contains(key)) return fallback;
    if (!obj[key].is_number_integer())
        throw ConfigError("'" + key + "' must be an integer");
    return obj[key].get<int>();
}

struct CsvBuilder {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    std::string str() const {
        std::string out;
        for (size_t i = 0; i < header.size(); ++i)
            out += (i ? "," : "") + header[i];
        out += "\n";
        for (const auto& row : rows) {
            for (size_t i = 0; i < row.size(); ++i)
                out += (i ? "," : "") + row[i];
            out += "\n";
        }
        return out;
    }
};

void append_matrix_columns(CsvBuilder& csv, const std::string& prefix,
                           int rows, int cols) {
    for (const char* part : {"re", "im"})
        for (int r = 0; r < rows; ++r)
            for (int c = 0; c < cols; ++c)
                csv.header.push_back(prefix + "_" + part + "_" +
                                     std::to_string(r) + "_" +
                                     std::to_string(c));
}

void append_matrix_values(std::vector<std::string>& row, const CMatrix& m) {
    for (Eigen::Index r = 0; r < m.rows(); ++r)
        for (Eigen::Index c = 0; c < m.cols(); ++c)
            row.push_back(fmt_double(m(r, c).real()));
    for (Eigen::Index r = 0; r < m.rows(); ++r)
        for (Eigen::Index c = 0; c < m.cols(); ++c)
            row.push_back(fmt_double(m(r, c).imag()));
}

void sort_by_z(std::vector<size_t>& order, const std::vector<Complex>& zs) {
    std::sort(order.begin(), order.end(), [&](size_t a, size_t b) {
        if (zs[a].real() != zs[b].real()) return zs[a].real() < zs[b].real();
        return zs[a].imag() < zs[b].imag();
    });
}

// ------------------------------------------------------ potential parsing

DiracPotential parse_potential(const Json& j, std::uint64_t seed) {
    reject_unknown(j, {"family", "amplitude", "wavenumber", "value", "bound",
                       "m1", "m2", "modes"},
                   "potential");
    if (!j.contains("family") || !j["family"].is_string())
        throw ConfigError("potential.family: string required");
    const std::string family = j["family"].get<std::string>();
    if (family == "zero") {
        return DiracPotential::zero(
            BlockSplit::make(get_int(j, "m1", 1), get_int(j, "m2", 1)));
    }
    if (family == "constant") {
        if (!j.contains("value"))
            throw ConfigError("potential.value required for 'constant'");
        CMatrix v(1, 1);
        v(0, 0) = parse_complex(j["value"], "potential.value");
        return DiracPotential::constant(v);
    }
    if (family == "cw") {
        return DiracPotential::cw_slice(get_number(j, "amplitude", 0.5),
                                        get_number(j, "wavenumber", 1.0));
    }
    if (family == "random") {
        Rng rng(seed);
        return DiracPotential::random_smooth(
            rng, BlockSplit::make(get_int(j, "m1", 1), get_int(j, "m2", 1)),
            get_number(j, "bound", 1.0), get_int(j, "modes", 3));
    }
    throw ConfigError("potential.family: unknown family '" + family + "'");
}

// ------------------------------------------------------------ experiments

Json run_weyl_estimate(const Json& cfg, int threads, CsvBuilder& csv) {
    const auto zgrid = parse_zgrid(cfg.at("z_grid"), "z_grid");
    const std::uint64_t seed = std::uint64_t(get_int(cfg, "seed", 0));
    const DiracPotential pot = parse_potential(cfg.at("potential"), seed);
    WeylEstimateOptions opt;
    opt.tol = get_number(cfg, "ball_tol", 1e-9);
    opt.ode_tol = get_number(cfg, "ode_tol", 1e-11);
    opt.x_max = get_number(cfg, "x_max", 1e9);
    opt.with_integral = cfg.value("with_integral", false);

    std::vector<WeylEstimate> estimates(zgrid.size());
    parallel_for(int(zgrid.size()), threads, [&](int i) {
        estimates[size_t(i)] = estimate_weyl(pot, zgrid[size_t(i)], opt);
    });

    std::vector<size_t> order(zgrid.size());
    for (size_t i = 0; i < order.size(); ++i) order[i] = i;
    sort_by_z(order, zgrid);

    csv.header = {"z_re", "z_im"};
    append_matrix_columns(csv, "phi", pot.split.bottom, pot.split.top);
    csv.header.push_back("error_bound");
    csv.header.push_back("x_max_used");

    Json results = Json::array();
    for (size_t idx : order) {
        const WeylEstimate& est = estimates[idx];
        Json r;
        r["z"] = complex_to_json(est.z);
        r["phi"] = matrix_to_json(est.value);
        r["error_bound"] = est.error_bound;
        r["x_max_used"] = est.x_used;
        if (opt.with_integral) r["weyl_integral"] = est.weyl_integral;
        results.push_back(r);

        std::vector<std::string> row{fmt_double(est.z.real()),
                                     fmt_double(est.z.imag())};
        append_matrix_values(row, est.value);
        row.push_back(fmt_double(est.error_bound));
        row.push_back(fmt_double(est.x_used));
        csv.rows.push_back(row);
    }
    Json out;
    out["results"] = results;
    out["checks"]["contractive"] = true;
    for (const auto& est : estimates)
        if (spectral_norm(est.value) > 1.0 + est.error_bound)
            out["checks"]["contractive"] = false;
    return out;
}

Json run_dnls_evolve(const Json& cfg, int threads, CsvBuilder& csv) {
    const auto zgrid = parse_zgrid(cfg.at("z_grid"), "z_grid");
    const Json& cw_cfg = cfg.at("cw");
    reject_unknown(cw_cfg, {"amplitude", "wavenumber"}, "cw");
    const CWSolution cw = CWSolution::make(get_number(cw_cfg, "amplitude", 0.5),
                                           get_number(cw_cfg, "wavenumber", 1.0));
    ConsistencyOptions opt;
    opt.ball_tol = get_number(cfg, "ball_tol", 1e-9);
    opt.ode_tol = get_number(cfg, "ode_tol", 1e-11);
    opt.strip_height = get_number(cfg, "strip_height", 4.0);
    opt.threads = threads;
    const double t = get_number(cfg, "t", 1.0);
    const double assert_dev = get_number(cfg, "max_deviation_assert", 1e-5);

    const ConsistencyReport report = evolution_consistency(cw, zgrid, t, opt);

    std::vector<size_t> order(report.rows.size());
    for (size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::vector<Complex> zs;
    for (const auto& row : report.rows) zs.push_back(row.z);
    sort_by_z(order, zs);

    csv.header = {"z_re", "z_im", "deviation", "bound_initial", "bound_direct"};
    Json results = Json::array();
    for (size_t idx : order) {
        const ConsistencyRow& row = report.rows[idx];
        Json r;
        r["z"] = complex_to_json(row.z);
        r["deviation"] = row.deviation;
        r["bound_initial"] = row.bound_initial;
        r["bound_direct"] = row.bound_direct;
        results.push_back(r);
        csv.rows.push_back({fmt_double(row.z.real()), fmt_double(row.z.imag()),
                            fmt_double(row.deviation),
                            fmt_double(row.bound_initial),
                            fmt_double(row.bound_direct)});
    }
    Json out;
    out["results"] = results;
    out["max_deviation"] = report.max_deviation;
    out["checks"]["max_deviation"] = (report.max_deviation <= assert_dev);
    return out;
}

Json run_recover_boundary(const Json& cfg, int, CsvBuilder& csv) {
    const Json& init = cfg.at("initial");
    reject_unknown(init, {"family", "amplitude", "wavenumber"}, "initial");
    const std::string family = init.value("family", "cw");
    const double amp = get_number(init, "amplitude", 0.5);
    const double k = get_number(init, "wavenumber", 1.0);
    const int r = get_int(cfg, "r", 6);
    const int order = get_int(cfg, "order", 2 * r + 1);

    XJet jet;
    std::function<Complex(int)> oracle_b;  // closed-form b_k when available
    Complex bx_factor = 0.0;
    if (family == "cw") {
        jet = XJet::scalar_exponential(amp, iu * k, order);
        const double omega = (k * k + 2.0 * amp * amp) / 2.0;
        oracle_b = [amp, omega](int kk) {
            return amp * std::pow(-iu * omega, kk);
        };
        bx_factor = iu * k;
    } else if (family == "constant") {
        jet = XJet::constant(CMatrix(amp * CMatrix::Identity(1, 1)), order);
        oracle_b = [amp](int kk) { return amp * std::pow(-iu * amp * amp, kk); };
        bx_factor = 0.0;
    } else {
        throw ConfigError("initial.family: unknown family '" + family + "'");
    }

    const BoundaryJets jets = t_derivatives(jet, r);
    csv.header = {"k", "b_re", "b_im", "bx_re", "bx_im"};
    Json results = Json::array();
    double worst = 0.0;
    for (int kk = 0; kk <= r; ++kk) {
        const Complex b = jets.b[size_t(kk)](0, 0);
        const Complex bx = jets.bx[size_t(kk)](0, 0);
        const Complex expect = oracle_b(kk);
        worst = std::max(worst, std::abs(b - expect));
        worst = std::max(worst, std::abs(bx - bx_factor * expect));
        Json rj;
        rj["k"] = kk;
        rj["b"] = complex_to_json(b);
        rj["bx"] = complex_to_json(bx);
        results.push_back(rj);
        csv.rows.push_back({std::to_string(kk), fmt_double(b.real()),
                            fmt_double(b.imag()), fmt_double(bx.real()),
                            fmt_double(bx.imag())});
    }
    Json out;
    out["results"] = results;
    out["oracle_deviation"] = worst;
    out["checks"]["oracle"] = (worst <= 1e-8);
    if (cfg.contains("t_eval")) {
        Json evals = Json::array();
        for (const auto& tj : cfg["t_eval"]) {
            const double t = tj.get<double>();
            const TaylorBoundary tb = taylor_boundary(jets, t);
            Json e;
            e["t"] = t;
            e["v"] = complex_to_json(tb.v(0, 0));
            e["vx"] = complex_to_json(tb.vx(0, 0));
            evals.push_back(e);
        }
        out["taylor"] = evals;
    }
    return out;
}

struct TransportFamily {
    NWaveConfig cfg;
    double speed = 0.0;
    Complex amp;
    double center = 3.0, width = 1.0;

    Complex bump(double s) const {
        const double u = (s - center) / width;
        return amp * std::exp(-u * u);
    }
    CMatrix rho(double x, double t) const {
        CMatrix r(2, 2);
        const Complex g = bump(x + speed * t);
        r << Complex(0.3, 0), g, std::conj(g), Complex(0.1, 0);
        return r;
    }
};

RVector parse_diag(const Json& j, const std::string& name) {
    if (!j.is_array() || j.size() < 2)
        throw ConfigError("config." + name + ": need an array of >= 2 reals");
    RVector d(j.size());
    for (size_t i = 0; i < j.size(); ++i) {
        if (!j[i].is_number())
            throw ConfigError("config." + name + ": entries must be numbers");
        d(Eigen::Index(i)) = j[i].get<double>();
    }
    for (Eigen::Index i = 0; i < d.size(); ++i) {
        if (!(d(i) > 0.0))
            throw ConfigError("config." + name +
                              ": entries must be positive and strictly "
                              "decreasing; violated at index " +
                              std::to_string(i));
        if (i > 0 && !(d(i) < d(i - 1)))
            throw ConfigError("config." + name +
                              ": ordering violated at index " +
                              std::to_string(i) + " (entries must strictly "
                              "decrease)");
    }
    return d;
}

Json run_nwave_evolve(const Json& cfg, int threads, CsvBuilder& csv) {
    const Json& sys = cfg.at("config");
    reject_unknown(sys, {"d", "dhat", "amplitude"}, "config");
    const RVector d = parse_diag(sys.at("d"), "d");
    const RVector dhat = parse_diag(sys.at("dhat"), "dhat");
    if (d.size() != 2)
        throw ConfigError("config.d: the closed-form family is 2x2");
    const double amp_mag = get_number(sys, "amplitude", 0.05);

    TransportFamily fam;
    fam.amp = amp_mag * Complex(1.0, 0.3);
    const double m0 = (d(0) - d(1)) * std::abs(fam.amp);
    const double mhat = (dhat(0) - dhat(1)) * std::abs(fam.amp);
    fam.cfg = NWaveConfig::make(d, dhat, m0, 2.2 * m0 + 0.02, mhat);
    fam.speed = (dhat(0) - dhat(1)) / (d(0) - d(1));

    const auto zgrid = parse_zgrid(cfg.at("z_grid"), "z_grid");
    for (const Complex z : zgrid)
        if (!(z.imag() < -fam.cfg.m_bound))
            throw ConfigError("z_grid: Im z must lie below -M = " +
                              fmt_double(-fam.cfg.m_bound));
    const double t = get_number(cfg, "t", 0.5);
    const double ode_tol = get_number(cfg, "ode_tol", 1e-11);
    const double support = fam.center + 6.5 * fam.width;

    auto zeta0 = [&fam](double x) {
        return build_zeta(fam.cfg.d, fam.rho(x, 0.0));
    };
    auto rho_hat = [&fam](double t_) { return fam.rho(0.0, t_); };

    struct Row {
        Complex z;
        CMatrix phi0, phi_t;
        double growth = 0.0, bounded = 0.0;
    };
    std::vector<Row> rows(zgrid.size());
    parallel_for(int(zgrid.size()), threads, [&](int i) {
        const Complex z = zgrid[size_t(i)];
        const PsiMatrix psi0 = psi_limit(fam.cfg, zeta0, z, 1, support, 1e-10,
                                         ode_tol);
        const NWaveEvolution evo = propagate_Rhat(fam.cfg, rho_hat, t, z, ode_tol);
        Row row;
        row.z = z;
        row.phi0 = weyl_columns({psi0});
        row.phi_t = evolve_nwave(fam.cfg, row.phi0, evo);
        row.growth = evolution_growth_stat(fam.cfg, evo, psi0);
        row.bounded = gw_boundedness_stat(fam.cfg, evo, row.phi0);
        rows[size_t(i)] = row;
    });

    std::vector<size_t> order(zgrid.size());
    for (size_t i = 0; i < order.size(); ++i) order[i] = i;
    sort_by_z(order, zgrid);

    const int m = fam.cfg.size();
    csv.header = {"z_re", "z_im"};
    append_matrix_columns(csv, "phi0", m, m);
    append_matrix_columns(csv, "phi_t", m, m);
    csv.header.push_back("growth_stat");
    csv.header.push_back("bounded_stat");

    Json results = Json::array();
    bool growth_ok = true;
    for (size_t idx : order) {
        const Row& row = rows[idx];
        Json r;
        r["z"] = complex_to_json(row.z);
        r["phi0"] = matrix_to_json(row.phi0);
        r["phi_t"] = matrix_to_json(row.phi_t);
        r["growth_stat"] = row.growth;
        r["bounded_stat"] = row.bounded;
        results.push_back(r);
        growth_ok = growth_ok && row.growth <= 2.0 + 1e-8;

        std::vector<std::string> line{fmt_double(row.z.real()),
                                      fmt_double(row.z.imag())};
        append_matrix_values(line, row.phi0);
        append_matrix_values(line, row.phi_t);
        line.push_back(fmt_double(row.growth));
        line.push_back(fmt_double(row.bounded));
        csv.rows.push_back(line);
    }
    Json out;
    out["results"] = results;
    out["checks"]["growth_bound"] = growth_ok;
    return out;
}

// ---------------------------------------------------------- verify suites

Json suite_matrix(std::uint64_t seed) {
    Rng rng(seed ^ 0xa1);
    double worst = 0.0;
    for (int i = 0; i < 10; ++i) {
        const int n = 2 + int(rng.next() % 3);
        const CMatrix x = rng.matrix(n, n);
        const CMatrix root = x * x.adjoint();
        const CMatrix a = root * root;
        worst = std::max(worst,
                         frobenius_norm(CMatrix(herm_sqrt(a) * herm_sqrt(a) - a)) /
                             std::max(1.0, frobenius_norm(a)));
        CMatrix g = rng.matrix(n, n, 1.2);
        worst = std::max(
            worst, frobenius_norm(CMatrix(expm(g) * expm(CMatrix(-g)) -
                                          identity(n))));
    }
    Json out;
    out["max_defect"] = worst;
    out["pass"] = worst <= 1e-10;
    return out;
}

Json suite_dirac(std::uint64_t seed) {
    Rng rng(seed ^ 0xd1);
    double worst = 0.0;
    for (int trial = 0; trial < 6; ++trial) {
        const BlockSplit split =
            trial == 5 ? BlockSplit::make(2, 1) : BlockSplit::make(1, 1);
        auto pot = DiracPotential::random_smooth(rng, split, 2.0);
        const CMatrix j = signature_matrix(split);
        for (double zr : {0.7, 2.0}) {
            const Propagation p = propagate_u(pot, 5.0, Complex(zr, 0), 1e-12);
            worst = std::max(worst,
                             frobenius_norm(CMatrix(p.u.adjoint() * j * p.u - j)));
        }
    }
    Json out;
    out["max_defect"] = worst;
    out["pass"] = worst <= 1e-8;
    return out;
}

Json suite_disks(std::uint64_t seed) {
    Rng rng(seed ^ 0x5d);
    const auto pot = DiracPotential::cw_slice(0.5, 1.0);
    Propagation p = propagate_u(pot, 1.0, iu, 1e-12);
    WeylDisk prev = disk_from_u(p.u, pot.split, 1.0, iu);
    bool ok = true;
    double min_margin = 0.0;
    for (double x : {2.0, 4.0}) {
        p = extend_u(pot, p, x, 1e-12);
        const WeylDisk disk = disk_from_u(p.u, pot.split, x, iu);
        ok = ok && spectral_norm(disk.r_left) <=
                       spectral_norm(prev.r_left) + 1e-12;
        for (int i = 0; i < 60; ++i) {
            const CMatrix phi = disk.point(rng.contraction(1, 1, rng.uniform()));
            min_margin = std::min(min_margin, prev.membership_margin(phi));
        }
        prev = disk;
    }
    const auto zero = DiracPotential::zero(BlockSplit::make(1, 1));
    const Propagation q = propagate_u(zero, 4.0, iu, 1e-12);
    const WeylDisk free_disk = disk_from_u(q.u, zero.split, 4.0, iu);
    const double decay_err =
        std::abs(free_disk.r_left(0, 0).real() - std::exp(-4.0));
    Json out;
    out["min_margin"] = min_margin;
    out["decay_defect"] = decay_err;
    out["pass"] = ok && min_margin >= -1e-8 && decay_err <= 1e-8;
    return out;
}

Json suite_jets(std::uint64_t) {
    const double a = 0.5, k = 1.0;
    const double omega = (k * k + 2.0 * a * a) / 2.0;
    const BoundaryJets jets =
        t_derivatives(XJet::scalar_exponential(a, iu * k, 11), 5);
    double worst = 0.0;
    for (int kk = 0; kk <= 5; ++kk) {
        const Complex expect = a * std::pow(-iu * omega, kk);
        worst = std::max(worst, std::abs(jets.b[size_t(kk)](0, 0) - expect));
        worst = std::max(worst,
                         std::abs(jets.bx[size_t(kk)](0, 0) - iu * k * expect));
    }
    bool raised = false;
    try {
        t_derivatives(XJet::scalar_exponential(a, iu * k, 10), 5);
    } catch (const InsufficientOrder&) {
        raised = true;
    }
    Json out;
    out["max_defect"] = worst;
    out["order_budget_enforced"] = raised;
    out["pass"] = worst <= 1e-9 && raised;
    return out;
}

Json suite_nwave(std::uint64_t seed) {
    Rng rng(seed ^ 0x4e);
    double worst = 0.0;
    for (int trial = 0; trial < 20; ++trial) {
        const int m = trial % 2 ? 3 : 4;
        CMatrix phi = CMatrix::Identity(m, m);
        for (int i = 0; i < m; ++i)
            for (int j = i + 1; j < m; ++j) phi(i, j) = rng.complex_in_disc(0.9);
        std::vector<PsiMatrix> blocks;
        for (int k = 1; k < m; ++k)
            blocks.push_back(psi_from_phi(phi, k, Complex(0, -2)));
        worst = std::max(worst,
                         frobenius_norm(CMatrix(weyl_columns(blocks) - phi)));
    }
    bool structure = true;
    for (int trial = 0; trial < 10; ++trial) {
        const CMatrix raw = rng.matrix(3, 3) + 2.0 * identity(3);
        const CMatrix phi0 = normalize_gw(raw);
        for (int i = 0; i < 3; ++i) {
            structure = structure && std::abs(phi0(i, i) - Complex(1, 0)) <= 1e-12;
            for (int j = 0; j < i; ++j)
                structure = structure && std::abs(phi0(i, j)) <= 1e-12;
        }
    }
    Json out;
    out["roundtrip_defect"] = worst;
    out["normalization_structure"] = structure;
    out["pass"] = worst <= 1e-12 && structure;
    return out;
}

Json suite_dnls(std::uint64_t) {
    ConsistencyOptions opt;
    opt.ball_tol = 1e-9;
    opt.ode_tol = 1e-11;
    const ConsistencyReport rep = evolution_consistency(
        CWSolution::make(0.5, 1.0), {Complex(0, 1)}, 0.5, opt);
    const double fact = factorization_residual(
        dirac_lax(Field2D::from_cw(CWSolution::make(0.5, 1.0))), iu, 1.0, 0.5,
        1e-10);
    Json out;
    out["max_deviation"] = rep.max_deviation;
    out["factorization_residual"] = fact;
    out["pass"] = rep.max_deviation <= 1e-5 && fact <= 1e-7;
    return out;
}

Json run_verify(const Json& cfg, int, CsvBuilder& csv) {
    const std::uint64_t seed = std::uint64_t(get_int(cfg, "seed", 0));
    std::vector<std::string> wanted;
    if (cfg.contains("suites")) {
        for (const auto& s : cfg["suites"]) wanted.push_back(s.get<std::string>());
    } else {
        wanted = {"all"};
    }
    const std::map<std::string, Json (*)(std::uint64_t)> table = {
        {"matrix", suite_matrix}, {"dirac", suite_dirac},
        {"disks", suite_disks},   {"jets", suite_jets},
        {"nwave", suite_nwave},   {"dnls", suite_dnls}};
    std::vector<std::string> names;
    for (const auto& w : wanted) {
        if (w == "all") {
            for (const auto& [name, fn] : table) names.push_back(name);
        } else if (table.count(w)) {
            names.push_back(w);
        } else {
            throw ConfigError("verify: unknown suite '" + w + "'");
        }
    }
    std::sort(names.begin(), names.end());
    names.erase(std::unique(names.begin(), names.end()), names.end());

    csv.header = {"suite", "pass"};
    Json suites;
    for (const auto& name : names) {
        const Json result = table.at(name)(seed);
        suites[name] = result;
        csv.rows.push_back({name, result["pass"].get<bool>() ? "1" : "0"});
    }
    Json out;
    out["suites"] = suites;
    for (const auto& name : names)
        out["checks"][name] = suites[name]["pass"].get<bool>();
    return out;
}

// ------------------------------------------------------------- dispatcher

const std::map<std::string, std::set<std::string>> kAllowedKeys = {
    {"weyl-estimate",
     {"kind", "seed", "potential", "z_grid", "ball_tol", "ode_tol", "x_max",
      "with_integral"}},
    {"dnls-evolve",
     {"kind", "seed", "cw", "t", "z_grid", "ball_tol", "ode_tol",
      "strip_height", "max_deviation_assert"}},
    {"recover-boundary", {"kind", "seed", "initial", "r", "order", "t_eval"}},
    {"nwave-evolve", {"kind", "seed", "config", "t", "z_grid", "ode_tol"}},
    {"verify", {"kind", "seed", "suites"}},
};

}  // namespace

Json load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path);
    Json config;
    try {
        in >> config;
    } catch (const Json::parse_error& e) {
        throw ConfigError(std::string("config parse error: ") + e.what());
    }
    return config;
}

void validate_config(const Json& config) {
    if (!config.is_object())
        throw ConfigError("config must be a JSON object");
    if (!config.contains("kind") || !config["kind"].is_string())
        throw ConfigError("config.kind: string required");
    const std::string kind = config["kind"].get<std::string>();
    auto it = kAllowedKeys.find(kind);
    if (it == kAllowedKeys.end())
        throw ConfigError("config.kind: unknown kind '" + kind + "'");
    reject_unknown(config, it->second, "config");
    if (config.contains("seed") && !config["seed"].is_number_integer())
        throw ConfigError("config.seed: integer required");
}

RunResult run_experiment(const Json& config, int threads) {
    RunResult result;
    const auto t0 = std::chrono::steady_clock::now();
    try {
        validate_config(config);
    } catch (const ConfigError& e) {
        result.exit_code = 2;
        result.all_pass = false;
        result.failing_stage = "config";
        result.report["error"] = e.what();
        return result;
    }

    const std::string kind = config["kind"].get<std::string>();
    const int workers = thread_count(threads);
    CsvBuilder csv;
    Json body;
    try {
        if (kind == "weyl-estimate") {
            body = run_weyl_estimate(config, workers, csv);
        } else if (kind == "dnls-evolve") {
            body = run_dnls_evolve(config, workers, csv);
        } else if (kind == "recover-boundary") {
            body = run_recover_boundary(config, workers, csv);
        } else if (kind == "nwave-evolve") {
            body = run_nwave_evolve(config, workers, csv);
        } else {
            body = run_verify(config, workers, csv);
        }
    } catch (const ConfigError& e) {
        result.exit_code = 2;
        result.all_pass = false;
        result.failing_stage = "config";
        result.report["error"] = e.what();
        return result;
    } catch (const Error& e) {
        result.exit_code = 3;
        result.all_pass = false;
        result.failing_stage = kind;
        result.report["error"] = e.what();
        result.report["failing_stage"] = kind;
        return result;
    }
    const auto t1 = std::chrono::steady_clock::now();

    result.report["schema"] = "weylstrip-report-v1";
    result.report["kind"] = kind;
    result.report["config"] = config;
    result.report.update(body);
    bool all_pass = true;
    if (result.report.contains("checks"))
        for (const auto& [key, val] : result.report["checks"].items())
            all_pass = all_pass && val.get<bool>();
    result.report["all_pass"] = all_pass;
    result.all_pass = all_pass;
    if (!all_pass) {
        result.exit_code = 3;
        for (const auto& [key, val] : result.report["checks"].items())
            if (!val.get<bool>()) result.failing_stage = kind + "." + key;
    }
    result.csv = csv.str();
    result.csv_name = kind + ".csv";
    result.timings["compute_ms"] =
        std::chrono::duration<double, std::milli>(t1 - t0).count();
    result.timings["threads"] = workers;
    return result;
}

void write_outputs(const RunResult& result, const std::string& out_dir) {
    namespace fs = std::filesystem;
    fs::create_directories(out_dir);
    {
        std::ofstream out(fs::path(out_dir) / "report.json");
        out << result.report.dump(2) << "\n";
    }
    if (!result.csv_name.empty()) {
        std::ofstream out(fs::path(out_dir) / result.csv_name);
        out << result.csv;
    }
    {
        std::ofstream out(fs::path(out_dir) / "timings.json");
        out << result.timings.dump(2) << "\n";
    }
}

int run_cli(int argc, char** argv) {
    CLI::App app{"Weyl function laboratory for canonical auxiliary systems"};
    app.set_version_flag("--version", std::string(kVersion));

    std::string out_dir = "out";
    int threads = 0;
    app.add_option("--out", out_dir, "output directory");
    app.add_option("--threads", threads,
                   "worker count (WEYLSTRIP_THREADS as fallback)");

    std::string config_path;
    CLI::App* run = app.add_subcommand("run", "run an experiment config");
    run->add_option("config", config_path, "config file (JSON)")->required();

    std::string suite = "all";
    long long seed = 0;
    CLI::App* verify = app.add_subcommand("verify", "run validation suites");
    verify->add_option("--suite", suite, "suite name (default: all)");
    verify->add_option("--seed", seed, "seed for randomized suites");

    app.require_subcommand(0, 1);
    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    }

    Json config;
    if (run->parsed()) {
        try {
            config = load_config(config_path);
        } catch (const ConfigError& e) {
            std::fprintf(stderr, "config error: %s\n", e.what());
            return 2;
        }
    } else if (verify->parsed()) {
        config["kind"] = "verify";
        config["seed"] = seed;
        config["suites"] = Json::array({suite});
    } else {
        std::fprintf(stderr, "nothing to do; see --help\n");
        return 2;
    }

    const RunResult result = run_experiment(config, threads);
    if (result.exit_code == 2) {
        std::fprintf(stderr, "config error: %s\n",
                     result.report.value("error", std::string("invalid")).c_str());
        return 2;
    }
    write_outputs(result, out_dir);
    if (result.exit_code != 0) {
        std::fprintf(stderr, "failed stage: %s\n", result.failing_stage.c_str());
        return result.exit_code;
    }
    return 0;
}

}  // namespace weylstrip
