#include "vgtree/cli.hpp"

#include "vgtree/errors.hpp"
#include "vgtree/estimation.hpp"
#include "vgtree/lattice.hpp"
#include "vgtree/pide_fd.hpp"
#include "vgtree/reference.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <atomic>
#include <charconv>
#include <chrono>
#include <cstdio>
#include <fstream>
#include <functional>
#include <iostream>
#include <optional>
#include <sstream>
#include <thread>

namespace vgtree::cli {
namespace {

using Json = nlohmann::ordered_json;

// Table 1 defaults.
struct ModelFlags {
    double rate = 0.06;
    double theta = -0.1;
    double sigma = 0.2;
    double kappa = 0.2;

    VgParams params() const { return {theta, sigma, kappa, rate}; }
};

void add_model_flags(CLI::App* cmd, ModelFlags& m) {
    cmd->add_option("--rate", m.rate, "risk-free rate")->capture_default_str();
    cmd->add_option("--theta", m.theta, "VG drift theta")->capture_default_str();
    cmd->add_option("--sigma", m.sigma, "VG volatility sigma (also the Black-Scholes sigma)")->capture_default_str();
    cmd->add_option("--kappa", m.kappa, "VG variance rate kappa")->capture_default_str();
}

std::string fixed4(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.4f", v);
    return buf;
}

std::string general(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.10g", v);
    return buf;
}

// Evaluates tasks on up to `threads` workers; results keep task order.
template <typename Row>
std::vector<Row> run_rows(const std::vector<std::function<Row()>>& tasks, int threads) {
    std::vector<Row> rows(tasks.size());
    std::vector<std::exception_ptr> errors(tasks.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < tasks.size(); i = next++) {
            try {
                rows[i] = tasks[i]();
            } catch (...) {
                errors[i] = std::current_exception();
            }
        }
    };
    const int n = std::clamp(threads, 1, static_cast<int>(std::max<std::size_t>(tasks.size(), 1)));
    std::vector<std::thread> pool;
    for (int t = 1; t < n; ++t) pool.emplace_back(worker);
    worker();
    for (auto& th : pool) th.join();
    for (const auto& e : errors) {
        if (e) std::rethrow_exception(e);
    }
    return rows;
}

Json residual_json(const MomentResidual& r) {
    return Json{{"model_variance", r.model_variance},   {"model_skewness", r.model_skewness},
                {"model_kurtosis", r.model_kurtosis},   {"variance_error", r.variance_error},
                {"skewness_error", r.skewness_error},   {"kurtosis_error", r.kurtosis_error}};
}

// ---------------------------------------------------------------- price

struct PriceFlags {
    std::string method = "tree";
    std::string style;
    std::string type;
    double s0 = 0.0;
    double strike = 0.0;
    double maturity = 0.0;
    int steps = 2000;
    ModelFlags model;
    std::optional<double> h;
    std::optional<double> x_min;
    std::optional<double> x_max;
    double half_width = 10.0;
    double quad_half_width = 12.0;
    double quad_tolerance = 1e-8;
    bool timing = false;
};

int cmd_price(const PriceFlags& f, std::ostream& out) {
    const auto start = std::chrono::steady_clock::now();
    OptionSpec spec;
    spec.spot = f.s0;
    spec.strike = f.strike;
    spec.maturity = f.maturity;
    spec.type = f.type == "call" ? OptionType::Call : OptionType::Put;
    spec.style = f.style == "am" ? ExerciseStyle::American : ExerciseStyle::European;
    const VgParams params = f.model.params();

    Json doc;
    doc["command"] = "price";
    doc["method"] = f.method;
    doc["inputs"] = Json{{"s0", f.s0},           {"strike", f.strike},     {"maturity", f.maturity},
                         {"type", to_string(spec.type)}, {"style", to_string(spec.style)}, {"rate", params.r},
                         {"theta", params.theta}, {"sigma", params.sigma}, {"kappa", params.kappa}};

    if (f.method == "tree") {
        const LatticeResult res = price_lattice_detailed(spec, params, LatticeConfig{f.steps, 0.0});
        doc["inputs"]["steps"] = f.steps;
        doc["price"] = res.price;
        doc["metadata"] = Json{{"n_steps", f.steps},
                               {"dt", res.dt},
                               {"omega", res.omega},
                               {"alpha", res.step.alpha},
                               {"u", res.step.u},
                               {"d", res.step.d},
                               {"probabilities", res.probabilities.p}};
    } else if (f.method == "fd") {
        GridConfig grid = default_grid(spec, params, f.steps, f.h, f.half_width);
        if (f.x_min || f.x_max) {
            const double h = grid.h();
            grid.x_min = f.x_min.value_or(grid.x_min);
            const double x_max = f.x_max.value_or(grid.x_max);
            if (!(x_max > grid.x_min)) throw DomainError("fd: --x-max must exceed --x-min");
            grid.n_space = std::max(4, static_cast<int>(std::ceil((x_max - grid.x_min) / h)));
            grid.x_max = grid.x_min + grid.n_space * h;
        }
        const FdResult res = price_fd_detailed(spec, params, grid);
        const FdCoefficients& c = res.coefficients;
        doc["inputs"]["steps"] = f.steps;
        doc["price"] = res.price;
        doc["metadata"] = Json{
            {"omega", martingale_correction(params)},
            {"alpha", 0.5 * lattice_step(params, grid.dt(spec.maturity))},
            {"grid", Json{{"x_min", grid.x_min}, {"x_max", grid.x_max}, {"n_space", grid.n_space},
                          {"n_time", grid.n_time}, {"h", grid.h()}, {"dt", grid.dt(spec.maturity)}}},
            {"coefficients", Json{{"p_plus_2h", c.p_plus_2h}, {"p_plus_h", c.p_plus_h}, {"p_0", c.p_0},
                                  {"p_minus_h", c.p_minus_h}, {"p_minus_2h", c.p_minus_2h},
                                  {"r_factor", c.r_factor}}},
            {"all_nonnegative", c.all_nonnegative()},
            {"boundary_mismatch", res.boundary_mismatch},
            {"warnings", res.warnings}};
    } else {
        if (spec.style != ExerciseStyle::European) throw UnsupportedError("quadrature supports European only");
        QuadratureConfig q;
        q.half_width_sd = f.quad_half_width;
        q.tolerance = f.quad_tolerance;
        doc["price"] = quadrature_european_price(spec, params, q);
        doc["metadata"] = Json{{"omega", martingale_correction(params)},
                               {"half_width_sd", q.half_width_sd},
                               {"tolerance", q.tolerance}};
    }

    if (f.timing) {
        const std::chrono::duration<double> wall = std::chrono::steady_clock::now() - start;
        doc["wall_time_s"] = wall.count();
    }
    out << doc.dump(2) << '\n';
    return kExitOk;
}

// ---------------------------------------------------------------- table

struct TableFlags {
    std::string which;
    int steps = 2000;
    double strike = 40.0;
    std::string output;
    int threads = 1;
    ModelFlags model;
};

std::string european_table(const TableFlags& f) {
    const VgParams params = f.model.params();
    const std::vector<double> spots = {36, 38, 40, 42, 44};
    std::vector<std::function<std::array<double, 4>()>> tasks;
    for (double s0 : spots) {
        tasks.emplace_back([&, s0] {
            OptionSpec call{s0, f.strike, 1.0, OptionType::Call, ExerciseStyle::European};
            OptionSpec put = call;
            put.type = OptionType::Put;
            const LatticeConfig cfg{f.steps, 0.0};
            return std::array<double, 4>{quadrature_european_price(call, params), price_lattice(call, params, cfg),
                                         quadrature_european_price(put, params), price_lattice(put, params, cfg)};
        });
    }
    const auto rows = run_rows(tasks, f.threads);
    std::ostringstream csv;
    csv << "S0,quad_call,tree_call,quad_put,tree_put\n";
    for (std::size_t i = 0; i < spots.size(); ++i) {
        csv << general(spots[i]);
        for (double v : rows[i]) csv << ',' << fixed4(v);
        csv << '\n';
    }
    return csv.str();
}

std::string american_table(const TableFlags& f) {
    const VgParams params = f.model.params();
    std::vector<std::pair<double, double>> keys;
    for (double s0 : {36.0, 38.0, 40.0, 42.0, 44.0}) {
        for (double t : {1.0, 2.0}) keys.emplace_back(s0, t);
    }
    std::sort(keys.begin(), keys.end());
    std::vector<std::function<std::array<double, 4>()>> tasks;
    for (const auto& [s0, t] : keys) {
        tasks.emplace_back([&, s0, t] {
            OptionSpec eu{s0, f.strike, t, OptionType::Put, ExerciseStyle::European};
            OptionSpec am = eu;
            am.style = ExerciseStyle::American;
            const LatticeConfig cfg{f.steps, 0.0};
            return std::array<double, 4>{binomial_bs_price(eu, params.sigma, params.r, f.steps),
                                         price_lattice(eu, params, cfg),
                                         binomial_bs_price(am, params.sigma, params.r, f.steps),
                                         price_lattice(am, params, cfg)};
        });
    }
    const auto rows = run_rows(tasks, f.threads);
    std::ostringstream csv;
    csv << "S0,T,bs_eu_put,vg_eu_put,bs_am_put,vg_am_put\n";
    for (std::size_t i = 0; i < keys.size(); ++i) {
        csv << general(keys[i].first) << ',' << general(keys[i].second);
        for (double v : rows[i]) csv << ',' << fixed4(v);
        csv << '\n';
    }
    return csv.str();
}

int cmd_table(const TableFlags& f, std::ostream& out) {
    if (f.steps < 1) throw DomainError("--steps must be >= 1");
    if (f.threads < 1) throw DomainError("--threads must be >= 1");
    const std::string csv = f.which == "european" ? european_table(f) : american_table(f);
    if (f.output.empty()) {
        out << csv;
    } else {
        std::ofstream file(f.output, std::ios::binary);
        if (!file) throw DomainError("cannot open output file " + f.output);
        file << csv;
    }
    return kExitOk;
}

// ---------------------------------------------------------------- p3-curve

struct P3Flags {
    double kbar_min = 0.1;
    double kbar_max = 5.0;
    int points = 50;
    double dt = 1.0 / 2000.0;
    ModelFlags model;
};

int cmd_p3_curve(const P3Flags& f, std::ostream& out) {
    if (!(f.kbar_min > 0.0) || !(f.kbar_max > 0.0)) throw DomainError("excess kurtosis bounds must be > 0");
    if (f.kbar_max < f.kbar_min) throw DomainError("--kbar-max must be >= --kbar-min");
    if (f.points < 1) throw DomainError("--points must be >= 1");
    if (!(f.dt > 0.0)) throw DomainError("--dt must be > 0");
    std::vector<double> grid(static_cast<std::size_t>(f.points));
    for (int i = 0; i < f.points; ++i) {
        grid[i] = f.points == 1 ? f.kbar_min : f.kbar_min + (f.kbar_max - f.kbar_min) * i / (f.points - 1);
    }
    const double c2 = cumulants(f.model.params(), f.dt).c2;
    out << "kbar,p3_mm,p3_pde\n";
    for (const P3Point& p : p3_curve(grid, c2, f.dt)) {
        out << general(p.kbar) << ',' << general(p.p3_mm) << ',' << general(p.p3_pde) << '\n';
    }
    return kExitOk;
}

// ---------------------------------------------------------------- fit

struct FitFlags {
    std::string input;
    std::string column;
    bool prices = false;
    bool returns = false;
    int bins = 50;
    std::string density_out;
    std::string period_label = "period";
    std::optional<double> periods_per_unit;
};

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> cells;
    std::string cell;
    std::istringstream in(line);
    while (std::getline(in, cell, ',')) {
        while (!cell.empty() && (cell.back() == '\r' || cell.back() == ' ')) cell.pop_back();
        while (!cell.empty() && cell.front() == ' ') cell.erase(cell.begin());
        cells.push_back(cell);
    }
    if (!line.empty() && line.back() == ',') cells.emplace_back();
    return cells;
}

std::vector<double> read_column(const std::string& path, const std::string& column, std::string& column_name) {
    std::ifstream in(path);
    if (!in) throw DomainError("cannot read input file " + path);
    std::string line;
    if (!std::getline(in, line)) throw DomainError("input file is empty: " + path);
    const std::vector<std::string> header = split_csv_line(line);
    if (header.empty()) throw DomainError("input file has an empty header row");

    std::size_t index = header.size() - 1;
    if (!column.empty()) {
        const auto it = std::find(header.begin(), header.end(), column);
        if (it != header.end()) {
            index = static_cast<std::size_t>(it - header.begin());
        } else {
            std::size_t parsed = 0;
            const auto [ptr, ec] = std::from_chars(column.data(), column.data() + column.size(), parsed);
            if (ec != std::errc() || ptr != column.data() + column.size() || parsed >= header.size()) {
                throw DomainError("unknown column '" + column + "'");
            }
            index = parsed;
        }
    }
    column_name = header[index];

    std::vector<double> values;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line == "\r") continue;
        const std::vector<std::string> cells = split_csv_line(line);
        if (index >= cells.size()) throw DomainError("line " + std::to_string(line_no) + ": missing column");
        const std::string& cell = cells[index];
        double v = 0.0;
        const auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), v);
        if (ec != std::errc() || ptr != cell.data() + cell.size() || !std::isfinite(v)) {
            throw DomainError("line " + std::to_string(line_no) + ": not a number: '" + cell + "'");
        }
        values.push_back(v);
    }
    return values;
}

int cmd_fit(const FitFlags& f, std::ostream& out) {
    if (f.prices && f.returns) throw DomainError("--prices and --returns are mutually exclusive");
    if (f.bins < 1) throw DomainError("--bins must be >= 1");
    std::string column_name;
    const std::vector<double> raw = read_column(f.input, f.column, column_name);
    ReturnSeries series;
    if (f.prices) {
        series = log_returns_from_prices(raw, f.period_label);
    } else {
        series.values = raw;
        series.period_label = f.period_label;
    }
    if (series.values.size() < kMinFitLength) {
        throw DomainError("series too short: " + std::to_string(series.values.size()) + " observations, need " +
                          std::to_string(kMinFitLength));
    }

    const DensityOverlay overlay = density_overlay_table(series, f.bins);
    const SampleMoments& m = overlay.moments;

    Json doc;
    doc["command"] = "fit";
    doc["input"] = f.input;
    doc["column"] = column_name;
    doc["series"] = f.prices ? "prices" : "returns";
    doc["period_label"] = series.period_label;
    doc["sample_moments"] = Json{{"count", m.count},
                                 {"mean", m.mean},
                                 {"variance", m.variance},
                                 {"skewness", m.skewness},
                                 {"kurtosis", m.kurtosis}};
    doc["normal"] = Json{{"mu", overlay.normal.mu}, {"sigma", overlay.normal.sigma}};
    if (overlay.vg) {
        const VgFit& v = *overlay.vg;
        doc["model"] = "vg";
        doc["vg"] = Json{{"theta", v.theta},
                         {"sigma", v.sigma},
                         {"kappa", v.kappa},
                         {"drift", v.drift},
                         {"refined", v.refined},
                         {"iterations", v.iterations},
                         {"residual", residual_json(v.residual)},
                         {"small_theta", Json{{"theta", v.small_theta.theta},
                                              {"sigma", v.small_theta.sigma},
                                              {"kappa", v.small_theta.kappa},
                                              {"drift", v.small_theta.drift},
                                              {"residual", residual_json(v.small_theta_residual)}}}};
        if (f.periods_per_unit) {
            const double k = *f.periods_per_unit;
            if (!(k > 0.0)) throw DomainError("--periods-per-unit must be > 0");
            doc["annualized"] = Json{{"periods_per_unit", k},
                                     {"theta", v.theta * k},
                                     {"sigma", v.sigma * std::sqrt(k)},
                                     {"kappa", v.kappa / k},
                                     {"drift", v.drift * k}};
        }
    } else {
        doc["model"] = "normal";
        doc["fallback_reason"] = overlay.vg_fallback_reason;
    }

    if (!f.density_out.empty()) {
        std::ofstream file(f.density_out, std::ios::binary);
        if (!file) throw DomainError("cannot open density output " + f.density_out);
        file << (overlay.vg ? "bin_center,hist_density,vg_density,normal_density\n"
                            : "bin_center,hist_density,normal_density\n");
        for (const OverlayRow& r : overlay.rows) {
            file << general(r.bin_center) << ',' << general(r.hist_density);
            if (r.vg_density) file << ',' << general(*r.vg_density);
            file << ',' << general(r.normal_density) << '\n';
        }
        doc["density_table"] = f.density_out;
    }
    out << doc.dump(2) << '\n';
    return kExitOk;
}

} // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Variance-Gamma option pricing: pentanomial lattice, explicit FD, quadrature oracle, fitting"};
    app.name("vgtree");
    app.require_subcommand(1, 1);

    PriceFlags pf;
    auto* price = app.add_subcommand("price", "price one option; JSON on stdout");
    price->add_option("--method", pf.method, "tree | fd | quad")
        ->check(CLI::IsMember({"tree", "fd", "quad"}))
        ->capture_default_str();
    price->add_option("--style", pf.style, "eu | am")->required()->check(CLI::IsMember({"eu", "am"}));
    price->add_option("--type", pf.type, "call | put")->required()->check(CLI::IsMember({"call", "put"}));
    price->add_option("--s0", pf.s0, "spot price")->required();
    price->add_option("--strike", pf.strike, "strike")->required();
    price->add_option("--maturity", pf.maturity, "time to expiry")->required();
    price->add_option("--steps", pf.steps, "time steps (tree N, fd M)")->capture_default_str();
    add_model_flags(price, pf.model);
    price->add_option("--space-step", pf.h, "fd: log-price step (default 2 alpha(dt))");
    price->add_option("--x-min", pf.x_min, "fd: lower log-price bound");
    price->add_option("--x-max", pf.x_max, "fd: upper log-price bound");
    price->add_option("--half-width", pf.half_width, "fd: default grid half-width in stdev")->capture_default_str();
    price->add_option("--quad-half-width", pf.quad_half_width, "quad: inner window half-width in stdev")->capture_default_str();
    price->add_option("--quad-tolerance", pf.quad_tolerance, "quad: absolute tolerance")->capture_default_str();
    price->add_flag("--timing", pf.timing, "include wall time in the JSON record");

    TableFlags tf;
    auto* table = app.add_subcommand("table", "reproduce the European / American price tables as CSV");
    table->add_option("--which", tf.which, "european | american")
        ->required()
        ->check(CLI::IsMember({"european", "american"}));
    table->add_option("--steps", tf.steps, "time steps for tree and binomial")->capture_default_str();
    table->add_option("--strike", tf.strike, "strike")->capture_default_str();
    table->add_option("--output", tf.output, "write CSV here instead of stdout");
    table->add_option("--threads", tf.threads, "worker threads")->capture_default_str();
    add_model_flags(table, tf.model);

    P3Flags p3f;
    auto* p3 = app.add_subcommand("p3-curve", "centre probability of the tree vs the FD scheme, CSV");
    p3->add_option("--kbar-min", p3f.kbar_min, "smallest excess kurtosis")->capture_default_str();
    p3->add_option("--kbar-max", p3f.kbar_max, "largest excess kurtosis")->capture_default_str();
    p3->add_option("--points", p3f.points, "grid points")->capture_default_str();
    p3->add_option("--dt", p3f.dt, "time step")->capture_default_str();
    add_model_flags(p3, p3f.model);

    FitFlags ff;
    auto* fit = app.add_subcommand("fit", "method-of-moments VG / Normal fit of a CSV column; JSON on stdout");
    fit->add_option("--input", ff.input, "CSV file with a header row")->required();
    fit->add_option("--column", ff.column, "column name or 0-based index (default: last column)");
    fit->add_flag("--prices", ff.prices, "column holds prices; convert to log-returns");
    fit->add_flag("--returns", ff.returns, "column holds log-returns (default)");
    fit->add_option("--bins", ff.bins, "histogram bins")->capture_default_str();
    fit->add_option("--density-out", ff.density_out, "write the density overlay CSV here");
    fit->add_option("--period-label", ff.period_label, "label of one observation period")->capture_default_str();
    fit->add_option("--periods-per-unit", ff.periods_per_unit, "also report parameters scaled by this many periods");

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(std::move(reversed));
    } catch (const CLI::CallForHelp& e) {
        app.exit(e, out, err);
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        app.exit(e, out, err);
        return kExitUsage;
    }

    try {
        if (price->parsed()) return cmd_price(pf, out);
        if (table->parsed()) return cmd_table(tf, out);
        if (p3->parsed()) return cmd_p3_curve(p3f, out);
        return cmd_fit(ff, out);
    } catch (const NumericalError& e) {
        err << "error: " << e.what() << '\n';
        return kExitNumerical;
    } catch (const Error& e) {
        err << "error: " << e.what() << '\n';
        return kExitUsage;
    }
}

} // namespace vgtree::cli
