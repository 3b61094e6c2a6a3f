#include "vbarrier/cli.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <limits>
#include <sstream>

#include <CLI11.hpp>

#include "vbarrier/verification.hpp"

namespace vbarrier::cli {

namespace {

std::string normalize_key(std::string key) {
    std::replace(key.begin(), key.end(), '-', '_');
    return key;
}

std::string dashed(std::string key) {
    std::replace(key.begin(), key.end(), '_', '-');
    return key;
}

std::string trim(const std::string& s) {
    const auto first = s.find_first_not_of(" \t\r\n");
    if (first == std::string::npos) return {};
    const auto last = s.find_last_not_of(" \t\r\n");
    return s.substr(first, last - first + 1);
}

const std::string& require(const KeyValues& values, const std::string& key) {
    const auto it = values.find(key);
    if (it == values.end() || trim(it->second).empty()) {
        throw ConfigError("missing value for key '" + key + "'");
    }
    return it->second;
}

double parse_double(const std::string& key, const std::string& text) {
    const std::string s = trim(text);
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size() || !std::isfinite(v)) {
        throw ConfigError("key '" + key + "': '" + text + "' is not a finite number");
    }
    return v;
}

double get_double(const KeyValues& values, const std::string& key) {
    return parse_double(key, require(values, key));
}

std::int64_t get_integer(const KeyValues& values, const std::string& key) {
    const std::string s = trim(require(values, key));
    std::int64_t v = 0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size()) {
        // Accept integral values written in floating notation, e.g. 1e6.
        const double d = parse_double(key, s);
        if (d != std::floor(d) || std::abs(d) > 9e15) {
            throw ConfigError("key '" + key + "': '" + s + "' is not an integer");
        }
        return static_cast<std::int64_t>(d);
    }
    return v;
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> parts;
    std::string current;
    std::istringstream is(s);
    while (std::getline(is, current, sep)) parts.push_back(trim(current));
    return parts;
}

Sweep parse_sweep(const std::string& text) {
    const auto eq = text.find('=');
    if (eq == std::string::npos) throw ConfigError("key 'sweep': expected NAME=v1,v2,...");
    Sweep sweep{trim(text.substr(0, eq)), {}};
    if (sweep.name != "a" && sweep.name != "theta" && sweep.name != "rho") {
        throw ConfigError("key 'sweep': parameter must be one of a, theta, rho");
    }
    for (const std::string& part : split(text.substr(eq + 1), ',')) {
        if (!part.empty()) sweep.values.push_back(parse_double("sweep", part));
    }
    if (sweep.values.empty()) throw ConfigError("key 'sweep': value list is empty");
    return sweep;
}

Grid parse_grid(const std::string& text) {
    const auto parts = split(text, ':');
    if (parts.size() != 3) throw ConfigError("key 'grid': expected MIN:MAX:N");
    Grid g{parse_double("grid", parts[0]), parse_double("grid", parts[1]), 0};
    KeyValues one{{"grid", parts[2]}};
    const std::int64_t n = get_integer(one, "grid");
    if (n < 2) throw ConfigError("key 'grid': point count must be >= 2");
    if (!(g.min > 0.0 && g.min < g.max)) throw ConfigError("key 'grid': need 0 < MIN < MAX");
    g.count = static_cast<int>(n);
    return g;
}

void apply_sweep(VasicekParams& p, const std::string& name, double value) {
    if (name == "a") p.a = value;
    else if (name == "theta") p.theta = value;
    else p.rho = value;
}

std::vector<double> grid_spots(const Grid& g) {
    std::vector<double> spots;
    spots.reserve(static_cast<std::size_t>(g.count));
    for (int i = 0; i < g.count; ++i) {
        spots.push_back(i == g.count - 1 ? g.max : g.min + (g.max - g.min) * i / (g.count - 1));
    }
    return spots;
}

// Fixed-point coordinate for SVG output.
std::string coord(double v) {
    std::array<char, 32> buf{};
    std::snprintf(buf.data(), buf.size(), "%.2f", v);
    return buf.data();
}

}  // namespace

const KeyValues& default_values() {
    static const KeyValues defaults = {
        {"spot", "110"},
        {"strike", "100"},
        {"maturity", "1"},
        {"kind", "single"},
        {"barrier", format_number(std::log(130.0))},
        {"barrier_low", format_number(std::log(100.0))},
        {"barrier_high", format_number(std::log(130.0))},
        {"a", "1"},
        {"theta", "0.04"},
        {"rho", "0.5"},
        {"sigma1", "0.3"},
        {"sigma2", "0.3"},
        {"r0", "0.05"},
        {"sweep", ""},
        {"grid", "85:128:25"},
        {"axis", "spot"},
        {"paths", "1000000"},
        {"steps", "512"},
        {"seed", "20240601"},
        {"monitoring", "bridge"},
        {"threads", "0"},
        {"out", "-"},
        {"format", "csv"},
    };
    return defaults;
}

std::string format_number(double v) {
    if (std::isnan(v)) return "nan";
    std::array<char, 64> buf{};
    const auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
    return std::string(buf.data(), ec == std::errc() ? ptr : buf.data());
}

KeyValues parse_config_text(const std::string& text) {
    KeyValues values;
    std::istringstream is(text);
    std::string line;
    int line_no = 0;
    while (std::getline(is, line)) {
        ++line_no;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        if (trim(line).empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw ConfigError("config line " + std::to_string(line_no) + ": expected key = value");
        }
        const std::string key = normalize_key(trim(line.substr(0, eq)));
        if (!default_values().contains(key)) throw ConfigError("unknown config key '" + key + "'");
        values[key] = trim(line.substr(eq + 1));
    }
    return values;
}

JobConfig build_config(Command command, const KeyValues& values) {
    JobConfig cfg;
    cfg.command = command;

    cfg.params.a = get_double(values, "a");
    cfg.params.theta = get_double(values, "theta");
    cfg.params.rho = get_double(values, "rho");
    cfg.params.sigma1 = get_double(values, "sigma1");
    cfg.params.sigma2 = get_double(values, "sigma2");
    cfg.params.r0 = get_double(values, "r0");
    try {
        cfg.params.validate();
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    }

    cfg.market = MarketState{get_double(values, "spot"), cfg.params.r0, 0.0};
    if (!(cfg.market.spot > 0.0)) throw ConfigError("key 'spot': must be positive");

    const std::string kind = trim(require(values, "kind"));
    cfg.option.strike = get_double(values, "strike");
    cfg.option.maturity = get_double(values, "maturity");
    if (kind == "single") {
        cfg.option.kind = BarrierKind::single_up;
        cfg.option.upper_barrier = get_double(values, "barrier");
    } else if (kind == "double") {
        cfg.option.kind = BarrierKind::double_knock_out;
        cfg.option.lower_barrier = get_double(values, "barrier_low");
        cfg.option.upper_barrier = get_double(values, "barrier_high");
    } else {
        throw ConfigError("key 'kind': expected single or double");
    }
    if (!(cfg.option.strike > 0.0)) throw ConfigError("key 'strike': must be positive");
    if (!(cfg.option.maturity > 0.0)) throw ConfigError("key 'maturity': must be positive");
    if (cfg.option.kind == BarrierKind::double_knock_out &&
        !(cfg.option.lower_barrier < cfg.option.upper_barrier)) {
        throw ConfigError("key 'barrier_low': must be below barrier_high");
    }

    const auto sweep_it = values.find("sweep");
    if (sweep_it != values.end() && !trim(sweep_it->second).empty()) {
        cfg.sweep = parse_sweep(sweep_it->second);
    }
    cfg.grid = parse_grid(require(values, "grid"));
    const std::string axis = trim(require(values, "axis"));
    if (axis == "spot") cfg.axis = CurveAxis::spot;
    else if (axis == "forward") cfg.axis = CurveAxis::forward;
    else throw ConfigError("key 'axis': expected spot or forward");

    cfg.mc.n_paths = get_integer(values, "paths");
    if (cfg.mc.n_paths < 1) throw ConfigError("key 'paths': must be >= 1");
    const std::int64_t steps = get_integer(values, "steps");
    if (steps < 1 || steps > std::numeric_limits<int>::max()) {
        throw ConfigError("key 'steps': must be a positive integer");
    }
    cfg.mc.n_steps = static_cast<int>(steps);
    const std::int64_t seed = get_integer(values, "seed");
    if (seed < 0) throw ConfigError("key 'seed': must be non-negative");
    cfg.mc.seed = static_cast<std::uint64_t>(seed);
    const std::int64_t threads = get_integer(values, "threads");
    if (threads < 0 || threads > 4096) throw ConfigError("key 'threads': must be in [0, 4096]");
    cfg.mc.threads = static_cast<int>(threads);
    const std::string monitoring = trim(require(values, "monitoring"));
    if (monitoring == "bridge") cfg.mc.monitoring = Monitoring::bridge_corrected;
    else if (monitoring == "discrete") cfg.mc.monitoring = Monitoring::discrete;
    else throw ConfigError("key 'monitoring': expected bridge or discrete");

    cfg.out = trim(require(values, "out"));
    const std::string format = trim(require(values, "format"));
    if (format == "csv") cfg.format = OutputFormat::csv;
    else if (format == "svg") cfg.format = OutputFormat::svg;
    else throw ConfigError("key 'format': expected csv or svg");
    return cfg;
}

std::string render_csv(const std::vector<double>& spots, const std::vector<std::string>& columns,
                       const std::vector<std::vector<double>>& prices, const std::string& axis_name) {
    std::string text = axis_name;
    for (const std::string& c : columns) text += "," + c;
    text += "\n";
    for (std::size_t i = 0; i < spots.size(); ++i) {
        text += format_number(spots[i]);
        for (const auto& column : prices) text += "," + format_number(column[i]);
        text += "\n";
    }
    return text;
}

std::string render_svg(const std::vector<double>& spots, const std::vector<std::string>& columns,
                       const std::vector<std::vector<double>>& prices, const std::string& axis_name) {
    constexpr double kWidth = 720.0;
    constexpr double kHeight = 480.0;
    constexpr double kLeft = 70.0;
    constexpr double kRight = 160.0;
    constexpr double kTop = 30.0;
    constexpr double kBottom = 50.0;
    constexpr std::array<const char*, 6> kColors = {"#1f77b4", "#d62728", "#2ca02c",
                                                    "#9467bd", "#ff7f0e", "#17becf"};
    const double x_min = spots.front();
    const double x_max = spots.back() > x_min ? spots.back() : x_min + 1.0;
    double y_max = 0.0;
    for (const auto& column : prices) {
        for (double v : column) {
            if (std::isfinite(v)) y_max = std::max(y_max, v);
        }
    }
    y_max = y_max > 0.0 ? 1.05 * y_max : 1.0;
    const double plot_w = kWidth - kLeft - kRight;
    const double plot_h = kHeight - kTop - kBottom;
    const auto px = [&](double s) { return kLeft + (s - x_min) / (x_max - x_min) * plot_w; };
    const auto py = [&](double v) { return kTop + plot_h - v / y_max * plot_h; };

    std::ostringstream os;
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << coord(kWidth) << "\" height=\""
       << coord(kHeight) << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
    os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    os << "<line x1=\"" << coord(kLeft) << "\" y1=\"" << coord(kTop + plot_h) << "\" x2=\""
       << coord(kLeft + plot_w) << "\" y2=\"" << coord(kTop + plot_h) << "\" stroke=\"black\"/>\n";
    os << "<line x1=\"" << coord(kLeft) << "\" y1=\"" << coord(kTop) << "\" x2=\"" << coord(kLeft)
       << "\" y2=\"" << coord(kTop + plot_h) << "\" stroke=\"black\"/>\n";
    for (int i = 0; i <= 5; ++i) {
        const double s = x_min + (x_max - x_min) * i / 5.0;
        const double v = y_max * i / 5.0;
        os << "<text x=\"" << coord(px(s)) << "\" y=\"" << coord(kTop + plot_h + 18.0)
           << "\" text-anchor=\"middle\">" << coord(s) << "</text>\n";
        os << "<text x=\"" << coord(kLeft - 6.0) << "\" y=\"" << coord(py(v) + 4.0)
           << "\" text-anchor=\"end\">" << coord(v) << "</text>\n";
    }
    os << "<text x=\"" << coord(kLeft + plot_w / 2.0) << "\" y=\"" << coord(kHeight - 10.0)
       << "\" text-anchor=\"middle\">" << (axis_name == "spot" ? "underlying price" : "forward price")
       << "</text>\n";
    os << "<text x=\"16\" y=\"" << coord(kTop + plot_h / 2.0)
       << "\" text-anchor=\"middle\" transform=\"rotate(-90 16 " << coord(kTop + plot_h / 2.0)
       << ")\">option price</text>\n";
    for (std::size_t c = 0; c < prices.size(); ++c) {
        const char* color = kColors[c % kColors.size()];
        os << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\"";
        bool first = true;
        for (std::size_t i = 0; i < spots.size(); ++i) {
            if (!std::isfinite(prices[c][i])) continue;
            os << (first ? "" : " ") << coord(px(spots[i])) << "," << coord(py(prices[c][i]));
            first = false;
        }
        os << "\"/>\n";
        const double ly = kTop + 10.0 + 20.0 * static_cast<double>(c);
        os << "<line x1=\"" << coord(kWidth - kRight + 15.0) << "\" y1=\"" << coord(ly) << "\" x2=\""
           << coord(kWidth - kRight + 40.0) << "\" y2=\"" << coord(ly) << "\" stroke=\"" << color
           << "\" stroke-width=\"1.5\"/>\n";
        os << "<text x=\"" << coord(kWidth - kRight + 46.0) << "\" y=\"" << coord(ly + 4.0) << "\">"
           << columns[c] << "</text>\n";
    }
    os << "</svg>\n";
    return os.str();
}

int run_price(const JobConfig& cfg, std::ostream& out, std::ostream& err) {
    const PriceResult r = price(cfg.market, cfg.option, cfg.params);
    std::string line = format_number(cfg.market.spot) + "," + format_number(r.price);
    if (cfg.verify && !r.knocked_out) {
        const MCEstimate mc = price_barrier_mc(cfg.market, cfg.option, cfg.params, cfg.mc);
        line += "," + format_number(mc.mean) + "," + format_number(mc.std_error);
    }
    out << line << "\n";
    if (r.knocked_out) {
        err << "knocked out at inception: forward is outside the barrier region\n";
        return kKnockedOut;
    }
    return kSuccess;
}

int run_curve(const JobConfig& cfg, std::ostream& out, std::ostream& err) {
    const std::vector<double> spots = grid_spots(cfg.grid);
    std::vector<std::string> columns;
    std::vector<std::vector<double>> prices;
    std::vector<VasicekParams> variants;
    if (cfg.sweep) {
        for (double v : cfg.sweep->values) {
            VasicekParams p = cfg.params;
            apply_sweep(p, cfg.sweep->name, v);
            variants.push_back(p);
            columns.push_back(cfg.sweep->name + "=" + format_number(v));
        }
    } else {
        variants.push_back(cfg.params);
        columns.emplace_back("price");
    }
    for (const VasicekParams& p : variants) {
        const PriceCurve curve = price_curve(spots, cfg.option, p, {}, {}, cfg.axis);
        std::vector<double> column;
        for (const CurveRow& row : curve.rows) {
            if (row.error) {
                err << "spot " << format_number(row.spot) << ": " << *row.error << "\n";
                column.push_back(std::numeric_limits<double>::quiet_NaN());
            } else {
                column.push_back(row.price);
            }
        }
        prices.push_back(std::move(column));
    }

    const std::string axis_name = cfg.axis == CurveAxis::spot ? "spot" : "forward";
    const std::string text = cfg.format == OutputFormat::csv
                                 ? render_csv(spots, columns, prices, axis_name)
                                 : render_svg(spots, columns, prices, axis_name);
    if (cfg.out == "-") {
        out << text;
        return kSuccess;
    }
    std::ofstream file(cfg.out, std::ios::binary | std::ios::trunc);
    if (!file || !(file << text) || !file.flush()) {
        err << "cannot write output file '" << cfg.out << "'\n";
        return kConfigError;
    }
    return kSuccess;
}

int run_verify(const JobConfig& cfg, std::ostream& out, std::ostream&) {
    VerifySettings s = default_verify_settings();
    s.params = cfg.params;
    s.strike = cfg.option.strike;
    s.maturity = cfg.option.maturity;
    if (cfg.option.kind == BarrierKind::double_knock_out) {
        s.lower_barrier = cfg.option.lower_barrier;
        s.upper_barrier = cfg.option.upper_barrier;
    } else {
        s.upper_barrier = cfg.option.upper_barrier;
    }
    s.mc = cfg.mc;
    s.bond_formula = cfg.bond_formula;

    bool all = true;
    for (const CheckResult& r : run_verification(s)) {
        all = all && r.passed;
        std::array<char, 32> secs{};
        std::snprintf(secs.data(), secs.size(), "%.2fs", r.seconds);
        out << (r.passed ? "PASS  " : "FAIL  ") << r.name << "  [" << secs.data() << "]  " << r.detail
            << "\n";
    }
    out << (all ? "all checks passed" : "verification FAILED") << "\n";
    return all ? kSuccess : kVerificationFailed;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Barrier option pricing under the Vasicek short-rate model", "vbarrier"};
    app.require_subcommand(1);

    struct Sub {
        CLI::App* app;
        Command command;
        std::map<std::string, CLI::Option*> options;
        std::map<std::string, std::string> storage;
        std::string config_path;
        bool verify = false;
        std::string bond_formula = "standard";
    };
    std::array<Sub, 3> subs{};
    subs[0].app = app.add_subcommand("price", "price one option at a spot");
    subs[0].command = Command::price;
    subs[1].app = app.add_subcommand("curve", "price a curve over a spot grid (CSV or SVG)");
    subs[1].command = Command::curve;
    subs[2].app = app.add_subcommand("verify", "run the closed-form vs oracle checks");
    subs[2].command = Command::verify;
    for (Sub& sub : subs) {
        sub.app->add_option("--config", sub.config_path, "flat key=value config file");
        for (const auto& [key, value] : default_values()) {
            sub.storage[key];
            sub.options[key] = sub.app->add_option("--" + dashed(key), sub.storage[key],
                                                   "default: " + (value.empty() ? "none" : value));
        }
        if (sub.command == Command::price) {
            sub.app->add_flag("--verify", sub.verify, "also run the Monte Carlo oracle");
        }
        sub.app->add_option("--debug-bond-formula", sub.bond_formula)->group("");
    }

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kSuccess;
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) {
            out << app.help();
            return kSuccess;
        }
        err << "error: " << e.what() << "\n";
        return kConfigError;
    }

    for (Sub& sub : subs) {
        if (!sub.app->parsed()) continue;
        try {
            KeyValues values = default_values();
            if (!sub.config_path.empty()) {
                std::ifstream file(sub.config_path);
                if (!file) throw ConfigError("cannot read config file '" + sub.config_path + "'");
                std::ostringstream text;
                text << file.rdbuf();
                for (const auto& [key, value] : parse_config_text(text.str())) values[key] = value;
            }
            for (const auto& [key, option] : sub.options) {
                if (option->count() > 0) values[key] = sub.storage[key];
            }
            JobConfig cfg = build_config(sub.command, values);
            cfg.verify = sub.verify;
            if (sub.bond_formula == "printed") cfg.bond_formula = BondFormula::printed_variant;
            else if (sub.bond_formula != "standard") throw ConfigError("unknown bond formula");

            switch (sub.command) {
                case Command::price: return run_price(cfg, out, err);
                case Command::curve: return run_curve(cfg, out, err);
                case Command::verify: return run_verify(cfg, out, err);
            }
        } catch (const ConfigError& e) {
            err << "config error: " << e.what() << "\n";
            return kConfigError;
        } catch (const std::exception& e) {
            err << "error: " << e.what() << "\n";
            return kConfigError;
        }
    }
    return kConfigError;
}

}  // namespace vbarrier::cli
