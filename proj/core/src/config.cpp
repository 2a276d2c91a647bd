#include "ersatz/config.hpp"

#include <charconv>
#include <cmath>
#include <fmt/format.h>
#include <fstream>
#include <sstream>

#include "ersatz/pucci.hpp"

namespace ersatz {

namespace {

std::string trim(const std::string& s) {
    size_t b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    size_t e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

[[noreturn]] void fail(int line, const std::string& msg) {
    throw Error(errc::config_error, fmt::format("line {}: {}", line, msg));
}

double to_num(const std::string& s, int line) {
    try {
        size_t pos = 0;
        double v = std::stod(s, &pos);
        if (pos != s.size()) fail(line, fmt::format("trailing characters in '{}'", s));
        return v;
    } catch (const std::invalid_argument&) {
        fail(line, fmt::format("expected a number, got '{}'", s));
    } catch (const std::out_of_range&) {
        fail(line, fmt::format("number out of range: '{}'", s));
    }
}

std::vector<double> to_list(const std::string& s, int line) {
    std::vector<double> out;
    std::istringstream is(s);
    std::string tok;
    while (is >> tok) out.push_back(to_num(tok, line));
    if (out.empty()) fail(line, "expected a list of numbers");
    return out;
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : s) {
        if (c == sep) {
            out.push_back(trim(cur));
            cur.clear();
        } else {
            cur += c;
        }
    }
    out.push_back(trim(cur));
    return out;
}

std::string fmt(double v) { return ::fmt::format("{:.17g}", v); }

std::string fmt_list(const std::vector<double>& v) {
    std::string out;
    for (size_t i = 0; i < v.size(); ++i) {
        if (i) out += ' ';
        out += fmt(v[i]);
    }
    return out;
}

}  // namespace

ExperimentConfig ExperimentConfig::parse_text(const std::string& text) {
    ExperimentConfig cfg;
    cfg.h_list.clear();
    cfg.k_list.clear();

    std::istringstream is(text);
    std::string raw;
    std::string section;
    int line = 0;
    while (std::getline(is, raw)) {
        ++line;
        std::string s = raw;
        if (size_t hash_pos = s.find('#'); hash_pos != std::string::npos)
            s = s.substr(0, hash_pos);
        s = trim(s);
        if (s.empty()) continue;
        if (s.front() == '[') {
            if (s.back() != ']') fail(line, "unterminated section header");
            section = s.substr(1, s.size() - 2);
            if (section != "domain" && section != "grid" && section != "params" &&
                section != "hamiltonian" && section != "data" &&
                section != "time" && section != "run")
                fail(line, fmt::format("unknown section [{}]", section));
            continue;
        }
        size_t eq = s.find('=');
        if (eq == std::string::npos) fail(line, "expected 'key = value'");
        std::string key = trim(s.substr(0, eq));
        std::string val = trim(s.substr(eq + 1));
        if (key.empty() || val.empty()) fail(line, "empty key or value");
        if (section.empty()) fail(line, "key outside any section");

        auto unknown = [&]() {
            fail(line, fmt::format("unknown key '{}' in [{}]", key, section));
        };
        if (section == "domain") {
            if (key == "kind") cfg.domain_kind = val;
            else if (key == "dim") cfg.dim = static_cast<int>(to_num(val, line));
            else if (key == "lower") cfg.lower = to_list(val, line);
            else if (key == "upper") cfg.upper = to_list(val, line);
            else if (key == "center") cfg.center = to_list(val, line);
            else if (key == "radius") cfg.radius = to_num(val, line);
            else if (key == "period") cfg.period = to_list(val, line);
            else unknown();
        } else if (section == "grid") {
            if (key == "h") cfg.h_list = to_list(val, line);
            else unknown();
        } else if (section == "params") {
            if (key == "delta") cfg.delta = to_num(val, line);
            else if (key == "hat_delta")
                cfg.hat_delta = val == "auto" ? std::optional<double>()
                                              : std::optional<double>(to_num(val, line));
            else if (key == "K") cfg.k_list = to_list(val, line);
            else if (key == "K0") cfg.k0 = to_num(val, line);
            else unknown();
        } else if (section == "hamiltonian") {
            if (key == "type") cfg.ham_type = val;
            else if (key == "nu") cfg.nu = to_list(val, line);
            else if (key == "drift") cfg.drift = to_list(val, line);
            else if (key == "zeroth") cfg.zeroth = to_num(val, line);
            else if (key == "source") cfg.source = to_num(val, line);
            else if (key == "matrix") cfg.diffusion_matrix = to_list(val, line);
            else if (key == "row") {
                auto parts = split(val, '|');
                if (parts.size() != 5)
                    fail(line, "row format is: group | a... | b... | c | f");
                TableRowSpec row;
                row.group = static_cast<int>(to_num(parts[0], line));
                row.a = to_list(parts[1], line);
                row.b = to_list(parts[2], line);
                row.c = to_num(parts[3], line);
                row.f = to_num(parts[4], line);
                cfg.rows.push_back(std::move(row));
            } else unknown();
        } else if (section == "data") {
            if (key == "g") cfg.g_kind = val;
            else if (key == "matrix") cfg.g_matrix = to_list(val, line);
            else if (key == "shift") cfg.g_shift = to_list(val, line);
            else if (key == "freq") cfg.g_freq = to_list(val, line);
            else if (key == "value") cfg.g_value = to_num(val, line);
            else if (key == "time_linear") cfg.g_time_linear = to_num(val, line);
            else unknown();
        } else if (section == "time") {
            if (key == "T") cfg.horizon = to_num(val, line);
            else if (key == "step") cfg.step = val;
            else if (key == "safety") cfg.safety = to_num(val, line);
            else unknown();
        } else if (section == "run") {
            if (key == "mode") cfg.mode = val;
            else if (key == "store") cfg.store = val;
            else if (key == "seed")
                cfg.seed = static_cast<std::uint64_t>(to_num(val, line));
            else if (key == "holder_alpha") cfg.holder_alpha = to_num(val, line);
            else unknown();
        }
    }

    if (cfg.h_list.empty())
        throw Error(errc::config_error, "[grid] h is required");
    if (cfg.k_list.empty())
        throw Error(errc::config_error, "[params] K is required");
    if (cfg.domain_kind != "box" && cfg.domain_kind != "ball" &&
        cfg.domain_kind != "torus")
        throw Error(errc::config_error, "domain kind must be box, ball, or torus");
    if (cfg.mode != "cylinder" && cfg.mode != "whole-space")
        throw Error(errc::config_error, "mode must be cylinder or whole-space");
    if (cfg.store != "full" && cfg.store != "final")
        throw Error(errc::config_error, "store must be full or final");
    if (cfg.step != "auto") to_num(cfg.step, 0);  // must be a fixed tau
    return cfg;
}

ExperimentConfig ExperimentConfig::load(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw Error(errc::io_error, fmt::format("cannot open config '{}'", path));
    std::ostringstream os;
    os << in.rdbuf();
    return parse_text(os.str());
}

std::string ExperimentConfig::print() const {
    std::ostringstream os;
    os << "[domain]\n";
    os << "kind = " << domain_kind << "\n";
    os << "dim = " << dim << "\n";
    if (domain_kind == "box") {
        os << "lower = " << fmt_list(lower) << "\n";
        os << "upper = " << fmt_list(upper) << "\n";
    } else if (domain_kind == "ball") {
        os << "center = " << fmt_list(center) << "\n";
        os << "radius = " << fmt(radius) << "\n";
    } else {
        os << "period = " << fmt_list(period) << "\n";
    }
    os << "[grid]\n";
    os << "h = " << fmt_list(h_list) << "\n";
    os << "[params]\n";
    os << "delta = " << fmt(delta) << "\n";
    os << "hat_delta = " << (hat_delta ? fmt(*hat_delta) : std::string("auto"))
       << "\n";
    os << "K = " << fmt_list(k_list) << "\n";
    os << "K0 = " << fmt(k0) << "\n";
    os << "[hamiltonian]\n";
    os << "type = " << ham_type << "\n";
    if (ham_type == "linear") {
        os << "nu = " << fmt_list(nu) << "\n";
    } else if (ham_type == "diffusion") {
        os << "matrix = " << fmt_list(diffusion_matrix) << "\n";
    } else {
        for (const auto& r : rows)
            os << "row = " << r.group << " | " << fmt_list(r.a) << " | "
               << fmt_list(r.b) << " | " << fmt(r.c) << " | " << fmt(r.f) << "\n";
    }
    if (ham_type == "linear" || ham_type == "diffusion") {
        os << "drift = " << fmt_list(drift) << "\n";
        os << "zeroth = " << fmt(zeroth) << "\n";
        os << "source = " << fmt(source) << "\n";
    }
    os << "[data]\n";
    os << "g = " << g_kind << "\n";
    if (g_kind == "quadratic") {
        os << "matrix = " << fmt_list(g_matrix) << "\n";
        os << "shift = " << fmt_list(g_shift) << "\n";
    } else if (g_kind == "trig") {
        os << "freq = " << fmt_list(g_freq) << "\n";
    } else {
        os << "value = " << fmt(g_value) << "\n";
    }
    os << "time_linear = " << fmt(g_time_linear) << "\n";
    os << "[time]\n";
    os << "T = " << fmt(horizon) << "\n";
    os << "step = " << step << "\n";
    os << "safety = " << fmt(safety) << "\n";
    os << "[run]\n";
    os << "mode = " << mode << "\n";
    os << "store = " << store << "\n";
    os << "seed = " << seed << "\n";
    os << "holder_alpha = " << fmt(holder_alpha) << "\n";
    return os.str();
}

std::uint64_t ExperimentConfig::hash() const {
    std::string text = print();
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : text) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

double resolve_hat_delta(const ExperimentConfig& cfg) {
    if (cfg.hat_delta) return *cfg.hat_delta;
    return feasible_hat_delta(cfg.delta, cfg.dim, 32);
}

namespace {

Domain make_domain(const ExperimentConfig& cfg) {
    if (cfg.domain_kind == "box") {
        if (static_cast<int>(cfg.lower.size()) != cfg.dim ||
            static_cast<int>(cfg.upper.size()) != cfg.dim)
            throw Error(errc::config_error, "box bounds must match dim");
        return Domain::box(cfg.lower, cfg.upper);
    }
    if (cfg.domain_kind == "ball") {
        if (static_cast<int>(cfg.center.size()) != cfg.dim)
            throw Error(errc::config_error, "ball center must match dim");
        return Domain::ball(cfg.center, cfg.radius);
    }
    if (static_cast<int>(cfg.period.size()) != cfg.dim)
        throw Error(errc::config_error, "torus period must match dim");
    return Domain::torus(cfg.period);
}

std::vector<BellmanRow> convert_rows(const std::vector<TableRowSpec>& specs, int m,
                                     int d) {
    std::vector<BellmanRow> rows;
    for (const auto& s : specs) {
        if (static_cast<int>(s.a.size()) != m)
            throw Error(errc::config_error, "row a-weights must have m entries");
        if (static_cast<int>(s.b.size()) != d)
            throw Error(errc::config_error, "row drift must have d entries");
        rows.push_back({s.a, s.b, s.c, s.f});
    }
    return rows;
}

StencilHamiltonian make_ham(const ExperimentConfig& cfg, const StencilSet& stencil,
                            double hat_delta) {
    const int m = stencil.size();
    const int d = stencil.dim;
    SourceFn source = nullptr;
    if (cfg.source != 0.0)
        source = [c = cfg.source](double, std::span<const double>) { return c; };
    std::vector<double> drift = cfg.drift;
    if (drift.empty()) drift.assign(d, 0.0);
    if (static_cast<int>(drift.size()) != d)
        throw Error(errc::config_error, "drift must have d entries");

    if (cfg.ham_type == "linear") {
        if (static_cast<int>(cfg.nu.size()) != m)
            throw Error(errc::config_error, "nu must have m entries");
        return make_linear(cfg.nu, drift, cfg.zeroth, source);
    }
    if (cfg.ham_type == "bellman") {
        return make_bellman(convert_rows(cfg.rows, m, d));
    }
    if (cfg.ham_type == "isaacs") {
        int groups = 0;
        for (const auto& r : cfg.rows) groups = std::max(groups, r.group + 1);
        std::vector<std::vector<BellmanRow>> table(groups);
        auto rows = convert_rows(cfg.rows, m, d);
        for (size_t i = 0; i < rows.size(); ++i)
            table[cfg.rows[i].group].push_back(rows[i]);
        return make_isaacs(std::move(table));
    }
    if (cfg.ham_type == "diffusion") {
        if (static_cast<int>(cfg.diffusion_matrix.size()) != d * d)
            throw Error(errc::config_error, "diffusion matrix must be d x d");
        SymMatrix a(d);
        for (int i = 0; i < d; ++i)
            for (int j = i; j < d; ++j)
                a.set(i, j, 0.5 * (cfg.diffusion_matrix[i * d + j] +
                                   cfg.diffusion_matrix[j * d + i]));
        LowerOrderFn lower = nullptr;
        if (cfg.zeroth != 0.0 || cfg.source != 0.0 ||
            std::any_of(drift.begin(), drift.end(), [](double v) { return v != 0.0; }))
            lower = [drift, zeroth = cfg.zeroth, src = cfg.source](
                        double u0, std::span<const double> grad, double,
                        std::span<const double>) {
                double s = zeroth * u0 + src;
                for (size_t k = 0; k < drift.size(); ++k) s += drift[k] * grad[k];
                return s;
            };
        auto ham = from_diffusion(
            [a](double, std::span<const double>, double, std::span<const double>) {
                return a;
            },
            lower, stencil, hat_delta);
        ham.bounds.grad = 0.0;
        for (double v : drift) ham.bounds.grad = std::max(ham.bounds.grad, std::abs(v));
        ham.bounds.u0 = std::abs(cfg.zeroth);
        ham.flags.independent_of_u0 = cfg.zeroth == 0.0;
        ham.flags.nonincreasing_in_u0 = cfg.zeroth <= 0.0;
        ham.flags.time_dependent = false;
        return ham;
    }
    throw Error(errc::config_error,
                fmt::format("unknown hamiltonian type '{}'", cfg.ham_type));
}

DataFn make_data(const ExperimentConfig& cfg) {
    const double T = cfg.horizon;
    const double tl = cfg.g_time_linear;
    if (cfg.g_kind == "quadratic") {
        const int d = cfg.dim;
        if (static_cast<int>(cfg.g_matrix.size()) != d * d)
            throw Error(errc::config_error, "data matrix must be d x d");
        std::vector<double> shift = cfg.g_shift;
        if (shift.empty()) shift.assign(d, 0.0);
        if (static_cast<int>(shift.size()) != d)
            throw Error(errc::config_error, "data shift must have d entries");
        return [A = cfg.g_matrix, shift, d, T, tl](double t,
                                                   std::span<const double> x) {
            double s = 0.0;
            for (int i = 0; i < d; ++i)
                for (int j = 0; j < d; ++j)
                    s += (x[i] - shift[i]) * A[i * d + j] * (x[j] - shift[j]);
            return s + tl * (T - t);
        };
    }
    if (cfg.g_kind == "trig") {
        if (static_cast<int>(cfg.g_freq.size()) != cfg.dim)
            throw Error(errc::config_error, "data freq must have d entries");
        return [f = cfg.g_freq, T, tl](double t, std::span<const double> x) {
            double phase = 0.0;
            for (size_t k = 0; k < f.size(); ++k) phase += f[k] * x[k];
            return std::sin(2.0 * 3.14159265358979323846 * phase) + tl * (T - t);
        };
    }
    if (cfg.g_kind == "constant") {
        return [v = cfg.g_value, T, tl](double t, std::span<const double>) {
            return v + tl * (T - t);
        };
    }
    throw Error(errc::config_error,
                fmt::format("unknown data kind '{}'", cfg.g_kind));
}

}  // namespace

BuiltProblem build_problem(const ExperimentConfig& cfg, double h, double big_k) {
    StencilSet stencil = build_standard_stencil(cfg.dim);
    double hat_delta = resolve_hat_delta(cfg);

    BuiltProblem out;
    out.hat_delta_used = hat_delta;
    out.grid = std::make_shared<Grid>(make_domain(cfg), stencil, h);

    EllipticityParams params;
    params.delta = cfg.delta;
    params.hat_delta = hat_delta;
    params.check_delta = cfg.delta / 2.0;
    params.k0 = cfg.k0;
    params.big_k = big_k;

    StencilHamiltonian ham = make_ham(cfg, stencil, hat_delta);
    SampleSpec spec;
    spec.seed = cfg.seed;
    params.h_bar = std::max(check_growth_bound(ham, cfg.dim, cfg.k0, spec), 0.0);

    out.config.grid = out.grid.get();
    out.config.op = ErsatzOperator{std::move(ham), params, stencil};
    out.config.g = make_data(cfg);
    out.config.horizon = cfg.horizon;
    if (cfg.step == "auto") {
        out.config.step.kind = StepPolicy::Kind::AutoCfl;
        out.config.step.safety = cfg.safety;
    } else {
        out.config.step.kind = StepPolicy::Kind::Fixed;
        out.config.step.tau = std::stod(cfg.step);
    }
    out.config.mode =
        cfg.mode == "cylinder" ? SolveMode::Cylinder : SolveMode::WholeSpace;
    out.config.store =
        cfg.store == "full" ? StorePolicy::Full : StorePolicy::FinalSlice;
    return out;
}

}  // namespace ersatz
