#include "cross/params.hpp"

#include <charconv>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace cross {

namespace {

std::string format_double(double v) {
    char buf[40];
    auto res = std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::general, 17);
    return std::string(buf, res.ptr);
}

double parse_double(std::string_view s, std::string_view key) {
    double v{};
    auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc{} || res.ptr != s.data() + s.size()) {
        throw std::invalid_argument("config: bad numeric value '" + std::string(s) +
                                    "' for key '" + std::string(key) + "'");
    }
    return v;
}

template <typename Int>
Int parse_int(std::string_view s, std::string_view key) {
    Int v{};
    auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc{} || res.ptr != s.data() + s.size()) {
        throw std::invalid_argument("config: bad integer value '" + std::string(s) +
                                    "' for key '" + std::string(key) + "'");
    }
    return v;
}

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r'))
        s.remove_suffix(1);
    return s;
}

}  // namespace

std::int64_t ModelParams::step_count() const {
    return static_cast<std::int64_t>(std::llround(t_end / dt));
}

std::vector<std::string> validation_errors(const ModelParams& p) {
    std::vector<std::string> errs;
    if (!(p.a1 > 0.0)) errs.push_back("A1 must be > 0");
    if (!(p.a1 < p.a2)) errs.push_back("A1 < A2 violated");
    if (!(p.b1 > 0.0)) errs.push_back("b1 must be > 0");
    if (!(p.b1 < p.b2)) errs.push_back("b1 < b2 violated");
    if (!(p.dt > 0.0)) errs.push_back("dt must be > 0");
    if (!(p.dt_cross > 0.0)) errs.push_back("dt_cross must be > 0");
    if (!(p.t_end > 0.0)) errs.push_back("t_end must be > 0");
    if (!(p.s0 > 0.0)) errs.push_back("s0 must be > 0");
    if (!(p.kappa > 0.0)) errs.push_back("kappa must be > 0");
    if (!(p.theta >= 0.0)) errs.push_back("theta must be >= 0");
    if (!(p.n_agents > 0)) errs.push_back("n_agents must be > 0");
    if (!(p.lambda1 >= 0.0)) errs.push_back("lambda1 must be >= 0");
    if (!(p.lambda2 >= 0.0)) errs.push_back("lambda2 must be >= 0");
    if (!(std::abs(p.lambda1 + p.lambda2 - 1.0) <= 1e-12))
        errs.push_back("lambda1 + lambda2 = 1 violated");
    const double hb1 = p.herding_lo(), hb2 = p.herding_hi();
    if (!(hb1 > 0.0 && hb1 < hb2))
        errs.push_back("derived 0 < B1 < B2 violated (B1=b1*dt_cross, B2=b2*dt_cross)");
    return errs;
}

std::vector<std::string> validation_errors(const GridSpec& g, const ModelParams& p) {
    std::vector<std::string> errs;
    if (!(g.m_lo < g.m_hi)) errs.push_back("m_lo < m_hi violated");
    if (!(g.c_lo < g.c_hi)) errs.push_back("c_lo < c_hi violated");
    if (g.n_m < 2) errs.push_back("n_m must be >= 2");
    if (g.n_c < 2) errs.push_back("n_c must be >= 2");
    // The re-emission point (s0, 0) must lie in some grid cell; c = 0 may sit
    // on the lower boundary, in which case the first cell row receives it.
    if (!(g.m_lo < p.s0 && p.s0 < g.m_hi))
        errs.push_back("s0 must lie strictly inside [m_lo, m_hi]");
    if (!(g.c_lo <= 0.0 && 0.0 < g.c_hi))
        errs.push_back("c = 0 must lie inside [c_lo, c_hi)");
    return errs;
}

namespace {

std::string join_errors(const std::vector<std::string>& errs) {
    std::ostringstream os;
    os << "invalid parameters:";
    for (const auto& e : errs) os << "\n  - " << e;
    return os.str();
}

}  // namespace

const ModelParams& validate(const ModelParams& p) {
    auto errs = validation_errors(p);
    if (!errs.empty()) throw std::invalid_argument(join_errors(errs));
    return p;
}

const GridSpec& validate(const GridSpec& g, const ModelParams& p) {
    auto errs = validation_errors(g, p);
    if (!errs.empty()) throw std::invalid_argument(join_errors(errs));
    return g;
}

GridSpec default_grid(const ModelParams& p) {
    GridSpec g;
    g.m_lo = 0.25;
    g.m_hi = 2.5;
    g.c_lo = 0.0;
    g.c_hi = 2.0 * p.herding_hi();
    g.n_m = 400;
    g.n_c = 400;
    return g;
}

PresetBundle load_preset(std::string_view name) {
    ModelParams p;  // defaults carry the shared table values
    if (name == "abm-original") {
        p.n_agents = 1000;
        return {p, std::nullopt};
    }
    if (name == "kinetic-particle") {
        p.n_agents = 30000;
        return {p, std::nullopt};
    }
    if (name == "meanfield") {
        p.n_agents = 100000;  // Monte Carlo sample count
        return {p, default_grid(p)};
    }
    throw std::invalid_argument("unknown preset '" + std::string(name) +
                                "'; expected one of abm-original, kinetic-particle, meanfield");
}

std::vector<std::string> preset_names() {
    return {"abm-original", "kinetic-particle", "meanfield"};
}

std::string to_config_text(const ModelParams& p, const GridSpec* grid) {
    std::ostringstream os;
    os << "kappa = " << format_double(p.kappa) << '\n'
       << "theta = " << format_double(p.theta) << '\n'
       << "A1 = " << format_double(p.a1) << '\n'
       << "A2 = " << format_double(p.a2) << '\n'
       << "b1 = " << format_double(p.b1) << '\n'
       << "b2 = " << format_double(p.b2) << '\n'
       << "dt = " << format_double(p.dt) << '\n'
       << "t_end = " << format_double(p.t_end) << '\n'
       << "n_agents = " << p.n_agents << '\n'
       << "lambda1 = " << format_double(p.lambda1) << '\n'
       << "lambda2 = " << format_double(p.lambda2) << '\n'
       << "s0 = " << format_double(p.s0) << '\n'
       << "seed = " << p.seed << '\n'
       << "dt_cross = " << format_double(p.dt_cross) << '\n';
    if (grid) {
        os << "m_lo = " << format_double(grid->m_lo) << '\n'
           << "m_hi = " << format_double(grid->m_hi) << '\n'
           << "c_lo = " << format_double(grid->c_lo) << '\n'
           << "c_hi = " << format_double(grid->c_hi) << '\n'
           << "n_m = " << grid->n_m << '\n'
           << "n_c = " << grid->n_c << '\n';
    }
    return os.str();
}

void apply_override(ModelParams& p, GridSpec& g, std::string_view key,
                    std::string_view value) {
    key = trim(key);
    value = trim(value);
    if (key == "kappa") p.kappa = parse_double(value, key);
    else if (key == "theta") p.theta = parse_double(value, key);
    else if (key == "A1") p.a1 = parse_double(value, key);
    else if (key == "A2") p.a2 = parse_double(value, key);
    else if (key == "b1") p.b1 = parse_double(value, key);
    else if (key == "b2") p.b2 = parse_double(value, key);
    else if (key == "dt") p.dt = parse_double(value, key);
    else if (key == "t_end") p.t_end = parse_double(value, key);
    else if (key == "n_agents") p.n_agents = parse_int<std::int64_t>(value, key);
    else if (key == "lambda1") p.lambda1 = parse_double(value, key);
    else if (key == "lambda2") p.lambda2 = parse_double(value, key);
    else if (key == "s0") p.s0 = parse_double(value, key);
    else if (key == "seed") p.seed = parse_int<std::uint64_t>(value, key);
    else if (key == "dt_cross") p.dt_cross = parse_double(value, key);
    else if (key == "m_lo") g.m_lo = parse_double(value, key);
    else if (key == "m_hi") g.m_hi = parse_double(value, key);
    else if (key == "c_lo") g.c_lo = parse_double(value, key);
    else if (key == "c_hi") g.c_hi = parse_double(value, key);
    else if (key == "n_m") g.n_m = parse_int<int>(value, key);
    else if (key == "n_c") g.n_c = parse_int<int>(value, key);
    else throw std::invalid_argument("config: unknown key '" + std::string(key) + "'");
}

PresetBundle parse_config_text(const std::string& text) {
    ModelParams p;
    GridSpec g;
    bool saw_grid_key = false;
    std::istringstream is(text);
    std::string line;
    while (std::getline(is, line)) {
        std::string_view sv = trim(line);
        if (sv.empty() || sv.front() == '#') continue;
        auto eq = sv.find('=');
        if (eq == std::string_view::npos) {
            throw std::invalid_argument("config: expected 'key = value', got '" + line + "'");
        }
        std::string_view key = trim(sv.substr(0, eq));
        if (key == "m_lo" || key == "m_hi" || key == "c_lo" || key == "c_hi" ||
            key == "n_m" || key == "n_c") {
            saw_grid_key = true;
        }
        apply_override(p, g, key, sv.substr(eq + 1));
    }
    PresetBundle out{p, std::nullopt};
    if (saw_grid_key) out.grid = g;
    return out;
}

}  // namespace cross
