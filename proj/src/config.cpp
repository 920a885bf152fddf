#include "runway/config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "runway/csv.hpp"
#include "runway/errors.hpp"

namespace runway {

std::string_view to_string(ModelKind model)
{
    return model == ModelKind::deterministic ? "deterministic" : "stochastic";
}

namespace {

std::string_view trim(std::string_view s)
{
    const char* space = " \t\r\n";
    auto begin = s.find_first_not_of(space);
    if (begin == std::string_view::npos)
        return {};
    auto end = s.find_last_not_of(space);
    return s.substr(begin, end - begin + 1);
}

double parse_number(std::string_view key, std::string_view text)
{
    text = trim(text);
    if (!text.empty() && text.front() == '+')
        text.remove_prefix(1);
    double value = 0.0;
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc() || ptr != text.data() + text.size() || text.empty())
        throw ValidationError(std::string(key), "'" + std::string(text) + "' is not a number");
    return value;
}

std::uint64_t parse_count(std::string_view key, std::string_view text)
{
    text = trim(text);
    std::uint64_t value = 0;
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc() || ptr != text.data() + text.size() || text.empty())
        throw ValidationError(std::string(key),
                              "'" + std::string(text) + "' is not a non-negative integer");
    return value;
}

std::vector<double> parse_list(std::string_view key, std::string_view text)
{
    std::vector<double> values;
    while (!trim(text).empty()) {
        auto comma = text.find(',');
        values.push_back(parse_number(key, text.substr(0, comma)));
        if (comma == std::string_view::npos)
            break;
        text.remove_prefix(comma + 1);
    }
    return values;
}

// Either a single size or "(size, prob), (size, prob), ...".
JumpSpec parse_jump(std::string_view text)
{
    text = trim(text);
    if (text.empty() || text.front() != '(')
        return JumpSpec::constant(parse_number("jump_size", text));

    std::vector<JumpAtom> atoms;
    while (!text.empty()) {
        if (text.front() != '(')
            throw ValidationError("jump_size", "expected '(' in jump distribution");
        auto close = text.find(')');
        if (close == std::string_view::npos)
            throw ValidationError("jump_size", "unterminated '(' in jump distribution");
        auto pair = parse_list("jump_size", text.substr(1, close - 1));
        if (pair.size() != 2)
            throw ValidationError("jump_size", "each jump atom is (size, probability)");
        atoms.push_back({pair[0], pair[1]});
        text = trim(text.substr(close + 1));
        if (!text.empty()) {
            if (text.front() != ',')
                throw ValidationError("jump_size", "jump atoms must be comma separated");
            text = trim(text.substr(1));
        }
    }
    return JumpSpec::discrete(std::move(atoms));
}

std::string emit_jump(const JumpSpec& jump)
{
    if (jump.is_constant() && jump.atoms().front().probability == 1.0)
        return format_number(jump.atoms().front().size);
    std::string out;
    for (const auto& atom : jump.atoms()) {
        if (!out.empty())
            out += ", ";
        out += "(" + format_number(atom.size) + ", " + format_number(atom.probability) + ")";
    }
    return out;
}

}  // namespace

bool is_sweepable(std::string_view name)
{
    return name == "K0" || name == "eta" || name == "sigma" || name == "lambda"
           || name == "jump_size";
}

void set_sweep_parameter(ScenarioConfig& config, std::string_view name, double value)
{
    if (name == "K0")
        config.capacity.K0 = value;
    else if (name == "eta")
        config.demand.eta = value;
    else if (name == "sigma")
        config.demand.sigma = value;
    else if (name == "lambda")
        config.demand.lambda = value;
    else if (name == "jump_size")
        config.demand.jump = JumpSpec::constant(value);
    else
        throw ValidationError("sweep.param", "'" + std::string(name) + "' cannot be swept");
}

void apply_setting(ScenarioConfig& config, std::string_view key, std::string_view value)
{
    key = trim(key);
    value = trim(value);
    const std::string k(key);
    auto number = [&] { return parse_number(key, value); };

    if (k == "c") config.cost.c = number();
    else if (k == "c_h") config.cost.c_h = number();
    else if (k == "A") config.cost.A = number();
    else if (k == "alpha") config.cost.alpha = number();
    else if (k == "beta") config.cost.beta = number();
    else if (k == "mu") config.cost.mu = number();
    else if (k == "f") config.cost.f = number();
    else if (k == "v") config.cost.v = number();
    else if (k == "N_p") config.cost.N_p = number();
    else if (k == "rho") config.cost.rho = number();
    else if (k == "eta") config.demand.eta = number();
    else if (k == "sigma") config.demand.sigma = number();
    else if (k == "lambda") config.demand.lambda = number();
    else if (k == "jump_size") config.demand.jump = parse_jump(value);
    else if (k == "K0") config.capacity.K0 = number();
    else if (k == "runway_unit") config.capacity.runway_unit = number();
    else if (k == "max_runways_added") {
        auto count = parse_count(key, value);
        if (count > 1000)
            throw ValidationError(k, "at most 1000 runways");
        config.capacity.max_runways_added = static_cast<int>(count);
    }
    else if (k == "Q0") config.q0 = number();
    else if (k == "model") {
        if (value == "deterministic")
            config.model = ModelKind::deterministic;
        else if (value == "stochastic")
            config.model = ModelKind::stochastic;
        else
            throw ValidationError(k, "expected 'deterministic' or 'stochastic'");
    }
    else if (k == "mc.dt") config.sim.dt = number();
    else if (k == "mc.horizon") config.sim.horizon = number();
    else if (k == "mc.paths") config.sim.n_paths = parse_count(key, value);
    else if (k == "mc.seed") config.sim.seed = parse_count(key, value);
    else if (k == "sweep.param") {
        if (!config.sweep)
            config.sweep.emplace();
        config.sweep->param = std::string(value);
    }
    else if (k == "sweep.values") {
        if (!config.sweep)
            config.sweep.emplace();
        config.sweep->values = parse_list(key, value);
    }
    else
        throw ValidationError(k, "unknown configuration key");
}

ScenarioConfig parse_config(std::string_view text)
{
    ScenarioConfig config;
    std::size_t line_no = 0;
    while (!text.empty()) {
        auto newline = text.find('\n');
        std::string_view line = text.substr(0, newline);
        text = newline == std::string_view::npos ? std::string_view{} : text.substr(newline + 1);
        ++line_no;

        if (auto hash = line.find('#'); hash != std::string_view::npos)
            line = line.substr(0, hash);
        line = trim(line);
        if (line.empty())
            continue;
        auto eq = line.find('=');
        if (eq == std::string_view::npos)
            throw ValidationError("line " + std::to_string(line_no), "expected 'key = value'");
        apply_setting(config, line.substr(0, eq), line.substr(eq + 1));
    }
    return config;
}

ScenarioConfig load_config(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in)
        throw std::runtime_error("cannot open config file " + path.string());
    std::ostringstream text;
    text << in.rdbuf();
    return parse_config(text.str());
}

std::string emit_config(const ScenarioConfig& config)
{
    std::ostringstream out;
    auto put = [&](std::string_view key, const std::string& value) {
        out << key << " = " << value << '\n';
    };
    const auto& c = config.cost;
    put("c", format_number(c.c));
    put("c_h", format_number(c.c_h));
    put("A", format_number(c.A));
    put("alpha", format_number(c.alpha));
    put("beta", format_number(c.beta));
    put("mu", format_number(c.mu));
    put("f", format_number(c.f));
    put("v", format_number(c.v));
    put("N_p", format_number(c.N_p));
    put("rho", format_number(c.rho));
    put("eta", format_number(config.demand.eta));
    put("sigma", format_number(config.demand.sigma));
    put("lambda", format_number(config.demand.lambda));
    put("jump_size", emit_jump(config.demand.jump));
    put("K0", format_number(config.capacity.K0));
    put("runway_unit", format_number(config.capacity.runway_unit));
    put("max_runways_added", std::to_string(config.capacity.max_runways_added));
    put("model", std::string(to_string(config.model)));
    put("Q0", format_number(config.q0));
    put("mc.dt", format_number(config.sim.dt));
    put("mc.horizon", format_number(config.sim.horizon));
    put("mc.paths", std::to_string(config.sim.n_paths));
    put("mc.seed", std::to_string(config.sim.seed));
    if (config.sweep) {
        put("sweep.param", config.sweep->param);
        std::string values;
        for (double v : config.sweep->values) {
            if (!values.empty())
                values += ", ";
            values += format_number(v);
        }
        put("sweep.values", values);
    }
    return out.str();
}

void ScenarioConfig::validate() const
{
    cost.validate();
    demand.validate();
    capacity.validate();
    sim.validate();
    if (!(cost.rho > demand.eta))
        throw ValidationError("rho", "discount rate must exceed the growth rate eta");
    if (!(std::isfinite(q0) && q0 > 0.0))
        throw ValidationError("Q0", "must be finite and positive");
    if (sweep) {
        if (!is_sweepable(sweep->param))
            throw ValidationError("sweep.param", "'" + sweep->param
                                                     + "' is not one of K0, eta, sigma, lambda, "
                                                       "jump_size");
        if (sweep->values.empty())
            throw ValidationError("sweep.values", "must list at least one value");
        for (double v : sweep->values)
            if (!std::isfinite(v))
                throw ValidationError("sweep.values", "values must be finite");
    }
}

}  // namespace runway
