#include "yardsale/config.hpp"

#include <algorithm>
#include <array>
#include <fstream>
#include <sstream>

#include "yardsale/errors.hpp"

namespace yardsale {

using nlohmann::json;
using nlohmann::ordered_json;

ConfigError::ConfigError(std::optional<std::size_t> line, const std::string& message)
    : std::runtime_error(line ? "line " + std::to_string(*line) + ": " + message : message), line_(line) {}

namespace {

constexpr std::array kTopLevelKeys{"n_agents", "initial",      "p",       "delta",
                                   "fraction", "lambda",       "chi",     "max_steps",
                                   "condensation_epsilon", "record_every", "seed", "out"};

class Parser {
public:
    explicit Parser(std::string_view text) : text_(text) {}

    RunConfig run() {
        json doc;
        try {
            doc = json::parse(text_);
        } catch (const json::parse_error& e) {
            throw ConfigError(line_of_byte(e.byte), std::string("malformed document: ") + e.what());
        }
        if (!doc.is_object()) throw ConfigError(std::nullopt, "configuration must be a key-value object");
        for (const auto& [key, value] : doc.items()) {
            if (std::find(kTopLevelKeys.begin(), kTopLevelKeys.end(), key) == kTopLevelKeys.end())
                fail(key, "unknown key '" + key + "'");
        }

        RunConfig cfg;
        auto& traj = cfg.trajectory;
        auto& params = traj.params;

        params.n_agents = static_cast<std::size_t>(require_uint(doc, "n_agents"));
        if (params.n_agents < 2) fail("n_agents", "n_agents must be at least 2");

        const bool has_p = doc.contains("p");
        const bool has_delta = doc.contains("delta");
        if (has_p && has_delta) fail("delta", "give either p or delta, not both");
        if (has_p) {
            const double p = require_number(doc, "p");
            if (!(p >= 0.5 && p < 1.0)) fail("p", "p must lie in [0.5, 1), got " + std::to_string(p));
            params.delta = p - 0.5;
        } else if (has_delta) {
            const double d = require_number(doc, "delta");
            if (!(d >= 0.0 && d < 0.5)) fail("delta", "delta must lie in [0, 0.5), got " + std::to_string(d));
            params.delta = d;
        } else {
            throw ConfigError(std::nullopt, "missing required key 'p'");
        }

        parse_initial(doc, traj);

        if (doc.contains("fraction")) params.fraction = parse_fraction(doc.at("fraction"));

        if (doc.contains("lambda") && !doc.at("lambda").is_null()) {
            const auto lambda = number_list(doc.at("lambda"), "lambda");
            if (lambda.size() != params.n_agents)
                fail("lambda", "lambda has " + std::to_string(lambda.size()) + " entries, expected n_agents = " +
                                   std::to_string(params.n_agents));
            for (double l : lambda)
                if (!(l > 0.0 && l < 1.0)) fail("lambda", "every lambda must lie in (0,1)");
            params.risk_lambda = lambda;
        }

        if (doc.contains("chi") && !doc.at("chi").is_null()) {
            const double chi = require_number(doc, "chi");
            if (!(chi > 0.0 && chi < 1.0)) fail("chi", "chi must lie in (0,1), got " + std::to_string(chi));
            params.tax_chi = chi;
        }

        if (doc.contains("max_steps")) {
            traj.max_steps = require_uint(doc, "max_steps");
            if (traj.max_steps < 1) fail("max_steps", "max_steps must be at least 1");
        }
        if (doc.contains("record_every")) {
            traj.record_every = require_uint(doc, "record_every");
            if (traj.record_every < 1) fail("record_every", "record_every must be at least 1");
        }

        if (doc.contains("condensation_epsilon")) {
            if (doc.at("condensation_epsilon").is_null()) {
                traj.condensation_epsilon.reset();
            } else {
                const double eps = require_number(doc, "condensation_epsilon");
                if (!(eps > 0.0 && eps < 1.0)) fail("condensation_epsilon", "condensation_epsilon must lie in (0,1)");
                traj.condensation_epsilon = eps;
            }
        } else if (params.tax_chi) {
            traj.condensation_epsilon.reset();
        }

        traj.key = StreamKey{require_uint(doc, "seed"), 0};

        if (doc.contains("out")) {
            if (!doc.at("out").is_string()) fail("out", "out must be a path prefix string");
            cfg.out = doc.at("out").get<std::string>();
            if (cfg.out.empty()) fail("out", "out must not be empty");
        }

        try {
            traj.validate();
        } catch (const DomainError& e) {
            if (traj.condensation_epsilon && params.tax_chi) fail("condensation_epsilon", e.what());
            throw ConfigError(std::nullopt, e.what());
        }
        return cfg;
    }

private:
    [[noreturn]] void fail(std::string_view key, const std::string& message) const {
        throw ConfigError(line_of_key(key), message);
    }

    std::optional<std::size_t> line_of_key(std::string_view key) const {
        const std::string quoted = "\"" + std::string(key) + "\"";
        const auto pos = text_.find(quoted);
        if (pos == std::string_view::npos) return std::nullopt;
        return line_of_byte(pos + 1);
    }

    std::size_t line_of_byte(std::size_t byte) const {
        const std::size_t end = std::min(byte, text_.size());
        return 1 + static_cast<std::size_t>(std::count(text_.begin(), text_.begin() + static_cast<std::ptrdiff_t>(end), '\n'));
    }

    double require_number(const json& obj, const char* key) const {
        if (!obj.contains(key)) throw ConfigError(std::nullopt, std::string("missing required key '") + key + "'");
        const json& v = obj.at(key);
        if (!v.is_number()) fail(key, std::string("'") + key + "' must be a number");
        return v.get<double>();
    }

    std::uint64_t require_uint(const json& obj, const char* key) const {
        if (!obj.contains(key)) throw ConfigError(std::nullopt, std::string("missing required key '") + key + "'");
        const json& v = obj.at(key);
        if (v.is_number_unsigned()) return v.get<std::uint64_t>();
        if (v.is_number_integer()) fail(key, std::string("'") + key + "' must be nonnegative");
        fail(key, std::string("'") + key + "' must be an integer");
    }

    std::vector<double> number_list(const json& v, const char* key) const {
        if (!v.is_array()) fail(key, std::string("'") + key + "' must be a list of numbers");
        std::vector<double> out;
        for (const auto& x : v) {
            if (!x.is_number()) fail(key, std::string("'") + key + "' must contain only numbers");
            out.push_back(x.get<double>());
        }
        return out;
    }

    void parse_initial(const json& doc, TrajectoryConfig& traj) const {
        if (!doc.contains("initial")) throw ConfigError(std::nullopt, "missing required key 'initial'");
        const json& v = doc.at("initial");
        if (v.is_string()) {
            if (v.get<std::string>() != "uniform") fail("initial", "initial must be \"uniform\" or a list of reals");
            traj.initial = UniformInitial{};
            return;
        }
        auto wealth = number_list(v, "initial");
        if (wealth.size() != traj.params.n_agents)
            fail("initial", "initial has " + std::to_string(wealth.size()) + " entries, expected n_agents = " +
                                std::to_string(traj.params.n_agents));
        double sum = 0.0;
        for (double x : wealth) {
            if (!(x >= 0.0)) fail("initial", "initial wealth entries must be nonnegative");
            sum += x;
        }
        if (!(sum > 0.0)) fail("initial", "initial wealth must sum to a positive value");
        traj.initial = std::move(wealth);
    }

    FractionDistribution parse_fraction(const json& v) const {
        if (!v.is_object() || !v.contains("kind") || !v.at("kind").is_string())
            fail("fraction", "fraction must be an object with a string 'kind'");
        const std::string kind = v.at("kind").get<std::string>();
        auto only = [&](std::initializer_list<const char*> allowed) {
            for (const auto& [key, value] : v.items()) {
                if (key == "kind") continue;
                if (std::none_of(allowed.begin(), allowed.end(), [&](const char* a) { return key == a; }))
                    fail(key, "unknown key '" + key + "' in fraction of kind '" + kind + "'");
            }
        };
        FractionDistribution dist;
        if (kind == "constant") {
            only({"beta"});
            dist = ConstantFraction{require_number(v, "beta")};
        } else if (kind == "uniform") {
            only({"lo", "hi"});
            dist = UniformFraction{require_number(v, "lo"), require_number(v, "hi")};
        } else if (kind == "beta") {
            only({"a", "b"});
            dist = BetaFraction{require_number(v, "a"), require_number(v, "b")};
        } else {
            fail("kind", "fraction kind must be constant, uniform or beta, got '" + kind + "'");
        }
        try {
            validate(dist);
        } catch (const DomainError& e) {
            fail("fraction", e.what());
        }
        return dist;
    }

    std::string_view text_;
};

}  // namespace

RunConfig parse_config(std::string_view text) { return Parser(text).run(); }

RunConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot read configuration file " + path.string());
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return parse_config(buffer.str());
}

ordered_json fraction_to_json(const FractionDistribution& dist) {
    struct {
        ordered_json operator()(const ConstantFraction& d) const { return {{"kind", "constant"}, {"beta", d.beta}}; }
        ordered_json operator()(const UniformFraction& d) const {
            return {{"kind", "uniform"}, {"lo", d.lo}, {"hi", d.hi}};
        }
        ordered_json operator()(const BetaFraction& d) const { return {{"kind", "beta"}, {"a", d.a}, {"b", d.b}}; }
    } to_json;
    return std::visit(to_json, dist);
}

ordered_json config_to_json(const RunConfig& config) {
    const auto& traj = config.trajectory;
    const auto& params = traj.params;
    ordered_json doc;
    doc["n_agents"] = params.n_agents;
    if (const auto* wealth = std::get_if<std::vector<double>>(&traj.initial))
        doc["initial"] = *wealth;
    else
        doc["initial"] = "uniform";
    doc["delta"] = params.delta;
    doc["fraction"] = fraction_to_json(params.fraction);
    if (params.risk_lambda) doc["lambda"] = *params.risk_lambda;
    if (params.tax_chi) doc["chi"] = *params.tax_chi;
    doc["max_steps"] = traj.max_steps;
    doc["condensation_epsilon"] = traj.condensation_epsilon ? ordered_json(*traj.condensation_epsilon) : ordered_json(nullptr);
    doc["record_every"] = traj.record_every;
    doc["seed"] = traj.key.master_seed;
    doc["out"] = config.out;
    return doc;
}

}  // namespace yardsale
