#include "fbmloss/io.hpp"

#include "fbmloss/errors.hpp"

#include <json.hpp>

#include <charconv>
#include <fstream>
#include <ostream>
#include <sstream>

namespace fbm {
namespace {

using nlohmann::json;

double number_of(const json& value, const std::string& key) {
    if (!value.is_number()) {
        throw ConfigError("config key '" + key + "' must be a number");
    }
    return value.get<double>();
}

std::uint64_t unsigned_of(const json& value, const std::string& key) {
    if (!value.is_number_unsigned()) {
        throw ConfigError("config key '" + key + "' must be a non-negative integer");
    }
    return value.get<std::uint64_t>();
}

void mark(std::set<std::string>* seen, const std::string& key) {
    if (seen) {
        seen->insert(key);
    }
}

std::string optional_number(const std::optional<double>& v) { return v ? format_double(*v) : std::string(); }

std::string csv_field(std::string_view s) {
    if (s.find_first_of(",\"\n") == std::string_view::npos) {
        return std::string(s);
    }
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') {
            out += '"';
        }
        out += c;
    }
    out += '"';
    return out;
}

} // namespace

void apply_config_json(ExperimentConfig& config, std::string_view text, std::set<std::string>* seen) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("config is not valid JSON: ") + e.what());
    }
    if (!doc.is_object()) {
        throw ConfigError("config must be a JSON object");
    }
    for (const auto& [key, value] : doc.items()) {
        if (key == "params") {
            if (!value.is_object()) {
                throw ConfigError("config key 'params' must be an object");
            }
            for (const auto& [pk, pv] : value.items()) {
                const std::string path = "params." + pk;
                if (pk == "hurst") {
                    try {
                        config.params.hurst = HurstParameter(number_of(pv, path));
                    } catch (const DomainError& e) {
                        throw ConfigError(e.what());
                    }
                } else if (pk == "mu") {
                    config.params.mu = number_of(pv, path);
                } else if (pk == "sigma") {
                    config.params.sigma = number_of(pv, path);
                } else if (pk == "horizon") {
                    config.params.horizon = number_of(pv, path);
                } else {
                    throw ConfigError("unknown config key '" + path + "'");
                }
                mark(seen, path);
            }
        } else if (key == "n") {
            config.n = unsigned_of(value, key);
        } else if (key == "reps") {
            config.reps = unsigned_of(value, key);
        } else if (key == "method") {
            if (!value.is_string()) {
                throw ConfigError("config key 'method' must be a string");
            }
            config.method = parse_sampler_method(value.get<std::string>());
        } else if (key == "seed") {
            config.seed = unsigned_of(value, key);
        } else if (key == "x_grid") {
            if (!value.is_array()) {
                throw ConfigError("config key 'x_grid' must be an array");
            }
            config.x_grid.clear();
            for (const auto& x : value) {
                config.x_grid.push_back(number_of(x, key));
            }
        } else if (key == "confidence") {
            config.confidence = number_of(value, key);
        } else {
            throw ConfigError("unknown config key '" + key + "'");
        }
        mark(seen, key);
    }
}

void apply_config_file(ExperimentConfig& config, const std::filesystem::path& path, std::set<std::string>* seen) {
    std::ifstream in(path);
    if (!in) {
        throw ConfigError("cannot read config file '" + path.string() + "'");
    }
    std::stringstream buf;
    buf << in.rdbuf();
    apply_config_json(config, buf.str(), seen);
}

std::string config_to_json(const ExperimentConfig& config) {
    // ordered_json keeps insertion order so the echo is stable.
    nlohmann::ordered_json doc;
    doc["params"]["hurst"] = config.params.hurst.value();
    doc["params"]["mu"] = config.params.mu;
    doc["params"]["sigma"] = config.params.sigma;
    doc["params"]["horizon"] = config.params.horizon;
    doc["n"] = config.n;
    doc["reps"] = config.reps;
    doc["method"] = std::string(to_string(config.method));
    doc["seed"] = config.seed;
    doc["x_grid"] = config.x_grid;
    doc["confidence"] = config.confidence;
    return doc.dump();
}

std::string format_double(double value) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, value);
    return std::string(buf, res.ptr);
}

void write_estimates_csv(std::ostream& out, std::span<const EstimateRecord> records) {
    out << "target,x,estimate,std_error,ci_low,ci_high,exceed_count\n";
    for (const auto& r : records) {
        out << csv_field(r.target) << ',' << optional_number(r.x) << ',' << format_double(r.estimate) << ','
            << format_double(r.std_error) << ',' << format_double(r.ci_low) << ',' << format_double(r.ci_high)
            << ',' << (r.exceed_count ? std::to_string(*r.exceed_count) : std::string()) << '\n';
    }
}

void write_report_csv(std::ostream& out, const VerificationReport& report) {
    out << "check,x,bound_low,bound_high,estimate,std_error,ci_low,ci_high,slack,exceed_count,verdict,note\n";
    for (const auto& c : report.checks) {
        out << c.check << ',' << optional_number(c.x) << ',' << optional_number(c.bound_low) << ','
            << optional_number(c.bound_high) << ',' << format_double(c.estimate) << ','
            << format_double(c.std_error) << ',' << format_double(c.ci_low) << ',' << format_double(c.ci_high)
            << ',' << format_double(c.slack) << ','
            << (c.exceed_count ? std::to_string(*c.exceed_count) : std::string()) << ',' << to_string(c.verdict)
            << ',' << csv_field(c.note) << '\n';
    }
}

std::string report_to_json(const VerificationReport& report, const ExperimentConfig& config) {
    nlohmann::ordered_json doc;
    doc["tool"] = std::string(kToolName);
    doc["version"] = std::string(kToolVersion);
    doc["config"] = nlohmann::ordered_json::parse(config_to_json(config));
    doc["grid_bias"] = report.grid_bias;
    doc["overall"] = report.passed() ? "pass" : "fail";
    auto& checks = doc["checks"] = nlohmann::ordered_json::array();
    for (const auto& c : report.checks) {
        nlohmann::ordered_json j;
        j["check"] = c.check;
        j["x"] = c.x ? nlohmann::ordered_json(*c.x) : nlohmann::ordered_json(nullptr);
        j["bound_low"] = c.bound_low ? nlohmann::ordered_json(*c.bound_low) : nlohmann::ordered_json(nullptr);
        j["bound_high"] = c.bound_high ? nlohmann::ordered_json(*c.bound_high) : nlohmann::ordered_json(nullptr);
        j["estimate"] = c.estimate;
        j["ci"] = {c.ci_low, c.ci_high};
        j["slack"] = c.slack;
        j["exceed_count"] =
            c.exceed_count ? nlohmann::ordered_json(*c.exceed_count) : nlohmann::ordered_json(nullptr);
        j["verdict"] = std::string(to_string(c.verdict));
        j["note"] = c.note;
        checks.push_back(std::move(j));
    }
    return doc.dump(2);
}

} // namespace fbm
