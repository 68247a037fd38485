#include "bdcat/config.hpp"

#include <cmath>
#include <sstream>

#include "bdcat/errors.hpp"

namespace bdcat {

namespace {

using nlohmann::json;

[[noreturn]] void bad_field(const std::string& where, const std::string& key,
                            const std::string& why) {
    std::ostringstream msg;
    msg << "config field \"" << where << "." << key << "\" " << why;
    throw ConfigError(msg.str());
}

const json* find(const json& block, const std::string& key) {
    const auto it = block.find(key);
    return it == block.end() ? nullptr : &*it;
}

double get_number(const json& block, const std::string& where, const std::string& key) {
    const json* field = find(block, key);
    if (field == nullptr) {
        bad_field(where, key, "is required");
    }
    if (!field->is_number()) {
        bad_field(where, key, "must be a number");
    }
    const double value = field->get<double>();
    if (!std::isfinite(value)) {
        bad_field(where, key, "must be finite");
    }
    return value;
}

double get_number_or(const json& block, const std::string& where, const std::string& key,
                     double fallback) {
    return find(block, key) == nullptr ? fallback : get_number(block, where, key);
}

std::size_t get_count_or(const json& block, const std::string& where, const std::string& key,
                         std::size_t fallback) {
    const json* field = find(block, key);
    if (field == nullptr) {
        return fallback;
    }
    if (!field->is_number_integer() || (field->is_number_integer() && field->get<long long>() < 0)) {
        bad_field(where, key, "must be a nonnegative integer");
    }
    return field->get<std::size_t>();
}

int get_int_or(const json& block, const std::string& where, const std::string& key,
               int fallback) {
    const json* field = find(block, key);
    if (field == nullptr) {
        return fallback;
    }
    if (!field->is_number_integer()) {
        bad_field(where, key, "must be an integer");
    }
    return field->get<int>();
}

std::vector<double> get_rate_table(const json& block, const std::string& where,
                                   const std::string& key) {
    const json* field = find(block, key);
    if (field == nullptr) {
        bad_field(where, key, "is required");
    }
    if (!field->is_array() || field->empty()) {
        bad_field(where, key, "must be a non-empty array of numbers");
    }
    std::vector<double> table;
    table.reserve(field->size());
    for (const json& entry : *field) {
        if (!entry.is_number()) {
            bad_field(where, key, "must be a non-empty array of numbers");
        }
        table.push_back(entry.get<double>());
    }
    return table;
}

RateSchedule parse_rates(const json& block) {
    if (!block.is_object()) {
        throw ConfigError("config block \"model.rates\" must be an object");
    }
    const json* kind_field = find(block, "kind");
    if (kind_field == nullptr || !kind_field->is_string()) {
        throw ConfigError("config field \"model.rates.kind\" must be one of "
                          "\"constant\", \"affine\", \"table\"");
    }
    const std::string kind = kind_field->get<std::string>();
    const std::string where = "model.rates";
    if (kind == "constant") {
        reject_unknown_keys(block, {"kind", "lambda", "mu"}, where);
        return RateSchedule::constant(get_number(block, where, "lambda"),
                                      get_number(block, where, "mu"));
    }
    if (kind == "affine") {
        reject_unknown_keys(block, {"kind", "lambda", "mu", "birth_offset", "death_offset"},
                            where);
        return RateSchedule::affine(get_number(block, where, "lambda"),
                                    get_number(block, where, "birth_offset"),
                                    get_number(block, where, "mu"),
                                    get_number(block, where, "death_offset"));
    }
    if (kind == "table") {
        reject_unknown_keys(block, {"kind", "birth", "death"}, where);
        return RateSchedule::table(get_rate_table(block, where, "birth"),
                                   get_rate_table(block, where, "death"));
    }
    std::ostringstream msg;
    msg << "config field \"model.rates.kind\" has unknown value \"" << kind
        << "\" (expected \"constant\", \"affine\" or \"table\")";
    throw ConfigError(msg.str());
}

}  // namespace

void reject_unknown_keys(const json& block, const std::vector<std::string>& allowed,
                         const std::string& where) {
    for (const auto& item : block.items()) {
        bool known = false;
        for (const std::string& key : allowed) {
            if (item.key() == key) {
                known = true;
                break;
            }
        }
        if (!known) {
            std::ostringstream msg;
            msg << "unknown config key \"" << item.key() << "\" in " << where << " (allowed:";
            for (const std::string& key : allowed) {
                msg << " " << key;
            }
            msg << ")";
            throw ConfigError(msg.str());
        }
    }
}

Model parse_model(const json& block) {
    if (!block.is_object()) {
        throw ConfigError("config block \"model\" must be an object");
    }
    reject_unknown_keys(block, {"rates", "alpha", "beta"}, "model");
    const json* rates = find(block, "rates");
    if (rates == nullptr) {
        throw ConfigError("config block \"model\" needs a \"rates\" entry");
    }
    Model model{parse_rates(*rates),
                CatastropheRates{get_number(block, "model", "alpha"),
                                 get_number(block, "model", "beta")}};
    return model;
}

RunConfig parse_config(const std::string& text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& error) {
        throw ConfigError(std::string("configuration is not valid JSON: ") + error.what());
    }
    if (!doc.is_object()) {
        throw ConfigError("configuration root must be a JSON object");
    }
    reject_unknown_keys(doc, {"model", "task", "numerics", "output"}, "configuration");

    RunConfig cfg;
    const json* model = find(doc, "model");
    if (model == nullptr) {
        throw ConfigError("configuration needs a \"model\" block");
    }
    cfg.model = parse_model(*model);

    if (const json* task = find(doc, "task")) {
        if (!task->is_object()) {
            throw ConfigError("config block \"task\" must be an object");
        }
        cfg.task = *task;
    }

    if (const json* numerics = find(doc, "numerics")) {
        if (!numerics->is_object()) {
            throw ConfigError("config block \"numerics\" must be an object");
        }
        reject_unknown_keys(*numerics, {"truncation", "quadrature", "inversion"}, "numerics");
        if (const json* trunc = find(*numerics, "truncation")) {
            if (!trunc->is_object()) {
                throw ConfigError("config block \"numerics.truncation\" must be an object");
            }
            const std::string where = "numerics.truncation";
            reject_unknown_keys(*trunc, {"initial_level", "growth_factor", "rel_tol", "max_level"},
                                where);
            TruncationPolicy& policy = cfg.numerics.truncation;
            policy.initial_level = get_count_or(*trunc, where, "initial_level",
                                                policy.initial_level);
            policy.growth_factor = get_count_or(*trunc, where, "growth_factor",
                                                policy.growth_factor);
            policy.rel_tol = get_number_or(*trunc, where, "rel_tol", policy.rel_tol);
            policy.max_level = get_count_or(*trunc, where, "max_level", policy.max_level);
        }
        if (const json* quad = find(*numerics, "quadrature")) {
            if (!quad->is_object()) {
                throw ConfigError("config block \"numerics.quadrature\" must be an object");
            }
            reject_unknown_keys(*quad, {"abs_tol"}, "numerics.quadrature");
            cfg.numerics.quadrature.abs_tol = get_number_or(
                *quad, "numerics.quadrature", "abs_tol", cfg.numerics.quadrature.abs_tol);
        }
        if (const json* inv = find(*numerics, "inversion")) {
            if (!inv->is_object()) {
                throw ConfigError("config block \"numerics.inversion\" must be an object");
            }
            const std::string where = "numerics.inversion";
            reject_unknown_keys(*inv, {"decay", "terms", "average_terms", "tol"}, where);
            InversionSettings& settings = cfg.numerics.inversion;
            settings.decay = get_number_or(*inv, where, "decay", settings.decay);
            settings.terms = get_int_or(*inv, where, "terms", settings.terms);
            settings.average_terms = get_int_or(*inv, where, "average_terms",
                                                settings.average_terms);
            settings.tol = get_number_or(*inv, where, "tol", settings.tol);
        }
    }

    if (const json* output = find(doc, "output")) {
        if (!output->is_object()) {
            throw ConfigError("config block \"output\" must be an object");
        }
        reject_unknown_keys(*output, {"format", "path"}, "output");
        if (const json* format = find(*output, "format")) {
            if (!format->is_string()) {
                throw ConfigError("config field \"output.format\" must be \"csv\" or \"json\"");
            }
            const std::string name = format->get<std::string>();
            if (name == "csv") {
                cfg.output.format = OutputConfig::Format::Csv;
            } else if (name == "json") {
                cfg.output.format = OutputConfig::Format::Json;
            } else {
                std::ostringstream msg;
                msg << "config field \"output.format\" has unknown value \"" << name
                    << "\" (expected \"csv\" or \"json\")";
                throw ConfigError(msg.str());
            }
        }
        if (const json* path = find(*output, "path")) {
            if (!path->is_string()) {
                throw ConfigError("config field \"output.path\" must be a string");
            }
            cfg.output.path = path->get<std::string>();
        }
    }

    cfg.numerics.truncation.validate();
    cfg.numerics.quadrature.validate();
    cfg.numerics.inversion.validate();
    return cfg;
}

}  // namespace bdcat
