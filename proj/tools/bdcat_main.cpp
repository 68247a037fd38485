#include <algorithm>
#include <array>
#include <charconv>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "bdcat/catastrophe.hpp"
#include "bdcat/config.hpp"
#include "bdcat/crosscheck.hpp"
#include "bdcat/errors.hpp"
#include "bdcat/first_catastrophe.hpp"
#include "bdcat/resolvent.hpp"
#include "bdcat/simulate.hpp"
#include "bdcat/transient.hpp"

namespace {

using bdcat::ConfigError;
using nlohmann::json;

// Locale-independent shortest round-trip formatting for CSV cells.
std::string fmt(double value) {
    std::array<char, 64> buf{};
    const auto result = std::to_chars(buf.data(), buf.data() + buf.size(), value);
    return std::string(buf.data(), result.ptr);
}

struct Options {
    std::optional<std::string> config_path;
    std::uint64_t seed = 123456789;
    std::size_t reps = 100000;
    std::optional<std::string> format;
    std::optional<std::string> out;
    std::optional<double> tol;
    std::optional<std::size_t> max_level;
    bool single_type = false;
};

void add_common_flags(CLI::App* cmd, Options& opt) {
    cmd->add_option("--config", opt.config_path,
                    "Path to the JSON configuration (omit to read it from stdin)");
    cmd->add_option("--seed", opt.seed, "Master seed for simulation substreams")
        ->capture_default_str();
    cmd->add_option("--reps", opt.reps, "Number of simulation replications (minimum 1000)")
        ->capture_default_str();
    cmd->add_option("--format", opt.format, "Output format, overrides the config output block")
        ->check(CLI::IsMember({"csv", "json"}));
    cmd->add_option("--out", opt.out,
                    "Output path, overrides the config output block (\"-\" is stdout)");
    cmd->add_option("--tol", opt.tol,
                    "Truncation convergence tolerance, overrides numerics.truncation.rel_tol");
    cmd->add_option("--max-level", opt.max_level,
                    "Hard cap on the truncation window; the starting window is clamped to "
                    "max-level / growth_factor when necessary");
}

std::string read_config_text(const std::optional<std::string>& path) {
    if (path.has_value()) {
        std::ifstream in(*path);
        if (!in) {
            throw ConfigError("cannot read config file: " + *path);
        }
        std::ostringstream buffer;
        buffer << in.rdbuf();
        return buffer.str();
    }
    std::ostringstream buffer;
    buffer << std::cin.rdbuf();
    return buffer.str();
}

bdcat::RunConfig load_config(const Options& opt) {
    bdcat::RunConfig cfg = bdcat::parse_config(read_config_text(opt.config_path));
    if (opt.format.has_value()) {
        cfg.output.format = *opt.format == "json" ? bdcat::OutputConfig::Format::Json
                                                  : bdcat::OutputConfig::Format::Csv;
    }
    if (opt.out.has_value()) {
        cfg.output.path = *opt.out;
    }
    if (opt.tol.has_value()) {
        cfg.numerics.truncation.rel_tol = *opt.tol;
    }
    if (opt.max_level.has_value()) {
        bdcat::TruncationPolicy& policy = cfg.numerics.truncation;
        policy.max_level = *opt.max_level;
        policy.initial_level =
            std::min(policy.initial_level, policy.max_level / policy.growth_factor);
    }
    cfg.numerics.truncation.validate();
    return cfg;
}

void require_valid_model(const bdcat::Model& model) {
    const bdcat::ValidationReport report = bdcat::validate_model(model);
    if (report.ok()) {
        return;
    }
    std::ostringstream msg;
    for (std::size_t i = 0; i < report.violations.size(); ++i) {
        if (i > 0) {
            msg << "; ";
        }
        msg << report.violations[i];
    }
    throw bdcat::DomainError(msg.str());
}

void write_text(const bdcat::OutputConfig& output, const std::string& text) {
    if (output.path == "-") {
        std::cout << text;
        std::cout.flush();
        return;
    }
    std::ofstream out(output.path);
    if (!out) {
        throw ConfigError("cannot open output path: " + output.path);
    }
    out << text;
}

// ---- task-block helpers (strict, all failures are config errors) ----

int task_int(const json& task, const std::string& key) {
    const auto it = task.find(key);
    if (it == task.end() || !it->is_number_integer()) {
        throw ConfigError("task." + key + " must be an integer");
    }
    return it->get<int>();
}

int task_int_or(const json& task, const std::string& key, int fallback) {
    return task.contains(key) ? task_int(task, key) : fallback;
}

double task_double(const json& task, const std::string& key) {
    const auto it = task.find(key);
    if (it == task.end() || !it->is_number()) {
        throw ConfigError("task." + key + " must be a number");
    }
    return it->get<double>();
}

double task_double_or(const json& task, const std::string& key, double fallback) {
    return task.contains(key) ? task_double(task, key) : fallback;
}

std::vector<double> task_number_list(const json& task, const std::string& key) {
    const auto it = task.find(key);
    if (it == task.end() || !it->is_array() || it->empty()) {
        throw ConfigError("task." + key + " must be a non-empty array of numbers");
    }
    std::vector<double> values;
    for (const json& entry : *it) {
        if (!entry.is_number()) {
            throw ConfigError("task." + key + " must be a non-empty array of numbers");
        }
        values.push_back(entry.get<double>());
    }
    return values;
}

std::vector<int> task_int_list(const json& task, const std::string& key) {
    const auto it = task.find(key);
    if (it == task.end() || !it->is_array() || it->empty()) {
        throw ConfigError("task." + key + " must be a non-empty array of integers");
    }
    std::vector<int> values;
    for (const json& entry : *it) {
        if (!entry.is_number_integer()) {
            throw ConfigError("task." + key + " must be a non-empty array of integers");
        }
        values.push_back(entry.get<int>());
    }
    return values;
}

std::string task_string_or(const json& task, const std::string& key, const std::string& fallback,
                           const std::vector<std::string>& allowed) {
    std::string value = fallback;
    if (task.contains(key)) {
        if (!task.at(key).is_string()) {
            throw ConfigError("task." + key + " must be a string");
        }
        value = task.at(key).get<std::string>();
    }
    if (std::find(allowed.begin(), allowed.end(), value) == allowed.end()) {
        std::ostringstream msg;
        msg << "task." << key << " must be one of:";
        for (const std::string& name : allowed) {
            msg << " " << name;
        }
        throw ConfigError(msg.str());
    }
    return value;
}

// ---- table emission (CSV columns fixed per command; JSON mirrors them) ----

struct Cell {
    std::string text;   // CSV form ("" = empty cell)
    json value;         // JSON form (null = missing)
};

Cell cell(double v) { return {fmt(v), json(v)}; }
Cell cell(long long v) { return {std::to_string(v), json(v)}; }
Cell empty_cell() { return {"", json()}; }

std::string render_table(const bdcat::OutputConfig& output,
                         const std::vector<std::string>& columns,
                         const std::vector<std::vector<Cell>>& rows) {
    if (output.format == bdcat::OutputConfig::Format::Csv) {
        std::ostringstream text;
        for (std::size_t c = 0; c < columns.size(); ++c) {
            text << (c > 0 ? "," : "") << columns[c];
        }
        text << "\n";
        for (const std::vector<Cell>& row : rows) {
            for (std::size_t c = 0; c < row.size(); ++c) {
                text << (c > 0 ? "," : "") << row[c].text;
            }
            text << "\n";
        }
        return text.str();
    }
    json doc = json::array();
    for (const std::vector<Cell>& row : rows) {
        json entry;
        for (std::size_t c = 0; c < row.size(); ++c) {
            entry[columns[c]] = row[c].value;
        }
        doc.push_back(std::move(entry));
    }
    return doc.dump(2) + "\n";
}

// ---- subcommand bodies ----

int cmd_validate(const Options& opt) {
    const bdcat::RunConfig cfg = load_config(opt);
    bdcat::reject_unknown_keys(cfg.task, {}, "task");
    const bdcat::ValidationReport report = bdcat::validate_model(cfg.model);
    json doc;
    doc["ok"] = report.ok();
    doc["violations"] = report.violations;
    write_text(cfg.output, doc.dump(2) + "\n");
    return report.ok() ? 0 : 2;
}

int cmd_transition(const Options& opt) {
    const bdcat::RunConfig cfg = load_config(opt);
    bdcat::reject_unknown_keys(cfg.task, {"start", "times", "method"}, "task");
    const int start = task_int(cfg.task, "start");
    const std::vector<double> times = task_number_list(cfg.task, "times");
    const std::string method =
        task_string_or(cfg.task, "method", "both", {"formula", "direct", "both"});
    require_valid_model(cfg.model);

    const bool want_formula = method != "direct";
    const bool want_direct = method != "formula";
    std::vector<std::vector<Cell>> rows;
    for (double t : times) {
        std::optional<bdcat::TransientRow> formula;
        std::optional<bdcat::TransientRow> direct;
        if (want_formula) {
            formula = bdcat::transition_row_formula(cfg.model.rates, cfg.model.catastrophe, start,
                                                    t, cfg.numerics.truncation,
                                                    cfg.numerics.quadrature);
        }
        if (want_direct) {
            direct = bdcat::transition_row_direct(cfg.model.rates, cfg.model.catastrophe, start,
                                                  t, cfg.numerics.truncation);
        }
        std::size_t top = 0;
        if (formula.has_value()) {
            top = std::max(top, formula->probabilities.size());
        }
        if (direct.has_value()) {
            top = std::max(top, direct->probabilities.size());
        }
        for (std::size_t n = 0; n < top; ++n) {
            std::vector<Cell> row;
            row.push_back(cell(t));
            row.push_back(cell(static_cast<long long>(n)));
            row.push_back(formula.has_value() ? cell(formula->at(static_cast<long long>(n)))
                                              : empty_cell());
            row.push_back(direct.has_value() ? cell(direct->at(static_cast<long long>(n)))
                                             : empty_cell());
            row.push_back(formula.has_value() && direct.has_value()
                              ? cell(std::abs(formula->at(static_cast<long long>(n)) -
                                              direct->at(static_cast<long long>(n))))
                              : empty_cell());
            rows.push_back(std::move(row));
        }
    }
    write_text(cfg.output,
               render_table(cfg.output, {"t", "n", "p_formula", "p_direct", "abs_diff"}, rows));
    return 0;
}

int cmd_resolvent(const Options& opt) {
    const bdcat::RunConfig cfg = load_config(opt);
    bdcat::reject_unknown_keys(cfg.task, {"chain", "start", "targets", "s_real", "s_imag"},
                               "task");
    const std::string chain =
        task_string_or(cfg.task, "chain", "base", {"base", "full", "absorbed"});
    const int start = task_int(cfg.task, "start");
    const std::vector<int> targets = task_int_list(cfg.task, "targets");
    const bdcat::Frequency s(task_double(cfg.task, "s_real"),
                             task_double_or(cfg.task, "s_imag", 0.0));
    require_valid_model(cfg.model);

    std::vector<std::vector<Cell>> rows;
    for (int target : targets) {
        bdcat::Complex value;
        if (chain == "base") {
            value = bdcat::base_resolvent_entry(cfg.model.rates, start, target, s,
                                                cfg.numerics.truncation);
        } else if (chain == "full") {
            value = bdcat::full_resolvent_entry(cfg.model.rates, cfg.model.catastrophe, start,
                                                target, s, cfg.numerics.truncation);
        } else {
            value = bdcat::absorbed_resolvent_entry(cfg.model.rates, cfg.model.catastrophe, start,
                                                    target, s, cfg.numerics.truncation);
        }
        rows.push_back({Cell{chain, json(chain)}, cell(static_cast<long long>(start)),
                        cell(static_cast<long long>(target)), cell(s.real()), cell(s.imag()),
                        cell(value.real()), cell(value.imag())});
    }
    write_text(cfg.output,
               render_table(cfg.output,
                            {"chain", "start", "target", "s_real", "s_imag", "value_real",
                             "value_imag"},
                            rows));
    return 0;
}

int cmd_catastrophe(const Options& opt) {
    const bdcat::RunConfig cfg = load_config(opt);
    bdcat::reject_unknown_keys(cfg.task, {"starts"}, "task");
    const std::vector<int> starts = task_int_list(cfg.task, "starts");
    require_valid_model(cfg.model);
    const bdcat::CatastropheRates& cat = cfg.model.catastrophe;
    if (!(cat.total() > 0.0)) {
        throw bdcat::DomainError("catastrophe statistics need alpha + beta > 0");
    }
    if (opt.single_type && cat.alpha > 0.0 && cat.beta > 0.0) {
        throw bdcat::DomainError(
            "--single-type needs a model with exactly one catastrophe type (alpha = 0 or "
            "beta = 0)");
    }

    std::vector<std::vector<Cell>> rows;
    for (int j : starts) {
        bdcat::FirstCatastropheReport report;
        if (opt.single_type) {
            const bool alpha_only = cat.alpha > 0.0;
            report = bdcat::single_type_moments(
                cfg.model.rates, alpha_only ? cat.alpha : cat.beta,
                alpha_only ? bdcat::SingleType::AlphaOnly : bdcat::SingleType::BetaOnly, j,
                cfg.numerics.truncation);
        } else {
            report = bdcat::first_catastrophe_moments(cfg.model.rates, cat, j,
                                                      cfg.numerics.truncation);
        }
        rows.push_back({cell(static_cast<long long>(j)), cell(report.mean),
                        cell(report.second_moment), cell(report.variance),
                        cell(report.p_alpha_first), cell(report.p_beta_first)});
    }
    write_text(cfg.output,
               render_table(cfg.output,
                            {"j", "mean", "second_moment", "variance", "p_alpha_first",
                             "p_beta_first"},
                            rows));
    return 0;
}

int cmd_density(const Options& opt) {
    const bdcat::RunConfig cfg = load_config(opt);
    bdcat::reject_unknown_keys(cfg.task, {"start", "times"}, "task");
    const int start = task_int(cfg.task, "start");
    const std::vector<double> times = task_number_list(cfg.task, "times");
    require_valid_model(cfg.model);
    if (!(cfg.model.catastrophe.total() > 0.0)) {
        throw bdcat::DomainError("density of the first catastrophe needs alpha + beta > 0");
    }

    std::vector<std::vector<Cell>> rows;
    for (double t : times) {
        const double density =
            bdcat::first_catastrophe_density(cfg.model.rates, cfg.model.catastrophe, start, t,
                                             cfg.numerics.truncation, cfg.numerics.inversion);
        const double cdf =
            bdcat::first_catastrophe_cdf(cfg.model.rates, cfg.model.catastrophe, start, t,
                                         cfg.numerics.truncation, cfg.numerics.inversion);
        rows.push_back({cell(t), cell(density), cell(cdf)});
    }
    write_text(cfg.output, render_table(cfg.output, {"t", "density", "cdf"}, rows));
    return 0;
}

int cmd_simulate(const Options& opt) {
    const bdcat::RunConfig cfg = load_config(opt);
    bdcat::reject_unknown_keys(cfg.task, {"start", "cdf_times"}, "task");
    const int start = task_int_or(cfg.task, "start", 0);
    std::vector<double> cdf_times;
    if (cfg.task.contains("cdf_times")) {
        cdf_times = task_number_list(cfg.task, "cdf_times");
    }
    require_valid_model(cfg.model);

    const bdcat::SimulationSummary sim = bdcat::estimate_first_catastrophe(
        cfg.model.rates, cfg.model.catastrophe, start, opt.reps, opt.seed, cdf_times);
    const double capped_fraction =
        static_cast<double>(sim.capped_paths) / static_cast<double>(sim.replications);
    if (capped_fraction > 0.01) {
        std::ostringstream msg;
        msg << "event cap hit on " << sim.capped_paths << " of " << sim.replications
            << " replications (more than 1%); estimates would be biased";
        throw bdcat::NumericError(msg.str());
    }
    const bdcat::FirstCatastropheReport analytic = bdcat::first_catastrophe_moments(
        cfg.model.rates, cfg.model.catastrophe, start, cfg.numerics.truncation);

    const auto z = [](double estimate, double truth, double se) {
        return se > 0.0 ? (estimate - truth) / se : 0.0;
    };
    json doc;
    doc["command"] = "simulate";
    doc["start"] = start;
    doc["replications"] = sim.replications;
    doc["seed"] = sim.seed;
    doc["rng_protocol"] = sim.rng_protocol;
    doc["capped_paths"] = sim.capped_paths;
    doc["estimates"] = {{"mean", sim.mean_C},
                        {"se_mean", sim.se_mean},
                        {"second_moment", sim.second_moment_C},
                        {"se_second_moment", sim.se_second_moment},
                        {"variance", sim.variance_C},
                        {"se_variance", sim.se_variance},
                        {"p_alpha_first", sim.p_alpha_first},
                        {"se_p_alpha", sim.se_p_alpha},
                        {"p_beta_first", sim.p_beta_first},
                        {"se_p_beta", sim.se_p_beta}};
    doc["analytic"] = {{"mean", analytic.mean},
                       {"second_moment", analytic.second_moment},
                       {"variance", analytic.variance},
                       {"p_alpha_first", analytic.p_alpha_first},
                       {"p_beta_first", analytic.p_beta_first}};
    doc["z_scores"] = {{"mean", z(sim.mean_C, analytic.mean, sim.se_mean)},
                       {"variance", z(sim.variance_C, analytic.variance, sim.se_variance)},
                       {"p_alpha_first",
                        z(sim.p_alpha_first, analytic.p_alpha_first, sim.se_p_alpha)}};
    json cdf = json::array();
    for (const bdcat::CdfPoint& point : sim.cdf) {
        const double analytic_cdf = bdcat::first_catastrophe_cdf(
            cfg.model.rates, cfg.model.catastrophe, start, point.time, cfg.numerics.truncation,
            cfg.numerics.inversion);
        cdf.push_back({{"time", point.time},
                       {"fraction", point.fraction},
                       {"se", point.se},
                       {"analytic", analytic_cdf},
                       {"z", z(point.fraction, analytic_cdf, point.se)}});
    }
    doc["cdf"] = std::move(cdf);
    write_text(cfg.output, doc.dump(2) + "\n");
    return 0;
}

int cmd_crosscheck(const Options& opt) {
    const bdcat::RunConfig cfg = load_config(opt);
    bdcat::reject_unknown_keys(cfg.task, {}, "task");
    const bdcat::CrosscheckReport report =
        bdcat::run_crosscheck(cfg.model, cfg.numerics, opt.seed, opt.reps);

    json doc;
    json checks = json::array();
    for (const bdcat::CheckResult& check : report.checks) {
        json entry;
        entry["name"] = check.name;
        switch (check.status) {
            case bdcat::CheckResult::Status::Pass:
                entry["status"] = "pass";
                break;
            case bdcat::CheckResult::Status::Fail:
                entry["status"] = "fail";
                break;
            case bdcat::CheckResult::Status::Skipped:
                entry["status"] = "skipped";
                break;
        }
        entry["measured"] = check.measured;
        entry["threshold"] = check.threshold;
        entry["note"] = check.note;
        checks.push_back(std::move(entry));
    }
    doc["checks"] = std::move(checks);
    doc["all_passed"] = report.all_passed();
    write_text(cfg.output, doc.dump(2) + "\n");
    return report.all_passed() ? 0 : 4;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{
        "Birth-death chains with two-type catastrophes: resolvents, transition rows, "
        "first-effective-catastrophe statistics, transform inversion, exact-event simulation "
        "and a consistency cross-check suite. Configuration is a JSON document (--config PATH "
        "or stdin); command parameters live in its \"task\" block."};
    app.require_subcommand(1);

    Options opt;
    CLI::App* validate = app.add_subcommand(
        "validate", "Check the model constraints; exit 0 iff the model is usable");
    CLI::App* transition = app.add_subcommand(
        "transition",
        "Transition probability rows; task: {start, times, method: formula|direct|both "
        "(default both)}; CSV columns: t,n,p_formula,p_direct,abs_diff");
    CLI::App* resolvent = app.add_subcommand(
        "resolvent",
        "Resolvent entries; task: {chain: base|full|absorbed (default base), start, targets, "
        "s_real, s_imag (default 0)}; CSV columns: "
        "chain,start,target,s_real,s_imag,value_real,value_imag");
    CLI::App* catastrophe = app.add_subcommand(
        "catastrophe",
        "First-effective-catastrophe moments and type split; task: {starts}; CSV columns: "
        "j,mean,second_moment,variance,p_alpha_first,p_beta_first");
    CLI::App* density = app.add_subcommand(
        "density",
        "First-catastrophe density and CDF by transform inversion; task: {start, times}; CSV "
        "columns: t,density,cdf");
    CLI::App* simulate = app.add_subcommand(
        "simulate",
        "Monte Carlo estimate of the first-catastrophe statistics (JSON output with standard "
        "errors, analytic values and z-scores); task: {start (default 0), cdf_times "
        "(optional)}");
    CLI::App* crosscheck = app.add_subcommand(
        "crosscheck",
        "Run the full consistency suite on the configured model; exit 0 iff every check "
        "passes (skipped checks do not fail the run)");
    for (CLI::App* cmd :
         {validate, transition, resolvent, catastrophe, density, simulate, crosscheck}) {
        add_common_flags(cmd, opt);
    }
    catastrophe->add_flag("--single-type", opt.single_type,
                          "Use the dedicated single-catastrophe-type closed form (model must "
                          "have alpha = 0 or beta = 0)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& help) {
        return app.exit(help);
    } catch (const CLI::ParseError& error) {
        app.exit(error);
        return 1;
    }

    try {
        if (app.got_subcommand(validate)) {
            return cmd_validate(opt);
        }
        if (app.got_subcommand(transition)) {
            return cmd_transition(opt);
        }
        if (app.got_subcommand(resolvent)) {
            return cmd_resolvent(opt);
        }
        if (app.got_subcommand(catastrophe)) {
            return cmd_catastrophe(opt);
        }
        if (app.got_subcommand(density)) {
            return cmd_density(opt);
        }
        if (app.got_subcommand(simulate)) {
            return cmd_simulate(opt);
        }
        return cmd_crosscheck(opt);
    } catch (const bdcat::ConfigError& error) {
        std::cerr << "config error: " << error.what() << "\n";
        return 1;
    } catch (const bdcat::DomainError& error) {
        std::cerr << "constraint violation: " << error.what() << "\n";
        return 2;
    } catch (const bdcat::NumericError& error) {
        std::cerr << "numeric failure: " << error.what() << "\n";
        return 3;
    } catch (const std::exception& error) {
        std::cerr << "error: " << error.what() << "\n";
        return 3;
    }
}
