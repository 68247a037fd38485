#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

#include "bdcat/inversion.hpp"
#include "bdcat/quadrature.hpp"
#include "bdcat/rates.hpp"
#include "bdcat/truncation.hpp"

namespace bdcat {

struct OutputConfig {
    enum class Format { Csv, Json };
    Format format = Format::Csv;
    std::string path = "-";  // "-" means stdout
};

struct NumericsConfig {
    TruncationPolicy truncation;
    QuadratureSettings quadrature;
    InversionSettings inversion;
};

/// Parsed configuration document. The task block is command-specific and is
/// kept as raw JSON here; each subcommand parses its own fields (strictly)
/// from it.
struct RunConfig {
    Model model;
    NumericsConfig numerics;
    OutputConfig output;
    nlohmann::json task = nlohmann::json::object();
};

/// Parses the full configuration document. Unknown keys anywhere in the
/// model/numerics/output blocks are ConfigErrors naming the offending field;
/// so are type mismatches and malformed JSON. The model block is required.
///
/// Document shape:
///   {
///     "model":    {"rates": {"kind": "constant", "lambda": 1.0, "mu": 1.25},
///                  "alpha": 0.4, "beta": 0.3},
///     "task":     { ...command-specific... },
///     "numerics": {"truncation": {"initial_level": 64, "max_level": 1048576,
///                                 "rel_tol": 1e-10, "growth_factor": 2},
///                  "quadrature": {"abs_tol": 1e-8},
///                  "inversion":  {"decay": 21.0, "terms": 31,
///                                 "average_terms": 15, "tol": 1e-8}},
///     "output":   {"format": "csv", "path": "-"}
///   }
///
/// Rate kinds: "constant" {lambda, mu}; "affine" {lambda, mu, birth_offset,
/// death_offset} meaning birth(i) = lambda*(i+1) + birth_offset and
/// death(i) = mu*i + death_offset; "table" {birth: [...], death: [...]}
/// where death[k] is the rate at level k+1 and both tables extend past their
/// end by repeating the last entry.
RunConfig parse_config(const std::string& text);

/// Strict parse of one model block (exposed for reuse and tests).
Model parse_model(const nlohmann::json& block);

/// Raises ConfigError if `block` contains keys outside `allowed`; `where`
/// names the block in the message.
void reject_unknown_keys(const nlohmann::json& block,
                         const std::vector<std::string>& allowed, const std::string& where);

} // namespace bdcat
