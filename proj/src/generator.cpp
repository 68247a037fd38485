#include "bdcat/generator.hpp"

#include "bdcat/errors.hpp"

namespace bdcat {

double GeneratorRow::row_sum() const {
    double total = 0.0;
    for (const auto& [col, rate] : entries) total += rate;
    return total;
}

double GeneratorRow::at(int n) const {
    auto it = entries.find(n);
    return it == entries.end() ? 0.0 : it->second;
}

namespace {

void put(GeneratorRow& row, int col, double rate) {
    if (rate != 0.0) row.entries[col] += rate;
}

} // namespace

GeneratorRow base_generator_row(const Model& model, int level) {
    if (level < 0) throw DomainError("base generator rows exist for levels >= 0 only");
    const auto& r = model.rates;
    GeneratorRow row;
    row.level = level;
    put(row, level + 1, r.birth(level));
    put(row, level - 1, r.death(level));
    row.entries[level] = -r.exit_rate(level);
    return row;
}

GeneratorRow full_generator_row(const Model& model, int level) {
    if (level < 0) throw DomainError("full generator rows exist for levels >= 0 only");
    const auto& r = model.rates;
    const double alpha = model.catastrophe.alpha;
    const double beta = model.catastrophe.beta;
    GeneratorRow row;
    row.level = level;
    put(row, level + 1, r.birth(level));
    put(row, level - 1, r.death(level));
    // Catastrophe jumps to 0 (rate alpha) and 1 (rate beta). A jump landing
    // on the current level is a no-op and contributes nothing, so the
    // diagonal sheds only the displacing part.
    double shed = 0.0;
    if (level != 0) {
        put(row, 0, alpha);
        shed += alpha;
    }
    if (level != 1) {
        put(row, 1, beta);
        shed += beta;
    }
    row.entries[level] += -r.exit_rate(level) - shed;
    if (row.entries[level] == 0.0) row.entries.erase(level);  // keep the map sparse
    return row;
}

GeneratorRow absorbed_generator_row(const Model& model, int level) {
    if (level == kAlphaAbsorbed || level == kBetaAbsorbed) {
        GeneratorRow row;
        row.level = level;
        return row;  // absorbing: empty row
    }
    if (level < 0) throw DomainError("absorbed generator rows exist for levels >= -2 only");
    const auto& r = model.rates;
    const double alpha = model.catastrophe.alpha;
    const double beta = model.catastrophe.beta;
    GeneratorRow row;
    row.level = level;
    put(row, level + 1, r.birth(level));
    put(row, level - 1, r.death(level));
    // Only effective catastrophes move the absorbed chain: alpha from any
    // level except 0, beta from any level except 1. Effective mass goes to
    // the absorbing states instead of to levels 0/1.
    double shed = 0.0;
    if (level != 0) {
        put(row, kAlphaAbsorbed, alpha);
        shed += alpha;
    }
    if (level != 1) {
        put(row, kBetaAbsorbed, beta);
        shed += beta;
    }
    row.entries[level] += -r.exit_rate(level) - shed;
    if (row.entries[level] == 0.0) row.entries.erase(level);
    return row;
}

} // namespace bdcat
