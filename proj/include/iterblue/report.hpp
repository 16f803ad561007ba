#pragma once

#include <ostream>

#include "iterblue/estimators.hpp"
#include "iterblue/simulate.hpp"

namespace iterblue {

/// Writes a report as CSV: a `# key = value` comment block echoing the
/// effective config and seed, a header row, then one row per cell with
/// columns estimator, sigma_n_sq_or_iter, mse, mc_stderr, trials, divergent.
/// Numbers are full-precision scientific (round-trip exact). When
/// `deterministic` is false a timestamp comment line is added.
void emit_report(const MseReport& report, std::ostream& sink,
                 bool deterministic = true);

/// Writes an estimate trace as CSV: comment block, then one row per iterate
/// with the relative step size and the estimate components.
void emit_trace(const EstimateTrace& trace,
                const std::vector<std::pair<std::string, std::string>>& meta,
                std::ostream& sink, bool deterministic = true);

}  // namespace iterblue
