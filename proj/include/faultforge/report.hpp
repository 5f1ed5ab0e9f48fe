#pragma once

#include <string>
#include <vector>

#include "faultforge/pipeline.hpp"

namespace faultforge::report {

// Writes the full report tree:
//   <outdir>/tables/folds.csv            per-fold metrics, one row per cell-fold
//   <outdir>/tables/summary.csv          one row per cell (means and stds)
//   <outdir>/tables/<selector>.csv       model x tuner table per selector present
//   <outdir>/tables/tuned_vs_untuned.csv best tuned accuracy per tuner vs baseline
//   <outdir>/tables/baseline_overfitting.csv  train vs test accuracy, baseline cells
//   <outdir>/figures/f1_by_selector.svg
//   <outdir>/figures/accuracy_by_tuner.svg
//   <outdir>/figures/train_vs_test.svg
//   <outdir>/ledger.json-lines           one JSON object per cell
// Returns the list of files written.
std::vector<std::string> emit_reports(const pipeline::RunLedger& ledger, const std::string& outdir);

// Individual pieces, exposed for tests.
std::string folds_csv(const pipeline::RunLedger& ledger);
std::string summary_csv(const pipeline::RunLedger& ledger);
std::string selector_table_csv(const pipeline::RunLedger& ledger, pipeline::Selector s);
std::string tuned_vs_untuned_csv(const pipeline::RunLedger& ledger);
std::string baseline_overfitting_csv(const pipeline::RunLedger& ledger);
std::string ledger_json_lines(const pipeline::RunLedger& ledger);

struct BarGroup {
    std::string label;
    std::vector<double> values;  // one per series
};

// Grouped bar chart; bar height in px = value / y_max * 220, so proportional
// to the value. Values must sit in [0, y_max].
std::string grouped_bar_svg(const std::string& title, const std::vector<std::string>& series,
                            const std::vector<BarGroup>& groups, double y_max = 1.0);

}  // namespace faultforge::report
