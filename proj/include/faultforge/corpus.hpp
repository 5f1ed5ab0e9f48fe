#pragma once

#include <string>
#include <vector>

#include "faultforge/dataset.hpp"

namespace faultforge::corpus {

// One line of the Table-I-style summary.
struct ProjectSummary {
    std::string project;
    std::size_t instances = 0;
    std::size_t defective = 0;
    double rate = 0.0;  // defective / instances, rounded to 3 decimals
};

// Load a PROMISE-style CSV: optional leading project/version/name columns,
// then the schema's metric columns, then an integer bug-count column that is
// binarized (bug > 0 -> 1). Missing cells are "" or "?". When the file has
// no provenance columns the project tag falls back to the file stem.
Dataset load_csv(const std::string& path, const FeatureSchema& schema);

// Parse from an in-memory CSV body (same rules; `origin` names the source in
// errors and provides the fallback project tag).
Dataset parse_csv(const std::string& text, const FeatureSchema& schema, const std::string& origin);

// Serialize with provenance columns, full double precision, "?" for missing.
void save_csv(const Dataset& d, const std::string& path);
std::string to_csv(const Dataset& d);

// Rows equal on every metric value AND label collapse to the first
// occurrence; relative order is preserved. Missing cells compare equal to
// missing cells only.
Dataset deduplicate(const Dataset& d);

// Per-project instance/defect counts, grouped by provenance in first-seen order.
std::vector<ProjectSummary> summarize(const Dataset& d);

// Concatenate datasets with a shared schema, preserving order.
Dataset pool(const std::vector<Dataset>& parts);

}  // namespace faultforge::corpus
