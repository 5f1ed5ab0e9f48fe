#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "faultforge/dataset.hpp"

// Synthetic PROMISE-style CK-metric benchmark data. Real exports of the
// public defect datasets are not redistributable here, so this generator
// produces stand-ins with the published per-project instance and defect
// counts, heavy-tailed CK-like metric marginals, inter-metric correlation
// structure, a nonlinear fault-risk surface, sparse missing cells and a few
// exact duplicate rows. Deterministic in the seed.
namespace faultforge::datagen {

struct ProjectSpec {
    std::string name;     // e.g. "ant-1.7"
    std::size_t rows;
    std::size_t defects;
};

const std::vector<ProjectSpec>& benchmark_projects();

Dataset generate_project(const ProjectSpec& spec, std::uint64_t seed);

// Writes <dir>/<project>.csv for every benchmark project; returns the paths.
std::vector<std::string> write_benchmark(const std::string& dir, std::uint64_t seed);

}  // namespace faultforge::datagen
