#pragma once

#include <cstddef>
#include <functional>
#include <ostream>

#include "qrabi/cli/config.hpp"
#include "qrabi/cli/csv.hpp"
#include "qrabi/cli/manifest.hpp"
#include "qrabi/cli/svg.hpp"

namespace qrabi::cli {

// Calls body(i) for i in [0, count) on up to `workers` threads. Results must be
// written to slot i by the caller, which keeps the merge order independent of
// scheduling. The exception of the lowest failing index is rethrown.
void parallel_for(std::size_t count, int workers, const std::function<void(std::size_t)>& body);

struct Artifacts {
    CsvTable table;
    Plot plot;
};

// Pure computation for one command; nothing touches the disk except the
// optional steady-state dumps of gap-sweep (written below output_dir).
Artifacts compute(const RunConfig& config);

// Creates output_dir, writes data.csv, plot.svg and manifest.json.
// std::filesystem::filesystem_error / std::ios_base::failure for I/O trouble,
// qrabi::Error from the numerics.
RunManifest run(const RunConfig& config);

std::vector<double> coupling_grid(const RunConfig& config);

} // namespace qrabi::cli
