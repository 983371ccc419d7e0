#pragma once

#include <string>
#include <vector>

namespace mfstab {

/// Reshapes result files in `dir` into tidy plot series.
/// Kinds: scaling (gnn.csv), envelope (trace.csv), tail (tail.csv),
/// discrepancy (gnn.csv). Returns the written file names.
std::vector<std::string> emit_plot_data(const std::string& dir, const std::string& kind);

}  // namespace mfstab
