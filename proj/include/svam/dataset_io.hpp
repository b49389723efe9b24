#pragma once

// CSV persistence for datasets. Header: x0,...,x{d-1},y,is_corrupted (no y
// column for mean estimation). Doubles are written with 17 significant
// digits so a save/load round trip is exact.

#include "svam/data_gen.hpp"

#include <iosfwd>
#include <string>

namespace svam {

void write_dataset_csv(std::ostream& out, const Dataset& data);
/// Throws IoError if the file cannot be written.
void save_dataset(const std::string& path, const Dataset& data);

/// Reads a dataset written by save_dataset. `task` decides whether a y
/// column is expected. Throws IoError on unreadable or malformed input.
Dataset read_dataset_csv(std::istream& in, Task task);
Dataset load_dataset(const std::string& path, Task task);

}  // namespace svam
