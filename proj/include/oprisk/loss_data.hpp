#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <vector>

#include "oprisk/calibration.hpp"

namespace oprisk {

/// Declared observation window of a loss dataset. Events outside
/// [first_year, first_year + years - 1] are rejected when first_year is set.
struct ObservationWindow {
    int years = 1;
    std::optional<int> first_year;
};

// Reads `cell_id,year,amount` CSV (header required). Every malformed row is
// collected and reported together, with 1-based line numbers, in a single
// ValidationError. An input with no data rows is an error.
std::vector<LossEvent> read_loss_events(std::istream& in, const ObservationWindow& window);
std::vector<LossEvent> read_loss_events(const std::filesystem::path& path,
                                        const ObservationWindow& window);

void write_loss_events(std::ostream& out, const std::vector<LossEvent>& events);

} // namespace oprisk
