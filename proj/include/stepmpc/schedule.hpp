#pragma once

#include <cstdint>
#include <stdexcept>
#include <vector>

namespace stepmpc {

/// Binary input schedule: rows are time steps, columns are message types.
/// Entries are 0/1; at most one message per step is enforced by the
/// constraint checker, not by this container.
struct Schedule {
    int steps = 0;
    int channels = 0;
    std::vector<std::uint8_t> cells;  // row-major, steps * channels

    Schedule() = default;
    Schedule(int steps_, int channels_)
        : steps(steps_), channels(channels_),
          cells(static_cast<std::size_t>(steps_) * channels_, 0) {
        if (steps_ < 0 || channels_ < 0)
            throw std::invalid_argument("Schedule: negative dimensions");
    }

    std::uint8_t at(int k, int j) const {
        return cells[static_cast<std::size_t>(k) * channels + j];
    }
    std::uint8_t& at(int k, int j) {
        return cells[static_cast<std::size_t>(k) * channels + j];
    }

    int message_count() const {
        int n = 0;
        for (auto v : cells) n += v;
        return n;
    }

    /// Message type sent at step k: 1..channels, or 0 when the row is empty.
    /// With multiple set entries the lowest type wins (feasible schedules
    /// never have more than one).
    int row_message_type(int k) const {
        for (int j = 0; j < channels; ++j)
            if (at(k, j)) return j + 1;
        return 0;
    }

    bool operator==(const Schedule&) const = default;
};

}  // namespace stepmpc
