#pragma once

#include <filesystem>
#include <span>
#include <vector>

#include "circuloop/core/append_file.hpp"
#include "circuloop/inventory/types.hpp"

namespace circuloop::inventory {

/// The movement ledger on disk: one canonical JSON object per line.
class EventLog {
public:
    explicit EventLog(const std::filesystem::path& path) : file_(path) {}

    void append(std::span<const MovementEvent> events);
    const std::filesystem::path& path() const { return file_.path(); }
    std::size_t truncated_bytes() const { return file_.truncated_bytes(); }

    /// Parses every complete line. Unreadable lines raise CorruptLogError.
    static std::vector<MovementEvent> read(const std::filesystem::path& path);

private:
    AppendOnlyFile file_;
};

}  // namespace circuloop::inventory
