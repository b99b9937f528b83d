#include "circuloop/inventory/event_log.hpp"

#include "circuloop/core/error.hpp"
#include "circuloop/inventory/codec.hpp"

namespace circuloop::inventory {

void EventLog::append(std::span<const MovementEvent> events) {
    std::vector<std::string> lines;
    lines.reserve(events.size());
    for (const auto& e : events) lines.push_back(encode_event(e));
    file_.append(lines);
}

std::vector<MovementEvent> EventLog::read(const std::filesystem::path& path) {
    std::vector<MovementEvent> events;
    auto lines = AppendOnlyFile::read_lines(path);
    events.reserve(lines.size());
    for (std::size_t i = 0; i < lines.size(); ++i) {
        try {
            events.push_back(decode_event(lines[i]));
        } catch (const DomainError& e) {
            auto line_no = static_cast<long long>(i + 1);
            throw CorruptLogError("line " + std::to_string(line_no) + ": " + e.what(), line_no, 0);
        }
    }
    return events;
}

}  // namespace circuloop::inventory
