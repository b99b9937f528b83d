#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <vector>

namespace circuloop {

/// Line-oriented append-only file. Each append is a single write followed by
/// fsync; a line is acknowledged only after fsync returns.
///
/// A trailing fragment without a newline can only come from a write that was
/// never acknowledged, so opening the file truncates it away.
class AppendOnlyFile {
public:
    explicit AppendOnlyFile(std::filesystem::path path);
    ~AppendOnlyFile();

    AppendOnlyFile(const AppendOnlyFile&) = delete;
    AppendOnlyFile& operator=(const AppendOnlyFile&) = delete;

    void append(std::span<const std::string> lines);
    void append(const std::string& line) { append(std::span(&line, 1)); }

    const std::filesystem::path& path() const { return path_; }
    std::size_t truncated_bytes() const { return truncated_bytes_; }

    /// Complete lines of a file; missing file reads as empty.
    static std::vector<std::string> read_lines(const std::filesystem::path& path);

private:
    std::filesystem::path path_;
    int fd_ = -1;
    std::size_t truncated_bytes_ = 0;
};

/// Writes `content` to a sibling temp file, fsyncs, and renames over `path`.
void write_file_atomically(const std::filesystem::path& path, const std::string& content);

}  // namespace circuloop
