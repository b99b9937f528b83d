#include "circuloop/core/append_file.hpp"

#include <fcntl.h>
#include <sys/stat.h>
#include <unistd.h>

#include <cerrno>
#include <cstring>
#include <fstream>
#include <sstream>
#include <system_error>

namespace circuloop {

namespace {

[[noreturn]] void throw_errno(const std::string& what, const std::filesystem::path& path) {
    throw std::system_error(errno, std::generic_category(), what + " " + path.string());
}

void write_fully(int fd, const std::string& data, const std::filesystem::path& path) {
    const char* p = data.data();
    std::size_t left = data.size();
    while (left > 0) {
        ssize_t n = ::write(fd, p, left);
        if (n < 0) {
            if (errno == EINTR) continue;
            throw_errno("write", path);
        }
        p += n;
        left -= static_cast<std::size_t>(n);
    }
}

}  // namespace

AppendOnlyFile::AppendOnlyFile(std::filesystem::path path) : path_(std::move(path)) {
    if (path_.has_parent_path()) std::filesystem::create_directories(path_.parent_path());
    fd_ = ::open(path_.c_str(), O_RDWR | O_CREAT | O_APPEND | O_CLOEXEC, 0644);
    if (fd_ < 0) throw_errno("open", path_);

    struct stat st {};
    if (::fstat(fd_, &st) != 0) throw_errno("stat", path_);
    if (st.st_size == 0) return;

    // Find the last newline; anything after it is a torn, unacknowledged write.
    off_t size = st.st_size;
    off_t keep = 0;
    char buf[4096];
    for (off_t end = size; end > 0 && keep == 0;) {
        off_t start = end > static_cast<off_t>(sizeof buf) ? end - static_cast<off_t>(sizeof buf) : 0;
        ssize_t n = ::pread(fd_, buf, static_cast<std::size_t>(end - start), start);
        if (n < 0) throw_errno("read", path_);
        for (ssize_t i = n - 1; i >= 0; --i) {
            if (buf[i] == '\n') {
                keep = start + i + 1;
                break;
            }
        }
        end = start;
    }
    if (keep != size) {
        if (::ftruncate(fd_, keep) != 0) throw_errno("truncate", path_);
        ::fsync(fd_);
        truncated_bytes_ = static_cast<std::size_t>(size - keep);
    }
}

AppendOnlyFile::~AppendOnlyFile() {
    if (fd_ >= 0) ::close(fd_);
}

void AppendOnlyFile::append(std::span<const std::string> lines) {
    if (lines.empty()) return;
    std::string batch;
    for (const auto& l : lines) {
        batch += l;
        batch += '\n';
    }
    write_fully(fd_, batch, path_);
    if (::fsync(fd_) != 0) throw_errno("fsync", path_);
}

std::vector<std::string> AppendOnlyFile::read_lines(const std::filesystem::path& path) {
    std::vector<std::string> lines;
    std::ifstream in(path, std::ios::binary);
    if (!in) return lines;
    std::ostringstream buf;
    buf << in.rdbuf();
    const std::string content = buf.str();
    std::size_t pos = 0;
    while (pos < content.size()) {
        auto nl = content.find('\n', pos);
        if (nl == std::string::npos) break;  // torn tail
        lines.emplace_back(content, pos, nl - pos);
        pos = nl + 1;
    }
    return lines;
}

void write_file_atomically(const std::filesystem::path& path, const std::string& content) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    auto tmp = path;
    tmp += ".tmp";
    int fd = ::open(tmp.c_str(), O_WRONLY | O_CREAT | O_TRUNC | O_CLOEXEC, 0644);
    if (fd < 0) throw_errno("open", tmp);
    try {
        write_fully(fd, content, tmp);
        if (::fsync(fd) != 0) throw_errno("fsync", tmp);
    } catch (...) {
        ::close(fd);
        throw;
    }
    ::close(fd);
    std::filesystem::rename(tmp, path);
}

}  // namespace circuloop
