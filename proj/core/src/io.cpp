#include "excires/io.hpp"

#include <cerrno>
#include <charconv>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <stdexcept>

#include <unistd.h>

#include "excires/errors.hpp"

namespace excires {
namespace {

// Locale-independent, 10 significant digits.  std::to_chars keeps the text
// stable under a parse/re-serialize cycle at this precision.
std::string format_value(double v) {
  char buf[64];
  const auto res =
      std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::general, 10);
  return std::string(buf, res.ptr);
}

}  // namespace

void write_text_atomic(const std::string& path, const std::string& content) {
  namespace fs = std::filesystem;
  const fs::path target(path);
  fs::path dir = target.parent_path();
  if (dir.empty()) dir = ".";
  std::string tmp = (dir / (target.filename().string() + ".tmpXXXXXX")).string();

  const int fd = ::mkstemp(tmp.data());
  if (fd < 0) {
    throw std::runtime_error("cannot create temporary file for " + path + ": " +
                             std::strerror(errno));
  }
  const auto fail = [&](const std::string& what) {
    const int err = errno;
    ::close(fd);
    ::unlink(tmp.c_str());
    throw std::runtime_error(what + " " + tmp + ": " + std::strerror(err));
  };

  const char* p = content.data();
  std::size_t left = content.size();
  while (left > 0) {
    const ssize_t n = ::write(fd, p, left);
    if (n < 0) {
      if (errno == EINTR) continue;
      fail("cannot write");
    }
    p += n;
    left -= static_cast<std::size_t>(n);
  }
  if (::fsync(fd) != 0) fail("cannot flush");
  if (::close(fd) != 0) {
    ::unlink(tmp.c_str());
    throw std::runtime_error("cannot close " + tmp + ": " + std::strerror(errno));
  }
  if (std::rename(tmp.c_str(), path.c_str()) != 0) {
    const int err = errno;
    ::unlink(tmp.c_str());
    throw std::runtime_error("cannot move " + tmp + " over " + path + ": " +
                             std::strerror(err));
  }
}

std::string format_csv(const ResultTable& table) {
  if (table.columns.empty()) throw ParameterError("CSV table has no columns");
  if (table.rows.empty()) throw ParameterError("CSV table has no rows");
  std::string out;
  for (std::size_t i = 0; i < table.columns.size(); ++i) {
    const std::string& name = table.columns[i];
    if (name.empty() || name.find_first_of(",\"\n\r") != std::string::npos) {
      throw ParameterError("CSV column name must be a plain identifier: '" + name + "'");
    }
    if (i > 0) out += ',';
    out += name;
  }
  out += '\n';
  for (const std::vector<double>& row : table.rows) {
    if (row.size() != table.columns.size()) {
      throw ParameterError("CSV row width does not match the header");
    }
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i > 0) out += ',';
      out += format_value(row[i]);
    }
    out += '\n';
  }
  return out;
}

void write_csv(const ResultTable& table, const std::string& path) {
  write_text_atomic(path, format_csv(table));
}

void write_json(const nlohmann::ordered_json& doc, const std::string& path) {
  write_text_atomic(path, doc.dump(2) + "\n");
}

}  // namespace excires
