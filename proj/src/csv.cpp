#include "hwas/csv.hpp"

#include <cstdio>
#include <stdexcept>

#include "hwas/errors.hpp"

namespace hwas {

void split_csv_line(const std::string& line, std::vector<std::string>& out) {
  out.clear();
  std::size_t start = 0;
  while (true) {
    std::size_t pos = line.find(',', start);
    if (pos == std::string::npos) {
      out.emplace_back(line.substr(start));
      break;
    }
    out.emplace_back(line.substr(start, pos - start));
    start = pos + 1;
  }
  if (!out.empty() && !out.back().empty() && out.back().back() == '\r') out.back().pop_back();
}

CsvReader::CsvReader(const std::string& path) : path_(path), in_(path) {
  if (!in_) throw Error(Errc::InvalidInput, "cannot open " + path);
  std::string line;
  while (std::getline(in_, line)) {
    ++line_no_;
    if (!line.empty() && line[0] == '#') {
      preamble_.push_back(line);
      continue;
    }
    split_csv_line(line, header_);
    return;
  }
  throw Error(Errc::InvalidInput, "empty file: " + path);
}

int CsvReader::col(const std::string& name) const {
  for (std::size_t i = 0; i < header_.size(); ++i)
    if (header_[i] == name) return static_cast<int>(i);
  return -1;
}

bool CsvReader::next(std::vector<std::string>& fields) {
  std::string line;
  while (std::getline(in_, line)) {
    ++line_no_;
    if (line.empty()) continue;
    if (line[0] == '#') continue;
    split_csv_line(line, fields);
    return true;
  }
  return false;
}

CsvWriter::CsvWriter(const std::string& path, const std::vector<std::string>& header,
                     const std::string& comment)
    : out_(path), ncols_(header.size()) {
  if (!out_) throw Error(Errc::InvalidInput, "cannot open for write: " + path);
  if (!comment.empty()) out_ << "# " << comment << "\n";
  for (std::size_t i = 0; i < header.size(); ++i) out_ << (i ? "," : "") << header[i];
  out_ << "\n";
}

void CsvWriter::row(const std::vector<std::string>& fields) {
  if (fields.size() != ncols_) throw Error(Errc::Internal, "csv row width mismatch");
  for (std::size_t i = 0; i < fields.size(); ++i) out_ << (i ? "," : "") << fields[i];
  out_ << "\n";
}

void CsvWriter::close() { out_.close(); }

std::string fmt_g6(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

std::string fmt_full(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string fmt_int(long long v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%lld", v);
  return buf;
}

std::uint64_t fnv1a64(const void* data, std::size_t n) {
  const auto* p = static_cast<const unsigned char*>(data);
  std::uint64_t h = 1469598103934665603ull;
  for (std::size_t i = 0; i < n; ++i) {
    h ^= p[i];
    h *= 1099511628211ull;
  }
  return h;
}

std::uint64_t fnv1a64_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::InvalidInput, "cannot open " + path);
  std::uint64_t h = 1469598103934665603ull;
  char buf[1 << 16];
  while (in) {
    in.read(buf, sizeof(buf));
    const std::streamsize got = in.gcount();
    for (std::streamsize i = 0; i < got; ++i) {
      h ^= static_cast<unsigned char>(buf[i]);
      h *= 1099511628211ull;
    }
  }
  return h;
}

std::string hex64(std::uint64_t v) {
  char buf[20];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

}  // namespace hwas
