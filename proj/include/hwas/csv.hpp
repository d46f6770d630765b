#pragma once

#include <cstdint>
#include <fstream>
#include <string>
#include <vector>

namespace hwas {

// Minimal CSV support for the pipeline's fixed schemas: comma-separated,
// UTF-8, no quoting (the file formats are long/narrow by design so no field
// ever contains a comma). Lines starting with '#' carry provenance metadata
// and are skipped by readers.
class CsvReader {
 public:
  explicit CsvReader(const std::string& path);

  const std::vector<std::string>& header() const { return header_; }
  // Column index or -1.
  int col(const std::string& name) const;
  // Reads the next data row into fields; returns false at EOF.
  bool next(std::vector<std::string>& fields);
  std::size_t line_number() const { return line_no_; }
  const std::string& path() const { return path_; }
  // Comment lines seen before the header (e.g. "# config_hash=..").
  const std::vector<std::string>& preamble() const { return preamble_; }

 private:
  std::string path_;
  std::ifstream in_;
  std::vector<std::string> header_;
  std::vector<std::string> preamble_;
  std::size_t line_no_ = 0;
};

class CsvWriter {
 public:
  CsvWriter(const std::string& path, const std::vector<std::string>& header,
            const std::string& comment = "");
  void row(const std::vector<std::string>& fields);
  void close();

 private:
  std::ofstream out_;
  std::size_t ncols_;
};

void split_csv_line(const std::string& line, std::vector<std::string>& out);

// Fixed 6-significant-digit float formatting used by every output file.
std::string fmt_g6(double v);
// Full-precision round-trip formatting for oracle files (synthetic inputs
// and truth values).
std::string fmt_full(double v);
std::string fmt_int(long long v);

// FNV-1a over bytes; used for config hashes and input digests.
std::uint64_t fnv1a64(const void* data, std::size_t n);
std::uint64_t fnv1a64_file(const std::string& path);
std::string hex64(std::uint64_t v);

}  // namespace hwas
