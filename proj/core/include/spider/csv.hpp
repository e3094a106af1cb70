#pragma once

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

// Deterministic CSV emission. Doubles are printed with %.17g so a rerun with
// the same seed reproduces the file byte for byte. Every file begins with a
// comment line recording tool version, resolved-config hash, and seed.

namespace spider {

inline std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

class CsvWriter {
  public:
    CsvWriter(const std::string& path, const std::string& config_hash, std::uint64_t seed,
              const std::string& version);

    void header(const std::vector<std::string>& columns);

    CsvWriter& cell(const std::string& v);
    CsvWriter& cell(double v) { return cell(format_double(v)); }
    CsvWriter& cell(std::uint64_t v) { return cell(std::to_string(v)); }
    CsvWriter& cell(std::int64_t v) { return cell(std::to_string(v)); }
    CsvWriter& cell(int v) { return cell(std::to_string(v)); }
    CsvWriter& cell(bool v) { return cell(std::string(v ? "1" : "0")); }
    void end_row();

  private:
    std::ofstream out_;
    bool row_open_ = false;
};

}  // namespace spider
