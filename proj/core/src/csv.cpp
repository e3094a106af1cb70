#include "spider/csv.hpp"

namespace spider {

CsvWriter::CsvWriter(const std::string& path, const std::string& config_hash,
                     std::uint64_t seed, const std::string& version) {
    out_.open(path, std::ios::binary | std::ios::trunc);
    if (!out_) throw std::runtime_error("out: cannot open '" + path + "' for writing");
    out_ << "# tool=spider version=" << version << " config=" << config_hash
         << " seed=" << seed << "\n";
}

void CsvWriter::header(const std::vector<std::string>& columns) {
    for (std::size_t i = 0; i < columns.size(); ++i) {
        if (i) out_ << ',';
        out_ << columns[i];
    }
    out_ << '\n';
}

CsvWriter& CsvWriter::cell(const std::string& v) {
    if (row_open_) out_ << ',';
    out_ << v;
    row_open_ = true;
    return *this;
}

void CsvWriter::end_row() {
    out_ << '\n';
    row_open_ = false;
}

}  // namespace spider
