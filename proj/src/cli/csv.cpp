#include "qrabi/cli/csv.hpp"

#include <cstdio>
#include <fstream>
#include <stdexcept>

namespace qrabi::cli {

std::string format_double(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

CsvTable::CsvTable(std::vector<Column> columns, std::vector<std::string> preamble)
    : columns_(std::move(columns)), preamble_(std::move(preamble)) {}

void CsvTable::add_row(std::vector<Cell> row) {
    if (row.size() != columns_.size())
        throw std::invalid_argument("csv row has " + std::to_string(row.size()) +
                                    " cells, expected " + std::to_string(columns_.size()));
    rows_.push_back(std::move(row));
}

void CsvTable::write(std::ostream& out) const {
    for (const auto& line : preamble_)
        out << "# " << line << '\n';
    for (const auto& c : columns_)
        out << "# " << c.name << ": " << c.description << '\n';
    for (std::size_t i = 0; i < columns_.size(); ++i)
        out << (i ? "," : "") << columns_[i].name;
    out << '\n';
    for (const auto& row : rows_) {
        for (std::size_t i = 0; i < row.size(); ++i) {
            if (i)
                out << ',';
            std::visit(
                [&](const auto& v) {
                    using T = std::decay_t<decltype(v)>;
                    if constexpr (std::is_same_v<T, double>)
                        out << format_double(v);
                    else
                        out << v;
                },
                row[i]);
        }
        out << '\n';
    }
}

void CsvTable::save(const std::filesystem::path& path) const {
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw std::ios_base::failure("cannot write " + path.string());
    write(out);
    out.flush();
    if (!out)
        throw std::ios_base::failure("write failed for " + path.string());
}

} // namespace qrabi::cli
