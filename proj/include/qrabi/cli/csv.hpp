#pragma once

#include <filesystem>
#include <ostream>
#include <string>
#include <variant>
#include <vector>

namespace qrabi::cli {

using Cell = std::variant<double, long long, std::string>;

struct Column {
    std::string name;
    std::string description;
};

// Comma-separated table. Every column is described in a '#' comment line ahead
// of the header; floats are written with 17 significant digits so that the
// text round-trips to the same double.
class CsvTable {
public:
    explicit CsvTable(std::vector<Column> columns, std::vector<std::string> preamble = {});

    // Throws std::invalid_argument on a width mismatch.
    void add_row(std::vector<Cell> row);

    const std::vector<Column>& columns() const { return columns_; }
    std::size_t rows() const { return rows_.size(); }
    const std::vector<std::vector<Cell>>& data() const { return rows_; }

    void write(std::ostream& out) const;
    // std::ios_base::failure if the file cannot be written.
    void save(const std::filesystem::path& path) const;

private:
    std::vector<Column> columns_;
    std::vector<std::string> preamble_;
    std::vector<std::vector<Cell>> rows_;
};

std::string format_double(double x);

} // namespace qrabi::cli
