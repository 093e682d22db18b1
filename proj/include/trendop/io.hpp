#ifndef TRENDOP_IO_HPP
#define TRENDOP_IO_HPP

#include <filesystem>
#include <fstream>
#include <initializer_list>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace trendop::io {

/// Full double precision in scientific notation ("%.17e"). Every numeric
/// output of the library goes through this so golden files stay stable.
std::string format_double(double x);

/// Splits a line on any run of tabs, commas, or spaces.
std::vector<std::string_view> split_fields(std::string_view line);

/// Parses a whole field as a double; returns false on trailing garbage.
bool parse_double(std::string_view field, double &out);

/// Tab-delimited table writer. Metadata lines go first as `# key: value`,
/// then one header line naming the columns.
class TableWriter {
  public:
    explicit TableWriter(const std::filesystem::path &path);

    void meta(std::string_view key, std::string_view value);
    void meta(std::string_view key, double value);
    void header(const std::vector<std::string> &columns);
    void row(std::span<const double> values);
    void row(std::initializer_list<double> values) {
        row(std::span<const double>(values.begin(), values.size()));
    }
    /// Row with a trailing text column (e.g. a mode kind).
    void row(std::span<const double> values, std::string_view label);

  private:
    std::ofstream m_out;
    std::filesystem::path m_path;
};

/// A parsed delimited table: `# key: value` metadata, the column header,
/// and numeric rows. Non-numeric trailing columns are kept in `labels`.
struct Table {
    std::vector<std::pair<std::string, std::string>> meta;
    std::vector<std::string> columns;
    std::vector<std::vector<double>> rows;
    std::vector<std::string> labels;

    const std::string *find_meta(std::string_view key) const;
};

/// Reads a file written by TableWriter.
Table read_table(const std::filesystem::path &path);

} // namespace trendop::io

#endif
