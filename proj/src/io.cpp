#include "trendop/io.hpp"

#include "trendop/error.hpp"

#include <charconv>
#include <cstdio>

namespace trendop::io {

std::string format_double(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17e", x);
    return buf;
}

std::vector<std::string_view> split_fields(std::string_view line) {
    std::vector<std::string_view> out;
    auto is_sep = [](char c) {
        return c == ' ' || c == '\t' || c == ',' || c == '\r';
    };
    std::size_t i = 0;
    while (i < line.size()) {
        while (i < line.size() && is_sep(line[i]))
            ++i;
        std::size_t j = i;
        while (j < line.size() && !is_sep(line[j]))
            ++j;
        if (j > i)
            out.push_back(line.substr(i, j - i));
        i = j;
    }
    return out;
}

bool parse_double(std::string_view field, double &out) {
    if (!field.empty() && field.front() == '+')
        field.remove_prefix(1);
    const char *end = field.data() + field.size();
    auto [ptr, ec] = std::from_chars(field.data(), end, out);
    return ec == std::errc() && ptr == end;
}

TableWriter::TableWriter(const std::filesystem::path &path)
    : m_out(path), m_path(path) {
    if (!m_out)
        throw ValidationError("cannot open '" + path.string() +
                              "' for writing");
}

void TableWriter::meta(std::string_view key, std::string_view value) {
    m_out << "# " << key << ": " << value << '\n';
}

void TableWriter::meta(std::string_view key, double value) {
    m_out << "# " << key << ": " << format_double(value) << '\n';
}

void TableWriter::header(const std::vector<std::string> &columns) {
    for (std::size_t i = 0; i < columns.size(); ++i)
        m_out << (i ? "\t" : "") << columns[i];
    m_out << '\n';
}

void TableWriter::row(std::span<const double> values) {
    for (std::size_t i = 0; i < values.size(); ++i)
        m_out << (i ? "\t" : "") << format_double(values[i]);
    m_out << '\n';
}

void TableWriter::row(std::span<const double> values,
                      std::string_view label) {
    for (double v : values)
        m_out << format_double(v) << '\t';
    m_out << label << '\n';
}

const std::string *Table::find_meta(std::string_view key) const {
    for (const auto &[k, v] : meta)
        if (k == key)
            return &v;
    return nullptr;
}

Table read_table(const std::filesystem::path &path) {
    std::ifstream in(path);
    if (!in)
        throw ValidationError("cannot open '" + path.string() + "'");
    Table t;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty())
            continue;
        if (line.front() == '#') {
            auto colon = line.find(':');
            if (colon != std::string::npos) {
                auto key = line.substr(1, colon - 1);
                auto val = line.substr(colon + 1);
                auto trim = [](std::string &s) {
                    s.erase(0, s.find_first_not_of(' '));
                    s.erase(s.find_last_not_of(" \r") + 1);
                };
                trim(key);
                trim(val);
                t.meta.emplace_back(key, val);
            }
            continue;
        }
        auto fields = split_fields(line);
        if (t.columns.empty()) {
            for (auto f : fields)
                t.columns.emplace_back(f);
            continue;
        }
        std::vector<double> row;
        std::string label;
        for (std::size_t i = 0; i < fields.size(); ++i) {
            double v;
            if (parse_double(fields[i], v)) {
                row.push_back(v);
            } else if (i + 1 == fields.size()) {
                label = std::string(fields[i]);
            } else {
                throw ValidationError(path.string() + ":" +
                                      std::to_string(lineno) +
                                      ": non-numeric field '" +
                                      std::string(fields[i]) + "'");
            }
        }
        t.rows.push_back(std::move(row));
        t.labels.push_back(std::move(label));
    }
    return t;
}

} // namespace trendop::io
