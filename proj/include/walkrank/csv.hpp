#pragma once

#include <cstdint>
#include <istream>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace walkrank::csv
{
    /// Splits one line on commas. No quoting: every field in our formats is comma-free.
    std::vector<std::string_view> split(std::string_view line, char sep = ',');

    /**
     * Line reader over a header-first CSV stream. Strips a trailing CR so
     * files edited on other platforms still load, skips blank lines.
     */
    class Reader
    {
    public:
        explicit Reader(std::istream& in);

        const std::vector<std::string>& header() const noexcept { return m_header; }
        /// Column index or nullopt.
        std::optional<std::size_t> column(std::string_view name) const;
        /// Names from `required` that the header lacks, in the given order.
        std::vector<std::string> missing(const std::vector<std::string>& required) const;

        /// Advances to the next data row. Returns false at end of input.
        bool next();
        std::size_t line_number() const noexcept { return m_line_number; }
        const std::vector<std::string_view>& fields() const noexcept { return m_fields; }
        bool has_header() const noexcept { return !m_header.empty(); }

    private:
        std::istream& m_in;
        std::vector<std::string> m_header;
        std::string m_line;
        std::vector<std::string_view> m_fields;
        std::size_t m_line_number = 0;
    };

    std::optional<std::uint64_t> parse_u64(std::string_view s);
    std::optional<std::int64_t> parse_i64(std::string_view s);
    std::optional<double> parse_double(std::string_view s);

    /// Shortest form that round-trips.
    std::string format_double(double v);
}
