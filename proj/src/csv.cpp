#include "walkrank/csv.hpp"

#include <charconv>
#include <cstdlib>

namespace walkrank::csv
{
    std::vector<std::string_view> split(std::string_view line, char sep)
    {
        std::vector<std::string_view> out;
        std::size_t start = 0;
        while (true)
        {
            const std::size_t pos = line.find(sep, start);
            if (pos == std::string_view::npos)
            {
                out.push_back(line.substr(start));
                break;
            }
            out.push_back(line.substr(start, pos - start));
            start = pos + 1;
        }
        return out;
    }

    Reader::Reader(std::istream& in)
        : m_in(in)
    {
        while (std::getline(m_in, m_line))
        {
            ++m_line_number;
            if (!m_line.empty() && m_line.back() == '\r')
            {
                m_line.pop_back();
            }
            if (m_line.empty())
            {
                continue;
            }
            for (std::string_view f : split(m_line))
            {
                m_header.emplace_back(f);
            }
            break;
        }
    }

    std::optional<std::size_t> Reader::column(std::string_view name) const
    {
        for (std::size_t i = 0; i < m_header.size(); ++i)
        {
            if (m_header[i] == name)
            {
                return i;
            }
        }
        return std::nullopt;
    }

    std::vector<std::string> Reader::missing(const std::vector<std::string>& required) const
    {
        std::vector<std::string> result;
        for (const auto& name : required)
        {
            if (!column(name))
            {
                result.push_back(name);
            }
        }
        return result;
    }

    bool Reader::next()
    {
        while (std::getline(m_in, m_line))
        {
            ++m_line_number;
            if (!m_line.empty() && m_line.back() == '\r')
            {
                m_line.pop_back();
            }
            if (m_line.empty())
            {
                continue;
            }
            m_fields = split(m_line);
            return true;
        }
        m_fields.clear();
        return false;
    }

    std::optional<std::uint64_t> parse_u64(std::string_view s)
    {
        std::uint64_t v = 0;
        auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
        if (ec != std::errc{} || ptr != s.data() + s.size() || s.empty())
        {
            return std::nullopt;
        }
        return v;
    }

    std::optional<std::int64_t> parse_i64(std::string_view s)
    {
        std::int64_t v = 0;
        auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
        if (ec != std::errc{} || ptr != s.data() + s.size() || s.empty())
        {
            return std::nullopt;
        }
        return v;
    }

    std::optional<double> parse_double(std::string_view s)
    {
        if (s.empty())
        {
            return std::nullopt;
        }
        const std::string buf(s);
        char* end = nullptr;
        const double v = std::strtod(buf.c_str(), &end);
        if (end != buf.c_str() + buf.size())
        {
            return std::nullopt;
        }
        return v;
    }

    std::string format_double(double v)
    {
        char buf[40];
        const auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
        return std::string(buf, end);
    }
}
