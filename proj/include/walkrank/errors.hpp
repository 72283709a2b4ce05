#pragma once

#include <stdexcept>
#include <string>

namespace walkrank
{
    /// Input file could not be parsed or does not match the declared schema.
    class FormatError : public std::runtime_error
    {
    public:
        using std::runtime_error::runtime_error;
    };

    /// Invalid parameters or references to things that do not exist.
    class ConfigError : public std::invalid_argument
    {
    public:
        using std::invalid_argument::invalid_argument;
    };

    /// Graph mutation rejected (unknown node, duplicate label, self-interaction).
    class GraphError : public ConfigError
    {
    public:
        using ConfigError::ConfigError;
    };

    /// Persistent state (walk corpus, graph version) is inconsistent with the request.
    class StateError : public std::runtime_error
    {
    public:
        using std::runtime_error::runtime_error;
    };
}
