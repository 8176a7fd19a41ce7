#pragma once

#include <stdexcept>
#include <string>

namespace ltcn {

/// Precondition violation on user-supplied values (bad shape, bad parameter).
class InvalidArgument : public std::invalid_argument
{
public:
    using std::invalid_argument::invalid_argument;
};

/// Two operands disagree on the per-time-step dimension d.
class DimensionMismatch : public InvalidArgument
{
public:
    DimensionMismatch(std::size_t lhs, std::size_t rhs, const std::string& where)
        : InvalidArgument(where + ": dimension mismatch (" + std::to_string(lhs) + " vs " +
                          std::to_string(rhs) + ")")
    {
    }
};

} // namespace ltcn
