#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace cellforge
{
// Base of every data-level failure raised by the library. The CLI maps these
// to exit code 2, except TransportError which maps to 3.
class Error : public std::runtime_error
{
  public:
    using std::runtime_error::runtime_error;
};

#define CELLFORGE_ERROR(Name)                                                  \
    class Name : public Error                                                  \
    {                                                                          \
      public:                                                                  \
        using Error::Error;                                                    \
    }

// geometry kernel
CELLFORGE_ERROR(ReferenceError);
CELLFORGE_ERROR(InvalidCell);
CELLFORGE_ERROR(Unbounded);
CELLFORGE_ERROR(InvalidPart);
CELLFORGE_ERROR(UnsupportedSurface);
CELLFORGE_ERROR(FormatError);

// decomposition
CELLFORGE_ERROR(MixedRegion);
CELLFORGE_ERROR(EmptySolid);

// sequencing
CELLFORGE_ERROR(Disconnected);
CELLFORGE_ERROR(TooSmall);

// scripts
CELLFORGE_ERROR(InconsistentExample);

// dedup
CELLFORGE_ERROR(Degenerate);

// metrics
CELLFORGE_ERROR(BadInput);
CELLFORGE_ERROR(EmptyInput);

// rendering and annotation
CELLFORGE_ERROR(EmptyGeometry);
CELLFORGE_ERROR(TransportError);
CELLFORGE_ERROR(ProtocolError);

#undef CELLFORGE_ERROR

// Script parse failure with a 1-based source position.
class ParseError : public Error
{
  public:
    ParseError(const std::string& what, std::size_t line, std::size_t column)
        : Error("line " + std::to_string(line) + ", column " +
                std::to_string(column) + ": " + what),
          line_(line), column_(column)
    {
    }

    std::size_t line() const noexcept { return line_; }
    std::size_t column() const noexcept { return column_; }

  private:
    std::size_t line_;
    std::size_t column_;
};

class SyntaxError : public ParseError
{
  public:
    using ParseError::ParseError;
};

class SemanticError : public ParseError
{
  public:
    using ParseError::ParseError;
};

} // namespace cellforge
