#pragma once

#include <stdexcept>
#include <string>

namespace papdiff {

// A primitive or analytic expression was applied outside its declared domain
// (sqrt of a negative, log of a nonpositive, division by zero). Evaluation
// raises instead of producing NaN.
class DomainError : public std::runtime_error {
 public:
  explicit DomainError(const std::string& what) : std::runtime_error(what) {}
};

class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& what, std::size_t position)
      : std::runtime_error(what + " (at position " + std::to_string(position) + ")"),
        pos(position) {}
  std::size_t pos;
};

class UnknownPrimitiveError : public std::runtime_error {
 public:
  explicit UnknownPrimitiveError(const std::string& name)
      : std::runtime_error("unknown primitive: " + name) {}
};

// No piece of a representation contains the query point.
class NoPieceError : public DomainError {
 public:
  explicit NoPieceError(const std::string& what) : DomainError(what) {}
};

// More than one piece contains the query point: a partition invariant
// violation, reported distinctly from the domain error above.
class MultiplePiecesError : public std::logic_error {
 public:
  explicit MultiplePiecesError(const std::string& what) : std::logic_error(what) {}
};

class GalleryError : public std::runtime_error {
 public:
  explicit GalleryError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace papdiff
