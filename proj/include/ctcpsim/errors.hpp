#pragma once

#include <stdexcept>
#include <string>

namespace ctcpsim {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A parameter violates a documented invariant.
class ValidationError : public Error {
 public:
  using Error::Error;
};

class ParseError : public Error {
 public:
  ParseError(int line, const std::string& what)
      : Error("line " + std::to_string(line) + ": " + what), line_(line) {}
  int line() const { return line_; }

 private:
  int line_;
};

// Raised when a clustering round finds no alive participant.
class NetworkExhausted : public Error {
 public:
  NetworkExhausted() : Error("no alive participating node left") {}
};

}  // namespace ctcpsim
