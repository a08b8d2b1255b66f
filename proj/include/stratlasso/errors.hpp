#pragma once

#include <stdexcept>
#include <string>

namespace stratlasso {

/// Base class of every error thrown by this library.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ZeroVarianceColumn : Error {
  explicit ZeroVarianceColumn(const std::string& name)
      : Error("zero-variance column: " + name) {}
};

struct UnknownGroup : Error {
  explicit UnknownGroup(const std::string& label)
      : Error("unknown group label: " + label) {}
};

struct EmptyStratum : Error {
  explicit EmptyStratum(const std::string& what) : Error("empty stratum: " + what) {}
};

struct TooFewRows : Error {
  explicit TooFewRows(const std::string& what) : Error("too few rows: " + what) {}
};

struct NoPenalizedFeatures : Error {
  NoPenalizedFeatures() : Error("no feature has a finite positive penalty factor") {}
};

struct NoCandidates : Error {
  NoCandidates() : Error("no feature is flagged as an interaction candidate") {}
};

struct NonBinaryOutcome : Error {
  explicit NonBinaryOutcome(const std::string& what)
      : Error("outcome must be 0/1: " + what) {}
};

struct Diverged : Error {
  explicit Diverged(const std::string& what) : Error("solver diverged: " + what) {}
};

struct DimensionMismatch : Error {
  explicit DimensionMismatch(const std::string& what)
      : Error("dimension mismatch: " + what) {}
};

struct SingleClass : Error {
  SingleClass() : Error("both outcome classes must be present") {}
};

struct DegenerateFold : Error {
  explicit DegenerateFold(const std::string& what) : Error("degenerate fold: " + what) {}
};

struct DegenerateGroup : Error {
  explicit DegenerateGroup(const std::string& label)
      : Error("group lacks both outcome classes: " + label) {}
};

struct MissingBaseline : Error {
  explicit MissingBaseline(const std::string& what)
      : Error("missing baseline run: " + what) {}
};

struct UnknownPreset : Error {
  explicit UnknownPreset(const std::string& name)
      : Error("unknown cohort preset: " + name) {}
};

struct InvalidConfig : Error {
  explicit InvalidConfig(const std::string& what) : Error("invalid config: " + what) {}
};

struct ParseError : Error {
  explicit ParseError(const std::string& what) : Error("parse error: " + what) {}
};

}  // namespace stratlasso
