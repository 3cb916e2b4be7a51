#pragma once

#include <stdexcept>
#include <string>

namespace corrnet {

/// Base class for all library errors.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// panel_data
class SchemaError : public Error { using Error::Error; };
class ParseError : public Error { using Error::Error; };
class ContinuityError : public Error { using Error::Error; };
class InsufficientDataError : public Error { using Error::Error; };
class AlignmentError : public Error { using Error::Error; };
class LabelError : public Error { using Error::Error; };

// estimation
class SingularityError : public Error { using Error::Error; };
class DimensionError : public Error { using Error::Error; };
class DefinitenessError : public Error { using Error::Error; };

// diagnostics
class NumericalError : public Error { using Error::Error; };
class DegenerateFitError : public Error { using Error::Error; };

// synthgen
class StationarityError : public Error { using Error::Error; };

/// Bad argument or unsupported configuration value.
class UsageError : public Error { using Error::Error; };

}  // namespace corrnet
