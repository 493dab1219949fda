#ifndef CRIBSE_ERRORS_HPP
#define CRIBSE_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace cribse {

struct Error : std::runtime_error {
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// numerics
struct DimensionMismatch : Error { using Error::Error; };
struct NonFiniteEntry : Error { using Error::Error; };
struct SingularBlock : Error { using Error::Error; };
struct SingularMatrix : Error { using Error::Error; };

// ggd
struct InvalidParams : Error { using Error::Error; };
struct ScoreSingularity : Error { using Error::Error; };

// model
struct InvalidBlockCount : Error { using Error::Error; };
struct BlockOutOfRange : Error { using Error::Error; };
struct GammaZero : Error { using Error::Error; };
struct ConstraintViolated : Error { using Error::Error; };
struct DegenerateGamma : Error { using Error::Error; };

// fim
struct InvalidTau : Error { using Error::Error; };

// dataset and result files
struct IoError : Error { using Error::Error; };
struct ParseError : Error { using Error::Error; };

}  // namespace cribse

#endif
