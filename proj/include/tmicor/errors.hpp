#ifndef TMICOR_ERRORS_HPP
#define TMICOR_ERRORS_HPP

#include <stdexcept>
#include <string>
#include <vector>

namespace tmicor {

/// Base class for every error raised by the library.
///
/// Errors deriving from `ValidationError` describe bad input (the CLI maps
/// them to exit code 2); anything else is an internal failure.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class ValidationError : public Error {
public:
    using Error::Error;
};

class ParseError : public ValidationError {
public:
    using ValidationError::ValidationError;
};

class ShapeError : public ValidationError {
public:
    using ValidationError::ValidationError;
};

class LabelError : public ValidationError {
public:
    using ValidationError::ValidationError;
};

/// A feature with zero variance inside one class (or a residual that was
/// annihilated by nuisance projection).
class DegenerateFeature : public ValidationError {
public:
    DegenerateFeature(const std::string& msg, std::vector<std::string> features)
        : ValidationError(msg), features_(std::move(features)) {}

    const std::vector<std::string>& features() const { return features_; }

private:
    std::vector<std::string> features_;
};

class RankDeficientNuisance : public ValidationError {
public:
    using ValidationError::ValidationError;
};

class InsufficientDF : public ValidationError {
public:
    using ValidationError::ValidationError;
};

class SaturatedCorrelation : public Error {
public:
    using Error::Error;
};

class SingularInput : public ValidationError {
public:
    using ValidationError::ValidationError;
};

class EmptyPool : public ValidationError {
public:
    using ValidationError::ValidationError;
};

class DomainError : public ValidationError {
public:
    using ValidationError::ValidationError;
};

class NotPositiveDefinite : public ValidationError {
public:
    using ValidationError::ValidationError;
};

class CholeskyFailure : public Error {
public:
    using Error::Error;
};

class UnknownFeature : public ValidationError {
public:
    using ValidationError::ValidationError;
};

class OverlappingSets : public ValidationError {
public:
    using ValidationError::ValidationError;
};

class IoError : public Error {
public:
    using Error::Error;
};

} // namespace tmicor

#endif
