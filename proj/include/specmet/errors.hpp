// Exception taxonomy. The CLI maps these onto exit codes: anything that went
// wrong while reading bytes off disk is a "load" failure, anything that went
// wrong while doing math is a "numeric" failure.
#pragma once

#include <stdexcept>
#include <string>

namespace specmet {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// -- load-class failures (CLI exit 3) --

// Malformed container: bad NPY magic/header, unparseable manifest JSON.
class FormatError : public Error {
 public:
  using Error::Error;
};

// Well-formed but outside what we implement (Fortran order, exotic dtypes,
// conv forward passes).
class UnsupportedError : public Error {
 public:
  using Error::Error;
};

// Payload contains values we refuse to compute with (NaN/Inf, bad labels).
class DataError : public Error {
 public:
  using Error::Error;
};

// Missing files, manifest/file disagreements, broken model directories.
class LoadError : public Error {
 public:
  using Error::Error;
};

// Dimension mismatches between otherwise valid objects.
class ShapeError : public Error {
 public:
  using Error::Error;
};

// -- numeric-class failures (CLI exit 4) --

// Arguments outside a function's mathematical domain.
class DomainError : public Error {
 public:
  using Error::Error;
};

// A decomposition or iteration failed to converge.
class NumericError : public Error {
 public:
  using Error::Error;
};

// Not enough points to produce the requested statistic.
class InsufficientDataError : public Error {
 public:
  using Error::Error;
};

// Raised by fit_tpl when fewer than min_tail positive eigenvalues exist;
// metrics turns this into a per-matrix skip rather than a hard failure.
class TooFewTailPointsError : public InsufficientDataError {
 public:
  using InsufficientDataError::InsufficientDataError;
};

}  // namespace specmet
