#pragma once

#include <stdexcept>
#include <string>

namespace sketchnet {

/// Tensor or image shapes are incompatible with the requested operation.
class DimensionError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// A scalar or enumerated argument is out of its valid domain.
class ArgumentError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// An API was used out of order, e.g. a forward cache fed to a different network.
class UsageError : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

/// Training produced a non-finite loss.
class NumericError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Base for everything that can go wrong reading a file.
class LoadError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class FileNotFoundError : public LoadError {
public:
    using LoadError::LoadError;
};

class UnsupportedFormatError : public LoadError {
public:
    using LoadError::LoadError;
};

class CorruptDataError : public LoadError {
public:
    using LoadError::LoadError;
};

class VersionError : public LoadError {
public:
    using LoadError::LoadError;
};

/// Writing an output file failed.
class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace sketchnet
