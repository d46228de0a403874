#pragma once

#include <stdexcept>
#include <string>

namespace facte {

/// Base class for all recoverable engine errors.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// chain-model
class EmptyChain : public Error {
public:
    using Error::Error;
};
class MarkerPolicyMismatch : public Error {
public:
    using Error::Error;
};
class OutOfRange : public Error {
public:
    using Error::Error;
};
class SingleStepChain : public Error {
public:
    using Error::Error;
};
class Unparseable : public Error {
public:
    using Error::Error;
};

// judge-gateway
class MissingGold : public Error {
public:
    using Error::Error;
};
class BackendUnreachable : public Error {
public:
    using Error::Error;
};
class NoRuleMatched : public Error {
public:
    using Error::Error;
};
class MalformedResponse : public Error {
public:
    using Error::Error;
};

// estimators / selection
class AllCellsFlagged : public Error {
public:
    using Error::Error;
};
class EmptyPool : public Error {
public:
    using Error::Error;
};
class EmptyTestset : public Error {
public:
    using Error::Error;
};
class InsufficientExemplars : public Error {
public:
    using Error::Error;
};
class ConfigError : public Error {
public:
    using Error::Error;
};

}  // namespace facte
