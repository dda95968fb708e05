#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace tsfrac {

/// Base class for all library errors.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// --- time scale / grid ---

struct InvalidTimeScale : Error { using Error::Error; };
struct PointNotInTimeScale : Error { using Error::Error; };
struct JumpUndefinedAtMinimum : Error { using Error::Error; };
struct ExtraNodeOutsideTimeScale : Error { using Error::Error; };
struct DegenerateTimeScale : Error { using Error::Error; };

// --- calculus ---

struct NoPredecessor : Error { using Error::Error; };
struct NodesOutOfOrder : Error { using Error::Error; };
struct NotIncreasing : Error { using Error::Error; };

// --- expressions ---

class SyntaxError : public Error {
public:
    SyntaxError(std::size_t position, const std::string& expected)
        : Error("syntax error at position " + std::to_string(position) +
                ": expected " + expected),
          position(position), expected(expected) {}
    std::size_t position;
    std::string expected;
};

class UnknownIdentifier : public Error {
public:
    UnknownIdentifier(const std::string& name, std::size_t position)
        : Error("unknown identifier '" + name + "' at position " +
                std::to_string(position)),
          name(name), position(position) {}
    std::string name;
    std::size_t position;
};

class VariableNotAllowed : public Error {
public:
    VariableNotAllowed(const std::string& name, const std::string& role,
                       std::size_t position)
        : Error("variable '" + name + "' is not allowed in " + role +
                " expressions (position " + std::to_string(position) + ")"),
          name(name), role(role), position(position) {}
    std::string name;
    std::string role;
    std::size_t position;
};

struct NonFiniteResult : Error { using Error::Error; };
struct ExpressionEvalError : Error { using Error::Error; };

// --- solver ---

/// Carries the last iterate and the observed change ratio so divergence
/// reports can name the failing loop with numbers attached.
class IterationDiverged : public Error {
public:
    IterationDiverged(const std::string& loop, const std::string& msg,
                      double last_iterate, double ratio)
        : Error(loop + ": " + msg), loop(loop),
          last_iterate(last_iterate), ratio(ratio) {}
    std::string loop;
    double last_iterate;
    double ratio;
};

struct InnerDiverged : IterationDiverged {
    InnerDiverged(const std::string& msg, double last, double ratio)
        : IterationDiverged("InnerDiverged", msg, last, ratio) {}
};
struct PicardDiverged : IterationDiverged {
    PicardDiverged(const std::string& msg, double last, double ratio)
        : IterationDiverged("PicardDiverged", msg, last, ratio) {}
};
struct OuterDiverged : IterationDiverged {
    OuterDiverged(const std::string& msg, double last, double ratio)
        : IterationDiverged("OuterDiverged", msg, last, ratio) {}
};

struct InvalidProblem : Error { using Error::Error; };

// --- config ---

class ConfigError : public Error {
public:
    ConfigError(std::size_t line, const std::string& msg)
        : Error("line " + std::to_string(line) + ": " + msg), line(line) {}
    std::size_t line;
};

} // namespace tsfrac
