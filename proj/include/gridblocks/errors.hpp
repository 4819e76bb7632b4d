#pragma once

#include <stdexcept>
#include <string>

namespace gridblocks {

// Exit-code categories used by the CLI:
//   2 = parse/data, 3 = numeric, 4 = infeasible/cap, 5 = usage
class Error : public std::runtime_error {
public:
    Error(std::string code, const std::string& msg, int exit_code)
        : std::runtime_error(msg), code_(std::move(code)), exit_code_(exit_code) {}
    const std::string& code() const { return code_; }
    int exit_code() const { return exit_code_; }

private:
    std::string code_;
    int exit_code_;
};

class ParseError : public Error {
public:
    ParseError(const std::string& msg, int line_no = -1)
        : Error("parse", line_no >= 0 ? "line " + std::to_string(line_no) + ": " + msg : msg, 2),
          line_no_(line_no) {}
    int line_no() const { return line_no_; }

private:
    int line_no_;
};

class DataError : public Error {
public:
    explicit DataError(const std::string& msg) : Error("data", msg, 2) {}
};

class NumericError : public Error {
public:
    NumericError(const std::string& code, const std::string& msg) : Error(code, msg, 3) {}
};

class BalanceError : public NumericError {
public:
    explicit BalanceError(const std::string& msg) : NumericError("balance", msg) {}
};

class UnbalanceableError : public NumericError {
public:
    explicit UnbalanceableError(const std::string& msg) : NumericError("unbalanceable", msg) {}
};

class ConditioningError : public NumericError {
public:
    explicit ConditioningError(const std::string& msg) : NumericError("conditioning", msg) {}
};

// Raised when an LODF is requested for a bridge outage; the caller should use
// bridge_outage_lodf with an explicit proportional control instead.
class BridgeOutageError : public Error {
public:
    explicit BridgeOutageError(const std::string& msg) : Error("bridge-outage", msg, 4) {}
};

// Raised when a GLODF is requested for a cut-set outage; the caller should use
// cutset_flow_change instead.
class CutSetError : public Error {
public:
    explicit CutSetError(const std::string& msg) : Error("cut-set", msg, 4) {}
};

class EnumerationCapError : public Error {
public:
    EnumerationCapError(const std::string& msg, double count)
        : Error("enumeration-cap", msg, 4), count_(count) {}
    double count() const { return count_; }

private:
    double count_;
};

class UsageError : public Error {
public:
    explicit UsageError(const std::string& msg) : Error("usage", msg, 5) {}
};

}  // namespace gridblocks
