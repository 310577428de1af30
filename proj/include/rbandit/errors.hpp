#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace rbandit {

enum class ErrorCode {
    EmptyReservoir,
    ProbabilityNotSimplex,
    MeanOutOfRange,
    InvalidDistribution,
    ZeroGap,
    ParameterOutOfRange,
    PolicyOverBudget,
    InvalidAction,
    EnumerationTooLarge,
    NonBernoulliSupport,
    BudgetTooSmall,
    DivergenceInfinite,
    ConfigInvalid,
    CsvSchemaMismatch,
    IoError,
};

constexpr std::string_view to_string(ErrorCode code) {
    switch (code) {
    case ErrorCode::EmptyReservoir: return "EmptyReservoir";
    case ErrorCode::ProbabilityNotSimplex: return "ProbabilityNotSimplex";
    case ErrorCode::MeanOutOfRange: return "MeanOutOfRange";
    case ErrorCode::InvalidDistribution: return "InvalidDistribution";
    case ErrorCode::ZeroGap: return "ZeroGap";
    case ErrorCode::ParameterOutOfRange: return "ParameterOutOfRange";
    case ErrorCode::PolicyOverBudget: return "PolicyOverBudget";
    case ErrorCode::InvalidAction: return "InvalidAction";
    case ErrorCode::EnumerationTooLarge: return "EnumerationTooLarge";
    case ErrorCode::NonBernoulliSupport: return "NonBernoulliSupport";
    case ErrorCode::BudgetTooSmall: return "BudgetTooSmall";
    case ErrorCode::DivergenceInfinite: return "DivergenceInfinite";
    case ErrorCode::ConfigInvalid: return "ConfigInvalid";
    case ErrorCode::CsvSchemaMismatch: return "CsvSchemaMismatch";
    case ErrorCode::IoError: return "IoError";
    }
    return "Unknown";
}

/// Single exception type for the library; callers branch on code().
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what)
        : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

/// Episode failure inside run_trials, tagged with the failing trial.
class TrialError : public Error {
public:
    TrialError(const Error& inner, std::size_t trial_index)
        : Error(inner.code(), "trial " + std::to_string(trial_index) + ": " + inner.what()),
          trial_index_(trial_index) {}

    std::size_t trial_index() const noexcept { return trial_index_; }

private:
    std::size_t trial_index_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& what) { throw Error(code, what); }

} // namespace rbandit
