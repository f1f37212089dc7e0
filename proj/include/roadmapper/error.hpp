#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace roadmapper
{

enum class errc
{
    duplicate_id,
    dangling_reference,
    ill_formed,
    implication_cycle,
    inconsistent_mandatory_set,
    unresolved_reference,
    missing_variable,
    division_by_zero,
    non_finite_result,
    no_distribution,
    unsupported_distribution,
    non_positive_sd,
    refinement_cycle,
    val_overflow,
    wrong_sort,
    not_a_comparison,
    multi_variable_condition,
    no_satisfaction_fn,
    invalid_argument,
    resource_limit,
    trigger_not_in_source,
    identical_configurations,
    not_applicable,
    ramification_failure,
    missing_value,
    non_singleton_val,
    too_large,
    parse_error,
};

[[nodiscard]] constexpr std::string_view to_string( errc code ) noexcept
{
    switch ( code )
    {
    case errc::duplicate_id: return "DuplicateId";
    case errc::dangling_reference: return "DanglingReference";
    case errc::ill_formed: return "IllFormed";
    case errc::implication_cycle: return "ImplicationCycle";
    case errc::inconsistent_mandatory_set: return "InconsistentMandatorySet";
    case errc::unresolved_reference: return "UnresolvedReference";
    case errc::missing_variable: return "MissingVariable";
    case errc::division_by_zero: return "DivisionByZero";
    case errc::non_finite_result: return "NonFiniteResult";
    case errc::no_distribution: return "NoDistribution";
    case errc::unsupported_distribution: return "UnsupportedDistribution";
    case errc::non_positive_sd: return "NonPositiveSd";
    case errc::refinement_cycle: return "RefinementCycle";
    case errc::val_overflow: return "ValOverflow";
    case errc::wrong_sort: return "WrongSort";
    case errc::not_a_comparison: return "NotAComparison";
    case errc::multi_variable_condition: return "MultiVariableCondition";
    case errc::no_satisfaction_fn: return "NoSatisfactionFn";
    case errc::invalid_argument: return "InvalidArgument";
    case errc::resource_limit: return "ResourceLimit";
    case errc::trigger_not_in_source: return "TriggerNotInSource";
    case errc::identical_configurations: return "IdenticalConfigurations";
    case errc::not_applicable: return "NotApplicable";
    case errc::ramification_failure: return "RamificationFailure";
    case errc::missing_value: return "MissingValue";
    case errc::non_singleton_val: return "NonSingletonVal";
    case errc::too_large: return "TooLarge";
    case errc::parse_error: return "ParseError";
    }
    return "Unknown";
}

// All engine failures are reported through this exception; code() identifies the
// failure kind and what() carries a human-readable message.
class error : public std::runtime_error
{
    errc _code;

public:
    error( errc code, const std::string& message )
        : std::runtime_error( std::string( to_string( code ) ) + ": " + message ), _code{ code }
    {
    }

    [[nodiscard]] errc code() const noexcept { return _code; }
};

} // namespace roadmapper
