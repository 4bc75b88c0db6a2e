#pragma once

#include <stdexcept>
#include <string>

namespace walras {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
    virtual const char* kind() const noexcept { return "error"; }
};

#define WALRAS_ERROR(Name, Kind)                                           \
    class Name : public Error {                                            \
    public:                                                                \
        using Error::Error;                                                \
        const char* kind() const noexcept override { return Kind; }        \
    }

// input outside the open orthant, zero income, malformed vector sizes
WALRAS_ERROR(DomainError, "domain_error");
// economy / allocation / config fails validation
WALRAS_ERROR(ValidationError, "validation_error");
WALRAS_ERROR(NoConvergence, "no_convergence");
WALRAS_ERROR(LeftDomain, "left_domain");
WALRAS_ERROR(NotRegular, "not_regular");
WALRAS_ERROR(Infeasible, "infeasible");
WALRAS_ERROR(NearSingular, "near_singular");
WALRAS_ERROR(BranchLost, "branch_lost");
WALRAS_ERROR(InvalidTransfer, "invalid_transfer");
WALRAS_ERROR(StepTooLarge, "step_too_large");

#undef WALRAS_ERROR

}  // namespace walras
