"""Exception hierarchy. Every error carries the rule tag that fired."""

from __future__ import annotations


class HeegnerLabError(Exception):
    rule = "generic"
    exit_code = 1

    def __init__(self, message: str, rule: str | None = None):
        super().__init__(message)
        if rule is not None:
            self.rule = rule


class ValidationError(HeegnerLabError, ValueError):
    rule = "validation"
    exit_code = 2


class UnrealizablePolarization(ValidationError):
    rule = "gamma_sq_divides_d_plus_tc2"


class AmbiguousPolarization(ValidationError):
    rule = "c_not_unique"

    def __init__(self, message: str, candidates: list[int]):
        super().__init__(message)
        self.candidates = list(candidates)


class UnsupportedCase(ValidationError):
    rule = "omega_ne_1_unsupported"


class NotAReflection(ValidationError):
    rule = "square_divides_twice_div"


class NormalityNotEstablished(ValidationError):
    rule = "normality_required"


class BudgetExceeded(HeegnerLabError):
    rule = "enumeration_budget"
    exit_code = 3

    def __init__(self, size: int, budget: int, what: str = "group"):
        super().__init__(
            f"{what} too large to enumerate: |A| = {size} exceeds budget {budget}"
        )
        self.size = size
        self.budget = budget
