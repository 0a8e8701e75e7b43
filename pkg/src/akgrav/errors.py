"""Exception hierarchy shared by all modules."""


class AkgravError(Exception):
    """Base class for every error raised by the package."""


class ExprSyntaxError(AkgravError):
    def __init__(self, message, source="", position=0):
        self.source = source
        self.position = position
        pointer = ""
        if source:
            pointer = f"\n  {source}\n  {' ' * position}^"
        super().__init__(f"{message} at position {position}{pointer}")


class UnknownIdentifier(ExprSyntaxError):
    pass


class DomainError(AkgravError):
    """Numeric evaluation left the domain of a subexpression (x/0, ln(x<=0), sqrt(x<0))."""

    def __init__(self, subexpr, point):
        self.subexpr = subexpr
        self.point = point
        super().__init__(f"domain error in {subexpr} at point {point}")


class DegenerateMetric(AkgravError):
    """A Hessian or metric block is singular where it has to be inverted."""


class DimensionMismatch(AkgravError):
    pass


class IdentificationViolated(AkgravError):
    """The h-block does not equal the index-shifted v-block (g_ij != h_{n+i,n+j})."""


class NoConvergence(AkgravError):
    pass


class SignatureMismatch(AkgravError):
    pass


class NonConstantRHS(AkgravError):
    """The supplied N-connection is not linear in the fibre coordinates."""


class ScenarioError(AkgravError):
    """Malformed scenario input (CLI exit code 2)."""
