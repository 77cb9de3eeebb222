"""Exception types shared across the package."""

from __future__ import annotations


class HarropError(Exception):
    """Base class for all errors raised by this package."""


# -- term / kernel errors ----------------------------------------------------

class UnknownIdentifier(HarropError):
    def __init__(self, name: str):
        super().__init__(f"unknown identifier: {name}")
        self.name = name


class TypeMismatch(HarropError):
    pass


class SignatureError(HarropError):
    """Duplicate declaration or reserved-name violation in a signature."""


# -- concrete syntax / formula errors ----------------------------------------

class ParseError(HarropError):
    def __init__(self, msg: str, line: int, col: int):
        super().__init__(f"{line}:{col}: {msg}")
        self.msg = msg
        self.line = line
        self.col = col


class ProgramTypeError(HarropError):
    """A clause failed type checking or elaboration."""

    def __init__(self, clause_index: int, reason: str):
        super().__init__(f"clause {clause_index}: {reason}")
        self.clause_index = clause_index
        self.reason = reason


class NonRigidAtomError(HarropError):
    """An atomic formula's head is a variable or a logical constant."""


class NotAClause(HarropError):
    """A formula does not fit the program-clause grammar."""


class NoHead(HarropError):
    """The formula has no unambiguous rigid head (truth or a bare conjunction)."""


# -- engine errors ------------------------------------------------------------

class IllFormedSequent(HarropError):
    pass


# -- analysis errors ----------------------------------------------------------

class UndefinedPredicate(HarropError):
    def __init__(self, name: str):
        super().__init__(f"predicate not declared: {name}")
        self.name = name


# -- emitter errors -----------------------------------------------------------

class NotASubcontext(HarropError):
    pass


class PlanMismatch(HarropError):
    pass


class UnorderedArtifact(HarropError):
    pass


# -- external-tool errors -----------------------------------------------------

class ReplayRejected(HarropError):
    def __init__(self, first_error_line: str):
        super().__init__(first_error_line)
        self.first_error_line = first_error_line
