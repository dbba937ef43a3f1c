"""Exception hierarchy.

Every error raised for bad input derives from :class:`JitterLabError`, which the
CLI maps to exit code 2. Anything else escaping a command is an internal error.
"""

from __future__ import annotations


class JitterLabError(ValueError):
    """Base class for validation errors on user-supplied input."""


class ParseError(JitterLabError):
    def __init__(self, path, line: int, message: str):
        self.path = str(path)
        self.line = line
        super().__init__(f"{self.path}:{line}: {message}")


class MissingExample(JitterLabError):
    def __init__(self, example_id: str, run_id: str):
        self.example_id = example_id
        self.run_id = run_id
        super().__init__(f"run {run_id!r} has no prediction for example {example_id!r}")


class UnknownExample(JitterLabError):
    def __init__(self, example_id: str, run_id: str):
        self.example_id = example_id
        self.run_id = run_id
        super().__init__(f"run {run_id!r} predicts example {example_id!r} which is not in the gold set")


class DuplicateId(JitterLabError):
    pass


class EmptyEvalSet(JitterLabError):
    pass


class UnknownLabel(JitterLabError):
    """A gold label outside the declared label alphabet."""


class LengthMismatch(JitterLabError):
    pass


class NeedAtLeastTwoRuns(JitterLabError):
    pass


class KeyMismatch(JitterLabError):
    pass


class DropTooLarge(JitterLabError):
    pass


class DropTooSmall(JitterLabError):
    pass


class ClassEmptied(JitterLabError):
    pass


class EmptyMemberList(JitterLabError):
    pass


class IndexOutOfRange(JitterLabError):
    pass


class EvalSetMismatch(JitterLabError):
    pass


class TooFewPoints(JitterLabError):
    pass


class ZeroVariance(JitterLabError):
    pass


class InfeasibleSpec(JitterLabError):
    pass


class InstanceTooLarge(JitterLabError):
    pass


class EmptyInput(JitterLabError):
    pass


class UnknownLabelWarning(UserWarning):
    """A run predicted a label outside the alphabet. It is scored as incorrect."""
