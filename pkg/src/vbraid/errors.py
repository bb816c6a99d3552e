"""Exception hierarchy. Every domain error derives from :class:`VBraidError`."""


class VBraidError(Exception):
    """Base class for domain errors (CLI exit code 1)."""


class ParseError(VBraidError):
    def __init__(self, message: str, offset: int):
        super().__init__(f"{message} (at offset {offset})")
        self.offset = offset


class IndexOutOfRange(VBraidError):
    pass


class CategoryViolation(VBraidError):
    pass


class CategoryMismatch(VBraidError):
    pass


class StrandMismatch(VBraidError):
    pass


class NoMatch(VBraidError):
    pass


class TooFewStrands(VBraidError):
    pass


class BadSite(VBraidError):
    pass


class MalformedDiagram(VBraidError):
    def __init__(self, message: str, slice_index: int):
        super().__init__(f"slice {slice_index}: {message}")
        self.slice_index = slice_index


class NotFreeArc(VBraidError):
    pass


class NoUpArc(VBraidError):
    pass


class MissingVirtualRecord(VBraidError):
    pass


class FlatCrossingPresent(VBraidError):
    pass


class DimensionBudgetExceeded(VBraidError):
    pass


class CategoryModelMismatch(VBraidError):
    pass


class ScriptInapplicable(VBraidError):
    def __init__(self, message: str, step: int):
        super().__init__(f"step {step}: {message}")
        self.step = step


class BudgetExceeded(VBraidError):
    def __init__(self, message: str, nodes: int):
        super().__init__(message)
        self.nodes = nodes
