"""Exception hierarchy shared across the package."""

from __future__ import annotations


class QmeError(Exception):
    """Base class for all errors raised by qme."""


# -- model loading and linking ------------------------------------------------


class ModelFormatError(QmeError):
    """A module file does not conform to the module schema."""


class LinkError(QmeError):
    """Base class for problems detected while linking modules."""


class UnresolvedReference(LinkError):
    def __init__(self, ref: str, referrer: str):
        super().__init__(f"unresolved reference {ref!r} in {referrer}")
        self.ref = ref
        self.referrer = referrer


class DuplicateId(LinkError):
    def __init__(self, element_id: str, modules: tuple[str, ...] = ()):
        where = f" (defined in {', '.join(modules)})" if modules else ""
        super().__init__(f"duplicate id {element_id!r}{where}")
        self.element_id = element_id


class MissingRequires(LinkError):
    def __init__(self, ref: str, referrer: str, from_module: str, to_module: str):
        super().__init__(
            f"{referrer} in module {from_module!r} references {ref!r} of module "
            f"{to_module!r}, but {from_module!r} does not require {to_module!r}"
        )
        self.ref = ref
        self.from_module = from_module
        self.to_module = to_module


class CyclicModuleDependency(LinkError):
    def __init__(self, cycle: list[str]):
        super().__init__("cyclic module dependency: " + " -> ".join(cycle))
        self.cycle = cycle


class AmbiguousRoot(LinkError):
    pass


# -- engine ---------------------------------------------------------------------


class ModelInvalid(QmeError):
    def __init__(self, findings):
        self.findings = list(findings)
        lines = [f"{f.rule} {f.element}: {f.message}" for f in self.findings]
        super().__init__("model has validation errors:\n  " + "\n  ".join(lines))


class InvalidRanking(QmeError, ValueError):
    pass


class WeightSumViolation(QmeError, ValueError):
    pass


class NonFiniteInput(QmeError, ValueError):
    pass


class EmptyInput(QmeError, ValueError):
    pass


# -- data -------------------------------------------------------------------------


class DataError(QmeError):
    """Base class for problems in ingested measurement or corpus data."""


class MalformedRecord(DataError):
    def __init__(self, source: str, row: int, reason: str):
        super().__init__(f"{source}: row {row}: {reason}")
        self.source = source
        self.row = row


class DuplicateMeasureValue(DataError):
    def __init__(self, measure: str, detail: str = ""):
        super().__init__(f"measure {measure!r} received more than one value{detail}")
        self.measure = measure


# -- adaptation / reporting ----------------------------------------------------------


class GoalMatchesNothing(QmeError):
    pass


class ModelMismatch(QmeError):
    pass
