"""Exception hierarchy shared by all svcnet modules."""

from __future__ import annotations


class SvcnetError(Exception):
    """Base class for every error raised by svcnet."""


class InputError(SvcnetError, ValueError):
    """Malformed or inconsistent input document.

    The CLI maps these to exit status 2.
    """


class OntologyError(InputError):
    pass


class UnresolvedConceptError(OntologyError):
    """A concept reference names an unknown ontology or concept."""

    def __init__(self, ref: object, reason: str = "unresolved concept reference") -> None:
        self.ref = ref
        super().__init__(f"{reason}: {ref}")


class CollectionError(InputError):
    pass


class WsdlImportError(InputError):
    pass


class MetricUndefined(SvcnetError, ValueError):
    """A metric has no defined value on the given network (no triples, zero variance, ...)."""


class FitError(SvcnetError, ValueError):
    """Not enough (or degenerate) data to fit a degree distribution."""
