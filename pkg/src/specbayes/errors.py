"""Exception hierarchy.

Everything raised deliberately by this package derives from
:class:`SpectralError`, which is itself a ``ValueError`` so callers that only
care about "bad input" can catch that.
"""


class SpectralError(ValueError):
    pass


class GridMismatch(SpectralError):
    def __init__(self, a, b):
        super().__init__(f"wavelength grids differ: {a} vs {b}")
        self.grids = (a, b)


class RoleConflict(SpectralError):
    pass


class InvalidBelief(SpectralError):
    """Precision matrix is not symmetric positive definite."""


class DegenerateDesign(SpectralError):
    pass


class DegenerateMean(SpectralError):
    pass


class NonPositivePosterior(SpectralError):
    pass


class NoConfidenceAvailable(SpectralError):
    pass


class MethodScopeError(SpectralError):
    pass


class NonConverged(SpectralError):
    pass


class NonUniformGrid(SpectralError):
    pass


class ExtrapolationRequired(SpectralError):
    pass


class CSVFormatError(SpectralError):
    def __init__(self, path, line: int, message: str):
        super().__init__(f"{path}:{line}: {message}")
        self.path = path
        self.line = line


class DatasetError(SpectralError):
    """One or more member files of a dataset failed to load.

    ``failures`` maps each offending file to the error it raised.
    """

    def __init__(self, manifest, failures: dict):
        lines = [f"{manifest}: {len(failures)} file(s) failed"]
        lines += [f"  {path}: {err}" for path, err in failures.items()]
        super().__init__("\n".join(lines))
        self.manifest = manifest
        self.failures = failures
