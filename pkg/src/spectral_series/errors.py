"""Exception hierarchy shared by the library and the CLI exit-code mapping."""


class SpectralSeriesError(Exception):
    """Base class for all errors raised by this package."""


class InputError(SpectralSeriesError):
    """Bad user input: malformed files, dimension mismatches, invalid parameters."""


class NumericalError(SpectralSeriesError):
    """Numerical failure: asymmetry, eigenvalue floor, ill-conditioning."""


class ArchiveError(SpectralSeriesError):
    """Model archive I/O failure: corrupt container, version mismatch."""
