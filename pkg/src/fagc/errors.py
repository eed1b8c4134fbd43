"""Exception hierarchy shared across the package.

``FagcError`` is the common base; the CLI maps ``InputFormatError`` to exit
code 2 and every other subclass (domain/degeneracy errors) to exit code 3.
"""


class FagcError(Exception):
    """Base class for all errors raised by this package."""


class InputFormatError(FagcError):
    """Malformed input file: bad header, row, or cell."""


class NonFinite(FagcError):
    """An input value is NaN or infinite."""


class DegenerateFeature(FagcError):
    """Raw feature centers to (numerically) zero and has no pre-shape."""


class NotUnitNorm(FagcError):
    """A vector required to lie on the unit sphere does not."""


class OddDimension(FagcError):
    """Coordinate count is odd; complex pairing needs an even length."""


class ParamOutOfRange(FagcError):
    """Curve parameter s lies outside [0, theta]."""


class TooFewPoints(FagcError):
    """Fewer points than the operation requires."""


class DegenerateGeodesic(FagcError):
    """Curve endpoints are (numerically) coincident or antipodal."""


class NoValidCandidate(FagcError):
    """Every candidate endpoint produced a degenerate curve."""


class SeparationUnreachable(FagcError):
    """Rejection sampling could not place prototypes far enough apart."""


class DimensionMismatch(FagcError):
    """Datasets or vectors disagree on ambient dimension."""


class LabelMismatch(FagcError):
    """Datasets disagree on their label sets."""


class EmptyTrainingSet(FagcError):
    """A classifier was asked to train or predict with no data."""
