"""Exception types shared across the engine."""


class CredalensError(Exception):
    """Base class for all engine errors."""


class ConfigError(CredalensError):
    """Invalid run configuration (bad value, unknown key, violated invariant)."""


class MissingFile(CredalensError):
    """A required input file does not exist."""


class MissingColumn(CredalensError):
    """A schema column name is absent from the file header."""


class BadCell(CredalensError):
    """A cell failed to parse: bad numeric, unknown pinned level, or empty."""


class EmptyFile(CredalensError):
    """The input file has a header but no data rows."""


class SingleClass(CredalensError):
    """An operation requiring both classes saw only one."""


class DegenerateSplit(CredalensError):
    """A requested split would leave the train or test side empty."""


class TooFewRows(CredalensError):
    """Not enough rows per class for the requested fold count."""


class WidthMismatch(CredalensError):
    """Input width differs from the width the model was trained on."""


class NonFinite(CredalensError):
    """Loss or weights became non-finite during fitting."""


class DegeneratePrior(CredalensError):
    """Training labels contain a single class; the log-odds prior is undefined."""


class TooManyFeatures(CredalensError):
    """Exact Shapley enumeration was requested above the feature limit."""


class InvalidSampleCount(CredalensError):
    """The Monte Carlo estimator needs at least one permutation."""


class IoFailure(CredalensError):
    """Writing an artifact file failed."""
