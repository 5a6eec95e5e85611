"""Exception types shared across the pipeline.

Every error raised on purpose derives from TrustanError so the CLI can
separate expected failures (exit 1, stage-tagged message) from bugs.
Errors marked ``retriable = True`` describe transient conditions a caller
may retry; everything else is fatal for the current run.
"""


class TrustanError(Exception):
    retriable = False


class ConfigError(TrustanError):
    """Invalid run configuration (bad flag values, no classifier, ...)."""


class IngestError(TrustanError):
    """Corpus loading or validation failure (missing file, bad record)."""


class FetchError(TrustanError):
    """HTTP thread fetch failure; carries the response status when known."""

    def __init__(self, message, status=None, retriable=False):
        super().__init__(message)
        self.status = status
        self.retriable = retriable


class AdapterError(TrustanError):
    """Base for external-classifier adapter failures."""


class AdapterProtocolError(AdapterError):
    """Adapter violated the wire contract (bad label, unknown id, ...)."""


class AdapterTimeout(AdapterError):
    retriable = True


class AdapterCrash(AdapterError):
    """Adapter process exited; message carries captured diagnostics."""


class InsufficientData(TrustanError):
    """Not enough points in the verdict window to compute a trend."""


class ChartError(TrustanError):
    """Nothing to plot, or chart emission failed."""
