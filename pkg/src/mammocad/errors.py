"""Pipeline error type carrying a stable machine-readable code."""


class PipelineError(Exception):
    """Raised for contract violations that callers are expected to handle.

    ``code`` is a short stable identifier (e.g. "roi-exceeds-image") that
    the CLI maps to exit codes and tests assert on; ``message`` is free text.
    """

    def __init__(self, code: str, message: str = ""):
        self.code = code
        self.message = message or code
        super().__init__(f"{code}: {self.message}" if message else code)
