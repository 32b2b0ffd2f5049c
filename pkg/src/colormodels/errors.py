"""Exception types shared by all modules.

Every validation failure carries a short machine-readable ``code`` so the
CLI (and tests) can distinguish, e.g., ``OUT_OF_RANGE_ENDPOINT`` from
``NEGATIVE_COUNT`` without parsing messages.
"""


class ModelError(ValueError):
    """Invalid input: bad graph, bad model, mismatched shapes."""

    def __init__(self, code, message=""):
        self.code = code
        super().__init__(f"{code}: {message}" if message else code)


class NumericalError(RuntimeError):
    """Internal numerical failure (non-convergence, orthogonality blowup)."""

    def __init__(self, code, message=""):
        self.code = code
        super().__init__(f"{code}: {message}" if message else code)
