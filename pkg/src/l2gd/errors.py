"""
Error hierarchy shared by the library and the CLI.

Each family maps to a CLI exit code:
- ConfigError (1): invalid or inconsistent parameters
- DataError (2): dataset missing, unreadable or malformed
- InvariantViolation (3): internal protocol invariant broken during a run
"""


class ConfigError(ValueError):
    exit_code = 1


class NoVarianceCertificate(ConfigError):
    def __init__(self, kind: str):
        super().__init__(f"{kind}: no unbiased variance certificate (biased compressor)")
        self.kind = kind

    def __reduce__(self):
        return type(self), (self.kind,)


class DataError(ValueError):
    exit_code = 2


class LibsvmParseError(DataError):
    def __init__(self, line_number: int, message: str):
        super().__init__(f"line {line_number}: {message}")
        self.line_number = line_number
        self.detail = message

    def __reduce__(self):
        return type(self), (self.line_number, self.detail)


class InvariantViolation(RuntimeError):
    exit_code = 3


class SweepPointError(RuntimeError):
    """A single (p, lambda, seed) point of a sweep failed; wraps the cause."""

    def __init__(self, p_index: int, lam_index: int, seed: int, cause: BaseException):
        super().__init__(f"sweep point p_index={p_index} lam_index={lam_index} seed={seed}: {cause}")
        self.p_index = p_index
        self.lam_index = lam_index
        self.seed = seed
        self.cause = cause

    def __reduce__(self):
        return type(self), (self.p_index, self.lam_index, self.seed, self.cause)

    @property
    def exit_code(self) -> int:
        return exit_code_for(self.cause)


def exit_code_for(exc: BaseException) -> int:
    """Exit code the CLI reports for an exception; pydantic validation counts as a config error."""
    code = getattr(exc, 'exit_code', None)
    if code is not None:
        return code
    if isinstance(exc, ValueError):
        return ConfigError.exit_code
    return InvariantViolation.exit_code
