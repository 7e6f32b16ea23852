"""Error types for the render pipeline.

Every abort path maps to exactly one exit class:
1 = parse/config, 2 = execution, 3 = I/O.
"""

from __future__ import annotations

PARSE = 1
EXECUTION = 2
IO = 3


class WeaveError(Exception):
    """Base class for render-aborting errors."""

    exit_class = PARSE

    def __init__(self, message: str, line: int | None = None):
        super().__init__(message)
        self.line = line

    def diagnostic(self, path: str | None = None) -> str:
        loc = []
        if path:
            loc.append(str(path))
        if self.line is not None:
            loc.append(str(self.line))
        prefix = ":".join(loc)
        return f"{prefix}: {self}" if prefix else str(self)


# -- parse/config (exit 1) --------------------------------------------------

class MalformedHeader(WeaveError):
    pass


class UnterminatedFence(WeaveError):
    def __init__(self, line: int):
        super().__init__("code fence opened here is never closed", line)


class UnknownOption(WeaveError):
    def __init__(self, key: str, line: int | None = None):
        super().__init__(f"unknown chunk option '{key}'", line)
        self.key = key


class BadValue(WeaveError):
    def __init__(self, key: str, value: str, line: int | None = None):
        super().__init__(f"bad value for '{key}': {value}", line)
        self.key = key
        self.value = value


class DuplicateKey(WeaveError):
    def __init__(self, key: str, line: int | None = None):
        super().__init__(f"duplicate key '{key}'", line)
        self.key = key


class DuplicateChunkName(WeaveError):
    def __init__(self, name: str, line_a: int, line_b: int):
        super().__init__(
            f"duplicate chunk name '{name}' (lines {line_a} and {line_b})", line_b
        )
        self.name = name
        self.line_a = line_a
        self.line_b = line_b


class UnknownLanguage(WeaveError):
    def __init__(self, lang: str, line: int | None = None):
        super().__init__(f"no kernel registered for language '{lang}'", line)
        self.lang = lang


class BibParseError(WeaveError):
    pass


class NoSlides(WeaveError):
    def __init__(self, path: str | None = None):
        where = f" in {path}" if path else ""
        super().__init__(f"slides output requires at least one level-2 heading{where}")


class StrictModeError(WeaveError):
    """A warning upgraded to an error under --strict."""


# -- execution (exit 2) -----------------------------------------------------

class ExecutionError(WeaveError):
    exit_class = EXECUTION


class KernelStartFailure(ExecutionError):
    def __init__(self, lang: str, reason: str):
        super().__init__(f"failed to start kernel for '{lang}': {reason}")
        self.lang = lang


class HandshakeTimeout(ExecutionError):
    def __init__(self, lang: str, seconds: float):
        super().__init__(f"kernel for '{lang}' did not answer hello within {seconds:g}s")


class KernelCrash(ExecutionError):
    pass


class ExecTimeout(ExecutionError):
    pass


class KernelProtocolError(ExecutionError):
    pass


class ChunkExecutionError(ExecutionError):
    """A chunk reported status=error and its options did not allow continuing."""

    def __init__(self, chunk_label: str, message: str, line: int | None = None):
        super().__init__(f"chunk '{chunk_label}' failed: {message}", line)
        self.chunk_label = chunk_label


class InlineEvalError(ExecutionError):
    def __init__(self, expr: str, message: str, line: int | None = None):
        super().__init__(f"inline expression `{expr}` failed: {message}", line)
        self.expr = expr


class MultilineInlineResult(ExecutionError):
    def __init__(self, expr: str, line: int | None = None):
        super().__init__(f"inline expression `{expr}` produced a multi-line value", line)
        self.expr = expr


# -- I/O (exit 3) -------------------------------------------------------------

class IoError(WeaveError):
    exit_class = IO

    def __init__(self, path: str, message: str):
        super().__init__(f"{path}: {message}")
        self.path = path


class Warnings:
    """Render-scoped warning collector.

    Warnings print to stderr (header-key reports only at --verbose) and
    upgrade to StrictModeError after the render when --strict is set.
    """

    def __init__(self) -> None:
        self.entries: list[tuple[str, str, bool]] = []  # (code, message, verbose_only)

    def warn(self, code: str, message: str, verbose_only: bool = False) -> None:
        self.entries.append((code, message, verbose_only))

    def messages(self, verbose: bool = False) -> list[str]:
        return [
            f"warning: {msg}"
            for (_, msg, verbose_only) in self.entries
            if verbose or not verbose_only
        ]

    def raise_if_strict(self) -> None:
        if self.entries:
            code, msg, _ = self.entries[0]
            raise StrictModeError(f"{msg} [{code}; --strict]")
