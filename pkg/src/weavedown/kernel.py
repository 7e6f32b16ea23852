"""Host side of the kernel protocol: transports, sessions, registry.

A kernel is either the builtin calculator (driven in process) or a child
process speaking newline-delimited JSON on stdin/stdout. Every render
starts fresh sessions, so chunk state never leaks between documents.
See docs/protocol.md for the wire format.
"""

from __future__ import annotations

import json
import os
import queue
import shlex
import subprocess
import sys
import threading
from collections import deque
from dataclasses import dataclass, field

from .calc import ProtocolHandler
from .errors import (
    ExecTimeout, HandshakeTimeout, KernelCrash, KernelProtocolError,
    KernelStartFailure, UnknownLanguage,
)

PROTOCOL_VERSION = 1
HANDSHAKE_TIMEOUT = 10.0
DEFAULT_EXEC_TIMEOUT = 30.0

STREAMS = ("stdout", "message", "warning", "error")


@dataclass
class OutputSegment:
    kind: str  # one of STREAMS, or "value"
    text: str
    line: int | None = None  # cell-relative 1-based line, error segments only


@dataclass
class FigureRef:
    path: str  # file name inside the render's figure directory


@dataclass
class TableData:
    header: list[str]
    rows: list[list[str]]


@dataclass
class ChunkResult:
    ok: bool
    items: list = field(default_factory=list)  # emission order preserved

    @property
    def segments(self) -> list[OutputSegment]:
        return [i for i in self.items if isinstance(i, OutputSegment)]

    @property
    def figures(self) -> list[FigureRef]:
        return [i for i in self.items if isinstance(i, FigureRef)]

    @property
    def tables(self) -> list[TableData]:
        return [i for i in self.items if isinstance(i, TableData)]

    def error_text(self) -> str | None:
        for seg in self.segments:
            if seg.kind == "error":
                return seg.text
        return None


class _RecvTimeout(Exception):
    pass


class _Eof(Exception):
    def __init__(self, detail: str):
        self.detail = detail


class BuiltinTransport:
    """Drives the builtin handler in process; replies are queued by send."""

    def __init__(self):
        self._handler = ProtocolHandler()
        self._pending: deque[dict] = deque()

    def send(self, msg: dict) -> None:
        if msg.get("type") == "shutdown":
            return
        self._pending.extend(self._handler.handle(msg))

    def recv(self, timeout: float) -> dict:
        if not self._pending:
            raise KernelProtocolError("kernel sent no reply")
        return self._pending.popleft()

    def close(self) -> None:
        self._pending.clear()


class SubprocessTransport:
    """Child process with a reader thread feeding a queue.

    The child's stderr is left alone: it goes wherever ours goes and is
    never parsed.
    """

    def __init__(self, argv: list[str], lang: str):
        try:
            self._proc = subprocess.Popen(
                argv,
                stdin=subprocess.PIPE,
                stdout=subprocess.PIPE,
                text=True,
                encoding="utf-8",
                bufsize=1,
            )
        except OSError as err:
            raise KernelStartFailure(lang, str(err)) from None
        self._queue: queue.Queue = queue.Queue()
        self._reader = threading.Thread(target=self._pump, daemon=True)
        self._reader.start()

    def _pump(self) -> None:
        for raw in self._proc.stdout:
            raw = raw.strip()
            if not raw:
                continue
            try:
                msg = json.loads(raw)
            except json.JSONDecodeError:
                self._queue.put(_Eof(f"kernel wrote a non-JSON line: {raw[:120]!r}"))
                return
            if not isinstance(msg, dict):
                self._queue.put(_Eof(f"kernel wrote a non-object line: {raw[:120]!r}"))
                return
            self._queue.put(msg)
        code = self._proc.wait()
        self._queue.put(_Eof(f"kernel exited with status {code}"))

    def send(self, msg: dict) -> None:
        try:
            self._proc.stdin.write(json.dumps(msg, ensure_ascii=False) + "\n")
            self._proc.stdin.flush()
        except (BrokenPipeError, OSError):
            raise KernelCrash("kernel closed its input stream") from None

    def recv(self, timeout: float) -> dict:
        try:
            item = self._queue.get(timeout=timeout)
        except queue.Empty:
            raise _RecvTimeout() from None
        if isinstance(item, _Eof):
            raise KernelCrash(item.detail)
        return item

    def close(self) -> None:
        try:
            self.send({"type": "shutdown"})
        except KernelCrash:
            pass
        try:
            self._proc.stdin.close()
        except OSError:
            pass
        try:
            self._proc.wait(timeout=5)
        except subprocess.TimeoutExpired:
            self._proc.kill()
            self._proc.wait()


def _require_str(msg: dict, key: str) -> str:
    value = msg.get(key)
    if not isinstance(value, str):
        raise KernelProtocolError(
            f"{msg.get('type', '?')} message lacks a string {key!r} field")
    return value


def _check_figure_name(name: str) -> str:
    if not name or "/" in name or "\\" in name or name.startswith(".."):
        raise KernelProtocolError(f"kernel sent an unsafe figure path {name!r}")
    return name


def _check_table(msg: dict) -> TableData:
    header = msg.get("header")
    rows = msg.get("rows")
    if (not isinstance(header, list) or not header
            or not all(isinstance(c, str) for c in header)
            or not isinstance(rows, list)):
        raise KernelProtocolError("kernel sent a malformed table")
    for row in rows:
        if (not isinstance(row, list) or len(row) != len(header)
                or not all(isinstance(c, str) for c in row)):
            raise KernelProtocolError("kernel sent a ragged table")
    return TableData([str(c) for c in header], [list(r) for r in rows])


class KernelSession:
    """One language workspace for one render."""

    def __init__(self, transport, lang: str, figure_dir: str,
                 exec_timeout: float = DEFAULT_EXEC_TIMEOUT):
        self.transport = transport
        self.lang = lang
        self.figure_dir = figure_dir
        self.exec_timeout = exec_timeout
        self.langs: list[str] = []
        self._counter = 0

    def start(self) -> None:
        self.transport.send({
            "type": "hello",
            "version": PROTOCOL_VERSION,
            "figure_dir": self.figure_dir,
        })
        try:
            reply = self.transport.recv(HANDSHAKE_TIMEOUT)
        except _RecvTimeout:
            raise HandshakeTimeout(self.lang, HANDSHAKE_TIMEOUT) from None
        if reply.get("type") != "hello":
            raise KernelProtocolError(
                f"expected hello, got {reply.get('type')!r}")
        if reply.get("version") != PROTOCOL_VERSION:
            raise KernelProtocolError(
                f"kernel speaks protocol version {reply.get('version')!r}, "
                f"host speaks {PROTOCOL_VERSION}")
        langs = reply.get("langs")
        if not isinstance(langs, list) or not all(isinstance(x, str) for x in langs):
            raise KernelProtocolError("kernel hello lacks a langs list")
        self.langs = langs

    def _next_id(self) -> str:
        self._counter += 1
        return f"r{self._counter}"

    def _recv_for(self, msg_id: str) -> dict:
        try:
            reply = self.transport.recv(self.exec_timeout)
        except _RecvTimeout:
            raise ExecTimeout(
                f"kernel for '{self.lang}' did not reply within "
                f"{self.exec_timeout:g}s") from None
        if reply.get("id") != msg_id:
            raise KernelProtocolError(
                f"reply carries id {reply.get('id')!r}, expected {msg_id!r}")
        return reply

    def exec_chunk(self, code: str, fig_width: float, fig_height: float,
                   figure_stem: str) -> ChunkResult:
        msg_id = self._next_id()
        self.transport.send({
            "type": "exec",
            "id": msg_id,
            "code": code,
            "fig_width": fig_width,
            "fig_height": fig_height,
            "figure_stem": figure_stem,
        })
        result = ChunkResult(ok=True)
        while True:
            reply = self._recv_for(msg_id)
            kind = reply.get("type")
            if kind == "done":
                result.ok = bool(reply.get("ok"))
                return result
            if kind == "output":
                stream = reply.get("stream")
                if stream not in STREAMS:
                    raise KernelProtocolError(
                        f"kernel sent unknown stream {stream!r}")
                line = reply.get("line")
                if line is not None and not isinstance(line, int):
                    line = None
                result.items.append(
                    OutputSegment(stream, _require_str(reply, "text"), line))
            elif kind == "value":
                result.items.append(OutputSegment("value", _require_str(reply, "text")))
            elif kind == "figure":
                name = _check_figure_name(_require_str(reply, "path"))
                result.items.append(FigureRef(name))
            elif kind == "table":
                result.items.append(_check_table(reply))
            # anything else: ignored for forward compatibility

    def eval_inline(self, expr: str) -> tuple[bool, str]:
        """Returns (ok, text-or-error)."""
        msg_id = self._next_id()
        self.transport.send({"type": "eval", "id": msg_id, "expr": expr})
        while True:
            reply = self._recv_for(msg_id)
            if reply.get("type") != "eval_result":
                continue  # ignore stray non-terminal messages
            if reply.get("ok"):
                return True, _require_str(reply, "text")
            return False, _require_str(reply, "error")

    def shutdown(self) -> None:
        self.transport.close()


@dataclass
class KernelSpec:
    lang: str
    argv: list[str] | None  # None means the builtin calculator


class KernelRegistry:
    """Maps language names to kernel launch specs."""

    def __init__(self):
        self.specs: dict[str, KernelSpec] = {"calc": KernelSpec("calc", None)}

    def register(self, lang: str, command: str | list[str]) -> None:
        argv = shlex.split(command) if isinstance(command, str) else list(command)
        if not argv:
            raise KernelStartFailure(lang, "empty kernel command")
        self.specs[lang] = KernelSpec(lang, argv)

    def register_from_env(self, environ=None) -> None:
        environ = os.environ if environ is None else environ
        prefix = "WEAVE_KERNEL_"
        for key in sorted(environ):
            if key.startswith(prefix) and environ[key].strip():
                self.register(key[len(prefix):].lower(), environ[key])

    def langs(self) -> list[str]:
        return sorted(self.specs)

    def create(self, lang: str, figure_dir: str, exec_timeout: float,
               line: int = 0) -> KernelSession:
        spec = self.specs.get(lang)
        if spec is None:
            raise UnknownLanguage(lang, line)
        if spec.argv is None:
            transport = BuiltinTransport()
        else:
            transport = SubprocessTransport(spec.argv, lang)
        session = KernelSession(transport, lang, figure_dir, exec_timeout)
        try:
            session.start()
        except Exception:
            transport.close()
            raise
        return session


def builtin_subprocess_argv() -> list[str]:
    """Launch the builtin calculator as a real child process (used in tests)."""
    return [sys.executable, "-m", "weavedown.calc"]
