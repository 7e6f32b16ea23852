"""The builtin "calc" kernel: a small decimal calculator.

Execution is deterministic across platforms: arithmetic runs on Decimal
with a fixed 28-digit context, figures are plain SVG polylines, and all
protocol replies are emitted in a stable order. The module doubles as a
standalone kernel process (`python -m weavedown.calc`) speaking the
newline-delimited JSON protocol described in docs/protocol.md.

Cell language, one statement per line:

    speed = 4 + 3 * 2        assignment
    speed / 2                bare expression, reported as a value
    print(speed)             stdout
    message("fitting")       message stream
    warn("check inputs")     warning stream
    plot(1, 4, 9, 16)        figure: polyline through the y values
    table("a", "b"; 1, 2)    structured table, rows split by ;
    abs(x), sqrt(x)          expression functions
"""

from __future__ import annotations

import json
import os
import sys
from dataclasses import dataclass
from decimal import Context, Decimal, DivisionByZero, InvalidOperation, Overflow

PROTOCOL_VERSION = 1
LANGS = ["calc"]

_CTX = Context(prec=28)

STATEMENT_CALLS = ("print", "message", "warn", "plot", "table")


class CalcError(Exception):
    """Any failure inside a cell; the text is user-facing."""


def format_number(value: Decimal) -> str:
    text = format(value, "f")
    if "." in text:
        text = text.rstrip("0").rstrip(".")
    if text in ("", "-0"):
        return "0"
    return text


# -- tokens ---------------------------------------------------------------------

_PUNCT = "+-*/^(),;="


def _tokenize(line: str) -> list[tuple[str, str]]:
    tokens = []
    i, n = 0, len(line)
    while i < n:
        c = line[i]
        if c.isspace():
            i += 1
        elif c.isdigit() or (c == "." and i + 1 < n and line[i + 1].isdigit()):
            j = i
            seen_dot = False
            while j < n and (line[j].isdigit() or (line[j] == "." and not seen_dot)):
                seen_dot = seen_dot or line[j] == "."
                j += 1
            tokens.append(("number", line[i:j]))
            i = j
        elif c.isalpha() or c == "_":
            j = i
            while j < n and (line[j].isalnum() or line[j] == "_"):
                j += 1
            tokens.append(("ident", line[i:j]))
            i = j
        elif c in "'\"":
            j = i + 1
            buf = []
            while j < n and line[j] != c:
                if line[j] == "\\" and j + 1 < n:
                    esc = line[j + 1]
                    buf.append({"n": "\n", "t": "\t", "\\": "\\", c: c}.get(esc, esc))
                    j += 2
                else:
                    buf.append(line[j])
                    j += 1
            if j >= n:
                raise CalcError("unterminated string")
            tokens.append(("string", "".join(buf)))
            i = j + 1
        elif c in _PUNCT:
            tokens.append(("punct", c))
            i += 1
        else:
            raise CalcError(f"unexpected character {c!r}")
    tokens.append(("end", ""))
    return tokens


class _Parser:
    def __init__(self, tokens: list[tuple[str, str]]):
        self.tokens = tokens
        self.pos = 0

    def peek(self):
        return self.tokens[self.pos]

    def take(self, kind=None, value=None):
        k, v = self.tokens[self.pos]
        if (kind and k != kind) or (value and v != value):
            want = value or kind
            got = v or k
            raise CalcError(f"expected {want!r}, got {got!r}")
        self.pos += 1
        return v

    def at(self, kind, value=None):
        k, v = self.tokens[self.pos]
        return k == kind and (value is None or v == value)


# -- evaluation -------------------------------------------------------------------


@dataclass
class ExecContext:
    """Per-exec settings the host supplies."""

    fig_width: float
    fig_height: float
    figure_stem: str
    figure_dir: str | None


class Session:
    """One workspace: variables persist across cells, never across sessions."""

    def __init__(self):
        self.env: dict[str, Decimal] = {}

    def run_cell(self, code: str, ctx: ExecContext, emit) -> bool:
        """Execute a cell, sending results through emit(dict); returns ok."""
        figure_count = 0
        for offset, line in enumerate(code.split("\n")):
            if not line.strip():
                continue
            try:
                figure_count = self._run_line(line, ctx, emit, figure_count)
            except CalcError as err:
                # line is 1-based within the cell; the host adds the offset
                emit({"type": "output", "stream": "error", "text": str(err),
                      "line": offset + 1})
                return False
        return True

    def eval_expr(self, expr: str) -> str:
        parser = _Parser(_tokenize(expr))
        value = self._expr(parser)
        parser.take("end")
        return format_number(value)

    # statements

    def _run_line(self, line: str, ctx: ExecContext, emit, figure_count: int) -> int:
        parser = _Parser(_tokenize(line))
        kind, word = parser.peek()
        if kind == "ident" and word in STATEMENT_CALLS:
            nxt = parser.tokens[parser.pos + 1]
            if nxt == ("punct", "("):
                self._statement_call(word, parser, ctx, emit, figure_count)
                return figure_count + (1 if word == "plot" else 0)
        if kind == "ident" and parser.tokens[parser.pos + 1] == ("punct", "="):
            parser.take("ident")
            parser.take("punct", "=")
            value = self._expr(parser)
            parser.take("end")
            self.env[word] = value
            return figure_count
        value = self._expr(parser)
        parser.take("end")
        emit({"type": "value", "text": format_number(value)})
        return figure_count

    def _statement_call(self, name, parser, ctx, emit, figure_count):
        parser.take("ident")
        parser.take("punct", "(")
        if name == "table":
            rows = self._table_rows(parser)
            emit({"type": "table", "header": rows[0], "rows": rows[1:]})
            return
        args = self._args(parser)
        if name == "print":
            if len(args) != 1:
                raise CalcError("print takes one argument")
            emit({"type": "output", "stream": "stdout", "text": args[0]})
        elif name in ("message", "warn"):
            if len(args) != 1:
                raise CalcError(f"{name} takes one argument")
            stream = "message" if name == "message" else "warning"
            emit({"type": "output", "stream": stream, "text": args[0]})
        elif name == "plot":
            if len(args) < 2:
                raise CalcError("plot needs at least two points")
            ys = [float(a) for a in args]
            svg = polyline_svg(ys, ctx.fig_width, ctx.fig_height)
            filename = f"{ctx.figure_stem}-{figure_count + 1}.svg"
            if ctx.figure_dir is not None:
                with open(os.path.join(ctx.figure_dir, filename), "w",
                          encoding="utf-8") as fh:
                    fh.write(svg)
            emit({"type": "figure", "path": filename})

    def _args(self, parser) -> list[str]:
        """Call arguments formatted to text (strings stay verbatim)."""
        args = []
        if not parser.at("punct", ")"):
            args.append(self._arg(parser))
            while parser.at("punct", ","):
                parser.take("punct", ",")
                args.append(self._arg(parser))
        parser.take("punct", ")")
        parser.take("end")
        return args

    def _arg(self, parser) -> str:
        if parser.at("string"):
            return parser.take("string")
        return format_number(self._expr(parser))

    def _table_rows(self, parser) -> list[list[str]]:
        rows: list[list[str]] = [[]]
        while not parser.at("punct", ")"):
            rows[-1].append(self._arg(parser))
            if parser.at("punct", ","):
                parser.take("punct", ",")
            elif parser.at("punct", ";"):
                parser.take("punct", ";")
                rows.append([])
        parser.take("punct", ")")
        parser.take("end")
        if any(not row for row in rows) or len(rows) < 2:
            raise CalcError("table needs a header row and at least one data row")
        width = len(rows[0])
        if any(len(row) != width for row in rows):
            raise CalcError("table rows differ in length")
        return rows

    # expressions

    def _expr(self, parser) -> Decimal:
        value = self._term(parser)
        while parser.at("punct", "+") or parser.at("punct", "-"):
            op = parser.take("punct")
            rhs = self._term(parser)
            value = _CTX.add(value, rhs) if op == "+" else _CTX.subtract(value, rhs)
        return value

    def _term(self, parser) -> Decimal:
        value = self._unary(parser)
        while parser.at("punct", "*") or parser.at("punct", "/"):
            op = parser.take("punct")
            rhs = self._unary(parser)
            try:
                value = _CTX.multiply(value, rhs) if op == "*" else _CTX.divide(value, rhs)
            except DivisionByZero:
                raise CalcError("division by zero") from None
            except InvalidOperation:
                raise CalcError("invalid operation") from None
        return value

    def _unary(self, parser) -> Decimal:
        # ^ binds tighter than unary minus: -2^2 is -(2^2)
        if parser.at("punct", "-"):
            parser.take("punct", "-")
            return _CTX.minus(self._unary(parser))
        return self._power(parser)

    def _power(self, parser) -> Decimal:
        base = self._atom(parser)
        if parser.at("punct", "^"):
            parser.take("punct", "^")
            exponent = self._unary(parser)  # right associative; allows 2^-3
            if exponent != exponent.to_integral_value():
                raise CalcError("exponent must be an integer")
            try:
                return _CTX.power(base, exponent)
            except DivisionByZero:
                raise CalcError("division by zero") from None
            except (InvalidOperation, Overflow):
                raise CalcError("invalid power") from None
        return base

    def _atom(self, parser) -> Decimal:
        if parser.at("number"):
            return _CTX.create_decimal(parser.take("number"))
        if parser.at("punct", "("):
            parser.take("punct", "(")
            value = self._expr(parser)
            parser.take("punct", ")")
            return value
        if parser.at("ident"):
            name = parser.take("ident")
            if parser.at("punct", "("):
                parser.take("punct", "(")
                value = self._expr(parser)
                parser.take("punct", ")")
                return self._call(name, value)
            if name in STATEMENT_CALLS:
                raise CalcError(f"{name} is a statement, not an expression")
            if name not in self.env:
                raise CalcError(f"undefined variable {name!r}")
            return self.env[name]
        kind, value = parser.peek()
        raise CalcError(f"unexpected {value or kind!r} in expression")

    def _call(self, name: str, value: Decimal) -> Decimal:
        if name == "abs":
            return _CTX.abs(value)
        if name == "sqrt":
            if value < 0:
                raise CalcError("square root of a negative number")
            return _CTX.sqrt(value)
        raise CalcError(f"unknown function {name!r}")


def polyline_svg(ys: list[float], fig_width: float, fig_height: float) -> str:
    """Fixed-layout polyline chart; 96 px per display unit."""
    width = round(fig_width * 96)
    height = round(fig_height * 96)
    margin_x = width * 0.08
    margin_y = height * 0.08
    lo, hi = min(ys), max(ys)
    span = (hi - lo) or 1.0
    step = (width - 2 * margin_x) / (len(ys) - 1)
    points = []
    for k, y in enumerate(ys):
        px = margin_x + k * step
        py = height - margin_y - (y - lo) / span * (height - 2 * margin_y)
        points.append(f"{px:.2f},{py:.2f}")
    dots = "".join(
        f'<circle cx="{p.split(",")[0]}" cy="{p.split(",")[1]}" r="3" '
        f'fill="#2c6e9b"/>' for p in points
    )
    return (
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" '
        f'height="{height}" viewBox="0 0 {width} {height}">'
        f'<rect width="{width}" height="{height}" fill="#ffffff"/>'
        f'<polyline points="{" ".join(points)}" fill="none" stroke="#2c6e9b" '
        f'stroke-width="2"/>{dots}</svg>\n'
    )


# -- protocol -------------------------------------------------------------------


class ProtocolHandler:
    """Message-in, messages-out view of one kernel session.

    Both the in-process transport and the stdio main loop drive this same
    class, so the two paths cannot drift apart.
    """

    def __init__(self):
        self.session = Session()
        self.figure_dir: str | None = None

    def handle(self, msg: dict):
        """Yield reply dicts for one incoming message."""
        kind = msg.get("type")
        if kind == "hello":
            self.figure_dir = msg.get("figure_dir")
            yield {"type": "hello", "version": PROTOCOL_VERSION, "langs": LANGS}
        elif kind == "exec":
            yield from self._exec(msg)
        elif kind == "eval":
            yield self._eval(msg)
        # shutdown is handled by the caller; unknown types are ignored

    def _exec(self, msg: dict):
        msg_id = msg.get("id", "")
        ctx = ExecContext(
            fig_width=float(msg.get("fig_width", 7.0)),
            fig_height=float(msg.get("fig_height", 5.0)),
            figure_stem=msg.get("figure_stem", "figure"),
            figure_dir=self.figure_dir,
        )
        replies: list[dict] = []

        def emit(payload: dict):
            payload["id"] = msg_id
            replies.append(payload)

        try:
            ok = self.session.run_cell(msg.get("code", ""), ctx, emit)
        except CalcError as err:
            emit({"type": "output", "stream": "error", "text": str(err)})
            ok = False
        yield from replies
        yield {"type": "done", "id": msg_id, "ok": ok}

    def _eval(self, msg: dict) -> dict:
        msg_id = msg.get("id", "")
        try:
            text = self.session.eval_expr(msg.get("expr", ""))
        except CalcError as err:
            return {"type": "eval_result", "id": msg_id, "ok": False,
                    "error": str(err)}
        return {"type": "eval_result", "id": msg_id, "ok": True, "text": text}


def main(argv=None) -> int:
    """Stdio kernel loop; stdout carries protocol lines only."""
    handler = ProtocolHandler()
    out = sys.stdout
    for raw in sys.stdin:
        raw = raw.strip()
        if not raw:
            continue
        try:
            msg = json.loads(raw)
        except json.JSONDecodeError:
            continue
        if not isinstance(msg, dict):
            continue
        if msg.get("type") == "shutdown":
            return 0
        for reply in handler.handle(msg):
            out.write(json.dumps(reply, ensure_ascii=False) + "\n")
            out.flush()
    return 0


if __name__ == "__main__":
    sys.exit(main())
