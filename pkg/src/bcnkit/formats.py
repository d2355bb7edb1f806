"""Text formats for models, cascades and traces.

Model files are line oriented: a BCN header, the three dimensions, one
line per transition block L and per output block H (or a single `H *:`
line replicated across all input values), and END.  Indices are 1-based
everywhere, matching the canonical-vector notation used in diagnostics.
Cascade files reference two model files and declare the ordered input
factors of both components.  Traces are plain CSV with a time column,
one column per external channel and an optional observed-output column;
written traces append the component states, the context output and the
system output.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass
from pathlib import Path
from typing import Mapping, Sequence

from .network import Bcn, Cascade, CascadeTrace, InputFactor, external, upstream_output
from .stp import LogicalMatrix

__all__ = [
    "FormatError",
    "print_model",
    "parse_model",
    "print_cascade",
    "parse_cascade",
    "load_model",
    "load_cascade",
    "TraceData",
    "read_trace_csv",
    "write_trace_csv",
]

STATE_COLUMNS = ("c", "a", "v4", "m")
OBSERVED_COLUMN = "m_obs"


class FormatError(ValueError):
    """Parse failure with a 1-based line (or row) position."""

    def __init__(self, line: int | None, message: str) -> None:
        self.line = line
        prefix = f"line {line}: " if line is not None else ""
        super().__init__(prefix + message)


def print_model(b: Bcn) -> str:
    """Serialize a model; parse_model inverts this exactly."""
    lines = ["BCN", f"N {b.n_states}", f"M {b.n_inputs}", f"P {b.n_outputs}"]
    for k, blk in enumerate(b.transitions, start=1):
        lines.append(f"L {k}: " + " ".join(map(str, blk.col_index)))
    if len(set(b.outputs)) == 1 and len(b.outputs) == b.n_inputs:
        lines.append("H *: " + " ".join(map(str, b.outputs[0].col_index)))
    else:
        for k, blk in enumerate(b.outputs, start=1):
            lines.append(f"H {k}: " + " ".join(map(str, blk.col_index)))
    lines.append("END")
    return "\n".join(lines) + "\n"


def _content_lines(text: str) -> list[tuple[int, str]]:
    out = []
    for no, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if line:
            out.append((no, line))
    return out


def parse_model(text: str) -> Bcn:
    """Parse a model file, reporting the offending line of any defect."""
    lines = _content_lines(text)
    if not lines:
        raise FormatError(None, "empty model file")
    no, first = lines[0]
    if first != "BCN":
        raise FormatError(no, f"expected BCN header, found {first!r}")
    dims: dict[str, int] = {}
    l_blocks: dict[int, tuple[int, ...]] = {}
    h_blocks: dict[int, tuple[int, ...]] = {}
    h_star: tuple[int, ...] | None = None
    ended = False
    for no, line in lines[1:]:
        if ended:
            raise FormatError(no, "content after END")
        if line == "END":
            ended = True
            continue
        key, _, rest = line.partition(" ")
        rest = rest.strip()
        if key in ("N", "M", "P"):
            if key in dims:
                raise FormatError(no, f"duplicate {key}")
            dims[key] = _parse_positive(no, key, rest)
        elif key in ("L", "H"):
            head, sep, payload = rest.partition(":")
            if not sep:
                raise FormatError(no, f"{key} block needs a ':' separator")
            head = head.strip()
            values = _parse_indices(no, payload)
            if key == "H" and head == "*":
                if h_star is not None or h_blocks:
                    raise FormatError(no, "H blocks given twice")
                h_star = values
                continue
            k = _parse_positive(no, f"{key} block number", head)
            target = l_blocks if key == "L" else h_blocks
            if key == "H" and h_star is not None:
                raise FormatError(no, "H blocks given twice")
            if k in target:
                raise FormatError(no, f"duplicate {key} block {k}")
            target[k] = values
        else:
            raise FormatError(no, f"unrecognized directive {key!r}")
    if not ended:
        raise FormatError(None, "missing END")
    for key in ("N", "M", "P"):
        if key not in dims:
            raise FormatError(None, f"missing {key}")
    n, m, p = dims["N"], dims["M"], dims["P"]
    if h_star is not None:
        h_blocks = {k: h_star for k in range(1, m + 1)}
    transitions = _assemble_blocks("L", l_blocks, m, n, n)
    outputs = _assemble_blocks("H", h_blocks, m, n, p)
    model = Bcn(n, m, p, transitions, outputs)
    problems = model.validate()
    if problems:
        raise FormatError(None, "; ".join(problems))
    return model


def _parse_positive(no: int, what: str, text: str) -> int:
    try:
        value = int(text)
    except ValueError:
        raise FormatError(no, f"{what}: expected an integer, found {text!r}") from None
    if value < 1:
        raise FormatError(no, f"{what}: must be positive, got {value}")
    return value


def _parse_indices(no: int, payload: str) -> tuple[int, ...]:
    parts = payload.split()
    if not parts:
        raise FormatError(no, "block has no column indices")
    try:
        return tuple(int(x) for x in parts)
    except ValueError:
        raise FormatError(no, f"non-integer column index in {payload!r}") from None


def _assemble_blocks(
    kind: str,
    blocks: dict[int, tuple[int, ...]],
    m: int,
    n: int,
    target_dim: int,
) -> tuple[LogicalMatrix, ...]:
    missing = [k for k in range(1, m + 1) if k not in blocks]
    if missing:
        raise FormatError(None, f"missing {kind} blocks {missing}")
    extra = [k for k in blocks if not 1 <= k <= m]
    if extra:
        raise FormatError(None, f"{kind} blocks {extra} out of range [1, {m}]")
    out = []
    for k in range(1, m + 1):
        values = blocks[k]
        if len(values) != n:
            raise FormatError(
                None, f"{kind} block {k}: {len(values)} columns, expected N={n}"
            )
        bad = [(j, i) for j, i in enumerate(values, start=1) if not 1 <= i <= target_dim]
        if bad:
            j, i = bad[0]
            raise FormatError(
                None,
                f"{kind} block {k}, column {j}: index {i} out of range "
                f"[1, {target_dim}]",
            )
        out.append(LogicalMatrix(target_dim, values))
    return tuple(out)


def print_cascade(
    upstream_path: str,
    downstream_path: str,
    upstream_factors: Sequence[InputFactor],
    downstream_factors: Sequence[InputFactor],
) -> str:
    """Serialize the cascade wiring with model file references."""

    def fmt(f: InputFactor) -> str:
        return "upstream_output" if f.from_upstream else f"ext {f.name} {f.dim}"

    lines = [
        "CASCADE",
        f"UPSTREAM {upstream_path}",
        f"DOWNSTREAM {downstream_path}",
        "UPSTREAM_INPUT " + "; ".join(fmt(f) for f in upstream_factors),
        "DOWNSTREAM_INPUT " + "; ".join(fmt(f) for f in downstream_factors),
        "END",
    ]
    return "\n".join(lines) + "\n"


def parse_cascade(text: str, base_dir: str | Path = ".") -> Cascade:
    """Parse a cascade file, loading the referenced models from base_dir."""
    lines = _content_lines(text)
    if not lines:
        raise FormatError(None, "empty cascade file")
    no, first = lines[0]
    if first != "CASCADE":
        raise FormatError(no, f"expected CASCADE header, found {first!r}")
    fields: dict[str, tuple[int, str]] = {}
    ended = False
    for no, line in lines[1:]:
        if ended:
            raise FormatError(no, "content after END")
        if line == "END":
            ended = True
            continue
        key, _, rest = line.partition(" ")
        if key not in ("UPSTREAM", "DOWNSTREAM", "UPSTREAM_INPUT", "DOWNSTREAM_INPUT"):
            raise FormatError(no, f"unrecognized directive {key!r}")
        if key in fields:
            raise FormatError(no, f"duplicate {key}")
        fields[key] = (no, rest.strip())
    if not ended:
        raise FormatError(None, "missing END")
    for key in ("UPSTREAM", "DOWNSTREAM", "DOWNSTREAM_INPUT"):
        if key not in fields:
            raise FormatError(None, f"missing {key}")
    base = Path(base_dir)
    upstream = load_model(base / fields["UPSTREAM"][1])
    downstream = load_model(base / fields["DOWNSTREAM"][1])
    up_factors = (
        _parse_factors(*fields["UPSTREAM_INPUT"]) if "UPSTREAM_INPUT" in fields else ()
    )
    down_factors = _parse_factors(*fields["DOWNSTREAM_INPUT"])
    try:
        return Cascade(upstream, downstream, up_factors, down_factors)
    except ValueError as exc:
        raise FormatError(None, f"inconsistent wiring: {exc}") from None


def _parse_factors(no: int, text: str) -> tuple[InputFactor, ...]:
    factors = []
    for item in text.split(";"):
        item = item.strip()
        if not item:
            raise FormatError(no, "empty input factor")
        parts = item.split()
        if parts[0] == "upstream_output":
            if len(parts) != 1:
                raise FormatError(no, "upstream_output takes no arguments")
            factors.append(upstream_output())
        elif parts[0] == "ext":
            if len(parts) != 3:
                raise FormatError(no, f"expected 'ext <name> <dim>', found {item!r}")
            dim = _parse_positive(no, f"channel {parts[1]} dimension", parts[2])
            try:
                factors.append(external(parts[1], dim))
            except ValueError as exc:
                raise FormatError(no, str(exc)) from None
        else:
            raise FormatError(no, f"unrecognized factor kind {parts[0]!r}")
    return tuple(factors)


def load_model(path: str | Path) -> Bcn:
    return parse_model(Path(path).read_text())


def load_cascade(path: str | Path) -> Cascade:
    path = Path(path)
    return parse_cascade(path.read_text(), path.parent)


@dataclass(frozen=True)
class TraceData:
    """External input sequences plus optional observed outputs, CSV image."""

    channels: tuple[str, ...]
    external: dict[str, tuple[int, ...]]
    observed: tuple[int, ...] | None

    @property
    def length(self) -> int:
        return len(self.external[self.channels[0]]) if self.channels else 0


def read_trace_csv(text: str, cascade: Cascade) -> TraceData:
    """Read a trace CSV and range-check it against the cascade.

    The header must start with t followed by the cascade's external
    channels in declared order; an m_obs column and previously written
    state columns are accepted and the latter ignored.
    """
    reader = csv.reader(io.StringIO(text))
    try:
        header = next(reader)
    except StopIteration:
        raise FormatError(None, "empty trace file") from None
    header = [h.strip() for h in header]
    channels = cascade.channels
    expected = ["t", *channels]
    if header[: len(expected)] != expected:
        raise FormatError(
            1,
            f"header must start with {','.join(expected)}, found {','.join(header)}",
        )
    rest = header[len(expected) :]
    observed_pos: int | None = None
    for pos, name in enumerate(rest):
        if name == OBSERVED_COLUMN:
            observed_pos = len(expected) + pos
        elif name == "m" and observed_pos is None:
            observed_pos = len(expected) + pos
        elif name not in STATE_COLUMNS:
            raise FormatError(1, f"unrecognized column {name!r}")
    dims = dict(zip(channels, cascade.channel_dims))
    values: dict[str, list[int]] = {name: [] for name in channels}
    observed: list[int] = []
    t_expected = 0
    for row_no, row in enumerate(reader, start=2):
        if not row or all(not cell.strip() for cell in row):
            continue
        if len(row) < len(expected):
            raise FormatError(row_no, f"expected at least {len(expected)} columns")
        cells = [cell.strip() for cell in row]
        t = _parse_int(row_no, "t", cells[0])
        if t != t_expected:
            raise FormatError(row_no, f"t={t}, expected consecutive value {t_expected}")
        t_expected += 1
        for pos, name in enumerate(channels, start=1):
            v = _parse_int(row_no, name, cells[pos])
            if not 1 <= v <= dims[name]:
                raise FormatError(
                    row_no, f"channel {name}: {v} out of range [1, {dims[name]}]"
                )
            values[name].append(v)
        if observed_pos is not None:
            if observed_pos >= len(cells):
                raise FormatError(row_no, "missing observed output cell")
            y = _parse_int(row_no, "observed output", cells[observed_pos])
            if not 1 <= y <= cascade.downstream.n_outputs:
                raise FormatError(
                    row_no,
                    f"observed output {y} out of range "
                    f"[1, {cascade.downstream.n_outputs}]",
                )
            observed.append(y)
    return TraceData(
        channels=channels,
        external={name: tuple(seq) for name, seq in values.items()},
        observed=tuple(observed) if observed_pos is not None else None,
    )


def _parse_int(row: int, what: str, text: str) -> int:
    try:
        return int(text)
    except ValueError:
        raise FormatError(row, f"{what}: expected an integer, found {text!r}") from None


def write_trace_csv(trace: CascadeTrace, observed_column: bool = True) -> str:
    """Render a simulated trace as CSV, states and outputs appended.

    With observed_column the system output is duplicated into m_obs so
    the file can be fed straight back into detection.
    """
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    header = ["t", *trace.channels]
    if trace.observed is not None:
        header.append(OBSERVED_COLUMN)
    elif observed_column:
        header.append(OBSERVED_COLUMN)
    header.extend(STATE_COLUMNS)
    writer.writerow(header)
    for t in range(trace.length):
        row = [t, *(trace.external[name][t] for name in trace.channels)]
        if trace.observed is not None:
            row.append(trace.observed[t])
        elif observed_column:
            row.append(trace.outputs[t])
        row.extend(
            (
                trace.up_states[t],
                trace.down_states[t],
                trace.up_outputs[t],
                trace.outputs[t],
            )
        )
        writer.writerow(row)
    return buf.getvalue()
