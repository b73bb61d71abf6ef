"""SMS sparse-matrix text format.

Grammar: a header line ``R C M`` (the third token is a field marker; it is
accepted in any spelling and ignored on input, always written back as
``M``), then one ``i j v`` triple per line with 1-based indices and nonzero
integer values, closed by the terminator ``0 0 0``.  Non-square inputs are
padded with zero rows/columns to max(R, C).

Emission is canonical: triples sorted by (row, column), so
``emit_sms(parse_sms(text))`` is a normal form.
"""

from __future__ import annotations

from .blackbox import SparseMatrix


class SmsFormatError(ValueError):
    """Malformed SMS input; message carries the 1-based line number."""

    def __init__(self, line_number: int, message: str):
        self.line_number = line_number
        super().__init__(f"line {line_number}: {message}")


def parse_sms(text: str) -> SparseMatrix:
    lines = text.splitlines()
    header = None
    header_line = 0
    for idx, raw in enumerate(lines, start=1):
        if raw.strip():
            header = raw.split()
            header_line = idx
            break
    if header is None:
        raise SmsFormatError(1, "empty input, expected an SMS header")
    if len(header) != 3:
        raise SmsFormatError(header_line, f"header needs 3 tokens, got {len(header)}")
    try:
        rows, cols = int(header[0]), int(header[1])
    except ValueError:
        raise SmsFormatError(header_line, "header dimensions must be integers")
    if rows < 1 or cols < 1:
        raise SmsFormatError(header_line, f"bad dimensions {rows} x {cols}")
    # header[2] is the field marker token: accepted and ignored
    n = max(rows, cols)
    entries = []
    seen = set()
    terminated = False
    for idx in range(header_line, len(lines)):
        raw = lines[idx]
        line_number = idx + 1
        if not raw.strip():
            continue
        tokens = raw.split()
        if terminated:
            raise SmsFormatError(line_number, "content after the 0 0 0 terminator")
        if len(tokens) != 3:
            raise SmsFormatError(
                line_number, f"entry needs 3 tokens, got {len(tokens)}"
            )
        try:
            i, j, v = int(tokens[0]), int(tokens[1]), int(tokens[2])
        except ValueError:
            raise SmsFormatError(line_number, f"non-integer entry {raw.strip()!r}")
        if (i, j, v) == (0, 0, 0):
            terminated = True
            continue
        if not (1 <= i <= rows and 1 <= j <= cols):
            raise SmsFormatError(
                line_number, f"index ({i}, {j}) outside {rows} x {cols}"
            )
        if v == 0:
            raise SmsFormatError(line_number, f"explicit zero at ({i}, {j})")
        if (i, j) in seen:
            raise SmsFormatError(line_number, f"duplicate entry at ({i}, {j})")
        seen.add((i, j))
        entries.append((i - 1, j - 1, v))
    if not terminated:
        raise SmsFormatError(len(lines) + 1, "missing 0 0 0 terminator")
    return SparseMatrix(n, entries)


def emit_sms(matrix: SparseMatrix) -> str:
    out = [f"{matrix.n} {matrix.n} M"]
    for r, c, v in matrix.entries:
        out.append(f"{r + 1} {c + 1} {v}")
    out.append("0 0 0")
    return "\n".join(out) + "\n"
