"""Generic-matrix notation: ``[a,0,a+c;a,0,b;a+b,c,0]``.

Letters are independent F2 scalars, repeated letters denote the same
scalar, ``0``/``1`` are constants and ``+`` adds.  A ``-`` in front of a
term is accepted and ignored since -1 = 1 in F2.  Rows are separated by
``;`` so that values fit in a single CLI flag or JSON string.
"""

from __future__ import annotations

import string

from .gf2 import MAX_SIDE
from .spaces import AffineMatrixSpace, MatrixSpace


class GenericSyntaxError(ValueError):
    def __init__(self, message: str, text: str, pos: int):
        super().__init__(f"{message} at position {pos} in {text!r}")
        self.pos = pos


class _Scanner:
    def __init__(self, text: str):
        self.text = text
        self.pos = 0

    def skip(self) -> None:
        while self.pos < len(self.text) and self.text[self.pos].isspace():
            self.pos += 1

    def peek(self) -> str:
        self.skip()
        return self.text[self.pos] if self.pos < len(self.text) else ""

    def take(self, expected: str | None = None) -> str:
        ch = self.peek()
        if not ch:
            raise GenericSyntaxError("unexpected end of input", self.text, self.pos)
        if expected is not None and ch != expected:
            raise GenericSyntaxError(f"expected {expected!r}, found {ch!r}", self.text, self.pos)
        self.pos += 1
        return ch


def _parse_expr(sc: _Scanner) -> tuple[int, frozenset[str]]:
    """Return (constant bit, set of letters with odd multiplicity)."""
    const = 0
    letters: set[str] = set()
    while True:
        if sc.peek() == "-":
            sc.take()
        ch = sc.peek()
        if ch in ("0", "1"):
            sc.take()
            const ^= int(ch)
        elif ch and ch in string.ascii_lowercase:
            sc.take()
            letters ^= {ch}
        else:
            found = repr(ch) if ch else "end of input"
            raise GenericSyntaxError(f"expected a term, found {found}", sc.text, sc.pos)
        if sc.peek() != "+":
            return const, frozenset(letters)
        sc.take()


def parse_cells(text: str) -> list[list[tuple[int, frozenset[str]]]]:
    if not text.strip():
        raise GenericSyntaxError("empty input", text, 0)
    sc = _Scanner(text)
    sc.take("[")
    rows = []
    row: list[tuple[int, frozenset[str]]] = []
    while True:
        row.append(_parse_expr(sc))
        ch = sc.take()
        if ch == ",":
            continue
        if ch in (";", "]"):
            rows.append(row)
            row = []
            if ch == "]":
                break
            continue
        raise GenericSyntaxError(f"expected ',', ';' or ']', found {ch!r}", text, sc.pos - 1)
    if sc.peek():
        raise GenericSyntaxError("trailing characters", text, sc.pos)
    width = len(rows[0])
    for k, r in enumerate(rows):
        if len(r) != width:
            raise GenericSyntaxError(f"row {k} has {len(r)} entries, expected {width}", text, 0)
    if len(rows) > MAX_SIDE or width > MAX_SIDE:
        raise GenericSyntaxError(f"matrix larger than {MAX_SIDE}x{MAX_SIDE}", text, 0)
    return rows


def parse_generic(text: str) -> AffineMatrixSpace:
    cells = parse_cells(text)
    n, p = len(cells), len(cells[0])
    base = 0
    coeff: dict[str, int] = {}
    for i, row in enumerate(cells):
        for j, (const, letters) in enumerate(row):
            bit = 1 << (i * p + j)
            if const:
                base |= bit
            for v in letters:
                coeff[v] = coeff.get(v, 0) | bit
    translation = MatrixSpace.from_flats(n, p, (coeff[v] for v in sorted(coeff)))
    return AffineMatrixSpace.of(base, translation)


def parse_space(text: str) -> MatrixSpace:
    """Parse a generic matrix that must describe a linear space."""
    S = parse_generic(text)
    if not S.is_linear:
        raise ValueError(f"{text!r} describes an affine, not a linear, space")
    return S.translation


def format_generic(S: AffineMatrixSpace | MatrixSpace) -> str:
    if isinstance(S, MatrixSpace):
        S = AffineMatrixSpace.linear(S)
    V = S.translation
    if V.dim > 26:
        raise ValueError("at most 26 indeterminates can be printed")
    letters = string.ascii_lowercase
    rows = []
    for i in range(V.n):
        cells = []
        for j in range(V.p):
            bit = 1 << (i * V.p + j)
            terms = [letters[k] for k, b in enumerate(V.basis) if b & bit]
            if S.base & bit:
                terms.append("1")
            cells.append("+".join(terms) or "0")
        rows.append(",".join(cells))
    return "[" + ";".join(rows) + "]"
