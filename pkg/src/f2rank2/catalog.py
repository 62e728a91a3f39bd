"""Named spaces loaded from a text asset, each with self-checking expectations."""

from __future__ import annotations

import os
from dataclasses import dataclass, field
from functools import cache
from importlib import resources
from pathlib import Path
from typing import Callable

from .gf2 import ShapeError, flat_rank
from .genmatrix import parse_generic
from .predicates import (
    has_trivial_spectrum,
    is_irreducible_action,
    is_lld,
    is_maximal_with_urk,
    is_minimal_lld,
    is_primitive,
    is_rank_constant_2,
    is_reduced,
    is_semi_primitive,
    upper_rank,
)
from .spaces import AffineMatrixSpace, MatrixSpace


class CatalogError(ValueError):
    pass


@dataclass(frozen=True)
class CatalogEntry:
    name: str
    text: str
    space: AffineMatrixSpace
    expected: dict[str, object] = field(hash=False, compare=False)

    @property
    def linear(self) -> MatrixSpace:
        if not self.space.is_linear:
            raise ValueError(f"{self.name} is an affine space")
        return self.space.translation


def _nonsingular(S: AffineMatrixSpace) -> bool:
    n, p = S.shape
    return n == p and all(flat_rank(x, n, n) == n for x in S.element_flats())


_LINEAR_CHECKS: dict[str, Callable[[MatrixSpace], object]] = {
    "dim": lambda V: V.dim,
    "urk": upper_rank,
    "reduced": is_reduced,
    "semi_primitive": is_semi_primitive,
    "primitive": is_primitive,
    "rank_constant": is_rank_constant_2,
    "trivial_spectrum": has_trivial_spectrum,
    "irreducible": is_irreducible_action,
    "lld": is_lld,
    "minimal_lld": is_minimal_lld,
    "maximal": lambda V: is_maximal_with_urk(V, 2),
}


def measure(entry: CatalogEntry, prop: str) -> object:
    S = entry.space
    if prop == "dim":
        return S.dim
    if prop == "nonsingular":
        return _nonsingular(S)
    if not S.is_linear:
        raise CatalogError(f"{entry.name}: property {prop!r} needs a linear space")
    return _LINEAR_CHECKS[prop](S.translation)


def check_entry(entry: CatalogEntry) -> list[tuple[str, object, object]]:
    """(property, expected, actual) for every expectation that fails."""
    bad = []
    for prop, want in entry.expected.items():
        if prop == "note":
            continue
        got = measure(entry, prop)
        if got != want:
            bad.append((prop, want, got))
    return bad


def _value(text: str) -> object:
    if text in ("true", "false"):
        return text == "true"
    try:
        return int(text)
    except ValueError:
        return text


def parse_catalog(text: str, source: str = "<catalog>") -> list[CatalogEntry]:
    entries = []
    block: dict[str, str] = {}

    def close(lineno: int) -> None:
        if not block:
            return
        missing = {"name", "matrix"} - block.keys()
        if missing:
            raise CatalogError(f"{source}:{lineno}: entry lacks {sorted(missing)}")
        expected: dict[str, object] = {}
        if block.get("expect"):
            for item in block["expect"].split(","):
                key, sep, val = item.partition("=")
                key = key.strip()
                if not sep or key not in _LINEAR_CHECKS and key not in ("nonsingular", "note"):
                    raise CatalogError(f"{source}:{lineno}: bad expectation {item!r}")
                expected[key] = _value(val.strip())
        try:
            space = parse_generic(block["matrix"])
        except ValueError as exc:
            raise CatalogError(f"{source}:{lineno}: {exc}") from exc
        entries.append(CatalogEntry(block["name"], block["matrix"], space, expected))
        block.clear()

    lineno = 0
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("#"):
            close(lineno)
            continue
        key, sep, val = line.partition(":")
        if not sep or key not in ("name", "matrix", "expect"):
            raise CatalogError(f"{source}:{lineno}: cannot parse {raw!r}")
        if key == "name" and block:
            close(lineno)
        block[key] = val.strip()
    close(lineno)
    names = [e.name for e in entries]
    if len(set(names)) != len(names):
        raise CatalogError(f"{source}: duplicate entry names")
    return entries


def catalog_source() -> tuple[str, str]:
    """(text, origin) of the catalog asset; F2RANK2_CATALOG overrides the bundled file."""
    override = os.environ.get("F2RANK2_CATALOG")
    if override:
        return Path(override).read_text(), override
    ref = resources.files("f2rank2") / "data" / "catalog.txt"
    return ref.read_text(), "catalog.txt"


def load_catalog(verify: bool = True) -> dict[str, CatalogEntry]:
    text, origin = catalog_source()
    entries = parse_catalog(text, origin)
    if verify:
        problems = [(e.name, bad) for e in entries if (bad := check_entry(e))]
        if problems:
            detail = "; ".join(f"{name}: {bad}" for name, bad in problems)
            raise CatalogError(f"catalog self-check failed: {detail}")
    return {e.name: e for e in entries}


@cache
def _verified() -> dict[str, CatalogEntry]:
    return load_catalog(verify=True)


def names() -> list[str]:
    return list(_verified())


def get(name: str) -> CatalogEntry:
    try:
        return _verified()[name]
    except KeyError:
        raise KeyError(f"unknown catalog entry {name!r}") from None


def space(name: str) -> MatrixSpace:
    return get(name).linear


# ---------------------------------------------------------------------------
# parametric families


def r_space(s: int, t: int, n: int, p: int) -> MatrixSpace:
    """Matrices supported on the first ``s`` rows and first ``t`` columns."""
    if not (0 <= s <= n and 0 <= t <= p):
        raise ShapeError(f"R({s},{t}) does not fit in {n}x{p}")
    gens = [1 << (i * p + j) for i in range(n) for j in range(p) if i < s or j < t]
    return MatrixSpace.from_flats(n, p, gens)


def r11_family(r: int, with_corner: bool, n: int, p: int) -> MatrixSpace:
    """Reduced subspaces of R(1,1) in normal form.

    First row (a, X^T, L), first column (a, X, C) with the same X in F2^r;
    the corner ``a`` is free when ``with_corner`` and zero otherwise.
    """
    if not 0 <= r <= min(n - 1, p - 1):
        raise ShapeError(f"r={r} out of range for {n}x{p}")
    gens = []
    if with_corner:
        gens.append(1)
    gens += [(1 << k) | (1 << (k * p)) for k in range(1, r + 1)]
    gens += [1 << (i * p) for i in range(r + 1, n)]
    gens += [1 << j for j in range(r + 1, p)]
    return MatrixSpace.from_flats(n, p, gens)
