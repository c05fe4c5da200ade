import itertools
import json
import math
from dataclasses import dataclass, field
from functools import cached_property
from pathlib import Path
from typing import Any, Dict, List, Mapping, Optional, Sequence, Tuple, Union

import numpy as np

from ..config.config import Config
from .errors import ResourceBoundError


Table = Tuple[Tuple[int, ...], ...]


@dataclass(frozen=True)
class FiniteGroup:
    """A finite group given by its Cayley table.

    Elements are the ids 0..order-1 and id 0 is always the identity. Instances
    are only built through the constructors below, which validate the table.
    """

    order: int
    table: Table
    name: str = "group"
    names: Optional[Tuple[str, ...]] = field(default=None, compare=False)

    @cached_property
    def array(self) -> np.ndarray:
        return np.array(self.table, dtype=np.int64).reshape(self.order, self.order)

    @cached_property
    def inverses(self) -> Tuple[int, ...]:
        return tuple(row.index(0) for row in self.table)

    @property
    def identity(self) -> int:
        return 0

    def elements(self) -> range:
        return range(self.order)

    def _check(self, a: int) -> None:
        if not (0 <= a < self.order):
            raise ValueError(f"element id {a} out of range for {self.name} of order {self.order}")

    def mul(self, a: int, b: int) -> int:
        self._check(a)
        self._check(b)
        return self.table[a][b]

    def inv(self, a: int) -> int:
        self._check(a)
        return self.inverses[a]

    def is_abelian(self) -> bool:
        return bool((self.array == self.array.T).all())

    def label(self, a: int) -> str:
        if self.names:
            return self.names[a]
        return str(a)

    def to_document(self) -> Dict[str, Any]:
        return {"name": self.name, "order": self.order, "table": [list(row) for row in self.table]}

    def __repr__(self) -> str:
        return f"FiniteGroup({self.name}, order={self.order})"


def check_group_axioms(table: Sequence[Sequence[int]]) -> Optional[str]:
    m = len(table)
    if m == 0:
        return "table is empty"
    for r, row in enumerate(table):
        if len(row) != m:
            return f"row {r} has length {len(row)}, expected {m}"
        for x in row:
            if not isinstance(x, (int, np.integer)) or isinstance(x, bool) or not (0 <= x < m):
                return f"row {r} holds {x!r}, expected ids in [0, {m})"

    t = np.array(table, dtype=np.int64)
    ids = np.arange(m)
    if not (t[0] == ids).all() or not (t[:, 0] == ids).all():
        return "element 0 is not a two-sided identity"

    for r in range(m):
        if not (np.sort(t[r]) == ids).all():
            return f"Latin square violation: row {r} repeats an element"
    for c in range(m):
        if not (np.sort(t[:, c]) == ids).all():
            return f"Latin square violation: column {c} repeats an element"

    # (ab)c against a(bc), one m x m slice per a
    for a in range(m):
        lhs = t[t[a]]
        rhs = t[a][t]
        bad = np.argwhere(lhs != rhs)
        if len(bad):
            b, c = (int(x) for x in bad[0])
            return f"associativity fails at triple ({a}, {b}, {c}): ({a}*{b})*{c} = {int(lhs[b, c])} but {a}*({b}*{c}) = {int(rhs[b, c])}"

    for a in range(m):
        b = int(np.flatnonzero(t[a] == 0)[0])
        if t[b, a] != 0:
            return f"element {a} has no two-sided inverse"
    return None


def validate_group_document(data: Any) -> Tuple[Optional[dict], Optional[str]]:
    # Group file contract
    # {
    #   "name": "Z2",
    #   "order": 2,
    #   "table": [[0, 1], [1, 0]]     # row-major, identity at id 0
    # }
    if not isinstance(data, Mapping):
        return None, "group document must be a JSON object"
    for k in ("order", "table"):
        if k not in data:
            return None, f"Missing field: {k}"

    order = data["order"]
    table = data["table"]
    if not isinstance(order, int) or isinstance(order, bool) or order < 1:
        return None, "order must be a positive integer"
    if not isinstance(table, list) or not all(isinstance(row, list) for row in table):
        return None, "table must be a list of rows"
    if len(table) != order:
        return None, f"table has {len(table)} rows but order is {order}"

    err = check_group_axioms(table)
    if err:
        return None, err

    names = data.get("names")
    if names is not None:
        if not isinstance(names, list) or len(names) != order:
            return None, "names must list one label per element"
        names = tuple(str(x) for x in names)

    payload = {
        "order": order,
        "table": tuple(tuple(int(x) for x in row) for row in table),
        "name": str(data.get("name", f"group{order}")),
        "names": names,
    }
    return payload, None


def from_table(document: Union[Mapping[str, Any], str]) -> FiniteGroup:
    if isinstance(document, str):
        try:
            document = json.loads(document)
        except json.JSONDecodeError as exc:
            raise ValueError(f"group file is not valid JSON: {exc}") from exc
    if isinstance(document, Mapping):
        table = document.get("table")
        sizes = [document.get("order"), len(table) if isinstance(table, list) else 0]
        order = max(x for x in sizes if isinstance(x, int) and not isinstance(x, bool))
        if order > Config.GROUP_ORDER_CAP:
            raise ResourceBoundError(f"group of order {order} > cap {Config.GROUP_ORDER_CAP}")
    payload, err = validate_group_document(document)
    if err:
        raise ValueError(f"invalid group table: {err}")
    return FiniteGroup(**payload)


def load_group_file(path: Union[str, Path]) -> FiniteGroup:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ValueError(f"cannot read group file {path}: {exc}") from exc
    return from_table(text)


def make_cyclic(m: int) -> FiniteGroup:
    if m < 1:
        raise ValueError("cyclic group order must be >= 1")
    table = tuple(tuple((a + b) % m for b in range(m)) for a in range(m))
    return FiniteGroup(order=m, table=table, name=f"Z{m}")


def make_symmetric(k: int, cap: Optional[int] = None) -> FiniteGroup:
    """Symmetric group on k points.

    Permutations are enumerated in lexicographic one-line order, so id 0 is the
    identity. Products compose left to right: (p*q)(x) = q(p(x)).
    """
    if k < 1:
        raise ValueError("symmetric group degree must be >= 1")
    cap = Config.SYMMETRIC_CAP if cap is None else cap
    if math.factorial(k) > cap:
        raise ResourceBoundError(f"S{k} has order {math.factorial(k)} > cap {cap}")
    perms: List[Tuple[int, ...]] = list(itertools.permutations(range(k)))
    index = {p: i for i, p in enumerate(perms)}
    table = tuple(
        tuple(index[tuple(q[p[x]] for x in range(k))] for q in perms)
        for p in perms
    )
    names = tuple("".join(str(x + 1) for x in p) for p in perms)
    return FiniteGroup(order=len(perms), table=table, name=f"S{k}", names=names)


def make_dihedral(k: int) -> FiniteGroup:
    """Dihedral group of order 2k; id a + k*b stands for r^a s^b."""
    if k < 1:
        raise ValueError("dihedral parameter must be >= 1")

    def mul(x: int, y: int) -> int:
        a, b = x % k, x // k
        c, d = y % k, y // k
        rot = (a + (c if b == 0 else -c)) % k
        return rot + k * ((b + d) % 2)

    n = 2 * k
    table = tuple(tuple(mul(x, y) for y in range(n)) for x in range(n))
    return FiniteGroup(order=n, table=table, name=f"D{k}")


def direct_product(g: FiniteGroup, h: FiniteGroup) -> FiniteGroup:
    """G x H with id g*|H| + h, so the identity stays at 0."""
    m = h.order
    table = tuple(
        tuple(g.table[x // m][y // m] * m + h.table[x % m][y % m] for y in range(g.order * m))
        for x in range(g.order * m)
    )
    return FiniteGroup(order=g.order * m, table=table, name=f"{g.name}x{h.name}")


def parse_group_spec(spec: str, symmetric_cap: Optional[int] = None) -> FiniteGroup:
    """Resolve a --group argument: cyclic:m, sym:k, dihedral:k or file:path.

    Factors joined by '*' give their direct product, e.g. cyclic:2*cyclic:3.
    """
    if "*" in spec and not spec.lower().startswith("file:"):
        factors = [parse_group_spec(part.strip(), symmetric_cap) for part in spec.split("*")]
        group = factors[0]
        for other in factors[1:]:
            group = direct_product(group, other)
        return group
    family, sep, arg = spec.partition(":")
    if not sep or not arg:
        raise ValueError(f"group must look like family:param, got {spec!r}")
    family = family.lower()
    if family == "file":
        return load_group_file(arg)
    try:
        value = int(arg)
    except ValueError:
        raise ValueError(f"group parameter must be an integer, got {arg!r}")
    if family in ("cyclic", "z"):
        return make_cyclic(value)
    if family in ("sym", "symmetric", "s"):
        return make_symmetric(value, cap=symmetric_cap)
    if family in ("dihedral", "d"):
        return make_dihedral(value)
    raise ValueError(f"unknown group family {family!r}; use cyclic, sym, dihedral or file")
