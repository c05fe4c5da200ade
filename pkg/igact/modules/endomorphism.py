from dataclasses import dataclass, field
from typing import FrozenSet, Iterator, List, Sequence, Tuple

from .group import FiniteGroup


ImageKey = FrozenSet[int]
# one (block, normalized coefficients) pair per fiber, ordered by block minimum
KernelKey = Tuple[Tuple[Tuple[int, ...], Tuple[int, ...]], ...]
ActElement = Tuple[int, int]


@dataclass(frozen=True)
class Endomorphism:
    """x_i -> coeffs[i-1] x_{targets[i-1]} on the rank-n free G-act.

    Targets are 1-based. The group rides along for composition but takes no
    part in equality or hashing.
    """

    n: int
    coeffs: Tuple[int, ...]
    targets: Tuple[int, ...]
    group: FiniteGroup = field(compare=False, hash=False, repr=False)

    def __post_init__(self) -> None:
        if len(self.coeffs) != self.n or len(self.targets) != self.n:
            raise ValueError(f"endomorphism of rank {self.n} needs {self.n} coefficients and targets")
        for t in self.targets:
            if not (1 <= t <= self.n):
                raise ValueError(f"target {t} out of range [1, {self.n}]")
        for g in self.coeffs:
            if not (0 <= g < self.group.order):
                raise ValueError(f"coefficient {g} out of range for {self.group.name}")

    @classmethod
    def identity(cls, group: FiniteGroup, n: int) -> "Endomorphism":
        return cls(n, (0,) * n, tuple(range(1, n + 1)), group)

    @classmethod
    def parse(cls, text: str, group: FiniteGroup) -> "Endomorphism":
        """Read the display form "g1,...,gn | t1,...,tn"."""
        body = text.strip().strip("()")
        left, sep, right = body.partition("|")
        if not sep:
            raise ValueError(f"expected 'coeffs | targets', got {text!r}")
        try:
            coeffs = tuple(int(x) for x in left.split(","))
            targets = tuple(int(x) for x in right.split(","))
        except ValueError:
            raise ValueError(f"non-integer entry in {text!r}")
        return cls(len(coeffs), coeffs, targets, group)

    @property
    def canonical_id(self) -> int:
        return encode(self.group.order, self.n, self.coeffs, self.targets)

    def __str__(self) -> str:
        return f"({','.join(map(str, self.coeffs))}|{','.join(map(str, self.targets))})"

    def act(self, g: int, i: int) -> ActElement:
        return self.group.mul(g, self.coeffs[i - 1]), self.targets[i - 1]

    def is_idempotent(self) -> bool:
        return compose(self, self) == self


def encode(m: int, n: int, coeffs: Sequence[int], targets: Sequence[int]) -> int:
    # coefficients are the most significant digits, then targets
    value = 0
    for c in coeffs:
        value = value * m + c
    for t in targets:
        value = value * n + (t - 1)
    return value


def decode(m: int, n: int, value: int) -> Tuple[Tuple[int, ...], Tuple[int, ...]]:
    targets: List[int] = []
    for _ in range(n):
        value, t = divmod(value, n)
        targets.append(t + 1)
    coeffs: List[int] = []
    for _ in range(n):
        value, c = divmod(value, m)
        coeffs.append(c)
    return tuple(reversed(coeffs)), tuple(reversed(targets))


def compose(a: Endomorphism, b: Endomorphism) -> Endomorphism:
    """The product ab: apply a, then b."""
    if a.n != b.n:
        raise ValueError(f"rank mismatch: {a.n} vs {b.n}")
    if a.group is not b.group and a.group != b.group:
        raise ValueError(f"group mismatch: {a.group.name} vs {b.group.name}")
    table = a.group.table
    targets = tuple(b.targets[t - 1] for t in a.targets)
    coeffs = tuple(table[c][b.coeffs[t - 1]] for c, t in zip(a.coeffs, a.targets))
    return Endomorphism(a.n, coeffs, targets, a.group)


def rank(a: Endomorphism) -> int:
    return len(image_key(a))


def image_key(a: Endomorphism) -> ImageKey:
    return frozenset(a.targets)


def kernel_key(a: Endomorphism) -> KernelKey:
    """Fibers of the target map, each normalized by its least index.

    Right-translating all coefficients of a block by the same g leaves the
    key unchanged, matching when two maps share a kernel.
    """
    blocks = {}
    for i, t in enumerate(a.targets, start=1):
        blocks.setdefault(t, []).append(i)
    inv = a.group.inverses
    table = a.group.table
    key = []
    for block in sorted(blocks.values()):
        pivot = inv[a.coeffs[block[0] - 1]]
        key.append((tuple(block), tuple(table[a.coeffs[i - 1]][pivot] for i in block)))
    return tuple(key)


def act_elements(group: FiniteGroup, n: int) -> Iterator[ActElement]:
    for g in group.elements():
        for i in range(1, n + 1):
            yield g, i


def kernel_congruence(a: Endomorphism) -> FrozenSet[Tuple[ActElement, ActElement]]:
    """All pairs of act elements identified by a, found by brute force."""
    elems = list(act_elements(a.group, a.n))
    images = {x: a.act(*x) for x in elems}
    return frozenset((x, y) for x in elems for y in elems if images[x] == images[y])
