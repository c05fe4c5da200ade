import logging
import random
from dataclasses import dataclass
from functools import cached_property
from typing import Dict, Hashable, List, Optional, Sequence, Tuple

import numpy as np

from ..config.config import Config
from .endomorphism import Endomorphism, compose, encode, image_key, kernel_key
from .errors import ResourceBoundError, VerificationError
from .group import FiniteGroup
from .logger import get_logger


class MonoidTable:
    """End F_n(G), materialized in canonical-id order.

    Element k of the table has canonical id k, so ids double as indices into
    the coefficient and target arrays.
    """

    def __init__(
        self,
        group: FiniteGroup,
        n: int,
        coeffs: np.ndarray,
        targets: np.ndarray,
        logger: Optional[logging.Logger] = None,
    ) -> None:
        self.group = group
        self.n = n
        self.coeffs = coeffs
        self.targets = targets
        self.logger = get_logger(logger)
        m = group.order
        self._coeff_weights = np.array([m ** (n - 1 - i) * n ** n for i in range(n)], dtype=np.int64)
        self._target_weights = np.array([n ** (n - 1 - i) for i in range(n)], dtype=np.int64)

    @property
    def size(self) -> int:
        return int(self.coeffs.shape[0])

    def __len__(self) -> int:
        return self.size

    def element(self, idx: int) -> Endomorphism:
        return Endomorphism(
            self.n,
            tuple(int(x) for x in self.coeffs[idx]),
            tuple(int(x) for x in self.targets[idx]),
            self.group,
        )

    def id_of(self, a: Endomorphism) -> int:
        return encode(self.group.order, self.n, a.coeffs, a.targets)

    def compose_ids(self, a: int, b: int) -> int:
        return self.id_of(compose(self.element(a), self.element(b)))

    @property
    def identity_id(self) -> int:
        return self.id_of(Endomorphism.identity(self.group, self.n))

    def _encode_arrays(self, coeffs: np.ndarray, targets: np.ndarray) -> np.ndarray:
        return coeffs @ self._coeff_weights + (targets - 1) @ self._target_weights

    def right_products(self, a: int) -> np.ndarray:
        """Ids of a*b for every b, i.e. the principal right ideal aM as a row."""
        ta = self.targets[a] - 1
        targets = self.targets[:, ta]
        coeffs = self.group.array[self.coeffs[a][None, :], self.coeffs[:, ta]]
        return self._encode_arrays(coeffs, targets)

    def left_products(self, b: int) -> np.ndarray:
        """Ids of x*b for every x, i.e. the principal left ideal Mb as a column."""
        pos = self.targets - 1
        targets = self.targets[b][pos]
        coeffs = self.group.array[self.coeffs, self.coeffs[b][pos]]
        return self._encode_arrays(coeffs, targets)

    @cached_property
    def ranks(self) -> np.ndarray:
        ordered = np.sort(self.targets, axis=1)
        distinct = 1 + (np.diff(ordered, axis=1) != 0).sum(axis=1)
        return distinct.astype(np.int64)

    @cached_property
    def idempotents(self) -> Tuple[int, ...]:
        pos = self.targets - 1
        sq_targets = np.take_along_axis(self.targets, pos, axis=1)
        sq_coeffs = self.group.array[self.coeffs, np.take_along_axis(self.coeffs, pos, axis=1)]
        mask = (sq_targets == self.targets).all(axis=1) & (sq_coeffs == self.coeffs).all(axis=1)
        return tuple(int(x) for x in np.flatnonzero(mask))

    @cached_property
    def rank_one(self) -> Tuple[int, ...]:
        return tuple(int(x) for x in np.flatnonzero(self.ranks == 1))

    def to_document(self) -> Dict[str, object]:
        return {
            "group": self.group.name,
            "n": self.n,
            "elements": [
                {"id": idx, "coeffs": [int(x) for x in self.coeffs[idx]], "targets": [int(x) for x in self.targets[idx]]}
                for idx in range(self.size)
            ],
        }


def enumerate_monoid(
    group: FiniteGroup,
    n: int,
    cap: Optional[int] = None,
    logger: Optional[logging.Logger] = None,
) -> MonoidTable:
    if n < 1:
        raise ValueError("rank must be >= 1")
    cap = Config.MONOID_CAP if cap is None else cap
    m = group.order
    size = (m * n) ** n
    if size > cap:
        raise ResourceBoundError(f"End F_{n}({group.name}) has {size} elements > cap {cap}")

    digits = np.arange(size, dtype=np.int64)
    targets = np.empty((size, n), dtype=np.int64)
    coeffs = np.empty((size, n), dtype=np.int64)
    for i in reversed(range(n)):
        targets[:, i] = digits % n + 1
        digits //= n
    for i in reversed(range(n)):
        coeffs[:, i] = digits % m
        digits //= m

    monoid = MonoidTable(group, n, coeffs, targets, logger=logger)
    monoid.logger.info(
        f"Enumerated End F_{n}({group.name}): {monoid.size} elements, {len(monoid.idempotents)} idempotents"
    )
    return monoid


@dataclass(frozen=True)
class GreenPartitions:
    """Class labels per element; each class is labelled by its least id."""

    r: Tuple[int, ...]
    l: Tuple[int, ...]
    h: Tuple[int, ...]
    d: Tuple[int, ...]

    def count(self, relation: str) -> int:
        return len(set(getattr(self, relation)))

    def discrepancies(self, other: "GreenPartitions") -> Dict[str, int]:
        return {
            rel: sum(1 for x, y in zip(getattr(self, rel), getattr(other, rel)) if x != y)
            for rel in ("r", "l", "h", "d")
        }


def _labels_from_keys(keys: Sequence[Hashable]) -> Tuple[int, ...]:
    first: Dict[Hashable, int] = {}
    return tuple(first.setdefault(k, idx) for idx, k in enumerate(keys))


class UnionFind:
    def __init__(self, size: int) -> None:
        self.parent = list(range(size))

    def find(self, x: int) -> int:
        p = self.parent
        while p[x] != x:
            x, p[x] = p[x], p[p[x]]
        return x

    def union(self, x: int, y: int) -> None:
        x, y = self.find(x), self.find(y)
        if x == y:
            return
        if y < x:
            x, y = y, x
        self.parent[y] = x


def greens_generic(monoid: MonoidTable, cap: Optional[int] = None) -> GreenPartitions:
    """Green's relations straight from the definition.

    a R b iff aM = bM and a L b iff Ma = Mb, with every principal ideal
    computed as a full row or column of the multiplication table; D is the
    join of R and L and H their meet.
    """
    cap = Config.GENERIC_GREEN_CAP if cap is None else cap
    if monoid.size > cap:
        raise ResourceBoundError(f"generic Green's oracle limited to {cap} elements, monoid has {monoid.size}")

    r_keys = [np.unique(monoid.right_products(a)).tobytes() for a in range(monoid.size)]
    l_keys = [np.unique(monoid.left_products(a)).tobytes() for a in range(monoid.size)]
    r = _labels_from_keys(r_keys)
    l = _labels_from_keys(l_keys)
    h = _labels_from_keys(list(zip(r, l)))

    uf = UnionFind(monoid.size)
    for idx in range(monoid.size):
        uf.union(idx, r[idx])
        uf.union(idx, l[idx])
    d = _labels_from_keys([uf.find(idx) for idx in range(monoid.size)])
    return GreenPartitions(r=r, l=l, h=h, d=d)


def greens_structural(monoid: MonoidTable) -> GreenPartitions:
    """Green's relations from image, kernel and rank."""
    elements = [monoid.element(idx) for idx in range(monoid.size)]
    r = _labels_from_keys([kernel_key(a) for a in elements])
    l = _labels_from_keys([image_key(a) for a in elements])
    h = _labels_from_keys(list(zip(r, l)))
    d = _labels_from_keys([int(x) for x in monoid.ranks])
    return GreenPartitions(r=r, l=l, h=h, d=d)


class HClassIso:
    """psi: H_11 -> G, a_g -> g, where a_g = (g,...,g | 1,...,1)."""

    def __init__(self, monoid: MonoidTable) -> None:
        self.monoid = monoid
        n = monoid.n
        self._to_id = tuple(
            encode(monoid.group.order, n, (g,) * n, (1,) * n) for g in monoid.group.elements()
        )
        self._from_id = {idx: g for g, idx in enumerate(self._to_id)}

    def psi(self, idx: int) -> int:
        try:
            return self._from_id[idx]
        except KeyError:
            raise ValueError(f"element {idx} is not in H_11")

    def a(self, g: int) -> int:
        return self._to_id[g]

    def members(self) -> Tuple[int, ...]:
        return self._to_id

    def verify(self) -> None:
        monoid = self.monoid
        group = monoid.group
        e11 = self.a(0)
        target = (kernel_key(monoid.element(e11)), image_key(monoid.element(e11)))
        h11 = {
            idx for idx in monoid.rank_one
            if (kernel_key(monoid.element(idx)), image_key(monoid.element(idx))) == target
        }
        if h11 != set(self._to_id):
            raise VerificationError(f"H_11 has {len(h11)} elements, expected the {group.order} maps a_g")
        for g in group.elements():
            for h in group.elements():
                if monoid.compose_ids(self.a(g), self.a(h)) != self.a(group.mul(g, h)):
                    raise VerificationError(f"psi is not multiplicative at ({g}, {h})")


def hclass_group_iso(monoid: MonoidTable) -> HClassIso:
    iso = HClassIso(monoid)
    iso.verify()
    return iso


def rank_one_shape(monoid: MonoidTable, greens: GreenPartitions) -> Dict[str, int]:
    """Size and class counts of the rank-1 D-class, with one idempotent per H-class checked."""
    members = monoid.rank_one
    idem = set(monoid.idempotents)
    h_classes: Dict[int, List[int]] = {}
    for idx in members:
        h_classes.setdefault(greens.h[idx], []).append(idx)
    sizes = {len(v) for v in h_classes.values()}
    one_idempotent = all(sum(1 for x in v if x in idem) == 1 for v in h_classes.values())
    return {
        "size": len(members),
        "r_classes": len({greens.r[idx] for idx in members}),
        "l_classes": len({greens.l[idx] for idx in members}),
        "h_classes": len(h_classes),
        "h_size": sizes.pop() if len(sizes) == 1 else -1,
        "one_idempotent_per_h": int(one_idempotent),
    }


def check_associativity(
    monoid: MonoidTable, exhaustive_limit: Optional[int] = None, samples: int = 100000, seed: int = 0
) -> Optional[Tuple[int, int, int]]:
    """First triple breaking associativity, or None.

    Exhaustive (cubic) up to exhaustive_limit elements (Config.ASSOC_EXHAUSTIVE_LIMIT
    by default), seeded random triples above that.
    """
    exhaustive_limit = Config.ASSOC_EXHAUSTIVE_LIMIT if exhaustive_limit is None else exhaustive_limit
    if monoid.size <= exhaustive_limit:
        table = np.stack([monoid.right_products(a) for a in range(monoid.size)])
        for b in range(monoid.size):
            lhs = table[table[:, b]]
            rhs = table[:, table[b]]
            bad = np.argwhere(lhs != rhs)
            if len(bad):
                return int(bad[0][0]), b, int(bad[0][1])
        return None
    rng = random.Random(seed)
    for _ in range(samples):
        a, b, c = (rng.randrange(monoid.size) for _ in range(3))
        if monoid.compose_ids(monoid.compose_ids(a, b), c) != monoid.compose_ids(a, monoid.compose_ids(b, c)):
            return a, b, c
    return None
