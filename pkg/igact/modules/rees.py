import itertools
import logging
import random
from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence, Tuple, Union

import numpy as np

from .endomorphism import Endomorphism, compose, kernel_key, rank
from .errors import VerificationError
from .logger import get_logger
from .monoid import HClassIso, MonoidTable, hclass_group_iso


@dataclass(frozen=True)
class ReesCoords:
    i: int
    g: int
    j: int


class ReesDecomposition:
    """The rank-1 D-class as M(H_11; I, J; P).

    Rows I are numbered 1..|G|^(n-1) in lexicographic order of their kernel
    tuples (c_2, ..., c_n), row 1 being the all-identity tuple; columns J are
    1..n. P is stored as P[j-1, i-1] = p_{j,i}.
    """

    def __init__(self, monoid: MonoidTable, iso: HClassIso, logger: Optional[logging.Logger] = None) -> None:
        self.monoid = monoid
        self.group = monoid.group
        self.n = monoid.n
        self.iso = iso
        self.logger = get_logger(logger)
        self.rows: List[Tuple[int, ...]] = list(itertools.product(self.group.elements(), repeat=self.n - 1))
        self._row_index: Dict[Tuple[int, ...], int] = {t: i for i, t in enumerate(self.rows, start=1)}
        self.P = np.array(
            [[self.row_tuple(i)[j - 1] for i in self.row_ids] for j in self.col_ids],
            dtype=np.int64,
        ).reshape(self.n, len(self.rows))
        self.e_ids: Dict[Tuple[int, int], int] = {
            (i, j): monoid.id_of(self.idempotent_e(i, j)) for i in self.row_ids for j in self.col_ids
        }
        self._coords_of_e = {idx: ij for ij, idx in self.e_ids.items()}

    @property
    def row_ids(self) -> range:
        return range(1, len(self.rows) + 1)

    @property
    def col_ids(self) -> range:
        return range(1, self.n + 1)

    def row_tuple(self, i: int) -> Tuple[int, ...]:
        """(c_1, ..., c_n) with c_1 the identity."""
        return (0,) + self.rows[i - 1]

    def p(self, j: int, i: int) -> int:
        return int(self.P[j - 1, i - 1])

    def e(self, i: int, j: int) -> int:
        return self.e_ids[(i, j)]

    def coords_of_idempotent(self, idx: int) -> Tuple[int, int]:
        try:
            return self._coords_of_e[idx]
        except KeyError:
            raise ValueError(f"element {idx} is not an idempotent of the rank-1 D-class")

    def is_d_idempotent(self, idx: int) -> bool:
        return idx in self._coords_of_e

    def idempotent_e(self, i: int, j: int) -> Endomorphism:
        """x_t -> c_t c_j^{-1} x_j for the row tuple c of i."""
        c = self.row_tuple(i)
        table = self.group.table
        cj_inv = self.group.inv(c[j - 1])
        return Endomorphism(self.n, tuple(table[ct][cj_inv] for ct in c), (j,) * self.n, self.group)

    def column_for_tuple(self, t: Sequence[int]) -> int:
        t = tuple(t)
        if len(t) != self.n - 1:
            raise ValueError(f"tuple must have length {self.n - 1}, got {len(t)}")
        try:
            return self._row_index[t]
        except KeyError:
            raise VerificationError(f"no column of P realizes {t}")

    def to_coords(self, a: Union[Endomorphism, int]) -> ReesCoords:
        if isinstance(a, int):
            a = self.monoid.element(a)
        if rank(a) != 1:
            raise ValueError(f"{a} is not of rank 1")
        (_, normalized), = kernel_key(a)
        return ReesCoords(i=self._row_index[normalized[1:]], g=a.coeffs[0], j=a.targets[0])

    def from_coords(self, coords: ReesCoords) -> Endomorphism:
        table = self.group.table
        c = self.row_tuple(coords.i)
        return Endomorphism(self.n, tuple(table[ct][coords.g] for ct in c), (coords.j,) * self.n, self.group)

    def multiply(self, x: ReesCoords, y: ReesCoords) -> ReesCoords:
        mul = self.group.mul
        return ReesCoords(x.i, mul(mul(x.g, self.p(x.j, y.i)), y.g), y.j)

    def rect_band_criterion(self, i: int, k: int, j: int, l: int) -> bool:
        """p_{ji}^{-1} p_{jk} == p_{li}^{-1} p_{lk}."""
        mul, inv = self.group.mul, self.group.inv
        return mul(inv(self.p(j, i)), self.p(j, k)) == mul(inv(self.p(l, i)), self.p(l, k))

    def audit(self, product_samples: int = 1000, exhaustive_limit: int = 250000, seed: int = 0) -> Dict[str, int]:
        """Check every invariant of the decomposition; raise on the first failure."""
        monoid, group = self.monoid, self.group
        if (self.P[0] != 0).any() or (self.P[:, 0] != 0).any():
            raise VerificationError("first row and column of P are not the identity")

        for i in self.row_ids:
            for j in self.col_ids:
                prod = compose(monoid.element(self.e(1, j)), monoid.element(self.e(i, 1)))
                if self.iso.psi(monoid.id_of(prod)) != self.p(j, i):
                    raise VerificationError(f"p_({j},{i}) disagrees with psi(e_1{j} e_{i}1)")

        columns = {tuple(int(x) for x in self.P[1:, i - 1]) for i in self.row_ids}
        if len(columns) != group.order ** (self.n - 1):
            raise VerificationError("columns of P do not cover G^(n-1) bijectively")

        idempotents = set(monoid.idempotents)
        for (i, j), idx in self.e_ids.items():
            if idx not in idempotents:
                raise VerificationError(f"e({i},{j}) is not idempotent")
            h_class = [monoid.id_of(self.from_coords(ReesCoords(i, g, j))) for g in group.elements()]
            if [x for x in h_class if x in idempotents] != [idx]:
                raise VerificationError(f"e({i},{j}) is not the unique idempotent of H_({i},{j})")
            if self.to_coords(idx) != ReesCoords(i, group.inv(self.p(j, i)), j):
                raise VerificationError(f"e({i},{j}) has wrong Rees coordinates")

        d_class = monoid.rank_one
        coords = {}
        for idx in d_class:
            c = self.to_coords(idx)
            if monoid.id_of(self.from_coords(c)) != idx:
                raise VerificationError(f"Rees coordinates do not round-trip on {idx}")
            coords[idx] = c

        if len(d_class) ** 2 <= exhaustive_limit:
            pairs = [(a, b) for a in d_class for b in d_class]
        else:
            rng = random.Random(seed)
            pairs = [(rng.choice(d_class), rng.choice(d_class)) for _ in range(product_samples)]
        for a, b in pairs:
            expected = monoid.compose_ids(a, b)
            if monoid.id_of(self.from_coords(self.multiply(coords[a], coords[b]))) != expected:
                raise VerificationError(f"Rees product disagrees with composition on ({a}, {b})")

        self.logger.info(
            f"Rees decomposition audited: |I|={len(self.rows)}, |J|={self.n}, {len(pairs)} products checked"
        )
        return {"rows": len(self.rows), "columns": self.n, "products_checked": len(pairs)}

    def to_document(self) -> Dict[str, object]:
        return {
            "I": [list(t) for t in self.rows],
            "P": [[int(x) for x in row] for row in self.P],
        }


def decompose_rank1(monoid: MonoidTable, audit: bool = True, logger: Optional[logging.Logger] = None) -> ReesDecomposition:
    rees = ReesDecomposition(monoid, hclass_group_iso(monoid), logger=logger or monoid.logger)
    if audit:
        rees.audit()
    return rees
