import logging
from dataclasses import dataclass, field
from functools import cached_property
from typing import Dict, List, Optional, Tuple

import numpy as np

from ..config.config import Config
from .endomorphism import Endomorphism
from .errors import VerificationError
from .logger import get_logger
from .monoid import MonoidTable
from .rees import ReesDecomposition


UP_DOWN = "up-down"
LEFT_RIGHT = "left-right"


class BiorderedSet:
    """E(S) for S = End F_n(G): the idempotents with their product table.

    Letters are canonical ids into the monoid; `pos` maps them to rows of the
    E x E product table.
    """

    def __init__(self, monoid: MonoidTable, logger: Optional[logging.Logger] = None) -> None:
        self.monoid = monoid
        self.logger = get_logger(logger)
        self.ids: Tuple[int, ...] = monoid.idempotents
        self.pos: Dict[int, int] = {idx: p for p, idx in enumerate(self.ids)}
        size = len(self.ids)
        table = np.empty((size, size), dtype=np.int64)
        for p, idx in enumerate(self.ids):
            table[p] = monoid.right_products(idx)[list(self.ids)]
        self.products = table
        self._products = table.tolist()
        ids = np.array(self.ids, dtype=np.int64)
        self.basic_mask = (
            (table == ids[:, None]) | (table == ids[None, :])
            | (table.T == ids[:, None]) | (table.T == ids[None, :])
        )
        self.logger.info(f"Biordered set: {size} idempotents, {int(self.basic_mask.sum())} basic pairs")

    def __contains__(self, idx: int) -> bool:
        return idx in self.pos

    def __len__(self) -> int:
        return len(self.ids)

    def product(self, e: int, f: int) -> int:
        return self._products[self.pos[e]][self.pos[f]]

    def is_basic(self, e: int, f: int) -> bool:
        if e not in self.pos or f not in self.pos:
            return False
        return bool(self.basic_mask[self.pos[e], self.pos[f]])

    @cached_property
    def factorizations(self) -> Dict[int, List[Tuple[int, int]]]:
        """For each idempotent x, the basic pairs (e, f) with ef = x, sorted."""
        out: Dict[int, List[Tuple[int, int]]] = {idx: [] for idx in self.ids}
        rows, cols = np.nonzero(self.basic_mask)
        for p, q in zip(rows.tolist(), cols.tolist()):
            out[self._products[p][q]].append((self.ids[p], self.ids[q]))
        for pairs in out.values():
            pairs.sort()
        return out

    def check_basic_closure(self) -> int:
        """Every basic product is idempotent; returns the number of basic pairs checked."""
        rows, cols = np.nonzero(self.basic_mask)
        for p, q in zip(rows.tolist(), cols.tolist()):
            if self._products[p][q] not in self.pos:
                raise VerificationError(f"basic product of {self.ids[p]} and {self.ids[q]} is not idempotent")
        return len(rows)


@dataclass(frozen=True)
class ESquare:
    """(e, f, g, h) = (e_ij, e_il, e_kl, e_kj): e R f L g R h L e."""

    rows: Tuple[int, int]
    cols: Tuple[int, int]
    e: int
    f: int
    g: int
    h: int


@dataclass(frozen=True)
class SingularWitness:
    k: int
    orientation: str


@dataclass
class SquareRecord:
    square: ESquare
    rect_band: bool
    criterion: bool
    witness: Optional[SingularWitness]
    up_down: bool
    constructed: Optional[int]
    all_witnesses: Optional[List[SingularWitness]] = None

    @property
    def singular(self) -> bool:
        return self.witness is not None

    def to_document(self) -> Dict[str, object]:
        doc: Dict[str, object] = {
            "rows": list(self.square.rows),
            "cols": list(self.square.cols),
            "rect_band": self.rect_band,
            "singular": self.singular,
            "witness_id": self.witness.k if self.witness else None,
            "orientation": self.witness.orientation if self.witness else None,
            "up_down_available": self.up_down,
            "constructed_witness_id": self.constructed,
        }
        if self.all_witnesses is not None:
            doc["all_witnesses"] = [{"id": w.k, "orientation": w.orientation} for w in self.all_witnesses]
        return doc


@dataclass
class SquareReport:
    records: List[SquareRecord] = field(default_factory=list)

    @property
    def total(self) -> int:
        return len(self.records)

    @property
    def rect_band(self) -> int:
        return sum(1 for r in self.records if r.rect_band)

    @property
    def singular(self) -> int:
        return sum(1 for r in self.records if r.singular)

    @property
    def up_down(self) -> int:
        return sum(1 for r in self.records if r.up_down)

    def counts(self) -> Dict[str, int]:
        return {"squares": self.total, "rect_band": self.rect_band, "singular": self.singular, "up_down": self.up_down}

    def to_document(self) -> Dict[str, object]:
        return {"counts": self.counts(), "squares": [r.to_document() for r in self.records]}


def enumerate_esquares(rees: ReesDecomposition) -> List[ESquare]:
    e = rees.e
    return [
        ESquare(rows=(i, k), cols=(j, l), e=e(i, j), f=e(i, l), g=e(k, l), h=e(k, j))
        for i in rees.row_ids
        for k in rees.row_ids
        for j in rees.col_ids
        for l in rees.col_ids
    ]


def is_rectangular_band(sq: ESquare, biorder: BiorderedSet) -> bool:
    """eg = f, after checking the four equalities agree and closure when they hold."""
    prod = biorder.product
    e, f, g, h = sq.e, sq.f, sq.g, sq.h
    equalities = (prod(e, g) == f, prod(g, e) == h, prod(f, h) == e, prod(h, f) == g)
    if len(set(equalities)) != 1:
        raise VerificationError(f"four rectangular-band equalities disagree on {sq}: {equalities}")
    if equalities[0]:
        members = {e, f, g, h}
        for x in members:
            for y in members:
                if prod(x, y) not in members:
                    raise VerificationError(f"square {sq} is not closed under multiplication")
                if prod(prod(x, y), x) != x:
                    raise VerificationError(f"square {sq} violates xyx = x")
    return equalities[0]


def _witness_masks(sq: ESquare, biorder: BiorderedSet) -> Tuple[np.ndarray, np.ndarray]:
    t, pos = biorder.products, biorder.pos
    pe, pf, ph = pos[sq.e], pos[sq.f], pos[sq.h]
    up_down = (t[pe, :] == sq.e) & (t[pf, :] == sq.f) & (t[:, pe] == sq.h) & (t[:, pf] == sq.g)
    left_right = (t[:, pe] == sq.e) & (t[:, ph] == sq.h) & (t[pe, :] == sq.f) & (t[ph, :] == sq.g)
    return up_down, left_right


def find_singularizer(sq: ESquare, biorder: BiorderedSet, orientation: Optional[str] = None) -> Optional[SingularWitness]:
    """First singularizing idempotent in canonical-id order, up-down preferred."""
    up_down, left_right = _witness_masks(sq, biorder)
    for name, mask in ((UP_DOWN, up_down), (LEFT_RIGHT, left_right)):
        if orientation is not None and name != orientation:
            continue
        hits = np.flatnonzero(mask)
        if len(hits):
            return SingularWitness(k=biorder.ids[int(hits[0])], orientation=name)
    return None


def all_singularizers(sq: ESquare, biorder: BiorderedSet) -> List[SingularWitness]:
    up_down, left_right = _witness_masks(sq, biorder)
    out = [SingularWitness(biorder.ids[p], UP_DOWN) for p in np.flatnonzero(up_down).tolist()]
    out += [SingularWitness(biorder.ids[p], LEFT_RIGHT) for p in np.flatnonzero(left_right).tolist()]
    return out


def construct_witness(sq: ESquare, monoid: MonoidTable) -> Endomorphism:
    """The explicit up-down witness for a rectangular-band square.

    With e, h mapping onto x_j and f, g onto x_l: k = g when j = l, and
    otherwise x_j -> x_j, x_l -> x_l, x_t -> g_t x_l.
    """
    j, l = sq.cols
    g = monoid.element(sq.g)
    if j == l:
        return g
    coeffs = []
    targets = []
    for t in range(1, monoid.n + 1):
        if t in (j, l):
            coeffs.append(0)
            targets.append(t)
        else:
            coeffs.append(g.coeffs[t - 1])
            targets.append(l)
    return Endomorphism(monoid.n, tuple(coeffs), tuple(targets), monoid.group)


def is_up_down_witness(k: int, sq: ESquare, biorder: BiorderedSet) -> bool:
    if k not in biorder:
        return False
    prod = biorder.product
    return prod(sq.e, k) == sq.e and prod(sq.f, k) == sq.f and prod(k, sq.e) == sq.h and prod(k, sq.f) == sq.g


def classify_squares(
    rees: ReesDecomposition,
    biorder: BiorderedSet,
    all_witnesses: Optional[bool] = None,
) -> SquareReport:
    """Classify every E-square of the rank-1 D-class.

    Raises VerificationError unless singular <=> rectangular band, every
    singular square has an up-down witness, the P-criterion agrees with the
    product test, and the constructive witness works on every rectangular band.
    """
    all_witnesses = Config.ALL_WITNESSES if all_witnesses is None else all_witnesses
    monoid = rees.monoid
    report = SquareReport()
    for sq in enumerate_esquares(rees):
        rect = is_rectangular_band(sq, biorder)
        (i, k), (j, l) = sq.rows, sq.cols
        criterion = rees.rect_band_criterion(i, k, j, l)
        witness = find_singularizer(sq, biorder)
        up_down = witness is not None and (
            witness.orientation == UP_DOWN or find_singularizer(sq, biorder, UP_DOWN) is not None
        )
        constructed = None
        if rect:
            k_id = monoid.id_of(construct_witness(sq, monoid))
            if not is_up_down_witness(k_id, sq, biorder):
                raise VerificationError(f"constructed witness {k_id} fails on rectangular band {sq}")
            constructed = k_id
        record = SquareRecord(
            square=sq,
            rect_band=rect,
            criterion=criterion,
            witness=witness,
            up_down=up_down,
            constructed=constructed,
            all_witnesses=all_singularizers(sq, biorder) if all_witnesses else None,
        )
        if criterion != rect:
            raise VerificationError(f"sandwich criterion disagrees with products on {sq}")
        if record.singular != rect:
            raise VerificationError(f"singular={record.singular} but rectangular band={rect} on {sq}")
        if record.singular and not up_down:
            raise VerificationError(f"singular square {sq} has no up-down witness")
        report.records.append(record)

    biorder.logger.info(f"Classified E-squares: {report.counts()}")
    return report
