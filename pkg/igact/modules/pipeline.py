import logging
from functools import cached_property
from typing import Optional

from ..config.config import RunConfig
from .biorder import BiorderedSet, SquareReport, classify_squares
from .group import FiniteGroup, parse_group_spec
from .logger import get_logger
from .maxsub import MaximalSubgroup
from .monoid import MonoidTable, enumerate_monoid
from .rees import ReesDecomposition, decompose_rank1
from .scripts import LemmaReplayer
from .words import RewriteEngine


class Pipeline:
    def __init__(
        self,
        config: RunConfig,
        group: Optional[FiniteGroup] = None,
        logger: Optional[logging.Logger] = None,
    ) -> None:
        self.config = config
        self.logger = get_logger(logger)
        if group is not None:
            self.__dict__["group"] = group

    @cached_property
    def group(self) -> FiniteGroup:
        return parse_group_spec(self.config.group, symmetric_cap=self.config.symmetric_cap)

    @property
    def n(self) -> int:
        return self.config.rank

    @cached_property
    def monoid(self) -> MonoidTable:
        return enumerate_monoid(self.group, self.n, cap=self.config.cap, logger=self.logger)

    @cached_property
    def rees(self) -> ReesDecomposition:
        return decompose_rank1(self.monoid, audit=False, logger=self.logger)

    @cached_property
    def biorder(self) -> BiorderedSet:
        return BiorderedSet(self.monoid, logger=self.logger)

    @cached_property
    def engine(self) -> RewriteEngine:
        return RewriteEngine(self.biorder, logger=self.logger)

    @cached_property
    def replayer(self) -> LemmaReplayer:
        return LemmaReplayer(self.engine, self.rees, max_states=self.config.max_states, logger=self.logger)

    @cached_property
    def subgroup(self) -> MaximalSubgroup:
        return MaximalSubgroup(self.rees, self.engine, self.replayer, logger=self.logger)

    def squares(self) -> SquareReport:
        return classify_squares(self.rees, self.biorder, all_witnesses=self.config.all_witnesses)
