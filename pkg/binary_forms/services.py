"""
Genus partitions of reduced even binary lattices and the search for
same-genus, non-isometric pairs that represent neither 2 nor -2.
"""

import logging
from dataclasses import dataclass
from typing import Any, Iterable

from django.conf import settings

from lattices.discriminant import discriminant_group
from lattices.genus import stable_equivalence_check
from lattices.isometry import is_isometric_definite

from .reduction import BinaryEvenLattice, enumerate_even, represents

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class Genus:
    genus_id: int
    members: tuple[BinaryEvenLattice, ...]
    fingerprint: tuple[tuple[int, Any], ...]

    def to_payload(self) -> dict[str, Any]:
        return {
            "genus_id": self.genus_id,
            "members": [str(m) for m in self.members],
            "fingerprint": [[order, value] for order, value in self.fingerprint],
        }


@dataclass(frozen=True)
class MazurPair:
    det: int
    first: BinaryEvenLattice
    second: BinaryEvenLattice

    def to_payload(self) -> dict[str, Any]:
        return {"det": self.det, "A": str(self.first), "B": str(self.second)}


class GenusService:
    """Genus bookkeeping for even binary lattices of a fixed sign."""

    def __init__(self, sign: int = 1, budget: int | None = None):
        self.sign = sign
        self.budget = budget if budget is not None else settings.K3EQ_SEARCH_BUDGET
        self._validate_settings()

    def _validate_settings(self) -> None:
        if self.sign not in (1, -1):
            raise ValueError("sign must be +1 or -1")
        if self.budget <= 0:
            raise ValueError("search budget must be positive")

    def partition(self, det: int) -> list[Genus]:
        forms = enumerate_even(det, self.sign)
        classes: list[list[BinaryEvenLattice]] = []
        for form in forms:
            for members in classes:
                if stable_equivalence_check(members[0].lattice, form.lattice):
                    members.append(form)
                    break
            else:
                classes.append([form])
        genera = [
            Genus(index, tuple(members), discriminant_group(members[0].lattice).fingerprint())
            for index, members in enumerate(classes, start=1)
        ]
        logger.debug(f"det {det}: {len(forms)} forms in {len(genera)} genera")
        return genera

    def isometry_classes(self, det: int) -> list[BinaryEvenLattice]:
        """One representative per isometry class (proper and improper classes merged)."""
        representatives: list[BinaryEvenLattice] = []
        for form in enumerate_even(det, self.sign):
            if not any(
                is_isometric_definite(rep.lattice, form.lattice, self.budget).require_decided()
                for rep in representatives
            ):
                representatives.append(form)
        return representatives

    def mazur_pairs(self, dets: Iterable[int]) -> list[MazurPair]:
        """
        Pairs (A, B) of the same genus that are not isometric and represent
        neither 2 nor -2. Every emitted pair is re-verified.
        """
        pairs: list[MazurPair] = []
        for det in dets:
            if det <= 0 or det % 4 in (1, 2):
                continue
            candidates = [
                form
                for form in self.isometry_classes(det)
                if not represents(form, 2) and not represents(form, -2)
            ]
            for i, first in enumerate(candidates):
                for second in candidates[i + 1 :]:
                    if not stable_equivalence_check(first.lattice, second.lattice):
                        continue
                    verdict = is_isometric_definite(first.lattice, second.lattice, self.budget)
                    if verdict.require_decided():
                        continue
                    pairs.append(MazurPair(det, first, second))
                    logger.info(f"✅ det {det}: {first} and {second} share a genus")
        return pairs


def genus_partition(det: int, sign: int = 1) -> list[Genus]:
    return GenusService(sign).partition(det)


def mazur_search(dets: Iterable[int], sign: int = -1) -> list[MazurPair]:
    return GenusService(sign).mazur_pairs(dets)


def genus_lookup(genera: list[Genus]) -> dict[BinaryEvenLattice, int]:
    return {member: genus.genus_id for genus in genera for member in genus.members}
