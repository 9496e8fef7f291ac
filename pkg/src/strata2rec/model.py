"""Target varieties described by a cohomology basis and its pairing."""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Sequence

from . import linalg


class ModelError(ValueError):
    """Raised for an inconsistent target description."""


@dataclass(frozen=True)
class TargetModel:
    """Cohomology basis ``T_0..T_m`` with codegrees and the intersection pairing.

    Codegrees are in complex units.  Only the plane ships with correlator
    reduction rules; ``reducible`` records whether a model has them.
    """

    name: str
    labels: tuple[str, ...]
    codegrees: tuple[int, ...]
    pairing: tuple[tuple[Fraction, ...], ...]
    first_chern_degree: int
    dimension: int
    reducible: bool = False
    _inverse: tuple[tuple[Fraction, ...], ...] = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        n = len(self.labels)
        if len(self.codegrees) != n or len(self.pairing) != n or any(len(r) != n for r in self.pairing):
            raise ModelError("basis, codegrees and pairing sizes disagree")
        pairing = tuple(tuple(Fraction(x) for x in row) for row in self.pairing)
        object.__setattr__(self, "pairing", pairing)
        if any(pairing[i][j] != pairing[j][i] for i in range(n) for j in range(n)):
            raise ModelError("pairing is not symmetric")
        try:
            inv = linalg.inverse(pairing)
        except ZeroDivisionError:
            raise ModelError("pairing is singular") from None
        object.__setattr__(self, "_inverse", tuple(tuple(r) for r in inv))

    @property
    def size(self) -> int:
        return len(self.labels)

    def pairing_inverse(self) -> tuple[tuple[Fraction, ...], ...]:
        """The matrix ``g^{ij}``; ``sum g^{ij} T_i x T_j`` is the diagonal class."""
        return self._inverse

    def virtual_dimension(self, genus: int, markings: int, degree: int) -> int:
        """Complex virtual dimension of the space of genus ``genus`` stable maps."""
        return self.first_chern_degree * degree + (self.dimension - 3) * (1 - genus) + markings

    @classmethod
    def from_dict(cls, doc: dict) -> "TargetModel":
        try:
            return cls(
                name=doc.get("name", "custom"),
                labels=tuple(doc["labels"]),
                codegrees=tuple(int(c) for c in doc["codegrees"]),
                pairing=tuple(tuple(Fraction(str(x)) for x in row) for row in doc["pairing"]),
                first_chern_degree=int(doc["first_chern_degree"]),
                dimension=int(doc["dimension"]),
                reducible=bool(doc.get("reducible", False)),
            )
        except KeyError as exc:
            raise ModelError(f"missing field {exc.args[0]!r}") from None

    @classmethod
    def from_json(cls, path: str | Path) -> "TargetModel":
        return cls.loads(Path(path).read_text())

    @classmethod
    def loads(cls, text: str) -> "TargetModel":
        try:
            doc = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ModelError(f"invalid model JSON: {exc}") from None
        return cls.from_dict(doc)

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "labels": list(self.labels),
            "codegrees": list(self.codegrees),
            "pairing": [[str(x) for x in row] for row in self.pairing],
            "first_chern_degree": self.first_chern_degree,
            "dimension": self.dimension,
            "reducible": self.reducible,
        }


def _antidiagonal(n: int) -> Sequence[Sequence[int]]:
    return [[int(i + j == n - 1) for j in range(n)] for i in range(n)]


PLANE = TargetModel(
    name="P2",
    labels=("T0", "T1", "T2"),
    codegrees=(0, 1, 2),
    pairing=tuple(tuple(Fraction(x) for x in row) for row in _antidiagonal(3)),
    first_chern_degree=3,
    dimension=2,
    reducible=True,
)
