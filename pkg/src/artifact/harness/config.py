from __future__ import annotations

from dataclasses import asdict, dataclass, field

from ..endoscopy import EndoDatum
from ..padic import PrecisionContext

SUITES = ("fl", "fl_lie", "cayley", "tjd", "descent", "lattice", "oracle")
PROPERTY_SUITES = ("cayley", "tjd", "lattice", "oracle")


@dataclass
class VerifyConfig:
    p: int = 3
    N: int = 12
    n: int = 2
    datum: EndoDatum = field(default_factory=lambda: EndoDatum(1, 1))
    trials: int = 50
    seed: int = 0
    window: int | None = None
    suites: tuple[str, ...] = ("fl",)
    max_retries: int = 100

    def validate(self) -> VerifyConfig:
        PrecisionContext(self.p, self.N)  # rejects even or composite p
        bad = set(self.suites) - set(SUITES)
        if bad:
            raise ValueError(f"unknown suites: {sorted(bad)}")
        fl = {"fl", "fl_lie", "descent"} & set(self.suites)
        if fl and self.n > 2:
            raise ValueError("fundamental lemma suites need n <= 2")
        if self.n > 3:
            raise ValueError("property suites need n <= 3")
        if fl and self.datum.n != self.n:
            raise ValueError(f"datum {self.datum.a},{self.datum.b} does not partition n = {self.n}")
        for lab in (self.datum.alpha, self.datum.beta):
            if lab not in ("split", "nonsplit"):
                raise ValueError(f"bad form label {lab!r}")
        if fl and _parity(self.datum.alpha) != _parity(self.datum.beta):
            # the n-dimensional forms are split, so the two endoscopic parities must agree
            raise ValueError("datum has no matching pairs: alpha and beta differ in class")
        if self.trials < 0:
            raise ValueError("trials must be non-negative")
        return self

    def ctx(self) -> PrecisionContext:
        return PrecisionContext(self.p, self.N)

    def to_json(self) -> dict:
        d = asdict(self)
        d["datum"] = self.datum.to_json()
        d["suites"] = list(self.suites)
        return d

    @classmethod
    def from_json(cls, d: dict) -> VerifyConfig:
        d = dict(d)
        d["datum"] = EndoDatum.from_json(d["datum"])
        d["suites"] = tuple(d["suites"])
        return cls(**d)


def _parity(label: str) -> int:
    return 1 if label == "nonsplit" else 0
