"""Exception types shared across the package."""


class ArtifactError(Exception):
    pass


class PrecisionExhausted(ArtifactError):
    pass


class ZeroArgument(ArtifactError):
    pass


class NotSquarefree(ArtifactError):
    pass


class NoFactorization(ArtifactError):
    pass


class Singular(ArtifactError):
    pass


class RankDeficient(ArtifactError):
    pass


class WindowTooLarge(ArtifactError):
    pass


class WindowTooSmall(ArtifactError):
    def __init__(self, msg: str, count: int | None = None, window: int | None = None):
        super().__init__(msg)
        self.count = count
        self.window = window


class LevelTooSmall(ArtifactError):
    pass


class NotIntegral(ArtifactError):
    pass


class NoLift(ArtifactError):
    pass


class Degenerate(ArtifactError):
    pass


class NotStronglyCompact(ArtifactError):
    pass


class NonConvergence(ArtifactError):
    pass


class NotInDescentLocus(ArtifactError):
    pass


class NotStablyConjugate(ArtifactError):
    pass


class UnsupportedDegree(ArtifactError):
    pass


class PartitionMismatch(ArtifactError):
    pass


class NotElliptic(ArtifactError):
    pass
