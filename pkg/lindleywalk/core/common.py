from enum import Enum
from typing import NewType

PathCount = NewType('PathCount', int)

CENTERED_TOLERANCE = 1e-12
PROBABILITY_SUM_TOLERANCE = 1e-12
DEFAULT_DELTA = 0.1
DEFAULT_BLOCK_SIZE = 65536
SCHEMA_VERSION = 1


class MarginalKind(Enum):
    FINITE_SUPPORT_1D = 1
    GAUSSIAN = 2
    POWER_NEGATIVE_TAIL = 3


class DistributionKind(Enum):
    FINITE_SUPPORT_2D = 1
    BIVARIATE_GAUSSIAN = 2
    PRODUCT = 3


class CaseLabel(Enum):
    A_NEGATIVE_DRIFT = 1
    B_POSITIVE_DRIFT = 2
    C_CENTERED = 3
    D_MIXED = 4
    UNKNOWN = 5


class Verdict(Enum):
    TRANSIENT = 1
    POSITIVE_RECURRENT = 2
    NULL_RECURRENT = 3
    UNKNOWN = 4


class DriftSign(Enum):
    NEGATIVE = 1
    CENTERED = 2
    POSITIVE = 3
    UNDEFINED = 4


class ExitCoordinate(Enum):
    NONE = 0
    FIRST = 1
    SECOND = 2
    BOTH = 3


class Exactness(Enum):
    EXACT = 1
    NUMERICAL = 2


# Separates independent uses of one master seed
class StreamPurpose(Enum):
    EXIT_TIMES = 1
    LINDLEY_FROM_ORIGIN = 2
    LADDER_CHAINS = 3
    DUALITY_TRIALS = 4
    REFLECTION_PATHS = 5
    HARMONIC_FIRST_STEP = 6
    LYAPUNOV_DOMINANCE = 7
    OVERSHOOT_TABLE = 8
    SINGLE_PATH = 9
    HALF_LINE_COMPARISON = 10


class ExperimentId(Enum):
    CLASSIFY = 1
    TAIL = 2
    HARMONIC = 3
    LYAPUNOV = 4
    DUALITY = 5
    OCCUPATION = 6
    REFLECTION = 7
    DONEY = 8


class RunStatus(Enum):
    OK = 1
    FAIL = 2
    ERROR = 3


EXIT_STATUS_BY_RUN_STATUS = {
    RunStatus.OK: 0,
    RunStatus.FAIL: 1,
    RunStatus.ERROR: 2,
}


class LindleyWalkError(Exception):
    pass


class ConfigError(LindleyWalkError):
    def __init__(self, message: str, field_path: str = "", line: int = None, column: int = None):
        self.field_path = field_path
        self.line = line
        self.column = column
        location = ""
        if field_path:
            location += field_path + ": "
        if line is not None:
            location += "line " + str(line) + " column " + str(column) + ": "
        super().__init__(location + message)


class InvalidDistributionError(LindleyWalkError):
    pass


class DegenerateDistributionError(LindleyWalkError):
    pass


class RegimeMismatchError(LindleyWalkError):
    pass


class InsufficientSurvivorsError(LindleyWalkError):
    def __init__(self, message: str, required_paths: int):
        self.required_paths = required_paths
        super().__init__(message + " (roughly " + str(required_paths) + " paths needed)")


class StateSpaceBudgetError(LindleyWalkError):
    pass


class NotLatticeError(LindleyWalkError):
    pass


class SingularSystemError(LindleyWalkError):
    pass


class BisectionError(LindleyWalkError):
    pass
