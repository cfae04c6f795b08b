from enum import Enum


class GroupKind(Enum):
    HEISENBERG = "heisenberg"
    CORANK1 = "corank1"
    FREE2 = "free2"
    COMPLEXIFIED_HEISENBERG = "complexified_heisenberg"

class Interpolation(Enum):
    MULTILINEAR = "multilinear"
    NEAREST = "nearest"
    ANALYTIC = "analytic"

class CurveFlavor(Enum):
    PLAIN = "plain"
    MINIMAL = "minimal"
    MAXIMAL = "maximal"
    MIN_FORWARD_MAX_BACKWARD = "min_forward_max_backward"

class FieldKind(Enum):
    CONSTANT = "constant"
    LINEAR_X2 = "linear_x2"
    ABS_Y_POWER = "abs_y_power"
    SQRT_BURGERS = "sqrt_burgers"
    LEVELSET = "levelset"
    CSV = "csv"

class DatumKind(Enum):
    CONSTANT = "constant"
    LEVELSET_GRADIENT = "levelset_gradient"
    CSV = "csv"
    EXTRACTED = "extracted"

class CheckName(Enum):
    HOLDER_GATE = "holder_gate"
    LIPSCHITZ = "lipschitz"
    RESIDUAL = "residual"
    LAGRANGIAN = "lagrangian"
    MOLLIFICATION = "mollification"

class CheckStatus(Enum):
    PASS = "PASS"
    FAIL = "FAIL"
    SKIPPED = "SKIPPED"
    ERROR = "ERROR"

class Verdict(Enum):
    EQUIVALENT_HOLD = "EQUIVALENT_HOLD"
    EQUIVALENT_FAIL = "EQUIVALENT_FAIL"
    DATUM_MISMATCH = "DATUM_MISMATCH"
    COUNTEREXAMPLE = "COUNTEREXAMPLE"
    HYPOTHESIS_FAILED = "HYPOTHESIS_FAILED"
    INCOMPLETE = "INCOMPLETE"
