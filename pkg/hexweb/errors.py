import logging
from typing import Dict, Type

logger = logging.getLogger(__name__)


class HexwebError(Exception):
    """Base class for every domain error raised by hexweb"""

    code = "hexweb_error"

    def __init__(self, message: str = ""):
        super().__init__(message or self.code)
        self.message = message or self.code

    def to_dict(self) -> Dict[str, str]:
        return {"error": self.code, "message": self.message}


# Families
class ValidationError(HexwebError):
    code = "validation_error"


class MoveError(HexwebError):
    code = "move_error"


class GeometryError(HexwebError):
    code = "geometry_error"


class BudgetError(HexwebError):
    code = "budget_error"


class ConfigError(HexwebError):
    code = "config_error"


class VerificationFailed(HexwebError):
    code = "verification_failed"


# Map validation
class EmptyMulticurve(ValidationError):
    code = "empty_multicurve"


class ArcCountMismatch(ValidationError):
    code = "arc_count_mismatch"


class NonAlternatingSlots(ValidationError):
    code = "non_alternating_slots"


class SignatureMismatch(ValidationError):
    code = "signature_mismatch"


class DisconnectedMap(ValidationError):
    code = "disconnected_map"


class InvalidGluing(ValidationError):
    code = "invalid_gluing"


class InconsistentCurves(ValidationError):
    code = "inconsistent_curves"


class InvalidCurve(ValidationError):
    code = "invalid_curve"


class InvalidPants(ValidationError):
    code = "invalid_pants"


# Moves
class UnknownArc(MoveError):
    code = "unknown_arc"


class UnknownCurve(MoveError):
    code = "unknown_curve"


class SelfAdjacentArc(MoveError):
    code = "self_adjacent_arc"


class IncompatibleCurve(MoveError):
    code = "incompatible_curve"


class PeripheralCurve(MoveError):
    code = "peripheral_curve"


class LastCurve(MoveError):
    code = "last_curve"


class NotRemovable(MoveError):
    code = "not_removable"


class NotAdjacent(MoveError):
    code = "not_adjacent"


# Geometry
class NonPositiveSide(GeometryError):
    code = "non_positive_side"


class EllipticOrParabolicHolonomy(GeometryError):
    code = "elliptic_or_parabolic_holonomy"


class NotCrossing(GeometryError):
    code = "not_crossing"


class NoSplitArcs(GeometryError):
    code = "no_split_arcs"


class DegenerateGeometry(GeometryError):
    code = "degenerate_geometry"


class InvalidConfig(ConfigError):
    code = "invalid_config"


# Budgets
class MemoryBudgetExceeded(BudgetError):
    code = "memory_budget_exceeded"


class NotConnectedWithinBudget(BudgetError):
    code = "not_connected_within_budget"


class ComplexityLimitExceeded(BudgetError):
    code = "complexity_limit_exceeded"


# Exit codes of the command line, by family
EXIT_OK = 0
EXIT_VERIFICATION_FAILED = 1
EXIT_CONFIG_ERROR = 2
EXIT_BUDGET_EXCEEDED = 3

exit_code_mapping: Dict[Type[HexwebError], int] = {
    VerificationFailed: EXIT_VERIFICATION_FAILED,
    BudgetError: EXIT_BUDGET_EXCEEDED,
    ConfigError: EXIT_CONFIG_ERROR,
    ValidationError: EXIT_CONFIG_ERROR,
    MoveError: EXIT_CONFIG_ERROR,
    GeometryError: EXIT_CONFIG_ERROR,
}


def exit_code_for(error: BaseException) -> int:
    """Exit code of the command line for an error"""
    for error_class, exit_code in exit_code_mapping.items():
        if isinstance(error, error_class):
            return exit_code
    logger.error(f"Unmapped error {type(error).__name__}: {error}")
    return EXIT_CONFIG_ERROR
