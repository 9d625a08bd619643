"""Exception hierarchy; every error carries the CLI exit code of its outcome class"""


class HsolvError(Exception):
    exit_code = 1


# --- input problems (exit 2) -------------------------------------------------

class InputError(HsolvError, ValueError):
    exit_code = 2


class OperatorSyntaxError(InputError):
    """Parse failure at a character offset of the operator text"""

    def __init__(self, message: str, position: int, text: str = ''):
        self.position = position
        self.text = text
        super().__init__(f"{message} at position {position}")

    def pointer(self) -> str:
        """Two-line caret display of the failure position"""
        return f"{self.text}\n{' ' * self.position}^"


class ValidationError(InputError):
    pass


# --- non-generic operators (exit 3) ------------------------------------------

class NonGenericError(HsolvError):
    exit_code = 3


# --- numerical failures (exit 4) ---------------------------------------------

class NumericalFailure(HsolvError, ArithmeticError):
    exit_code = 4


class RootFinderError(NumericalFailure):
    pass


class RootDisagreementError(NumericalFailure):
    pass


class FrameError(NumericalFailure):
    pass


class RootCollisionError(NumericalFailure):
    pass


class OrderingError(NumericalFailure):
    pass


class IntegrationError(NumericalFailure):
    pass


class BoundViolationError(NumericalFailure):
    pass


class VanishingComponentError(NumericalFailure):
    pass


class WronskianCollapseError(NumericalFailure):
    pass


class QuadratureError(NumericalFailure):
    pass


class CoefficientMatchError(NumericalFailure):
    pass


class DecayClassificationError(NumericalFailure):
    pass
