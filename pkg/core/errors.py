from typing import Any, Dict

# Process exit statuses shared by every management command
EXIT_OK = 0
EXIT_VIOLATION = 1
EXIT_INVALID_INPUT = 2
EXIT_SEARCH_FAILURE = 3


class PatchtowerError(Exception):
    """
    Root of every error the engine raises on purpose.
    Carries the exit status a command should end with and optional details
    (e.g. the partial report gathered before a violation was found).
    """
    exit_code = EXIT_INVALID_INPUT

    def __init__(self, message: str = "", **details: Any):
        super().__init__(message or self.__class__.__name__)
        self.message = message or self.__class__.__name__
        self.details = details

    def to_dict(self) -> Dict[str, Any]:
        """
        Returns the structured error object written by the commands.
        """
        return {
            "error": self.__class__.__name__,
            "message": self.message,
            "exit_code": self.exit_code,
            "details": self.details,
        }


#-------- Invalid input (exit 2) --------

class InvalidInput(PatchtowerError):
    exit_code = EXIT_INVALID_INPUT

class NonPrime(InvalidInput):
    pass

class InvalidParameter(InvalidInput):
    pass

class InvalidParams(InvalidInput):
    pass

class SpecMismatch(InvalidInput):
    pass

class ShapeMismatch(InvalidInput):
    pass

class NotAComplex(InvalidInput):
    pass

class NotAReduction(InvalidInput):
    pass

class UnsupportedRing(InvalidInput):
    pass

class NotHomogeneous(InvalidInput):
    pass

class NotMinimalInput(InvalidInput):
    pass

class MalformedInput(InvalidInput):
    pass

class InsufficientTower(InvalidInput):
    pass


#-------- Arithmetic (exit 2) --------

class ArithmeticFailure(PatchtowerError):
    exit_code = EXIT_INVALID_INPUT

class NotAUnit(ArithmeticFailure):
    pass

class NoSolution(ArithmeticFailure):
    pass


#-------- Mathematical violations (exit 1) --------

class MathematicalViolation(PatchtowerError):
    exit_code = EXIT_VIOLATION

class HypothesisViolation(MathematicalViolation):
    """
    A patching tower does not satisfy one of the patching hypotheses.
    `hypothesis` names which one (i, ii or iii).
    """
    hypothesis = ""

class TauNotConstant(HypothesisViolation):
    hypothesis = "i"

class TauOutOfRange(HypothesisViolation):
    hypothesis = "i"

class AugmentationNotKilled(HypothesisViolation):
    hypothesis = "ii"

class ActionMismatch(HypothesisViolation):
    hypothesis = "ii"

class BaseMismatch(HypothesisViolation):
    hypothesis = "iii"

class HeightAmplitudeViolated(MathematicalViolation):
    pass

class ConcentrationFailed(MathematicalViolation):
    pass

class SurjectionNotIso(MathematicalViolation):
    pass


#-------- Search failure (exit 3) --------

class SearchFailure(PatchtowerError):
    exit_code = EXIT_SEARCH_FAILURE

class NoCompatibleChain(SearchFailure):
    pass


#-------- Internal --------

class ComputationError(PatchtowerError):
    exit_code = EXIT_INVALID_INPUT
