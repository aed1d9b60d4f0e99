"""Exception hierarchy shared by every module.

The CLI maps these onto exit codes, so each class carries the code it
should produce.
"""


class AdviceLabError(Exception):
    exit_code = 1


class InputError(AdviceLabError, ValueError):
    """A parameter lies outside the domain of the operation."""

    exit_code = 2


class ParseError(InputError):
    def __init__(self, message, line=None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line


class DecodeError(InputError):
    def __init__(self, message, position):
        super().__init__(f"{message} (bit position {position})")
        self.position = position


class ProtocolError(AdviceLabError):
    """An online algorithm broke the rules of the game it was playing."""

    exit_code = 2


class MisconfiguredProperty(AdviceLabError):
    exit_code = 2


class SoundnessError(AdviceLabError):
    """A construction claim failed; usually a broken or unverified certificate."""

    exit_code = 3


class VerificationError(SoundnessError):
    pass


class ResourceError(AdviceLabError):
    exit_code = 4
