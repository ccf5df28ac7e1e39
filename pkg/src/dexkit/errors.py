"""Exception types shared across the toolkit.

Each error corresponds to one contract violation; callers that need to
distinguish failure modes catch the specific class, everything else can
catch :class:`DexkitError`.
"""


class DexkitError(Exception):
    """Base class for all toolkit errors."""


# -- hand frame validation --------------------------------------------------

class WrongVertexCount(DexkitError):
    pass


class NonUnitQuaternion(DexkitError):
    pass


class NonFiniteValue(DexkitError):
    pass


# -- kinematics --------------------------------------------------------------

class LengthMismatch(DexkitError):
    pass


# -- retargeting -------------------------------------------------------------

class DegenerateHand(DexkitError):
    pass


class ZeroRobotLength(DexkitError):
    pass


# -- recorder ----------------------------------------------------------------

class NonMonotonicTime(DexkitError):
    pass


class ClosedWriter(DexkitError):
    pass


class MissingMeta(DexkitError):
    pass


class CorruptFrameLine(DexkitError):
    def __init__(self, line_number: int, reason: str):
        super().__init__(f"line {line_number}: {reason}")
        self.line_number = line_number
        self.reason = reason


# -- curation ----------------------------------------------------------------

class UndecodableImage(DexkitError):
    pass


class NoImages(DexkitError):
    pass


class TooFewPoints(DexkitError):
    pass


# -- sampler -----------------------------------------------------------------

class EmptyEpisode(DexkitError):
    pass


# -- teleop server -----------------------------------------------------------

class PortInUse(DexkitError):
    pass


class UnknownTag(DexkitError):
    pass


class MalformedMessage(DexkitError):
    pass
