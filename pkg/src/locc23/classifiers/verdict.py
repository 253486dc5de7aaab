import enum
from dataclasses import dataclass, field

from ..protocol import ProtocolTree, count_rounds, verify_perfect_discrimination


class Status(str, enum.Enum):
    LPCC_DISTINGUISHABLE = "LPCC_DISTINGUISHABLE"
    LOCC_ONLY = "LOCC_ONLY"
    LOCC_INDISTINGUISHABLE = "LOCC_INDISTINGUISHABLE"
    UNDECIDED = "UNDECIDED"

    @property
    def distinguishable(self):
        return self in (Status.LPCC_DISTINGUISHABLE, Status.LOCC_ONLY)


class WitnessError(AssertionError):
    """A positive verdict was built with a protocol that does not verify."""


@dataclass
class Verdict:
    status: Status
    rule: str
    protocol: ProtocolTree = None
    condition: str = ""
    details: dict = field(default_factory=dict)

    @classmethod
    def positive(cls, status, protocol, states, rule, **details):
        rep = verify_perfect_discrimination(protocol, states)
        if not rep.perfect:
            raise WitnessError(f"witness for {status.value} fails: {rep.reason}")
        return cls(status, rule, protocol, details=details)

    @classmethod
    def negative(cls, rule, condition, status=Status.LOCC_INDISTINGUISHABLE, **details):
        return cls(status, rule, None, condition, details)

    @property
    def rounds(self):
        return None if self.protocol is None else count_rounds(self.protocol)
