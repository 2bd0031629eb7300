"""
Exceptions shared by the library and the command line.

Every error carries a message, an optional payload and the process exit code
the CLI should use when it is not caught earlier:

- 0: all assertions met
- 1: usage or input error
- 2: a numeric target was missed
"""

from __future__ import annotations


class InvalidUsage(ValueError):
    exit_code = 1
    kind = "Bad input"

    def __init__(self, message, exit_code=None, payload=None):
        super().__init__(message)
        self.message = message
        if exit_code is not None:
            self.exit_code = exit_code
        self.payload = payload

    def to_dict(self):
        rv = dict(self.payload or ())
        rv["error"] = self.kind
        rv["message"] = self.message
        return rv


class PrecisionLoss(InvalidUsage):
    kind = "Precision loss"


class SolverError(InvalidUsage):
    kind = "Solver error"


class CertificationError(InvalidUsage):
    exit_code = 2
    kind = "Certification failed"


class TargetMissed(InvalidUsage):
    exit_code = 2
    kind = "Target missed"
