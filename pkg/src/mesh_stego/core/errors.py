"""
Error taxonomy. Each class carries the process exit code the CLI returns for it.
"""
from typing import Optional


class MeshStegoError(Exception):
    exit_code = 1

    def __init__(self, message: str, exit_code: Optional[int] = None):
        super().__init__(message)
        self.message = message
        if exit_code is not None:
            self.exit_code = exit_code


class ConfigError(MeshStegoError):
    exit_code = 2


class CapacityError(MeshStegoError):
    exit_code = 3

    def __init__(self, message: str, achievable_bits: Optional[float] = None,
                 achievable_bpv: Optional[float] = None):
        super().__init__(message)
        self.achievable_bits = achievable_bits
        self.achievable_bpv = achievable_bpv


class QuantizationError(MeshStegoError):
    exit_code = 3


class StcError(MeshStegoError):
    exit_code = 3


class MeshParseError(MeshStegoError):
    exit_code = 4

    def __init__(self, message: str, line: Optional[int] = None, token: Optional[str] = None):
        where = f" (line {line}" + (f", token '{token}'" if token is not None else "") + ")" if line is not None else ""
        super().__init__(f"{message}{where}")
        self.line = line
        self.token = token


class ParamsMismatchError(MeshStegoError):
    exit_code = 5
