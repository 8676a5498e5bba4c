"""
StegoParams: everything the receiver needs, as line-oriented `key = value` text.
"""
from typing import List

from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator, model_validator

from mesh_stego.core.errors import ParamsMismatchError
from mesh_stego.quant.domain import CHANNELS

PARAMS_VERSION = 1

_LIST_KEYS = {"changes": int, "alpha_split": float, "channel_order": str}


class StegoParams(BaseModel):
    model_config = ConfigDict(extra="forbid", frozen=True)

    version: int = PARAMS_VERSION
    k_star: int = Field(ge=0)
    h_star: int = Field(ge=1, le=62)
    changes: List[int]
    q: int = Field(ge=1)
    alpha: float = Field(ge=0.0)
    alpha_split: List[float]
    stc_h: int = Field(ge=6, le=15)
    stc_seed: int = Field(ge=0)
    msg_lens: List[List[int]]
    channel_order: List[str] = list(CHANNELS)
    n_vertices: int = Field(ge=0)

    @field_validator("channel_order")
    @classmethod
    def _channels(cls, v: List[str]) -> List[str]:
        if sorted(v) != sorted(CHANNELS):
            raise ValueError(f"channel_order must be a permutation of {CHANNELS}")
        return v

    @model_validator(mode="after")
    def _shapes(self) -> "StegoParams":
        if self.version != PARAMS_VERSION:
            raise ValueError(f"Unsupported params version {self.version}")
        if 0 not in self.changes:
            raise ValueError("changes must contain 0")
        if len(self.alpha_split) != 3:
            raise ValueError("alpha_split needs three entries")
        if len(self.msg_lens) != 3 or any(len(row) != self.q for row in self.msg_lens):
            raise ValueError(f"msg_lens must be 3 rows of {self.q} layer lengths")
        if any(x < 0 or x > self.n_vertices for row in self.msg_lens for x in row):
            raise ValueError("msg_lens entries must lie in [0, n_vertices]")
        return self

    @property
    def message_bits(self) -> int:
        return sum(sum(row) for row in self.msg_lens)

    def to_text(self) -> str:
        lines = []
        for key, value in self.model_dump().items():
            if key == "msg_lens":
                text = ";".join(",".join(str(x) for x in row) for row in value)
            elif isinstance(value, list):
                text = ",".join(repr(x) if isinstance(x, float) else str(x) for x in value)
            elif isinstance(value, float):
                text = repr(value)
            else:
                text = str(value)
            lines.append(f"{key} = {text}")
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str) -> "StegoParams":
        values = {}
        for number, raw in enumerate(text.splitlines(), start=1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            if "=" not in line:
                raise ParamsMismatchError(f"Params line {number} is not 'key = value'")
            key, value = (part.strip() for part in line.split("=", 1))
            if key not in cls.model_fields:
                raise ParamsMismatchError(f"Unknown params key '{key}' on line {number}")
            if key in values:
                raise ParamsMismatchError(f"Duplicate params key '{key}' on line {number}")
            try:
                if key == "msg_lens":
                    values[key] = [[int(x) for x in row.split(",") if x.strip()] for row in value.split(";")]
                elif key in _LIST_KEYS:
                    values[key] = [_LIST_KEYS[key](x.strip()) for x in value.split(",") if x.strip()]
                else:
                    values[key] = value
            except ValueError as e:
                raise ParamsMismatchError(f"Bad value for '{key}' on line {number}: {e}") from e
        try:
            return cls(**values)
        except ValidationError as e:
            raise ParamsMismatchError(f"Invalid params: {e}") from e
