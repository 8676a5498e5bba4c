"""
Structured command reports. `--json` prints `model_dump_json()` of one of
these; `parse_report` reads it back.
"""
from typing import Annotated, Dict, List, Literal, Optional, Union

from pydantic import BaseModel, Field, TypeAdapter


class ChannelSummary(BaseModel):
    channel: str
    lam: float
    entropy_nats: float
    target_nats: float
    expected_distortion: float
    capacity_bits: List[int]
    msg_lens: List[int] = Field(default_factory=list)
    change_counts: Dict[str, int] = Field(default_factory=dict)


class EmbedReport(BaseModel):
    command: Literal["embed"] = "embed"
    cover: str
    stego: str
    params: str
    profile: str
    n_vertices: int
    message_bits: int
    alpha: float
    changes: List[int]
    q: int
    k_star: int
    h_star: int
    capacity_bits: int
    expected_distortion: float
    elapsed_seconds: float
    channels: List[ChannelSummary]


class ExtractReport(BaseModel):
    command: Literal["extract"] = "extract"
    stego: str
    params: str
    out: Optional[str] = None
    message_bits: int
    message_bytes: int
    elapsed_seconds: float


class CostmapReport(BaseModel):
    command: Literal["costmap"] = "costmap"
    mesh: str
    out: str
    profile: str
    changes: List[int]
    rows: int
    elapsed_seconds: float


class CapacityChannel(BaseModel):
    channel: str
    alpha: float
    target_nats: float
    feasible: bool
    lam: Optional[float] = None
    entropy_nats: Optional[float] = None
    capacity_bits: List[int] = Field(default_factory=list)


class CapacityReport(BaseModel):
    command: Literal["capacity"] = "capacity"
    mesh: str
    n_vertices: int
    changes: List[int]
    q: int
    max_entropy_bpv: float
    max_alpha: float
    alpha: Optional[float] = None
    profile: Optional[str] = None
    capacity_bits: Optional[int] = None
    channels: List[CapacityChannel] = Field(default_factory=list)


class StatsReport(BaseModel):
    command: Literal["stats"] = "stats"
    cover: str
    stego: str
    n_vertices: int
    changed_vertices: int
    max_displacement: float
    mean_displacement: float
    max_rmse: float
    mean_rmse: float
    hausdorff: float
    csv: Optional[str] = None


class BenchRow(BaseModel):
    sub_feature: str
    ofpd_vertices: int
    ofpd_seconds: float
    ofpd_extrapolated_seconds: float
    ifpd_seconds: float
    speedup: float
    max_abs_diff: float


class BenchReport(BaseModel):
    command: Literal["bench"] = "bench"
    mesh: str
    n_vertices: int
    changes: List[int]
    k_star: int
    rows: List[BenchRow]


Report = Annotated[
    Union[EmbedReport, ExtractReport, CostmapReport, CapacityReport, StatsReport, BenchReport],
    Field(discriminator="command"),
]

_report_adapter = TypeAdapter(Report)


def parse_report(text: str):
    """Validate a `--json` document back into its report model."""
    return _report_adapter.validate_json(text)
