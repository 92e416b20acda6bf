from enum import Enum
from typing import Any, Dict, List, Optional

from pydantic import BaseModel, Field, field_validator

SUITE_NAMES = (
    "axioms",
    "deltas",
    "jones_paths",
    "residue",
    "symmetry",
    "periodicity",
    "knot_theorem",
    "vanishing",
    "nr0_paths",
    "well_defined",
)


def check_suite_name(name: str) -> str:
    if name != "all" and name not in SUITE_NAMES:
        raise ValueError(f"unknown suite {name!r}; available: all, {', '.join(SUITE_NAMES)}")
    return name


class Command(str, Enum):
    JONES = "jones"
    ADO = "ado"
    NR0 = "nr0"
    WRT = "wrt"
    NR = "nr"
    VERIFY = "verify"


class JonesMethod(str, Enum):
    RT = "rt"
    SKEIN = "skein"
    BOTH = "both"


class Nr0Path(str, Enum):
    DIRECT = "direct"
    CABLED = "cabled"
    LIMIT = "limit"


class LinkInput(BaseModel):
    """One of braid text, knot-table name or the JSON link form."""

    braid: Optional[str] = Field(None, description="Braid text such as '2: 1 1 1'")
    knot: Optional[str] = Field(None, description="Name from the built-in knot table")
    link: Optional[Dict[str, Any]] = Field(
        None, description="JSON link: strands, word, colors, framings, cut"
    )
    framings: List[int] = Field(default_factory=list, description="Declared framing per component")


class JobSpec(LinkInput):
    """A single computation requested from the CLI or the HTTP API."""

    command: Command
    r: int = Field(..., ge=2, description="Root of unity parameter, q = exp(iπ/r)")

    colors: List[str] = Field(default_factory=list, description="Per-component colors")
    method: JonesMethod = JonesMethod.RT

    alphas: List[str] = Field(default_factory=list, description="Colors V_α for a knot, one value per sample")

    f: Optional[int] = Field(None, description="Surgery framing for knot surgery")
    omega: int = Field(0, ge=0, le=1, description="Class of the meridian for knot surgery")
    path: Nr0Path = Nr0Path.DIRECT
    alpha: Optional[str] = Field(None, description="Generic color for the cabled N⁰ path")

    surgery: Dict[int, str] = Field(default_factory=dict, description="Surgery component → meridian class")
    cargo: Dict[int, str] = Field(default_factory=dict, description="Cargo component → color label")

    suite: str = Field("all", description="Verification suite name or 'all'")
    output: Optional[str] = Field(None, description="Path for the JSON result")

    @field_validator("suite")
    @classmethod
    def validate_suite(cls, v: str) -> str:
        return check_suite_name(v)
