from typing import Any, Dict, List, Literal, Optional, Tuple

from pydantic import BaseModel, Field, field_validator

from qtop.models.job import JonesMethod, LinkInput, Nr0Path, check_suite_name
from qtop.models.report import CheckReport


class JonesRequest(LinkInput):
    r: int = Field(..., ge=2)
    colors: List[str] = Field(..., description="Color n_i in 0..r−1 per component")
    method: JonesMethod = JonesMethod.RT


class AdoRequest(LinkInput):
    r: int = Field(..., ge=2)
    colors: List[str] = Field(default_factory=list, description="Color label per component, e.g. V0.5 or S1")
    alphas: List[str] = Field(default_factory=list, description="Sample V_α on a knot")


class InvariantRequest(LinkInput):
    r: int = Field(..., ge=2)
    invariant: Literal["nr0", "wrt", "nr"]
    f: Optional[int] = None
    omega: int = Field(0, ge=0, le=1)
    path: Nr0Path = Nr0Path.DIRECT
    alpha: Optional[str] = None
    surgery: Dict[int, str] = Field(default_factory=dict)
    cargo: Dict[int, str] = Field(default_factory=dict)


class VerifyRequest(BaseModel):
    r: int = Field(..., ge=2)
    suite: str = "all"
    knot: str = "trefoil"

    @field_validator("suite")
    @classmethod
    def validate_suite(cls, v: str) -> str:
        return check_suite_name(v)


class ValueResponse(BaseModel):
    value: Optional[Tuple[float, float]] = Field(None, description="Result as [re, im]")
    details: Dict[str, Any] = Field(default_factory=dict)


class VerifyResponse(BaseModel):
    passed: bool
    reports: List[CheckReport]
