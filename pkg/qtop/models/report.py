from typing import Any, Dict, List, Optional, Sequence, Tuple

from pydantic import BaseModel, ConfigDict, Field


def complex_pair(value: complex) -> Tuple[float, float]:
    value = complex(value)
    return (value.real, value.imag)


class Witness(BaseModel):
    input: str = Field(..., description="What was compared")
    lhs: Tuple[float, float] = Field(..., description="Computed value as [re, im]")
    rhs: Tuple[float, float] = Field(..., description="Reference value as [re, im]")
    error: float = Field(..., description="Deviation used for the pass decision")


class CheckReport(BaseModel):
    model_config = ConfigDict(populate_by_name=True)

    name: str
    parameters: Dict[str, Any] = Field(default_factory=dict)
    max_abs_error: float = 0.0
    tolerance: float
    passed: bool = Field(..., alias="pass")
    skipped: bool = False
    witnesses: List[Witness] = Field(default_factory=list)
    notes: List[str] = Field(default_factory=list)

    @classmethod
    def build(
        cls,
        name: str,
        parameters: Dict[str, Any],
        comparisons: Sequence[Tuple[str, complex, complex]],
        tolerance: float,
        relative: bool = False,
        notes: Optional[List[str]] = None,
    ) -> "CheckReport":
        """
        Collects (input, lhs, rhs) comparisons; with relative=True each
        deviation is divided by max(1, |rhs|).
        """
        witnesses = []
        for label, lhs, rhs in comparisons:
            error = abs(complex(lhs) - complex(rhs))
            if relative:
                error /= max(1.0, abs(complex(rhs)))
            witnesses.append(Witness(input=label, lhs=complex_pair(lhs), rhs=complex_pair(rhs), error=error))
        worst = max((w.error for w in witnesses), default=0.0)
        return cls(
            name=name,
            parameters=parameters,
            max_abs_error=worst,
            tolerance=tolerance,
            passed=worst <= tolerance,
            witnesses=witnesses,
            notes=notes or [],
        )

    @classmethod
    def skip(cls, name: str, parameters: Dict[str, Any], reason: str, tolerance: float = 0.0) -> "CheckReport":
        return cls(name=name, parameters=parameters, tolerance=tolerance, passed=True, skipped=True, notes=[reason])

    @property
    def worst(self) -> Optional[Witness]:
        if not self.witnesses:
            return None
        return max(self.witnesses, key=lambda w: w.error)
