from fastapi import APIRouter, status

from qtop.models.computation import AdoRequest, ValueResponse
from qtop.models.job import Command, JobSpec
from qtop.routers.jobs import run_job

router = APIRouter(
    prefix="/api",
    tags=["ado"]
)


@router.post("/ado", response_model=ValueResponse, status_code=status.HTTP_200_OK)
def ado_invariant(request: AdoRequest):
    """
    Modified invariant F′ of a link with at least one typical color.

    Either give one color label per component (V0.5, S1, tau) or a list of
    alphas to sample F′(K_{V_α}) on a knot.
    """
    spec = JobSpec(command=Command.ADO, **request.model_dump())
    result = run_job(spec, "compute F′")
    return ValueResponse(value=result.pop("value", None), details=result)
