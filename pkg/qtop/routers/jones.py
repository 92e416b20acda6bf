from fastapi import APIRouter, status

from qtop.models.computation import JonesRequest, ValueResponse
from qtop.models.job import Command, JobSpec
from qtop.routers.jobs import run_job

router = APIRouter(
    prefix="/api",
    tags=["jones"]
)


@router.post("/jones", response_model=ValueResponse, status_code=status.HTTP_200_OK)
def colored_jones(request: JonesRequest):
    """
    Colored Jones polynomial J_{n⃗}(L) at q = exp(iπ/r).

    The link is a braid closure given as braid text, a knot-table name or
    the JSON link form. method selects the R-matrix path, the
    Temperley–Lieb skein path, or both with a cross-check.

    Returns:
        ValueResponse with the value as [re, im]
    """
    spec = JobSpec(command=Command.JONES, **request.model_dump())
    result = run_job(spec, "compute colored Jones")
    return ValueResponse(value=result.pop("value"), details=result)
