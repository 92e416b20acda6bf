from fastapi import APIRouter, status

from qtop.models.computation import InvariantRequest, ValueResponse
from qtop.models.job import Command, JobSpec
from qtop.routers.jobs import run_job

router = APIRouter(
    prefix="/api",
    tags=["invariants"]
)


@router.post("/invariant", response_model=ValueResponse, status_code=status.HTTP_200_OK)
def manifold_invariant(request: InvariantRequest):
    """
    3-manifold invariants from a surgery presentation.

    invariant is one of nr0 (knot surgery, needs f and ω), wrt or nr.
    For wrt and nr either give f and ω for knot surgery, or the per-component
    surgery classes and cargo colors of a general link.
    """
    payload = request.model_dump()
    command = Command(payload.pop("invariant"))
    spec = JobSpec(command=command, **payload)
    result = run_job(spec, f"compute {command.value}")
    return ValueResponse(value=result.pop("value"), details=result)
